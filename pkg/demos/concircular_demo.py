"""X = q(t) d_t on Robertson-Walker metrics satisfies nabla_k X_j = q'(t) g_kj."""
from recurv.catalog import MetricSpec, build_metric, rw_type_specs, sample_points, scale_factor_of
from recurv.verify.concircular import chen_vector, concircular_fit

for spec in rw_type_specs()[::3]:
    f = build_metric(spec)
    X, variance, _, _ = chen_vector(spec)
    p = sample_points(spec, 1, 0)[0]
    fit = concircular_fit(f, X, p, variance)
    q = scale_factor_of(spec)
    print(f"{spec.label:45s} rho {fit.chen_rho: .10f}  q'(t) {q.derivative(p[0]): .10f}  "
          f"residual {fit.chen_residual:.1e}")

spec = MetricSpec("schwarzschild", 4, {"M": 1.0})
X, variance, _, _ = chen_vector(spec)
fit = concircular_fit(build_metric(spec), X, [0.0, 6.0, 1.0, 0.3], variance)
print(f"Schwarzschild d_t: relative defect {fit.relative_residual:.3f} (not concircular)")
