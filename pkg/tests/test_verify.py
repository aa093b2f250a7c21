import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recurv.catalog import MetricSpec, build_metric, perturbed_metric, robertson_walker, rw_type_specs, sample_points
from recurv.curvature import build_pack, pack_from_tensors
from recurv.tensors import MetricAtPoint, g_double_form_array
from recurv.verify import (
    DERIVED,
    RecurrenceFit,
    derived_identities,
    fit_recurrence,
    fit_recurrence_pack,
    fit_recurrence_tensors,
    psi_gradient_check,
    random_curvature_tensor,
    random_metric,
    recovery_error,
    recurrence_rhs,
)
from recurv.verify.concircular import chen_vector, concircular_coefficients, concircular_fit
from recurv.verify.fluid import TimelikeError, fluid_extract, normalize_timelike, quasi_einstein_fit
from recurv.verify.identities import identity_suite
from recurv.verify.qcc import NullCovectorError, qcc_riemann, synth_qcc


def synthetic(n, seed, beta, psi, A=None, qcc=False):
    rng = np.random.default_rng(seed)
    m = random_metric(n, rng)
    if A is None:
        A = rng.normal(size=n)
    if qcc:
        R = qcc_riemann(m, A, psi, rng.normal())
    else:
        R = random_curvature_tensor(n, rng)
    return m, R, np.asarray(A, float), recurrence_rhs(m.matrix, R, A, beta, psi)


# --- recurrence fitter -----------------------------------------------------------------


def test_recovers_prescribed_structure():
    m, R, A, nR = synthetic(4, 0, 0.7, -0.3)
    fit = fit_recurrence_tensors(m, R, nR)
    assert not fit.degenerate
    assert fit.residual < 1e-12
    assert recovery_error(fit, A, 0.7, -0.3) < 1e-8
    assert max(fit.parallelism_defect) < 1e-10


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.sampled_from([3, 4, 5]),
       beta=st.floats(-2, 2).filter(lambda b: abs(b) > 1e-2), psi=st.floats(-2, 2))
def test_recovery_property(seed, n, beta, psi):
    m, R, A, nR = synthetic(n, seed, beta, psi)
    fit = fit_recurrence_tensors(m, R, nR)
    if abs(fit.A_squared) < 1e-3 * float(A @ A):
        return  # nearly null A: beta and psi are ill-conditioned
    assert recovery_error(fit, A, beta, psi) < 1e-8


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scale_equivariance(lam):
    m, R, A, nR = synthetic(4, 3, 0.4, 1.1)
    base = fit_recurrence_tensors(m, R, nR)
    scaled = fit_recurrence_tensors(m, R, lam * nR)
    assert np.allclose(scaled.A, lam * base.A, rtol=1e-10, atol=1e-12)
    assert scaled.beta == pytest.approx(base.beta, rel=1e-10)
    assert scaled.psi == pytest.approx(base.psi, rel=1e-10)


def test_negative_orientation_is_kept():
    m, R, A, nR = synthetic(4, 4, 0.5, 0.2, A=[-1.0, 0.3, 0.2, -0.1])
    fit = fit_recurrence_tensors(m, R, nR)
    assert np.allclose(fit.A, A, rtol=1e-9)


def test_minkowski_is_degenerate():
    f = build_metric(MetricSpec("minkowski", 4))
    fit = fit_recurrence(f, [0.1, 0.2, 0.3, 0.4])
    assert fit.degenerate
    assert math.isnan(fit.beta) and math.isnan(fit.psi)
    assert fit.to_json()["beta"] is None


def test_constant_curvature_is_degenerate():
    f = build_metric(MetricSpec("de_sitter_flat", 4, {"H": 1.0}))
    assert fit_recurrence(f, [0.3, 0.1, 0.2, 0.0]).degenerate


def test_schwarzschild_does_not_fit():
    f = build_metric(MetricSpec("schwarzschild", 4, {"M": 1.0}))
    fit = fit_recurrence(f, [0.0, 5.0, 1.2, 0.3])
    assert fit.residual > 1e-3


def test_rw_fits_pointwise():
    for spec in (robertson_walker("sqrt(t)", 0), robertson_walker("t^2", 1), robertson_walker("e^t", -1)):
        f = build_metric(spec)
        p = sample_points(spec, 1, 0)[0]
        fit = fit_recurrence(f, p)
        assert not fit.degenerate and fit.residual < 1e-10


def test_random_curvature_tensor_has_riemann_symmetries():
    R = random_curvature_tensor(5, np.random.default_rng(1))
    assert np.allclose(R, -np.swapaxes(R, 0, 1))
    assert np.allclose(R, np.transpose(R, (2, 3, 0, 1)))
    assert np.abs(R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))).max() < 1e-12


# --- derived identities ---------------------------------------------------------------


@pytest.mark.parametrize("n", [4, 5])
def test_derived_identities_hold_on_recurrent_qcc_data(n):
    m, R, A, nR = synthetic(n, 10 + n, 0.6, -0.4, qcc=True)
    pack = pack_from_tensors(m, R, nR, order=3)
    fit = fit_recurrence_pack(pack)
    reports = derived_identities(pack, fit)
    assert [r.name for r in reports] == list(DERIVED)
    for r in reports:
        assert r.status == "pass", (r.name, r.residual)


def test_derived_identities_na_on_degenerate_fit():
    pack = build_pack(build_metric(MetricSpec("minkowski", 4)), [0.0] * 4, 3)
    fit = fit_recurrence_pack(pack)
    assert {r.status for r in derived_identities(pack, fit)} == {"n/a"}


def test_generic_tensor_fails_qcc_only_identities():
    m, R, A, nR = synthetic(4, 7, 0.6, -0.4)
    pack = pack_from_tensors(m, R, nR, order=3)
    reports = {r.name: r for r in derived_identities(pack, fit_recurrence_pack(pack))}
    assert reports["ricci_recurrence"].passed
    assert reports["scalar_recurrence"].passed
    assert not reports["weyl_A_annihilation"].passed


def test_psi_gradient_with_prescribed_fields():
    f = build_metric(MetricSpec("minkowski", 4))
    A, beta = np.array([0.0, 1.0, 0.0, 0.0]), 0.5

    def fitter(psi_of):
        def fit_at(_, p):
            return RecurrenceFit(A, beta * A, psi_of(p) * A, beta, psi_of(p), 0.0, (0.0, 0.0), False, 1.0)
        return fit_at

    good = fitter(lambda p: beta * p[1])
    bad = fitter(lambda p: 3.0 * p[1])
    p = np.array([0.1, 0.2, 0.3, 0.4])
    assert psi_gradient_check(f, p, good(f, p), fitter=good).passed
    assert not psi_gradient_check(f, p, bad(f, p), fitter=bad).passed


def test_psi_gradient_on_rw():
    spec = robertson_walker("t^2", 1)
    f = build_metric(spec)
    p = sample_points(spec, 1, 3)[0]
    assert psi_gradient_check(f, p, fit_recurrence(f, p)).passed


# --- quasi-constant curvature -------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 5])
def test_qcc_algebra(n):
    rng = np.random.default_rng(n)
    m = random_metric(n, rng)
    reports = synth_qcc(m, rng.normal(size=n), rng.normal(), rng.normal())
    assert reports and all(r.passed for r in reports), [(r.name, r.residual) for r in reports]
    assert ("qcc_weyl_vanishes" in {r.name for r in reports}) == (n >= 4)


def test_qcc_without_b_is_constant_curvature():
    n, psi = 4, 0.8
    m = random_metric(n, np.random.default_rng(2))
    R = qcc_riemann(m, [1.0, 0.5, 0, 0], psi, 0.0)
    assert np.allclose(R, psi * g_double_form_array(m.matrix), atol=1e-14)
    pack = pack_from_tensors(m, R)
    assert np.allclose(pack.ricci.components, -(n - 1) * psi * m.matrix, atol=1e-12)


def test_qcc_without_psi_has_only_the_b_part():
    m = MetricAtPoint.from_matrix(np.diag([-1.0, 1, 1, 1]), "lorentzian")
    pack = pack_from_tensors(m, qcc_riemann(m, [1.0, 0, 0, 0], 0.0, 2.0))
    # R_kl = a g + b u u with a = R/6 when psi = 0
    a, b, res = quasi_einstein_fit(pack, [1.0, 0, 0, 0])
    assert res < 1e-14
    assert b == pytest.approx(2.0)
    assert a == pytest.approx(pack.scalar / 6)


def test_qcc_null_covector():
    m = MetricAtPoint.from_matrix(np.diag([-1.0, 1, 1, 1]), "lorentzian")
    with pytest.raises(NullCovectorError):
        qcc_riemann(m, [1.0, 1.0, 0, 0], 0.1, 1.0)


# --- concircular fields -------------------------------------------------------------------


def test_position_field_in_euclidean_space():
    spec = MetricSpec("euclidean", 3)
    X, var, rho, ok = chen_vector(spec)
    fit = concircular_fit(build_metric(spec), X, [0.3, -0.1, 0.7], var)
    assert ok
    assert fit.chen_rho == pytest.approx(1.0, abs=1e-14)
    assert fit.chen_residual < 1e-14


def test_rw_time_field_is_concircular():
    for spec in rw_type_specs():
        f = build_metric(spec)
        X, var, rho, ok = chen_vector(spec)
        for p in sample_points(spec, 3, 6):
            fit = concircular_fit(f, X, p, var)
            assert fit.chen_residual < 1e-8, spec.label
            assert fit.chen_rho == pytest.approx(rho(p), rel=1e-8, abs=1e-12)


def test_rw_rho_depends_only_on_time():
    spec = robertson_walker("t^(2/3)", -1)
    f = build_metric(spec)
    X, var, _, _ = chen_vector(spec)
    rhos = [concircular_fit(f, X, [1.3, x, -x / 2, 0.1], var).chen_rho for x in (-0.4, 0.0, 0.3)]
    assert max(rhos) - min(rhos) < 1e-12


def test_sphere_gradient_field():
    spec = MetricSpec("sphere", 3, {"radius": 2.0})
    X, var, rho, ok = chen_vector(spec)
    p = [1.1, 0.6, 0.2]
    fit = concircular_fit(build_metric(spec), X, p, var)
    assert fit.chen_residual < 1e-12
    assert fit.chen_rho == pytest.approx(rho(p), rel=1e-12)


def test_schwarzschild_killing_field_is_not_concircular():
    spec = MetricSpec("schwarzschild", 4, {"M": 1.0})
    X, var, _, ok = chen_vector(spec)
    fit = concircular_fit(build_metric(spec), X, [0.0, 6.0, 1.0, 0.3], var)
    assert not ok
    assert fit.relative_residual > 1e-3


def test_concircular_coefficients_need_a_fit():
    pack = build_pack(build_metric(MetricSpec("minkowski", 4)), [0.0] * 4, 3)
    out = concircular_coefficients(pack, fit_recurrence_pack(pack))
    assert math.isnan(out["f"]) and math.isnan(out["h"])


# --- fluid ----------------------------------------------------------------------------------


def test_minkowski_has_no_matter():
    pack = build_pack(build_metric(MetricSpec("minkowski", 4)), [0.0] * 4, 2)
    state = fluid_extract(pack, [1.0, 0, 0, 0])
    assert state.mu == 0.0 and state.p == 0.0
    assert math.isnan(state.w)


def test_radiation_and_dust():
    for q, w in (("sqrt(t)", 1 / 3), ("t^(2/3)", 0.0)):
        spec = robertson_walker(q, 0)
        f = build_metric(spec)
        for p in sample_points(spec, 4, 12):
            state = fluid_extract(build_pack(f, p, 2), [1.0, 0, 0, 0])
            assert state.isotropy_residual < 1e-12
            assert state.eos_residual < 1e-12
            assert state.mu > 0
            assert state.p == pytest.approx(w * state.mu, abs=1e-9 * state.mu)


def test_de_sitter_is_vacuum_energy():
    f = build_metric(MetricSpec("de_sitter_flat", 4, {"H": 1.0}))
    state = fluid_extract(build_pack(f, [0.2, 0.0, 0.1, 0.0], 2), [1.0, 0, 0, 0])
    assert state.mu == pytest.approx(3 / (8 * math.pi), rel=1e-10)
    assert state.w == pytest.approx(-1.0, rel=1e-10)


def test_kappa_scales_matter_variables():
    f = build_metric(robertson_walker("sqrt(t)", 1))
    pack = build_pack(f, [1.2, 0.1, 0.0, 0.2], 2)
    one, two = fluid_extract(pack, [1.0, 0, 0, 0], 1.0), fluid_extract(pack, [1.0, 0, 0, 0], 2.0)
    assert one.mu == pytest.approx(2 * two.mu, rel=1e-14)


def test_velocity_must_be_timelike():
    pack = build_pack(build_metric(MetricSpec("minkowski", 4)), [0.0] * 4, 2)
    with pytest.raises(TimelikeError, match="spacelike"):
        fluid_extract(pack, [0.0, 1.0, 0, 0])
    with pytest.raises(TimelikeError, match="null"):
        normalize_timelike(pack, [1.0, 1.0, 0, 0])
    assert np.allclose(normalize_timelike(pack, [2.0, 0, 0, 0]), [1.0, 0, 0, 0])


# --- identity suite --------------------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_identity_suite_on_generic_metric(seed):
    f = perturbed_metric(4, seed)
    pack = build_pack(f, np.full(4, 0.1 * seed), 4)
    reports = identity_suite(pack)
    assert {r.name for r in reports} == {"second_bianchi", "weyl_bianchi", "lovelock", "weyl_traces"}
    assert all(r.passed for r in reports), [(r.name, r.residual) for r in reports]


def test_identity_suite_rejects_unknown_names():
    pack = build_pack(build_metric(MetricSpec("sphere", 2)), [1.0, 0.0], 2)
    with pytest.raises(ValueError):
        identity_suite(pack, ["nonsense"])
