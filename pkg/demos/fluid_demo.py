"""Perfect-fluid reading of Robertson-Walker and de Sitter curvature."""
from recurv.catalog import MetricSpec, build_metric, robertson_walker
from recurv.curvature import build_pack
from recurv.verify.fluid import fluid_extract

cases = [
    ("radiation, q = sqrt(t)", robertson_walker("sqrt(t)", 0)),
    ("dust, q = t^(2/3)", robertson_walker("t^(2/3)", 0)),
    ("de Sitter, H = 1", MetricSpec("de_sitter_flat", 4, {"H": 1.0})),
]
for name, spec in cases:
    pack = build_pack(build_metric(spec), [1.2, 0.1, -0.2, 0.3], 2)
    s = fluid_extract(pack, [1.0, 0.0, 0.0, 0.0])
    print(f"{name:24s} mu {s.mu:.6e}  p {s.p: .6e}  w {s.w: .12f}  isotropy {s.isotropy_residual:.1e}")
