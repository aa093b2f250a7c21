"""Curvature of a few catalog metrics, with the sign convention pinned by spheres."""
import numpy as np

from recurv.catalog import MetricSpec, build_metric
from recurv.curvature import build_pack
from recurv.tensors import g_double_form_array

for n in (2, 3, 4):
    pack = build_pack(build_metric(MetricSpec("sphere", n)), [1.0] * (n - 1) + [0.3], 2)
    print(f"unit S^{n}: scalar curvature {pack.scalar:.12f}  (n(n-1) = {n * (n - 1)})")

ds = build_pack(build_metric(MetricSpec("de_sitter_flat", 4, {"H": 1.0})), [0.4, 0.1, -0.2, 0.3], 3)
print("de Sitter: R =", round(ds.scalar, 12))
print("  |R_jklm + G_jklm| =", np.abs(ds.riemann_lower.components + g_double_form_array(ds.g)).max())
print("  |G_kl + 3 g_kl|   =", np.abs(ds.einstein.components + 3 * ds.g).max())

sch = build_pack(build_metric(MetricSpec("schwarzschild", 4, {"M": 1.0})), [0.0, 10.0, 1.0, 0.5], 2)
print("Schwarzschild r=10: max |Ricci| =", np.abs(sch.ricci.components).max(),
      " max |Weyl| =", np.abs(sch.weyl_lower.components).max())
