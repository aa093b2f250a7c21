"""Bianchi, Weyl-Bianchi and Lovelock identities on a metric with no symmetry at all."""
import numpy as np

from recurv.catalog import perturbed_metric
from recurv.curvature import build_pack
from recurv.verify.identities import identity_suite

f = perturbed_metric(4, seed=42)
pack = build_pack(f, np.array([0.1, -0.3, 0.2, 0.5]), 4)
for r in identity_suite(pack):
    print(f"{r.name:15s} residual {r.residual:.2e}  tolerance {r.tolerance:.0e}  {r.status}")
