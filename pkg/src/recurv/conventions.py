"""Index and sign conventions, fixed once for the whole package.

Slots
-----
``Tensor.components`` is row-major over slots in the order of
``Tensor.variance``.  Curvature slot layouts:

* Christoffel ``gamma[k, i, j] = Gamma^k_{ij}``, variance (contra, co, co).
* Riemann ``riemann[j, k, l, m] = R_{jkl}^m``, variance (co, co, co, contra), with::

      R_{jkl}^m = d_k Gamma^m_{jl} - d_j Gamma^m_{kl}
                  + Gamma^m_{ks} Gamma^s_{jl} - Gamma^m_{js} Gamma^s_{kl}

* ``riemann_lower[j, k, l, m] = R_{jklm} = g_{mp} R_{jkl}^p`` (the last slot is lowered).
* Ricci ``R_{ij} = R_{imj}^m`` (contraction of slots 2 and 4), scalar ``R = g^{ij} R_{ij}``.
* Covariant derivatives put the derivative index first: ``nabla_riemann[i, j, k, l, m]
  = nabla_i R_{jklm}``.

With these choices the round unit sphere has positive Ricci and scalar
curvature, ``R = n(n-1)``.  A space of constant sectional curvature ``K``
has ``R_{jklm} = -K G_{jklm}`` where ``G_{jklm} = g_{mj} g_{kl} - g_{mk} g_{jl}``,
so ``R_{jklm} = psi G_{jklm}`` has Ricci ``-(n-1) psi g``.

Signatures
----------
Lorentzian means (-, +, ..., +) with the time coordinate first.

Residuals
---------
An identity ``lhs = rhs`` is scored as ``|lhs - rhs|_F / (1 + max |term|_F)``
over the participating tensors (see :func:`normalized_residual`).
"""
from __future__ import annotations

import numpy as np

CO = "co"
CONTRA = "contra"

RIEMANNIAN = "riemannian"
LORENTZIAN = "lorentzian"
SIGNATURES = (RIEMANNIAN, LORENTZIAN)


def normalized_residual(defect, *terms) -> float:
    """Frobenius norm of ``defect`` over 1 + the largest Frobenius norm of ``terms``."""
    scale = max((float(np.linalg.norm(np.ravel(t))) for t in terms), default=0.0)
    return float(np.linalg.norm(np.ravel(defect))) / (1.0 + scale)
