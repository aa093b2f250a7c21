"""Quasi-constant curvature: Riemann tensors of the form

    R_{jklm} = b/(n-2) [-g_jm a_k a_l + g_km a_j a_l - g_kl a_j a_m + g_jl a_k a_m]
               + psi (g_jm g_kl - g_jl g_km),          a_k a_l := A_k A_l / A^2

and the algebra they satisfy: vanishing Weyl tensor, quasi-Einstein Ricci
``R_kl = a g_kl + b A_k A_l / A^2`` with ``a = (R - psi (n-1)(n-2)) / (2(n-1))``,
and the A-contraction identities.
"""
from __future__ import annotations

import numpy as np

from ..conventions import normalized_residual
from ..curvature import pack_from_tensors
from ..tensors import MetricAtPoint
from ..tolerances import DEFAULT, Tolerances
from .identities import IdentityReport, report, riemann_symmetry_residuals


class NullCovectorError(ValueError):
    pass


def _a_squared(m: MetricAtPoint, A: np.ndarray) -> float:
    A2 = float(A @ m.inverse @ A)
    if abs(A2) <= 1e-14 * max(float(A @ A), 1e-300):
        raise NullCovectorError(f"A is null under g (A^2 = {A2!r}); A_k A_l / A^2 is undefined")
    return A2


def qcc_riemann(m: MetricAtPoint, A, psi: float, b: float) -> np.ndarray:
    """Lowered Riemann tensor of quasi-constant curvature."""
    A = np.asarray(A, dtype=float)
    g = m.matrix
    n = g.shape[0]
    aa = np.outer(A, A) / _a_squared(m, A)
    bracket = (
        -np.einsum("jm,kl->jklm", g, aa)
        + np.einsum("km,jl->jklm", g, aa)
        - np.einsum("kl,jm->jklm", g, aa)
        + np.einsum("jl,km->jklm", g, aa)
    )
    const = np.einsum("jm,kl->jklm", g, g) - np.einsum("jl,km->jklm", g, g)
    return b / (n - 2) * bracket + psi * const


def quasi_einstein_a(scalar: float, psi: float, n: int) -> float:
    return (scalar - psi * (n - 1) * (n - 2)) / (2 * (n - 1))


def quasi_einstein_b(scalar: float, psi: float, n: int) -> float:
    return (n - 2) / (2 * (n - 1)) * (scalar + psi * n * (n - 1))


def synth_qcc(m: MetricAtPoint, A, psi: float, b: float, tol: Tolerances = DEFAULT) -> list[IdentityReport]:
    """Build a quasi-constant-curvature Riemann tensor and check its algebra.

    Reports: Riemann symmetries, vanishing Weyl tensor, quasi-Einstein Ricci (and
    the predicted ``b``), the A-contractions of Riemann and Ricci, and the
    reconstruction ``2(n-1) R_kl - g_kl (R - psi (n-1)(n-2)) = A_k A_l / A^2 (n-2)(R + psi n(n-1))``.
    """
    A = np.asarray(A, dtype=float)
    n = m.dimension
    R4 = qcc_riemann(m, A, psi, b)
    pack = pack_from_tensors(m, R4, label="qcc")
    g, gi = m.matrix, m.inverse
    A2 = _a_squared(m, A)
    aa = np.outer(A, A) / A2
    A_up = gi @ A
    Ric = pack.ricci.components
    R = pack.scalar
    out = []

    sym = riemann_symmetry_residuals(R4)
    out.append(report("qcc_riemann_symmetries", max(sym.values()), tol.qcc, pack, extra=sym))
    if n >= 4:
        out.append(report("qcc_weyl_vanishes", normalized_residual(pack.weyl_lower.components, R4), tol.qcc, pack))
    a = quasi_einstein_a(R, psi, n)
    model = a * g + b * aa
    out.append(report("qcc_quasi_einstein", normalized_residual(Ric - model, Ric, model), tol.qcc, pack))
    b_pred = quasi_einstein_b(R, psi, n)
    out.append(report("qcc_b_coefficient", abs(b_pred - b) / (1 + abs(b)), tol.qcc, pack))

    lhs = np.einsum("jklm,m->jkl", R4, A_up)
    shifted = Ric + psi * (n - 2) * g
    rhs = np.einsum("k,jl->jkl", A, shifted) - np.einsum("j,kl->jkl", A, shifted)
    out.append(report("qcc_riemann_A_contraction", normalized_residual(lhs - rhs, lhs, rhs), tol.qcc, pack))
    lhs = Ric @ A_up
    rhs = 0.5 * A * (R + psi * (n - 2) * (n - 1))
    out.append(report("qcc_ricci_A_contraction", normalized_residual(lhs - rhs, lhs, rhs), tol.qcc, pack))
    lhs = 2 * (n - 1) * Ric - g * (R - psi * (n - 1) * (n - 2))
    rhs = aa * (n - 2) * (R + psi * n * (n - 1))
    out.append(report("qcc_ricci_reconstruction", normalized_residual(lhs - rhs, lhs, rhs), tol.qcc, pack))
    return out
