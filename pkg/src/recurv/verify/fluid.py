"""Perfect-fluid reading of the Einstein tensor.

With ``kappa T_kl = R_kl - R g_kl / 2`` and a unit timelike ``u``, the fluid
variables are ``mu = T_kl u^k u^l`` and ``p = T_kl h^kl / (n-1)`` where
``h^kl = g^kl + u^k u^l``.  For a quasi-Einstein Ricci tensor
``R_kl = a g_kl + b A_k A_l / A^2`` (so ``A_k A_l / A^2 = -u_k u_l``) the
equation of state ``p = mu/(n-1) - (n-2) R / (2 (n-1) kappa)`` holds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..conventions import normalized_residual
from ..curvature import CurvaturePack

KAPPA = 8.0 * math.pi


class TimelikeError(ValueError):
    pass


@dataclass(frozen=True)
class FluidState:
    u: np.ndarray
    kappa: float
    p: float
    mu: float
    a: float
    b: float
    psi_from_ricci: float
    isotropy_residual: float
    quasi_einstein_residual: float
    eos_residual: float
    scalar: float

    @property
    def w(self) -> float:
        """p / mu (nan for vanishing energy density)."""
        return self.p / self.mu if self.mu != 0 else math.nan

    def to_json(self) -> dict:
        return {
            "u": self.u.tolist(),
            "kappa": self.kappa,
            "p": self.p,
            "mu": self.mu,
            "w": None if math.isnan(self.w) else self.w,
            "a": self.a,
            "b": self.b,
            "psi_from_ricci": self.psi_from_ricci,
            "scalar": self.scalar,
            "isotropy_residual": self.isotropy_residual,
            "quasi_einstein_residual": self.quasi_einstein_residual,
            "eos_residual": self.eos_residual,
        }


def normalize_timelike(pack: CurvaturePack, u) -> np.ndarray:
    """Scale a timelike covector to u^2 = -1."""
    u = np.asarray(u, dtype=float)
    u2 = float(u @ pack.g_inv @ u)
    if not u2 < 0:
        kind = "null" if u2 == 0 else "spacelike"
        raise TimelikeError(f"u is {kind} (u^2 = {u2!r}); a fluid velocity must be timelike")
    return u / math.sqrt(-u2)


def quasi_einstein_fit(pack: CurvaturePack, u) -> tuple[float, float, float]:
    """Fit ``R_kl ~ a g_kl + b A_k A_l / A^2`` with A parallel to u.

    Returns ``(a, b, normalized residual)``.
    """
    u = normalize_timelike(pack, u)
    g, ric = pack.g, pack.ricci.components
    aa = -np.outer(u, u)  # A_k A_l / A^2
    M = np.stack([g.ravel(), aa.ravel()], axis=1)
    (a, b), *_ = np.linalg.lstsq(M, ric.ravel(), rcond=None)
    model = a * g + b * aa
    return float(a), float(b), normalized_residual(ric - model, ric, model)


def fluid_extract(pack: CurvaturePack, u, kappa: float = KAPPA) -> FluidState:
    """Decompose ``T = G / kappa`` against the velocity ``u``."""
    n = pack.dimension
    u = normalize_timelike(pack, u)
    g, gi = pack.g, pack.g_inv
    T = pack.einstein.components / kappa
    u_up = gi @ u
    mu = float(u_up @ T @ u_up)
    h_up = gi + np.outer(u_up, u_up)
    p = float(np.sum(T * h_up)) / (n - 1)
    model = (p + mu) * np.outer(u, u) + p * g
    isotropy = normalized_residual(T - model, T, model)
    a, b, qe = quasi_einstein_fit(pack, u)
    R = pack.scalar
    psi = (R - 2 * (n - 1) * a) / ((n - 1) * (n - 2))
    eos = abs(p - mu / (n - 1) + (n - 2) * R / (2 * (n - 1) * kappa))
    return FluidState(u, float(kappa), p, mu, a, b, psi, isotropy, qe, eos, R)
