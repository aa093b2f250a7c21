"""Curvature identities scored as normalized residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from ..conventions import normalized_residual
from ..curvature import CurvaturePack, OrderError
from ..tolerances import DEFAULT, Tolerances

IDENTITIES = ("second_bianchi", "weyl_bianchi", "lovelock", "weyl_traces")


@dataclass(frozen=True)
class IdentityReport:
    """Residual bookkeeping for one check at one point.

    ``applicable=False`` marks a check that could not be posed (e.g. derived
    identities after a degenerate fit); such a report never passes or fails.
    """

    name: str
    residual: float
    tolerance: float
    point: Optional[tuple] = None
    label: str = ""
    applicable: bool = True
    note: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return self.applicable and self.residual <= self.tolerance

    @property
    def status(self) -> str:
        if not self.applicable:
            return "n/a"
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residual": None if math.isnan(self.residual) else self.residual,
            "tolerance": self.tolerance,
            "note": self.note,
            **({"extra": self.extra} if self.extra else {}),
        }


def _point(pack: CurvaturePack):
    return None if pack.point is None else tuple(float(x) for x in pack.point)


def report(name, residual, tolerance, pack=None, **kw) -> IdentityReport:
    if pack is not None:
        kw.setdefault("point", _point(pack))
        kw.setdefault("label", pack.label)
    return IdentityReport(name, float(residual), float(tolerance), **kw)


def not_applicable(name, tolerance, pack=None, note="") -> IdentityReport:
    return report(name, math.nan, tolerance, pack, applicable=False, note=note)


def cyclic(t: np.ndarray) -> np.ndarray:
    """T_{ijk...} + T_{jki...} + T_{kij...} over the first three slots."""
    return t + np.einsum("jki...->ijk...", t) + np.einsum("kij...->ijk...", t)


# --- algebraic curvature checks ----------------------------------------------------


def riemann_symmetry_residuals(r: np.ndarray) -> dict[str, float]:
    """Defects of R_{jklm} against the algebraic Riemann symmetries."""
    return {
        "antisym_jk": normalized_residual(r + np.swapaxes(r, 0, 1), r),
        "antisym_lm": normalized_residual(r + np.swapaxes(r, 2, 3), r),
        "pair_swap": normalized_residual(r - np.transpose(r, (2, 3, 0, 1)), r),
        "first_bianchi": normalized_residual(cyclic(r), r),
    }


def weyl_trace_residual(pack: CurvaturePack) -> float:
    """Largest normalized trace of C_{jkl}^m over (j,m), (k,m), (l,m)."""
    c = pack.weyl.components
    traces = [np.einsum("mklm->kl", c), np.einsum("jmlm->jl", c), np.einsum("jkmm->jk", c)]
    return max(normalized_residual(t, c, pack.riemann_lower.components) for t in traces)


def weyl_norm(pack: CurvaturePack) -> float:
    """Normalized size of the Weyl tensor: |C_{jklm}| / (1 + |R_{jklm}|)."""
    if pack.weyl_lower is None:
        raise OrderError("Weyl tensor needs n >= 4")
    return normalized_residual(pack.weyl_lower.components, pack.riemann_lower.components)


# --- differential identities -------------------------------------------------------


def second_bianchi_residual(pack: CurvaturePack) -> float:
    nr = pack.nabla_riemann.components
    return normalized_residual(cyclic(nr), nr)


def weyl_bianchi_terms(pack: CurvaturePack) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the second Bianchi identity for the Weyl tensor.

    LHS: nabla_i C_{jkl}^m + nabla_j C_{kil}^m + nabla_k C_{ijl}^m.
    RHS: 1/(n-3) [delta_j^m D_{kil} + delta_k^m D_{ijl} + delta_i^m D_{jkl}
                  + g_{kl} E_{ji}^m + g_{il} E_{kj}^m + g_{jl} E_{ik}^m]
    with D_{jkl} = nabla_p C_{jkl}^p and E_{ji}^m = nabla_p C_{ji}^{mp}.
    """
    n = pack.dimension
    g, gi = pack.g, pack.g_inv
    nc = pack.nabla_weyl.components
    nc_up = np.einsum("ijklp,pm->ijklm", nc, gi)
    lhs = cyclic(nc_up)
    d = pack.div_weyl.components
    e = np.einsum("pjiab,ma,pb->jim", nc, gi, gi)
    delta = np.eye(n)
    rhs = (
        np.einsum("jm,kil->ijklm", delta, d)
        + np.einsum("km,ijl->ijklm", delta, d)
        + np.einsum("im,jkl->ijklm", delta, d)
        + np.einsum("kl,jim->ijklm", g, e)
        + np.einsum("il,kjm->ijklm", g, e)
        + np.einsum("jl,ikm->ijklm", g, e)
    ) / (n - 3)
    return lhs, rhs


def lovelock_terms(pack: CurvaturePack) -> tuple[np.ndarray, np.ndarray]:
    """Lovelock's identity split as (second-derivative cyclic sum, Ricci.Riemann cyclic sum);
    the identity states that the two add to zero."""
    d2 = pack.nabla2_riemann.components  # [i, j, k, l] = nabla_i nabla_m R_{jkl}^m
    rr = np.einsum("im,jklm->ijkl", pack.ricci.components, pack.riemann.components)
    return cyclic(d2), cyclic(rr)


def identity_suite(pack: CurvaturePack, which: Iterable[str] = IDENTITIES,
                   tol: Tolerances = DEFAULT) -> list[IdentityReport]:
    """One report per requested identity; raises OrderError when the pack cannot
    support one (lovelock needs order 4, weyl_bianchi needs n >= 4)."""
    out = []
    for name in which:
        if name not in IDENTITIES:
            raise ValueError(f"unknown identity {name!r}; expected one of {IDENTITIES}")
        if name == "second_bianchi":
            if pack.nabla_riemann is None:
                raise OrderError("second_bianchi needs a pack of order >= 3")
            out.append(report(name, second_bianchi_residual(pack), tol.second_bianchi, pack))
        elif name == "weyl_bianchi":
            if pack.dimension < 4:
                raise OrderError("weyl_bianchi needs n >= 4")
            if pack.nabla_weyl is None:
                raise OrderError("weyl_bianchi needs a pack of order >= 3")
            lhs, rhs = weyl_bianchi_terms(pack)
            out.append(report(name, normalized_residual(lhs - rhs, lhs, rhs), tol.weyl_bianchi, pack))
        elif name == "lovelock":
            if pack.nabla2_riemann is None:
                raise OrderError("lovelock needs a pack of order 4")
            a, b = lovelock_terms(pack)
            out.append(report(name, normalized_residual(a + b, a, b), tol.lovelock, pack))
        elif name == "weyl_traces":
            if pack.weyl is None:
                raise OrderError("weyl_traces needs n >= 4")
            out.append(report(name, weyl_trace_residual(pack), tol.weyl_traces, pack))
    return out
