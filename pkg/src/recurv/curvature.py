"""Curvature of an analytic metric at a point, computed in jet arithmetic.

The metric is evaluated once as a jet of order ``N``.  Every derived quantity
keeps its own jet: Christoffel symbols at order ``N-1``, Riemann at ``N-2``,
its covariant derivative at ``N-3`` and the second covariant derivative at
``N-4``.  Nothing is re-differentiated numerically.

Index layouts and signs are fixed in :mod:`recurv.conventions`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .conventions import CO, CONTRA
from .jets import Jet, JetError, algebra, seed_variables, truncate_coeffs
from .tensors import MetricAtPoint, Tensor


class DomainError(ValueError):
    """The point lies outside the metric's domain of validity."""

    def __init__(self, label, point):
        self.point = np.asarray(point, dtype=float)
        super().__init__(f"point {self.point.tolist()} is outside the domain of {label}")


class OrderError(ValueError):
    """The jet order is too low for the requested quantity."""


@dataclass(frozen=True)
class MetricField:
    """An analytic metric.

    ``evaluator`` maps the list of coordinate jets to a jet with batch shape
    ``(n, n)``; it must be built from jet arithmetic only so that the same code
    path serves order 0 (plain values) through order 4.
    """

    dimension: int
    signature: str
    evaluator: Callable[[Sequence[Jet]], Jet]
    domain: Callable[[np.ndarray], bool] = field(default=lambda p: True)
    label: str = "metric"

    def contains(self, point) -> bool:
        point = np.asarray(point, dtype=float)
        return point.shape == (self.dimension,) and bool(np.all(np.isfinite(point))) and bool(self.domain(point))

    def value(self, point) -> np.ndarray:
        return metric_jets(self, point, 0).coeffs[..., 0]


def jet_matrix(rows, like: Jet) -> Jet:
    """Assemble an n x n jet from nested rows of jets and plain numbers.

    ``like`` supplies the jet dimension and order (any coordinate jet will do).
    """
    n, order = like.dimension, like.order
    lifted = [[x if isinstance(x, Jet) else Jet.constant(x, n, order) for x in row] for row in rows]
    return Jet(np.array([[x.coeffs for x in row] for row in lifted]), n, order)


def diagonal_metric(entries, like: Jet) -> Jet:
    n = len(entries)
    return jet_matrix([[entries[i] if i == j else 0.0 for j in range(n)] for i in range(n)], like)


def metric_jets(f: MetricField, point, order: int) -> Jet:
    """Metric components at ``point`` as an (n, n) jet of the given order."""
    point = np.asarray(point, dtype=float)
    if point.shape != (f.dimension,):
        raise DomainError(f.label, point)
    if not f.contains(point):
        raise DomainError(f.label, point)
    coords = seed_variables(point, order)
    g = f.evaluator(coords)
    if not isinstance(g, Jet) or g.shape != (f.dimension, f.dimension):
        raise TypeError(f"{f.label}: evaluator must return an (n, n) Jet")
    return g


# --- jet-level building blocks -------------------------------------------------


def _inverse_jets(g: np.ndarray, n: int, order: int) -> np.ndarray:
    """Jet inverse of a jet matrix via the terminating Neumann series."""
    alg = algebra(n, order)
    g0 = g[..., 0]
    inv0 = np.linalg.inv(g0)
    inv0_jet = np.zeros_like(g)
    inv0_jet[..., 0] = inv0
    delta = g.copy()
    delta[..., 0] = 0.0
    # X = inv0 . delta, nilpotent
    x = np.einsum("ab,bcZ->acZ", inv0, delta)
    term = inv0_jet
    total = inv0_jet.copy()
    for _ in range(order):
        term = -alg.einsum("ab,bc->ac", x, term)
        total = total + term
    return total


def _christoffel_jets(g: np.ndarray, ginv: np.ndarray, n: int, order: int) -> np.ndarray:
    """gamma[k, i, j] = Gamma^k_{ij} at jet order ``order - 1``."""
    alg = algebra(n, order)
    low = order - 1
    dg = np.stack([alg.derivative(g, a) for a in range(n)])  # dg[a, i, j] = d_a g_ij
    first_kind = 0.5 * (
        np.einsum("ijmZ->mijZ", dg) + np.einsum("jimZ->mijZ", dg) - dg
    )  # [m, i, j] = 1/2 (d_i g_jm + d_j g_im - d_m g_ij)
    return algebra(n, low).einsum("km,mij->kij", truncate_coeffs(ginv, n, low), first_kind)


def _riemann_jets(gamma: np.ndarray, n: int, order: int) -> np.ndarray:
    """riemann[j, k, l, m] = R_{jkl}^m from Christoffel jets of ``order``."""
    alg = algebra(n, order)
    low = order - 1
    dgam = np.stack([alg.derivative(gamma, a) for a in range(n)])  # [a, m, j, l] = d_a Gamma^m_jl
    gam = truncate_coeffs(gamma, n, low)
    lo = algebra(n, low)
    return (
        np.einsum("kmjlZ->jklmZ", dgam)
        - np.einsum("jmklZ->jklmZ", dgam)
        + lo.einsum("mks,sjl->jklm", gam, gam)
        - lo.einsum("mjs,skl->jklm", gam, gam)
    )


_SLOT_LETTERS = "abcdefghjklmnoqrstuvwxy"


def nabla_jets(t: np.ndarray, variance: Sequence[str], gamma: np.ndarray, n: int, order: int) -> np.ndarray:
    """Covariant derivative of a jet tensor of ``order``; result has order - 1.

    The new derivative slot is first: ``out[i, a, b, ...] = nabla_i T_{ab...}``.
    """
    if order < 1:
        raise OrderError("covariant derivative needs jet order >= 1")
    alg = algebra(n, order)
    low = order - 1
    lo = algebra(n, low)
    rank = len(variance)
    out = np.stack([alg.derivative(t, i) for i in range(n)])
    tt = truncate_coeffs(t, n, low)
    gam = truncate_coeffs(gamma, n, low)
    slots = _SLOT_LETTERS[:rank]
    for s, v in enumerate(variance):
        replaced = slots[:s] + "p" + slots[s + 1:]
        if v == CO:
            out = out - lo.einsum(f"pi{slots[s]},{replaced}->i{slots}", gam, tt)
        else:
            out = out + lo.einsum(f"{slots[s]}ip,{replaced}->i{slots}", gam, tt)
    return out


def _ricci(riemann_lower, ginv):
    # R_ij = R_imj^m = g^{mp} R_{imjp}
    return np.einsum("...imjp,mp->...ij", riemann_lower, ginv)


def weyl_lower_from(riemann_lower, ricci, scalar, g) -> np.ndarray:
    """Lowered Weyl tensor C_{jklm}; leading batch axes broadcast (used for nabla C)."""
    n = g.shape[0]
    scalar = np.asarray(scalar)[..., None, None, None, None]
    mixed = (
        np.einsum("jm,...kl->...jklm", g, ricci)
        - np.einsum("km,...jl->...jklm", g, ricci)
        + np.einsum("...jm,kl->...jklm", ricci, g)
        - np.einsum("...km,jl->...jklm", ricci, g)
    )
    gg = np.einsum("jm,kl->jklm", g, g) - np.einsum("km,jl->jklm", g, g)
    return riemann_lower + mixed / (n - 2) - scalar * gg / ((n - 1) * (n - 2))


# --- the pack ------------------------------------------------------------------


@dataclass(frozen=True)
class CurvaturePack:
    """Curvature quantities at one point.  Optional fields are ``None`` when the
    jet order or dimension does not support them."""

    point: Optional[np.ndarray]
    metric_at_point: MetricAtPoint
    gamma: Tensor
    riemann: Tensor
    riemann_lower: Tensor
    ricci: Tensor
    scalar: float
    einstein: Tensor
    weyl: Optional[Tensor] = None
    weyl_lower: Optional[Tensor] = None
    grad_scalar: Optional[Tensor] = None
    nabla_ricci: Optional[Tensor] = None
    nabla_riemann: Optional[Tensor] = None
    nabla_weyl: Optional[Tensor] = None
    div_weyl: Optional[Tensor] = None
    nabla2_riemann: Optional[Tensor] = None
    order: int = 2
    label: str = ""
    gamma_jets: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.metric_at_point.dimension

    @property
    def g(self) -> np.ndarray:
        return self.metric_at_point.matrix

    @property
    def g_inv(self) -> np.ndarray:
        return self.metric_at_point.inverse

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "point": None if self.point is None else np.asarray(self.point).tolist(),
            "order": self.order,
            "signature": self.metric_at_point.signature,
            "scalar": self.scalar,
            "metric": self.metric_at_point.g.to_json(),
        }
        for name in ("gamma", "riemann", "riemann_lower", "ricci", "einstein", "weyl", "weyl_lower",
                     "grad_scalar", "nabla_ricci", "nabla_riemann", "nabla_weyl", "div_weyl", "nabla2_riemann"):
            t = getattr(self, name)
            out[name] = None if t is None else t.to_json()
        return out


def christoffel(jets: Jet, m: Optional[MetricAtPoint] = None) -> Tensor:
    """Gamma^k_{ij} at the base point of a metric jet of order >= 1."""
    if jets.order < 1:
        raise OrderError("Christoffel symbols need metric jets of order >= 1")
    n, order = jets.dimension, jets.order
    ginv = _inverse_jets(jets.coeffs, n, order)
    gamma = _christoffel_jets(jets.coeffs, ginv, n, order)
    return Tensor(gamma[..., 0], (CONTRA, CO, CO))


def pack_from_tensors(
    m: MetricAtPoint,
    riemann_lower: np.ndarray,
    nabla_riemann: Optional[np.ndarray] = None,
    *,
    gamma: Optional[np.ndarray] = None,
    nabla2_riemann: Optional[np.ndarray] = None,
    point=None,
    order: int = 2,
    label: str = "",
    gamma_jets: Optional[np.ndarray] = None,
) -> CurvaturePack:
    """Fill every algebraically derivable pack field from R_{jklm} (and nabla R).

    Contractions commute with nabla because the connection is metric, so
    nabla Ricci, nabla R and nabla C follow from nabla_i R_{jklm} directly.  This is
    also how synthetic (non-metric-derived) curvature data are packed.
    """
    n = m.dimension
    g, ginv = m.matrix, m.inverse
    riemann_lower = np.asarray(riemann_lower, dtype=float)
    riemann = np.einsum("jklp,pm->jklm", riemann_lower, ginv)
    ricci = _ricci(riemann_lower, ginv)
    scalar = float(np.einsum("ij,ij->", ginv, ricci))
    einstein = ricci - 0.5 * scalar * g
    kw = {}
    if n >= 4:
        wl = weyl_lower_from(riemann_lower, ricci, scalar, g)
        kw["weyl_lower"] = Tensor(wl, (CO,) * 4)
        kw["weyl"] = Tensor(np.einsum("jklp,pm->jklm", wl, ginv), (CO, CO, CO, CONTRA))
    if nabla_riemann is not None:
        nr = np.asarray(nabla_riemann, dtype=float)
        nric = _ricci(nr, ginv)
        ns = np.einsum("ij,aij->a", ginv, nric)
        kw["nabla_riemann"] = Tensor(nr, (CO,) * 5)
        kw["nabla_ricci"] = Tensor(nric, (CO,) * 3)
        kw["grad_scalar"] = Tensor(ns, (CO,))
        if n >= 4:
            nw = weyl_lower_from(nr, nric, ns, g)
            kw["nabla_weyl"] = Tensor(nw, (CO,) * 5)
            kw["div_weyl"] = Tensor(np.einsum("mjklp,mp->jkl", nw, ginv), (CO,) * 3)
    if nabla2_riemann is not None:
        kw["nabla2_riemann"] = Tensor(np.asarray(nabla2_riemann, dtype=float), (CO,) * 4)
    if gamma is None:
        gamma = np.zeros((n, n, n))
    return CurvaturePack(
        point=None if point is None else np.asarray(point, dtype=float),
        metric_at_point=m,
        gamma=Tensor(gamma, (CONTRA, CO, CO)),
        riemann=Tensor(riemann, (CO, CO, CO, CONTRA)),
        riemann_lower=Tensor(riemann_lower, (CO,) * 4),
        ricci=Tensor(ricci, (CO, CO)),
        scalar=scalar,
        einstein=Tensor(einstein, (CO, CO)),
        order=order,
        label=label,
        gamma_jets=gamma_jets,
        **kw,
    )


def build_pack(f: MetricField, point, order: int = 3) -> CurvaturePack:
    """Compute the CurvaturePack of ``f`` at ``point``.

    ``order`` is the metric jet order: 2 gives curvature, 3 adds first covariant
    derivatives (nabla Riemann, nabla Weyl, div Weyl), 4 adds nabla_i nabla_m R_{jkl}^m.
    """
    if order not in (2, 3, 4):
        raise OrderError(f"pack order must be 2, 3 or 4 (got {order})")
    n = f.dimension
    gj = metric_jets(f, point, order).coeffs
    m = MetricAtPoint.from_matrix(gj[..., 0], f.signature)
    ginv = _inverse_jets(gj, n, order)
    gamma = _christoffel_jets(gj, ginv, n, order)
    riem = _riemann_jets(gamma, n, order - 1)  # order - 2
    g_lo = truncate_coeffs(gj, n, order - 2)
    riem_lower = algebra(n, order - 2).einsum("jklp,pm->jklm", riem, g_lo)

    nabla_r = nabla2 = None
    if order >= 3:
        nr_jets = nabla_jets(riem_lower, (CO,) * 4, gamma, n, order - 2)  # order - 3
        nabla_r = nr_jets[..., 0]
        if order >= 4:
            ginv1 = truncate_coeffs(ginv, n, 1)
            # D_{jkl} = nabla_m R_{jkl}^m = g^{mp} nabla_m R_{jklp}
            div = algebra(n, 1).einsum("mjklp,mp->jkl", nr_jets, ginv1)
            nabla2 = nabla_jets(div, (CO,) * 3, gamma, n, 1)[..., 0]
    return pack_from_tensors(
        m,
        riem_lower[..., 0],
        nabla_r,
        gamma=gamma[..., 0],
        nabla2_riemann=nabla2,
        point=point,
        order=order,
        label=f.label,
        gamma_jets=gamma,
    )


def covariant_derivative(field_fn: Callable[[Sequence[Jet]], Jet], variance: Sequence[str], pack: CurvaturePack,
                         f: MetricField) -> Tensor:
    """nabla of an analytic tensor field at the pack's point.

    ``field_fn`` maps coordinate jets to a jet with batch shape ``(n,)*rank``.
    The derivative slot is prepended and covariant.
    """
    if pack.gamma_jets is None or pack.point is None:
        raise OrderError("pack carries no connection jets; build it with build_pack")
    n = pack.dimension
    coords = seed_variables(pack.point, 1)
    t = field_fn(coords)
    if isinstance(t, (int, float)):
        t = Jet.constant(t, n, 1)
    if t.order != 1:
        raise JetError("field must be evaluated in the supplied order-1 jets")
    out = nabla_jets(t.coeffs, tuple(variance), pack.gamma_jets, n, 1)
    return Tensor(out[..., 0], (CO,) + tuple(variance))


def lower_vector_field(vector_fn, f: MetricField):
    """Turn a contravariant analytic vector field into its covariant field."""

    def lowered(coords):
        g = f.evaluator(coords)
        x = vector_fn(coords)
        alg = g.algebra
        return Jet(alg.einsum("ij,j->i", g.coeffs, x.coeffs), g.dimension, g.order)

    return lowered


def einstein_tensor(pack: CurvaturePack) -> Tensor:
    return pack.einstein


def metric_field_check(f: MetricField, point) -> float:
    """Jet-wise symmetry defect of the metric jets at ``point`` (all coefficients)."""
    g = metric_jets(f, point, 2).coeffs
    return float(np.abs(g - np.swapaxes(g, 0, 1)).max())

