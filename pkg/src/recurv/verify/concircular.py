"""Concircular vector fields: nabla_k X_j = rho g_kj (+ h X_k X_j)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .. import jets as J
from ..catalog import MetricSpec, scale_factor_of
from ..conventions import CO, CONTRA, normalized_residual
from ..curvature import CurvaturePack, MetricField, build_pack, covariant_derivative, lower_vector_field
from ..jets import Jet
from .recurrence import RecurrenceFit


@dataclass(frozen=True)
class ConcircularFit:
    """Least-squares fit of nabla_k X_j against g_kj and X_k X_j.

    ``rho``/``h``/``residual`` are the two-term fit; ``chen_rho`` and
    ``chen_residual`` force ``h = 0``.  ``relative_residual`` is the h = 0
    defect over |nabla X| itself, useful when nabla X is small.
    """

    rho: float
    h: float
    residual: float
    chen_rho: float
    chen_residual: float
    relative_residual: float
    nabla_x: np.ndarray

    def to_json(self) -> dict:
        return {
            "rho": self.rho,
            "h": self.h,
            "residual": self.residual,
            "chen_rho": self.chen_rho,
            "chen_residual": self.chen_residual,
            "relative_residual": self.relative_residual,
        }


VectorField = Callable[[Sequence[Jet]], Jet]


def concircular_fit(f: MetricField, X: VectorField, point, variance: str = CONTRA,
                    pack: Optional[CurvaturePack] = None) -> ConcircularFit:
    """Fit ``nabla_k X_j ~ rho g_kj + h X_k X_j`` at ``point``.

    ``X`` maps coordinate jets to an (n,)-shaped jet; ``variance`` says whether
    its components are contravariant (lowered here with the metric) or covariant.
    """
    if pack is None:
        pack = build_pack(f, point, 2)
    x_lower = lower_vector_field(X, f) if variance == CONTRA else X
    nx = covariant_derivative(x_lower, (CO,), pack, f).components
    coords = J.seed_variables(pack.point, 0)
    xv = x_lower(coords).coeffs[..., 0]
    g = pack.g
    xx = np.outer(xv, xv)

    M = np.stack([g.ravel(), xx.ravel()], axis=1)
    (rho, h), *_ = np.linalg.lstsq(M, nx.ravel(), rcond=None)
    model = rho * g + h * xx
    residual = normalized_residual(nx - model, nx, model)

    chen_rho = float(np.sum(nx * g) / np.sum(g * g))
    defect = nx - chen_rho * g
    chen_residual = normalized_residual(defect, nx, chen_rho * g)
    size = float(np.linalg.norm(nx))
    relative = float(np.linalg.norm(defect)) / size if size > 0 else 0.0
    return ConcircularFit(float(rho), float(h), residual, chen_rho, chen_residual, relative, nx)


# --- standard fields for catalog metrics -------------------------------------------


def chen_vector(spec: MetricSpec) -> tuple[VectorField, str, Optional[Callable[[np.ndarray], float]], bool]:
    """A natural vector field for a catalog family.

    Returns ``(X, variance, rho_exact, concircular)``: ``rho_exact(point)`` gives
    the expected rho when known, and ``concircular`` is False for controls.
    """
    n = spec.dimension

    def unit_axis(value_fn):
        def field(c):
            comps = [value_fn(c)] + [Jet.constant(0.0, c[0].dimension, c[0].order)] * (n - 1)
            return Jet.stack(comps)
        return field

    q = scale_factor_of(spec)
    if q is not None:
        # X = q(t) d_t, rho = q'(t)
        return unit_axis(lambda c: q(c[0]) + 0.0 * c[0]), CONTRA, (lambda p: q.derivative(p[0])), True
    if spec.name in ("minkowski", "euclidean"):
        # position vector field x^k d_k
        return (lambda c: Jet.stack(list(c))), CONTRA, (lambda p: 1.0), True
    if spec.name == "sphere":
        a = float(spec.parameters.get("radius", 1.0))

        # gradient of cos(theta_1): its Hessian is -cos(theta_1) / a^2 g
        def grad(c):
            comps = [-J.sin(c[0])] + [Jet.constant(0.0, c[0].dimension, c[0].order)] * (n - 1)
            return Jet.stack(comps)

        return grad, CO, (lambda p: -math.cos(p[0]) / (a * a)), True
    if spec.name == "warped_riemannian":
        eta = spec.scale_factor

        # X = e^{eta/2} d_1, rho = (eta'/2) e^{eta/2}
        def rho(p):
            t = p[0]
            e = J.seed_variables([t], 1)[0]
            val = J.exp(eta(e) * 0.5)
            return float(J.partial(val, (1,)))

        return unit_axis(lambda c: J.exp(eta(c[0]) * 0.5)), CONTRA, rho, True
    if spec.name == "schwarzschild":
        # Killing field d_t: nabla X is antisymmetric, so it is not concircular
        return unit_axis(lambda c: Jet.constant(1.0, c[0].dimension, c[0].order)), CONTRA, (lambda p: 0.0), False
    raise ValueError(f"no standard vector field for {spec.name}")


def concircular_coefficients(pack: CurvaturePack, fit: RecurrenceFit,
                             nabla_A: Optional[np.ndarray] = None) -> dict[str, float]:
    """Closed-form f (and h when nabla_k A_j is supplied) implied by a recurrence fit:

        f = -(n-1) beta A^2 / (R + n(n-1) psi)
        h = A^j A^l nabla_j A_l / A^4 + (n-1) beta / (R + n(n-1) psi)
    """
    if fit.degenerate:
        return {"f": math.nan, "h": math.nan}
    n = pack.dimension
    denom = pack.scalar + n * (n - 1) * fit.psi
    A2 = fit.A_squared
    out = {"f": -(n - 1) * fit.beta * A2 / denom, "h": math.nan}
    if nabla_A is not None:
        A_up = pack.g_inv @ fit.A
        out["h"] = float(A_up @ nabla_A @ A_up) / (A2 * A2) + (n - 1) * fit.beta / denom
    return out

