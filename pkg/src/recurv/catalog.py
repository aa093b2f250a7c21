"""Concrete analytic metrics.

Robertson-Walker type metrics use the isotropic chart for the constant
curvature fiber,

    ds^2 = -dt^2 + q(t)^2 |dx|^2 / (1 + k |x|^2 / (4 a^2))^2,

where ``a`` is the fiber radius (default 1), so the fiber has sectional
curvature ``k / a^2``.  The time coordinate is first.

Sampling boxes (``sample_points``):

==================  ===========================================================
family              box
==================  ===========================================================
minkowski           every coordinate in [-1, 1]
euclidean           every coordinate in [-1, 1]
sphere              angles in [0.3, pi - 0.3], last angle in [-pi, pi]
RW-type             t in [0.5, 3], spatial coordinates in [-1, 1]
warped_riemannian   every coordinate in [-1, 1]
schwarzschild       t in [-1, 1], r in [2.5M + 0.5, 2.5M + 10],
                    theta in [0.3, pi - 0.3], phi in [-pi, pi]
==================  ===========================================================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import jets as J
from .conventions import LORENTZIAN, RIEMANNIAN
from .curvature import MetricField, diagonal_metric
from .jets import Jet

FAMILIES = (
    "minkowski",
    "euclidean",
    "sphere",
    "de_sitter_flat",
    "einstein_static",
    "robertson_walker",
    "warped_riemannian",
    "schwarzschild",
)

SCALE_KINDS = ("power", "exponential", "polynomial")

# keeps sampled points away from the isotropic-chart singularity 1 + k|x|^2/4 = 0
_FIBER_MARGIN = 0.05


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class ScaleFactor:
    """A warping function of one variable: ``t**p``, ``exp(H t)`` or a polynomial."""

    kind: str
    parameters: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in SCALE_KINDS:
            raise CatalogError(f"unknown scale factor kind {self.kind!r}; expected one of {SCALE_KINDS}")
        if self.kind in ("power", "exponential") and len(self.parameters) != 1:
            raise CatalogError(f"{self.kind} scale factor takes exactly one parameter")
        if self.kind == "polynomial" and not self.parameters:
            raise CatalogError("polynomial scale factor needs at least one coefficient")
        if not all(math.isfinite(p) for p in self.parameters):
            raise CatalogError("scale factor parameters must be finite")

    @classmethod
    def power(cls, p: float) -> "ScaleFactor":
        return cls("power", (float(p),))

    @classmethod
    def exponential(cls, h: float) -> "ScaleFactor":
        return cls("exponential", (float(h),))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "ScaleFactor":
        """Coefficients in increasing degree: ``c0 + c1 t + c2 t^2 + ...``."""
        return cls("polynomial", tuple(float(c) for c in coeffs))

    @classmethod
    def parse(cls, text: str) -> "ScaleFactor":
        """Parse ``"power:0.5"``, ``"exponential:1"`` or ``"polynomial:1,0,2"``."""
        kind, _, rest = text.partition(":")
        kind = {"exp": "exponential", "poly": "polynomial", "pow": "power"}.get(kind.strip(), kind.strip())
        try:
            params = tuple(float(x) for x in rest.split(",") if x.strip())
        except ValueError:
            raise CatalogError(f"cannot parse scale factor {text!r}") from None
        return cls(kind, params)

    def describe(self) -> str:
        return f"{self.kind}:{','.join(repr(p) for p in self.parameters)}"

    def __call__(self, t):
        """Evaluate on a jet or a float."""
        if self.kind == "power":
            p = self.parameters[0]
            if isinstance(t, Jet):
                return t ** int(p) if p == int(p) and p >= 0 else J.pow_const(t, p)
            return t**p
        if self.kind == "exponential":
            h = self.parameters[0]
            return J.exp(t * h) if isinstance(t, Jet) else math.exp(h * t)
        out = 0.0
        for c in reversed(self.parameters):
            out = out * t + c
        return out

    def derivative(self, t: float) -> float:
        """q'(t) in closed form (used as a reference value, not by the engine)."""
        if self.kind == "power":
            p = self.parameters[0]
            return p * t ** (p - 1)
        if self.kind == "exponential":
            h = self.parameters[0]
            return h * math.exp(h * t)
        return sum(k * c * t ** (k - 1) for k, c in enumerate(self.parameters) if k)

    def valid(self, t: float) -> bool:
        if self.kind == "power":
            p = self.parameters[0]
            return t > 0 or (p == int(p) and p >= 0 and t != 0)
        return self(t) > 0


@dataclass(frozen=True)
class MetricSpec:
    name: str
    dimension: int
    parameters: Mapping[str, float] = field(default_factory=dict)
    scale_factor: Optional[ScaleFactor] = None

    @property
    def label(self) -> str:
        bits = [f"{k}={v!r}" for k, v in sorted(self.parameters.items())]
        if self.scale_factor is not None:
            bits.append(f"q={self.scale_factor.describe()}")
        return f"{self.name}[n={self.dimension}" + ("; " + "; ".join(bits) if bits else "") + "]"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "parameters": dict(sorted(self.parameters.items())),
            "scale_factor": None if self.scale_factor is None else self.scale_factor.describe(),
        }


# --- families -----------------------------------------------------------------

_REQUIRED = {
    "minkowski": (),
    "euclidean": (),
    "sphere": (),
    "de_sitter_flat": ("H",),
    "einstein_static": (),
    "robertson_walker": ("k",),
    "warped_riemannian": (),
    "schwarzschild": ("M",),
}
_OPTIONAL = {
    "sphere": ("radius",),
    "einstein_static": ("radius",),
    "robertson_walker": ("fiber_radius",),
    "warped_riemannian": ("k", "fiber_radius"),
}
_NEEDS_SCALE = {"robertson_walker", "warped_riemannian"}


def validate_spec(spec: MetricSpec):
    if spec.name not in FAMILIES:
        raise CatalogError(f"unknown metric family {spec.name!r}; expected one of {FAMILIES}")
    if not isinstance(spec.dimension, int) or spec.dimension < 2:
        raise CatalogError(f"dimension must be an integer >= 2, got {spec.dimension!r}")
    missing = [p for p in _REQUIRED[spec.name] if p not in spec.parameters]
    if missing:
        raise CatalogError(f"{spec.name}: missing parameters {missing}")
    allowed = set(_REQUIRED[spec.name]) | set(_OPTIONAL.get(spec.name, ()))
    extra = sorted(set(spec.parameters) - allowed)
    if extra:
        raise CatalogError(f"{spec.name}: unexpected parameters {extra}")
    for k, v in spec.parameters.items():
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise CatalogError(f"{spec.name}: parameter {k} must be a finite number")
    if spec.name in _NEEDS_SCALE and spec.scale_factor is None:
        raise CatalogError(f"{spec.name}: a scale_factor descriptor is required")
    if spec.name not in _NEEDS_SCALE and spec.scale_factor is not None:
        raise CatalogError(f"{spec.name}: takes no scale_factor")
    if "k" in spec.parameters and spec.parameters["k"] not in (-1, 0, 1):
        raise CatalogError(f"{spec.name}: k must be -1, 0 or +1 (use fiber_radius to scale)")
    for k in ("radius", "fiber_radius"):
        if k in spec.parameters and spec.parameters[k] <= 0:
            raise CatalogError(f"{spec.name}: {k} must be positive")
    if spec.name == "schwarzschild":
        if spec.dimension != 4:
            raise CatalogError("schwarzschild is only defined for n = 4")
        if spec.parameters["M"] < 0:
            raise CatalogError("schwarzschild mass must be non-negative")
    if spec.name in ("de_sitter_flat", "einstein_static", "robertson_walker") and spec.dimension < 3:
        raise CatalogError(f"{spec.name} needs n >= 3")


def _fiber_factor(xs: Sequence, k: float, a: float):
    """1 / (1 + k |x|^2 / (4 a^2))^2, on jets or floats."""
    r2 = sum(x * x for x in xs)
    denom = 1.0 + r2 * (k / (4.0 * a * a))
    return 1.0 / (denom * denom)


def _fiber_ok(xs: np.ndarray, k: float, a: float) -> bool:
    return 1.0 + k * float(xs @ xs) / (4.0 * a * a) > _FIBER_MARGIN


def _rw_field(n: int, q: ScaleFactor, k: float, a: float, label: str) -> MetricField:
    def evaluator(c):
        qt = q(c[0])
        w = qt * qt * _fiber_factor(c[1:], k, a) if k else qt * qt
        return diagonal_metric([-1.0] + [w] * (n - 1), c[0])

    def domain(p):
        return q.valid(p[0]) and _fiber_ok(p[1:], k, a)

    return MetricField(n, LORENTZIAN, evaluator, domain, label)


def build_metric(spec: MetricSpec) -> MetricField:
    """Realize a MetricSpec as a MetricField evaluable in jet arithmetic."""
    validate_spec(spec)
    n, par, name = spec.dimension, spec.parameters, spec.name
    label = spec.label

    if name == "minkowski":
        return MetricField(n, LORENTZIAN, lambda c: diagonal_metric([-1.0] + [1.0] * (n - 1), c[0]),
                           lambda p: True, label)
    if name == "euclidean":
        return MetricField(n, RIEMANNIAN, lambda c: diagonal_metric([1.0] * n, c[0]), lambda p: True, label)
    if name == "sphere":
        rad = float(par.get("radius", 1.0))

        def evaluator(c):
            entries = [rad * rad]
            w = rad * rad
            for i in range(n - 1):
                s = J.sin(c[i])
                w = w * s * s
                entries.append(w)
            return diagonal_metric(entries, c[0])

        def domain(p):
            return bool(np.all(np.abs(np.sin(p[: n - 1])) > 1e-6))

        return MetricField(n, RIEMANNIAN, evaluator, domain, label)
    if name == "de_sitter_flat":
        return _rw_field(n, ScaleFactor.exponential(par["H"]), 0.0, 1.0, label)
    if name == "einstein_static":
        return _rw_field(n, ScaleFactor.polynomial([1.0]), 1.0, float(par.get("radius", 1.0)), label)
    if name == "robertson_walker":
        return _rw_field(n, spec.scale_factor, float(par["k"]), float(par.get("fiber_radius", 1.0)), label)
    if name == "warped_riemannian":
        eta = spec.scale_factor
        k = float(par.get("k", 0.0))
        a = float(par.get("fiber_radius", 1.0))

        def evaluator(c):
            w = J.exp(eta(c[0]))
            if k:
                w = w * _fiber_factor(c[1:], k, a)
            return diagonal_metric([1.0] + [w] * (n - 1), c[0])

        def domain(p):
            if eta.kind == "power" and not eta.valid(p[0]):
                return False
            return _fiber_ok(p[1:], k, a)

        return MetricField(n, RIEMANNIAN, evaluator, domain, label)
    if name == "schwarzschild":
        mass = float(par["M"])

        def evaluator(c):
            t, r, th, ph = c
            f = 1.0 - (2.0 * mass) / r if mass else 1.0 + 0.0 * r
            s = J.sin(th)
            return diagonal_metric([-f, 1.0 / f, r * r, r * r * s * s], t)

        def domain(p):
            r, th = p[1], p[2]
            return r > 0 and r > 2.0 * mass and abs(math.sin(th)) > 1e-6

        return MetricField(4, LORENTZIAN, evaluator, domain, label)
    raise CatalogError(f"unknown metric family {name!r}")  # pragma: no cover


# --- sampling -------------------------------------------------------------------


def _box(spec: MetricSpec) -> list[tuple[float, float]]:
    n = spec.dimension
    if spec.name in ("minkowski", "euclidean", "warped_riemannian"):
        return [(-1.0, 1.0)] * n
    if spec.name == "sphere":
        return [(0.3, math.pi - 0.3)] * (n - 1) + [(-math.pi, math.pi)]
    if spec.name in ("de_sitter_flat", "einstein_static", "robertson_walker"):
        return [(0.5, 3.0)] + [(-1.0, 1.0)] * (n - 1)
    if spec.name == "schwarzschild":
        m = float(spec.parameters["M"])
        return [(-1.0, 1.0), (2.5 * m + 0.5, 2.5 * m + 10.0), (0.3, math.pi - 0.3), (-math.pi, math.pi)]
    raise CatalogError(f"unknown metric family {spec.name!r}")


def sample_points(spec: MetricSpec, count: int, seed: int, max_tries: int = 1000) -> list[np.ndarray]:
    """``count`` points inside the family's box and domain, deterministic in ``seed``."""
    if count < 1:
        raise CatalogError("count must be >= 1")
    f = build_metric(spec)
    box = np.array(_box(spec))
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        for _ in range(max_tries):
            p = rng.uniform(box[:, 0], box[:, 1])
            if f.contains(p):
                out.append(p)
                break
        else:
            raise CatalogError(f"could not sample a valid point for {spec.label} in {max_tries} tries")
    return out


# --- named collections -------------------------------------------------------------

RW_SCALE_FACTORS = {
    "t": ScaleFactor.power(1.0),
    "t^2": ScaleFactor.power(2.0),
    "sqrt(t)": ScaleFactor.power(0.5),
    "t^(2/3)": ScaleFactor.power(2.0 / 3.0),
    "e^t": ScaleFactor.exponential(1.0),
}


def robertson_walker(q: ScaleFactor | str, k: int = 0, n: int = 4, **params) -> MetricSpec:
    if isinstance(q, str):
        q = RW_SCALE_FACTORS[q] if q in RW_SCALE_FACTORS else ScaleFactor.parse(q)
    return MetricSpec("robertson_walker", n, {"k": k, **params}, q)


def rw_family(n: int = 4) -> list[MetricSpec]:
    """Robertson-Walker metrics for q in {t, t^2, sqrt t, t^(2/3), e^t} and k in {-1, 0, 1}."""
    return [robertson_walker(q, k, n) for q in RW_SCALE_FACTORS.values() for k in (-1, 0, 1)]


def rw_type_specs(n: int = 4) -> list[MetricSpec]:
    """Every warped Lorentzian catalog metric with a time scale factor."""
    return rw_family(n) + [
        MetricSpec("de_sitter_flat", n, {"H": 1.0}),
        MetricSpec("einstein_static", n, {"radius": 1.5}),
    ]


def standard_catalog() -> list[MetricSpec]:
    """One representative of every family plus the RW grid and a few n = 5 cases."""
    return [
        MetricSpec("minkowski", 4),
        MetricSpec("euclidean", 3),
        MetricSpec("sphere", 2),
        MetricSpec("sphere", 3),
        MetricSpec("sphere", 4, {"radius": 1.3}),
        MetricSpec("warped_riemannian", 4, {"k": 1}, ScaleFactor.polynomial([0.1, 0.4, -0.3])),
        MetricSpec("schwarzschild", 4, {"M": 1.0}),
        *rw_type_specs(4),
        robertson_walker("t^2", 1, 5),
        robertson_walker("sqrt(t)", -1, 5),
        MetricSpec("de_sitter_flat", 5, {"H": 0.7}),
    ]


def scale_factor_of(spec: MetricSpec) -> Optional[ScaleFactor]:
    """q(t) of an RW-type spec (None for other families)."""
    if spec.name == "robertson_walker":
        return spec.scale_factor
    if spec.name == "de_sitter_flat":
        return ScaleFactor.exponential(spec.parameters["H"])
    if spec.name == "einstein_static":
        return ScaleFactor.polynomial([1.0])
    return None


def perturbed_metric(n: int, seed: int, signature: str = LORENTZIAN, amplitude: float = 0.15) -> MetricField:
    """A generic analytic metric with no special structure (an identity-check control).

    ``g_ij(x) = eta_ij + amplitude * sum_r A^r_ij sin(w^r . x + phi^r)`` with
    symmetric random ``A^r``; ``eta`` is Minkowski or Euclidean.
    """
    rng = np.random.default_rng(seed)
    terms = 3
    amps = rng.normal(size=(terms, n, n))
    amps = 0.5 * (amps + np.swapaxes(amps, 1, 2)) * amplitude / n
    freqs = rng.normal(size=(terms, n))
    phases = rng.uniform(0, 2 * math.pi, size=terms)
    base = np.eye(n)
    if signature == LORENTZIAN:
        base[0, 0] = -1.0

    def evaluator(c):
        waves = [J.sin(sum(c[i] * float(freqs[r, i]) for i in range(n)) + float(phases[r])) for r in range(terms)]
        like = c[0]
        coeffs = np.zeros((n, n, like.coeffs.shape[-1]))
        coeffs[..., 0] = base
        for r in range(terms):
            coeffs = coeffs + amps[r][..., None] * waves[r].coeffs
        return Jet(coeffs, n, like.order)

    return MetricField(n, signature, evaluator, lambda p: bool(np.all(np.abs(p) <= 2.0)),
                       f"perturbed[n={n}; seed={seed}; {signature}]")
