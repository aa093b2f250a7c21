"""Dense tensors with explicit per-slot variance."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conventions import CO, CONTRA, LORENTZIAN, RIEMANNIAN, SIGNATURES


class TensorError(ValueError):
    pass


class MetricError(ValueError):
    pass


def _flip(v: str) -> str:
    return CONTRA if v == CO else CO


class Tensor:
    """Components over an ``n``-dimensional chart plus slot variances.

    A rank-0 tensor converts to ``float`` and mixes freely with real scalars.
    """

    __slots__ = ("components", "variance")

    def __init__(self, components, variance: Sequence[str] = ()):
        components = np.asarray(components, dtype=float)
        variance = tuple(variance)
        for v in variance:
            if v not in (CO, CONTRA):
                raise TensorError(f"unknown variance tag {v!r}")
        if components.ndim != len(variance):
            raise TensorError(f"{components.ndim}-d components but {len(variance)} variance tags")
        if components.ndim and len(set(components.shape)) != 1:
            raise TensorError(f"components must be n^rank, got shape {components.shape}")
        self.components = components
        self.variance = variance

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def dimension(self) -> int | None:
        return self.components.shape[0] if self.rank else None

    def __float__(self):
        if self.rank:
            raise TensorError("only rank-0 tensors convert to float")
        return float(self.components)

    def __repr__(self):
        return f"Tensor(variance={self.variance}, shape={self.components.shape})"

    def _like(self, other) -> np.ndarray:
        if isinstance(other, Tensor):
            if other.variance != self.variance:
                raise TensorError(f"variance mismatch {self.variance} vs {other.variance}")
            return other.components
        if self.rank:
            raise TensorError("cannot add a scalar to a tensor of positive rank")
        return np.asarray(other, dtype=float)

    def __add__(self, other):
        return Tensor(self.components + self._like(other), self.variance)

    __radd__ = __add__

    def __sub__(self, other):
        return Tensor(self.components - self._like(other), self.variance)

    def __neg__(self):
        return Tensor(-self.components, self.variance)

    def __mul__(self, scalar):
        if isinstance(scalar, Tensor):
            return tensor_product(self, scalar)
        return Tensor(self.components * float(scalar), self.variance)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.components.ravel()))

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "variance": list(self.variance),
            "components": self.components.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Tensor":
        t = cls(np.array(data["components"], dtype=float), data["variance"])
        if t.rank and t.dimension != data.get("dimension", t.dimension):
            raise TensorError("dimension field disagrees with components")
        return t


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=float), ())


def tensor_product(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.rank and b.rank and a.dimension != b.dimension:
        raise TensorError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    return Tensor(np.multiply.outer(a.components, b.components), a.variance + b.variance)


def contract(t: Tensor, slot_a: int, slot_b: int) -> Tensor:
    """Sum over a pair of opposite-variance slots."""
    r = t.rank
    if not (0 <= slot_a < r and 0 <= slot_b < r):
        raise TensorError(f"slots ({slot_a}, {slot_b}) out of range for rank {r}")
    if slot_a == slot_b:
        raise TensorError("cannot contract a slot with itself")
    if t.variance[slot_a] == t.variance[slot_b]:
        raise TensorError(
            f"slots {slot_a} and {slot_b} are both {t.variance[slot_a]}; contraction needs opposite variance"
        )
    comps = np.trace(t.components, axis1=slot_a, axis2=slot_b)
    variance = tuple(v for k, v in enumerate(t.variance) if k not in (slot_a, slot_b))
    return Tensor(comps, variance)


@dataclass(frozen=True)
class MetricAtPoint:
    """Metric components at a point with their inverse and declared signature."""

    g: Tensor
    g_inv: Tensor
    signature: str

    @classmethod
    def from_matrix(cls, g, signature: str = RIEMANNIAN, check: bool = True) -> "MetricAtPoint":
        g = np.asarray(g, dtype=float)
        if signature not in SIGNATURES:
            raise MetricError(f"unknown signature {signature!r}")
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise MetricError(f"metric must be square, got shape {g.shape}")
        scale = max(np.abs(g).max(), 1e-300)
        if np.abs(g - g.T).max() > 1e-14 * scale:
            raise MetricError("metric is not symmetric")
        if check:
            # |det| of the scaled matrix; catches near-singular charts
            if abs(np.linalg.det(g / scale)) <= 1e-10:
                raise MetricError("metric is singular")
        g = 0.5 * (g + g.T)
        g_inv = np.linalg.inv(g)
        g_inv = 0.5 * (g_inv + g_inv.T)
        n = g.shape[0]
        if check:
            if np.abs(g @ g_inv - np.eye(n)).max() > 1e-12 * max(1.0, np.linalg.cond(g)):
                raise MetricError("metric inverse is inaccurate")
            eig = np.linalg.eigvalsh(g)
            negatives = int(np.sum(eig < 0))
            expected = 1 if signature == LORENTZIAN else 0
            if negatives != expected or np.any(eig == 0):
                raise MetricError(
                    f"eigenvalue signs {np.sign(eig).astype(int).tolist()} do not match {signature} signature"
                )
        return cls(Tensor(g, (CO, CO)), Tensor(g_inv, (CONTRA, CONTRA)), signature)

    @property
    def dimension(self) -> int:
        return self.g.dimension

    @property
    def matrix(self) -> np.ndarray:
        return self.g.components

    @property
    def inverse(self) -> np.ndarray:
        return self.g_inv.components

    def inner(self, a, b, variance: str = CO) -> float:
        """g-inner product of two vectors given in the same variance."""
        m = self.inverse if variance == CO else self.matrix
        return float(np.asarray(a) @ m @ np.asarray(b))


def raise_lower(t: Tensor, slot: int, m: MetricAtPoint) -> Tensor:
    """Flip the variance of one slot by contracting with g or g^{-1}."""
    if not 0 <= slot < t.rank:
        raise TensorError(f"slot {slot} out of range for rank {t.rank}")
    mat = m.matrix if t.variance[slot] == CONTRA else m.inverse
    comps = np.moveaxis(np.tensordot(mat, t.components, axes=([1], [slot])), 0, slot)
    variance = t.variance[:slot] + (_flip(t.variance[slot]),) + t.variance[slot + 1:]
    return Tensor(comps, variance)


def g_double_form_array(g: np.ndarray) -> np.ndarray:
    """``G[j,k,l,m] = g[m,j] g[k,l] - g[m,k] g[j,l]``."""
    return np.einsum("mj,kl->jklm", g, g) - np.einsum("mk,jl->jklm", g, g)


def g_double_form(m: MetricAtPoint) -> Tensor:
    return Tensor(g_double_form_array(m.matrix), (CO, CO, CO, CO))
