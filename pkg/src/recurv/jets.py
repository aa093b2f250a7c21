"""Truncated multivariate Taylor arithmetic ("jets").

A jet of order ``N`` in ``n`` variables carries every partial derivative
``d^alpha f`` with ``|alpha| <= N`` of some analytic function at a base point.
Coefficients are stored as derivative values, not Taylor coefficients, so
``partial`` is a plain lookup.

Multi-indices are ordered graded-lexicographically: first by total degree,
then lexicographically descending within a degree.  For ``n = 2`` the
ordering is ``(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...``.  A useful
consequence is that truncating a jet to a lower order is a prefix slice.

Jets may be *batched*: ``coeffs`` has shape ``(*batch, K)`` where ``K`` is the
coefficient count, and arithmetic broadcasts over the batch axes.  A metric
evaluated in jet arithmetic is a single ``Jet`` with batch shape ``(n, n)``.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

MAX_ORDER = 4

ELEMENTARY = ("exp", "ln", "sin", "cos", "sqrt", "pow_const", "reciprocal")


class JetError(ValueError):
    """Incompatible jets or an out-of-range order / multi-index."""


class JetDomainError(ValueError):
    """An elementary function was applied outside its domain."""

    def __init__(self, name, value):
        self.name = name
        self.value = value
        super().__init__(f"{name} is undefined at value {value!r}")


def multi_indices(dimension: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices with total degree <= order, graded-lex ordered."""
    out = []
    for degree in range(order + 1):
        block = [
            alpha
            for alpha in itertools.product(range(degree, -1, -1), repeat=dimension)
            if sum(alpha) == degree
        ]
        out.extend(block)
    return out


def coefficient_count(dimension: int, order: int) -> int:
    return math.comb(dimension + order, order)


class JetAlgebra:
    """Index tables for jets of a fixed (dimension, order).

    ``left``/``right``/``scatter`` implement the Leibniz product: for a batch of
    jets ``a`` and ``b``::

        (a[..., left] * b[..., right]) @ scatter

    gives the derivative values of the product.  ``scatter`` carries the
    multinomial weights ``prod_i C(gamma_i, alpha_i)``.
    """

    def __init__(self, dimension: int, order: int):
        if dimension < 1:
            raise JetError(f"dimension must be positive, got {dimension}")
        if not 0 <= order <= MAX_ORDER:
            raise JetError(f"jet order must lie in [0, {MAX_ORDER}], got {order}")
        self.dimension = dimension
        self.order = order
        self.indices = multi_indices(dimension, order)
        self.position = {alpha: k for k, alpha in enumerate(self.indices)}
        self.size = len(self.indices)

        left, right, target, weight = [], [], [], []
        for a, alpha in enumerate(self.indices):
            for b, beta in enumerate(self.indices):
                gamma = tuple(x + y for x, y in zip(alpha, beta))
                if sum(gamma) > order:
                    continue
                left.append(a)
                right.append(b)
                target.append(self.position[gamma])
                weight.append(math.prod(math.comb(g, x) for g, x in zip(gamma, alpha)))
        self.left = np.array(left, dtype=np.intp)
        self.right = np.array(right, dtype=np.intp)
        self.scatter = np.zeros((len(left), self.size))
        self.scatter[np.arange(len(left)), target] = weight

        # shift[i][k] = position of indices_lower[k] + e_i, for the order-1 jet
        self.shift = []
        if order >= 1:
            lower = multi_indices(dimension, order - 1)
            for i in range(dimension):
                self.shift.append(np.array(
                    [self.position[alpha[:i] + (alpha[i] + 1,) + alpha[i + 1:]] for alpha in lower],
                    dtype=np.intp,
                ))

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a[..., self.left] * b[..., self.right]) @ self.scatter

    def einsum(self, subscripts: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Jet-valued ``np.einsum`` over two operands.

        ``subscripts`` names only the tensor axes, e.g. ``"ij,jk->ik"``; the
        trailing coefficient axis is handled here.
        """
        inputs, output = subscripts.split("->")
        sa, sb = inputs.split(",")
        spec = f"{sa}Z,{sb}Z->{output}Z"
        prod = np.einsum(spec, a[..., self.left], b[..., self.right], optimize=True)
        return prod @ self.scatter

    def derivative(self, a: np.ndarray, i: int) -> np.ndarray:
        """Coefficients of d_i a as an order-1 jet."""
        if self.order == 0:
            raise JetError("cannot differentiate an order-0 jet")
        return a[..., self.shift[i]]


@lru_cache(maxsize=None)
def algebra(dimension: int, order: int) -> JetAlgebra:
    return JetAlgebra(dimension, order)


def truncate_coeffs(coeffs: np.ndarray, dimension: int, order: int) -> np.ndarray:
    return coeffs[..., : coefficient_count(dimension, order)]


class Jet:
    """A (possibly batched) truncated Taylor expansion.

    ``Jet`` values are immutable by convention; every operation returns a new
    instance.
    """

    __slots__ = ("coeffs", "dimension", "order")
    __array_priority__ = 100

    def __init__(self, coeffs, dimension: int, order: int):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1:] != (coefficient_count(dimension, order),):
            raise JetError(
                f"expected trailing axis of length {coefficient_count(dimension, order)}, "
                f"got shape {coeffs.shape}"
            )
        self.coeffs = coeffs
        self.dimension = dimension
        self.order = order

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, value, dimension: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (coefficient_count(dimension, order),))
        coeffs[..., 0] = value
        return cls(coeffs, dimension, order)

    @classmethod
    def stack(cls, jets: Sequence["Jet"], axis: int = 0) -> "Jet":
        first = jets[0]
        for j in jets[1:]:
            first._check(j)
        if axis < 0:
            axis -= 1
        return cls(np.stack([j.coeffs for j in jets], axis=axis), first.dimension, first.order)

    # views ------------------------------------------------------------------

    @property
    def value(self):
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def algebra(self) -> JetAlgebra:
        return algebra(self.dimension, self.order)

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        if any(k is Ellipsis for k in key):
            key = key + (slice(None),)
        return Jet(self.coeffs[key], self.dimension, self.order)

    def __len__(self):
        return self.shape[0]

    def __repr__(self):
        return f"Jet(dimension={self.dimension}, order={self.order}, shape={self.shape}, value={self.value!r})"

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetError(f"cannot raise jet order from {self.order} to {order}")
        return Jet(truncate_coeffs(self.coeffs, self.dimension, order), self.dimension, order)

    def derivative(self, i: int) -> "Jet":
        return Jet(self.algebra.derivative(self.coeffs, i), self.dimension, self.order - 1)

    # arithmetic -------------------------------------------------------------

    def _check(self, other: "Jet"):
        if (self.dimension, self.order) != (other.dimension, other.order):
            raise JetError(
                f"cannot mix jets of (dimension, order) {(self.dimension, self.order)} "
                f"and {(other.dimension, other.order)}"
            )

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return other
        return Jet.constant(other, self.dimension, self.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.coeffs + other.coeffs, self.dimension, self.order)
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.shape, other.shape)
        c = np.broadcast_to(self.coeffs, shape + self.coeffs.shape[-1:]).copy()
        c[..., 0] = c[..., 0] + other
        return Jet(c, self.dimension, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.dimension, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.algebra.mul(self.coeffs, other.coeffs), self.dimension, self.order)
        other = np.asarray(other, dtype=float)
        return Jet(self.coeffs * other[..., None], self.dimension, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        out = self * reciprocal(other)
        # keep the value part a true quotient so order-0 matches float division
        out.coeffs[..., 0] = self.coeffs[..., 0] / other.coeffs[..., 0]
        return out

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, (int, np.integer)) and exponent >= 0:
            out = Jet.constant(np.ones(self.shape), self.dimension, self.order)
            base = self
            e = int(exponent)
            while e:
                if e & 1:
                    out = out * base
                e >>= 1
                if e:
                    base = base * base
            if exponent == 0:
                return out
            out.coeffs[..., 0] = self.coeffs[..., 0] ** int(exponent)
            return out
        return pow_const(self, float(exponent))


# --- seeding and extraction ---------------------------------------------------


def seed_variables(point, order: int) -> list[Jet]:
    """Coordinate jets at ``point``: value ``point[i]``, d_i = 1, all else 0."""
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise JetError("point must be a 1-d coordinate vector")
    if not np.all(np.isfinite(point)):
        raise JetError(f"point has non-finite coordinates: {point.tolist()}")
    if not 0 <= order <= MAX_ORDER:
        raise JetError(f"jet order must lie in [0, {MAX_ORDER}], got {order}")
    n = point.size
    out = []
    for i in range(n):
        c = np.zeros(coefficient_count(n, order))
        c[0] = point[i]
        if order >= 1:
            c[1 + i] = 1.0
        out.append(Jet(c, n, order))
    return out


def partial(j: Jet, alpha: Sequence[int]):
    """The derivative d^alpha of ``j`` at its base point."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != j.dimension or min(alpha) < 0:
        raise JetError(f"multi-index {alpha} does not match dimension {j.dimension}")
    if sum(alpha) > j.order:
        raise JetError(f"multi-index degree {sum(alpha)} exceeds jet order {j.order}")
    v = j.coeffs[..., j.algebra.position[alpha]]
    return float(v) if v.ndim == 0 else v


# --- elementary functions -----------------------------------------------------


def _compose(j: Jet, derivs: list[np.ndarray]) -> Jet:
    """f(j) given f^(k)(value) for k = 0..order, via the nilpotent expansion."""
    alg = j.algebra
    delta = j.coeffs.copy()
    delta[..., 0] = 0.0
    out = np.zeros_like(j.coeffs)
    out[..., 0] = derivs[0]
    power = delta
    for k in range(1, j.order + 1):
        out += power * (derivs[k] / math.factorial(k))[..., None]
        if k < j.order:
            power = alg.mul(power, delta)
    return Jet(out, j.dimension, j.order)


def _require(name, ok, v):
    ok = np.asarray(ok)
    if not ok.all():
        bad = np.asarray(v)[~ok] if ok.ndim else v
        raise JetDomainError(name, float(np.ravel(bad)[0]))


def exp(j: Jet) -> Jet:
    e = np.exp(j.coeffs[..., 0])
    return _compose(j, [e] * (j.order + 1))


def ln(j: Jet) -> Jet:
    v = j.coeffs[..., 0]
    _require("ln", v > 0, v)
    derivs = [np.log(v)]
    for k in range(1, j.order + 1):
        derivs.append((-1) ** (k - 1) * math.factorial(k - 1) / v**k)
    return _compose(j, derivs)


log = ln


def sin(j: Jet) -> Jet:
    v = j.coeffs[..., 0]
    s, c = np.sin(v), np.cos(v)
    cycle = [s, c, -s, -c]
    return _compose(j, [cycle[k % 4] for k in range(j.order + 1)])


def cos(j: Jet) -> Jet:
    v = j.coeffs[..., 0]
    s, c = np.sin(v), np.cos(v)
    cycle = [c, -s, -c, s]
    return _compose(j, [cycle[k % 4] for k in range(j.order + 1)])


def pow_const(j: Jet, exponent: float) -> Jet:
    v = j.coeffs[..., 0]
    c = float(exponent)
    if c != int(c):
        _require("pow_const", v > 0, v)
    elif c < 0:
        _require("pow_const", v != 0, v)
    derivs = []
    falling = 1.0
    for k in range(j.order + 1):
        if k:
            falling *= c - (k - 1)
        derivs.append(falling * np.power(v, c - k) if falling else np.zeros_like(v))
    derivs[0] = np.power(v, c)
    return _compose(j, derivs)


def sqrt(j: Jet) -> Jet:
    v = j.coeffs[..., 0]
    _require("sqrt", v > 0, v)
    out = pow_const(j, 0.5)
    out.coeffs[..., 0] = np.sqrt(v)
    return out


def reciprocal(j: Jet) -> Jet:
    v = j.coeffs[..., 0]
    _require("reciprocal", v != 0, v)
    out = pow_const(j, -1.0)
    out.coeffs[..., 0] = 1.0 / v
    return out


_FUNCTIONS = {"exp": exp, "ln": ln, "sin": sin, "cos": cos, "sqrt": sqrt, "reciprocal": reciprocal}


def apply_elementary(name: str, j: Jet, exponent: float | None = None) -> Jet:
    """Apply an elementary function by tag; ``pow_const`` needs ``exponent``."""
    if name == "pow_const":
        if exponent is None:
            raise JetError("pow_const requires an exponent")
        return pow_const(j, exponent)
    try:
        return _FUNCTIONS[name](j)
    except KeyError:
        raise JetError(f"unknown elementary function {name!r}; expected one of {ELEMENTARY}") from None
