import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recurv import jets as J
from recurv.jets import Jet, JetDomainError, JetError


def variable(x, order=2):
    return J.seed_variables([x], order)[0]


# --- closed-form examples ------------------------------------------------------


def test_seed_variable_and_square():
    x = variable(3.0)
    assert x.coeffs.tolist() == [3.0, 1.0, 0.0]
    assert (x * x).coeffs.tolist() == [9.0, 6.0, 2.0]


def test_coefficient_count_matches_binomial():
    for n in range(1, 6):
        for order in range(5):
            assert J.coefficient_count(n, order) == math.comb(n + order, order)
            assert len(J.multi_indices(n, order)) == math.comb(n + order, order)


def test_graded_lex_order_makes_truncation_a_prefix():
    idx = J.multi_indices(3, 4)
    degrees = [sum(a) for a in idx]
    assert degrees == sorted(degrees)
    assert idx[: J.coefficient_count(3, 2)] == J.multi_indices(3, 2)


def test_exp_at_zero_is_all_ones():
    j = J.exp(J.seed_variables([0.0, 0.0], 4)[0])
    ones = [J.partial(j, (k, 0)) for k in range(5)]
    assert ones == [1.0] * 5


def test_sqrt_and_reciprocal():
    assert J.sqrt(variable(4.0, 1)).coeffs.tolist() == [2.0, 0.25]
    assert J.reciprocal(variable(2.0, 1)).coeffs.tolist() == [0.5, -0.25]


def test_partials_of_simple_products():
    x, y = J.seed_variables([0.3, -1.2], 2)
    assert J.partial(x * y, (0, 0)) == pytest.approx(0.3 * -1.2)
    assert J.partial(x * y, (1, 1)) == 1.0
    assert J.partial(J.sin(variable(0.0, 4)), (3,)) == -1.0


def test_partial_rejects_high_degree():
    with pytest.raises(JetError):
        J.partial(variable(1.0, 2), (3,))


def test_seed_order_out_of_range():
    with pytest.raises(JetError):
        J.seed_variables([1.0], 5)
    with pytest.raises(JetError):
        J.seed_variables([1.0], -1)


def test_mixing_orders_is_an_error():
    with pytest.raises(JetError):
        variable(1.0, 2) + variable(1.0, 3)
    with pytest.raises(JetError):
        variable(1.0, 2) * variable(1.0, 1)


@pytest.mark.parametrize("name,value", [("sqrt", 0.0), ("sqrt", -1.0), ("ln", -2.0), ("reciprocal", 0.0)])
def test_domain_errors_name_function_and_value(name, value):
    with pytest.raises(JetDomainError) as err:
        J.apply_elementary(name, variable(value))
    assert name in str(err.value)
    assert repr(value) in str(err.value) or str(value) in str(err.value)


def test_apply_elementary_unknown_and_missing_exponent():
    with pytest.raises(JetError):
        J.apply_elementary("tanh", variable(1.0))
    with pytest.raises(JetError):
        J.apply_elementary("pow_const", variable(1.0))


def test_truncate_and_derivative():
    x, y = J.seed_variables([1.5, 0.5], 4)
    f = J.exp(x) * J.sin(y)
    assert np.array_equal(f.truncate(2).coeffs, f.coeffs[: J.coefficient_count(2, 2)])
    dfx = f.derivative(0)
    assert dfx.order == 3
    for alpha in J.multi_indices(2, 3):
        shifted = (alpha[0] + 1, alpha[1])
        assert J.partial(dfx, alpha) == J.partial(f, shifted)
    with pytest.raises(JetError):
        f.truncate(2).truncate(3)


# --- finite-difference oracle ---------------------------------------------------


def fd_derivative_1d(fn, x, k, h=1e-3):
    """k-th derivative by central differences with one Richardson step.

    ``fn`` is evaluated in 40-digit arithmetic so that the step-1e-3 stencils
    are limited by truncation error only.
    """
    with mpmath.workdps(40):
        x = mpmath.mpf(x)

        def central(step):
            step = mpmath.mpf(step)
            return sum((-1) ** i * math.comb(k, i) * fn(x + (mpmath.mpf(k) / 2 - i) * step)
                       for i in range(k + 1)) / step**k

        return float((4 * central(mpmath.mpf(h) / 2) - central(h)) / 3)


def test_exp_of_sin_against_finite_differences():
    j = J.exp(J.sin(variable(0.7, 4)))
    fn = lambda t: mpmath.exp(mpmath.sin(t))
    for k in range(1, 5):
        assert J.partial(j, (k,)) == pytest.approx(fd_derivative_1d(fn, 0.7, k), abs=1e-6)


UNARY = {
    "exp": (J.exp, mpmath.exp),
    "sin": (J.sin, mpmath.sin),
    "cos": (J.cos, mpmath.cos),
    "ln": (J.ln, mpmath.log),
    "sqrt": (J.sqrt, mpmath.sqrt),
    "reciprocal": (J.reciprocal, lambda v: 1 / v),
    "cube": (lambda j: J.pow_const(j, 3.0), lambda v: v**3),
    "pow": (lambda j: J.pow_const(j, 1.7), lambda v: v ** mpmath.mpf(1.7)),
}
# arguments of these are shifted to v^2 + 1/2 to stay positive
POSITIVE_ONLY = {"ln", "sqrt", "pow", "reciprocal"}


def _composite(names):
    def on_jet(j):
        for n in names:
            if n in POSITIVE_ONLY:
                j = j * j + 0.5
            j = UNARY[n][0](j)
        return j

    def on_mp(v):
        for n in names:
            if n in POSITIVE_ONLY:
                v = v * v + mpmath.mpf(0.5)
            v = UNARY[n][1](v)
        return v

    return on_jet, on_mp


@settings(max_examples=1000, deadline=None)
@given(
    names=st.lists(st.sampled_from(sorted(UNARY)), min_size=1, max_size=3),
    x=st.floats(min_value=-0.8, max_value=0.8),
)
def test_chain_rule_against_finite_differences(names, x):
    on_jet, on_mp = _composite(names)
    j = on_jet(variable(x, 4))
    for k in range(1, 5):
        fd = fd_derivative_1d(on_mp, x, k)
        ref = J.partial(j, (k,))
        assert abs(fd - ref) <= 1e-5 * max(1.0, abs(ref))


# --- algebraic properties ---------------------------------------------------------


def random_jet(draw_coeffs, n, order):
    return Jet(np.array(draw_coeffs, dtype=float), n, order)


jet_dims = st.tuples(st.integers(1, 3), st.integers(0, 4))


@st.composite
def integer_jets(draw, count=3):
    n, order = draw(jet_dims)
    k = J.coefficient_count(n, order)
    coeff = st.lists(st.integers(-9, 9), min_size=k, max_size=k)
    return [random_jet(draw(coeff), n, order) for _ in range(count)]


@given(integer_jets())
def test_ring_laws_exact(js):
    a, b, c = js
    assert np.array_equal(((a + b) + c).coeffs, (a + (b + c)).coeffs)
    assert np.array_equal((a * (b + c)).coeffs, (a * b + a * c).coeffs)
    assert np.array_equal((a * b).coeffs, (b * a).coeffs)


def leibniz_oracle(p, q, n, order):
    idx = J.multi_indices(n, order)
    pos = {a: i for i, a in enumerate(idx)}
    out = np.zeros(len(idx))
    for alpha in idx:
        total = 0.0
        for beta in itertools.product(*(range(a + 1) for a in alpha)):
            gamma = tuple(a - b for a, b in zip(alpha, beta))
            w = math.prod(math.comb(a, b) for a, b in zip(alpha, beta))
            total += w * p[pos[beta]] * q[pos[gamma]]
        out[pos[alpha]] = total
    return out


@given(integer_jets(count=2))
def test_leibniz_product_matches_loop_oracle(js):
    a, b = js
    assert np.array_equal((a * b).coeffs, leibniz_oracle(a.coeffs, b.coeffs, a.dimension, a.order))


@settings(max_examples=200)
@given(
    x=st.floats(0.1, 3.0),
    y=st.floats(0.1, 3.0),
    ops=st.lists(st.sampled_from(["add", "sub", "mul", "div", "exp", "sin", "cos", "ln", "sqrt"]), max_size=6),
)
def test_order_zero_is_plain_arithmetic(x, y, ops):
    jx, jy = J.seed_variables([x, y], 0)
    vx, vy = x, y
    for op in ops:
        if op == "add":
            jx, vx = jx + jy, vx + vy
        elif op == "sub":
            jx, vx = jx - jy, vx - vy
        elif op == "mul":
            jx, vx = jx * jy, vx * vy
        elif op == "div":
            jx, vx = jx / jy, vx / vy
        elif op == "exp" and abs(vx) < 50:
            jx, vx = J.exp(jx), float(np.exp(vx))
        elif op == "sin":
            jx, vx = J.sin(jx), float(np.sin(vx))
        elif op == "cos":
            jx, vx = J.cos(jx), float(np.cos(vx))
        elif op == "ln" and vx > 0:
            jx, vx = J.ln(jx), float(np.log(vx))
        elif op == "sqrt" and vx > 0:
            jx, vx = J.sqrt(jx), float(np.sqrt(vx))
    assert jx.value == vx or (math.isnan(jx.value) and math.isnan(vx))


def test_batched_jets_broadcast_like_arrays():
    x, y = J.seed_variables([0.4, 0.9], 3)
    m = Jet.stack([x, y, x * y])
    assert m.shape == (3,)
    out = J.exp(m)
    assert J.partial(out[2], (1, 1)) == pytest.approx(J.partial(J.exp(x * y), (1, 1)), rel=1e-15)


def test_integer_power_matches_repeated_product():
    x = variable(1.3, 4)
    assert np.allclose((x**3).coeffs, (x * x * x).coeffs, rtol=1e-15)
    assert (x**0).coeffs.tolist() == [1.0, 0, 0, 0, 0]
    assert np.allclose((x**0.5).coeffs, J.sqrt(x).coeffs, rtol=1e-14)
