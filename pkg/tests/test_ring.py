"""Jet and truncated-series ring: algebra, calculus, graded classes."""

import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jamlab.ring import (DeltaSeries, DomainError, Jet, SPoly, cos, exp,
                         gradient, jet_lift, lie_derivative, poly_class_check,
                         series_analytic, series_arith, sin)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

def test_jet_power_rule():
    j = jet_lift(lambda s: s[0] * s[0], [3.0], [1.0])
    assert j.value == 9.0
    assert j.partials[0] == 6.0


def test_jet_sin_at_zero():
    j = jet_lift(lambda s: sin(s[0]), [0.0], [1.0])
    assert j.value == 0.0
    assert j.partials[0] == 1.0


def _oscillator_v(state):
    # normal contact velocity of the pendulum-on-belt system
    phi, psi, dphi, dpsi = state
    return dpsi + sin(phi) * dphi


def test_jet_matches_central_difference_on_contact_velocity():
    rng = np.random.default_rng(7)
    h = 1e-6
    for _ in range(20):
        x = list(rng.uniform(-1.0, 1.0, 4))
        direction = [1.0, 0.0, 0.0, 0.0]
        j = jet_lift(_oscillator_v, x, direction)
        xp = [x[0] + h] + x[1:]
        xm = [x[0] - h] + x[1:]
        fd = (_oscillator_v(xp) - _oscillator_v(xm)) / (2 * h)
        assert abs(j.partials[0] - fd) <= 1e-6 * max(1.0, abs(fd))


def test_jet_chain_rules_random_composites():
    rng = np.random.default_rng(11)
    h = 1e-6

    def composite(s):
        return sin(s[0] * s[1]) + exp(s[2] / (2 + cos(s[0]))) - s[1] ** 3

    for _ in range(100):
        x = list(rng.uniform(-0.8, 0.8, 3))
        d = rng.uniform(-1.0, 1.0, 3)
        d /= np.linalg.norm(d)
        j = jet_lift(composite, x, list(d))
        fp = composite([xi + h * di for xi, di in zip(x, d)])
        fm = composite([xi - h * di for xi, di in zip(x, d)])
        fd = (fp - fm) / (2 * h)
        assert abs(j.partials[0] - fd) <= 1e-6 * max(1.0, abs(fd))


def test_jet_product_rule_exact_rationals():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b, c, d = [Fr(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
                      for _ in range(4)]
        f = lambda s: s[0] * s[0] + a * s[1]
        g = lambda s: b * s[0] - s[1] * s[1]
        x = [c, d]
        direction = [Fr(1), Fr(2)]
        jf = jet_lift(f, x, direction)
        jg = jet_lift(g, x, direction)
        jfg = jet_lift(lambda s: f(s) * g(s), x, direction)
        assert jfg.partials[0] == f(x) * jg.partials[0] + g(x) * jf.partials[0]


def test_gradient_matches_single_seeds():
    f = lambda s: s[0] * s[1] + sin(s[2])
    x = [0.3, -0.7, 0.2]
    grad = gradient(f, x)
    for i in range(3):
        d = [0.0] * 3
        d[i] = 1.0
        assert abs(grad[i] - jet_lift(f, x, d).partials[0]) < 1e-15


def test_division_by_zero_value_raises():
    with pytest.raises(ZeroDivisionError):
        jet_lift(lambda s: 1 / s[0], [0.0], [1.0])


def test_lie_derivative_nests():
    # second derivative along a linear flow: d^2/dt^2 (x^2) with dx/dt = 1
    field = lambda s: [1.0 + 0.0 * s[0]]
    f = lambda s: s[0] * s[0]
    second = lie_derivative(lie_derivative(f, field), field)
    assert abs(second([5.0]) - 2.0) < 1e-14


# ---------------------------------------------------------------------------
# polynomials and classes
# ---------------------------------------------------------------------------

def test_spoly_modes_and_degree():
    p = SPoly([Fr(1), Fr(2)])
    assert p.mode == "exact-rational"
    assert p.degree() == 1
    assert SPoly([0.5]).mode == "floating"
    assert SPoly([1, 0, 0]).degree() == 0   # trailing zeros normalized


def test_poly_class_examples():
    assert poly_class_check(SPoly([0, -96, 0, 0, 3]), 4)     # 3s^4 - 96s
    assert not poly_class_check(SPoly([0, 0, 1]), 4)         # s^2 not in class 4
    assert poly_class_check(SPoly(), -3)                     # zero in empty class


@given(st.integers(0, 6), st.integers(0, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_class_product_closure(k, l, data):
    def member(n):
        coeffs = [0] * (n + 1)
        for power in range(n, -1, -3):
            coeffs[power] = data.draw(st.integers(-5, 5))
        return SPoly(coeffs)

    p, q = member(k), member(l)
    assert poly_class_check(p, k) and poly_class_check(q, l)
    assert poly_class_check(p * q, k + l)


def test_spoly_calculus():
    p = SPoly([Fr(0), Fr(0), Fr(3)])        # 3 s^2
    assert p.derivative().coeffs == [0, Fr(6)]
    assert p.antiderivative().coeffs == [0, 0, 0, Fr(1)]
    assert p(2) == 12


# ---------------------------------------------------------------------------
# delta series
# ---------------------------------------------------------------------------

def test_series_product_truncates():
    one = DeltaSeries.constant(1, 4)
    d = DeltaSeries.delta(4)
    prod = series_arith(one + d, one - d, "mul")
    assert [c.coeffs for c in prod.coeffs] == [[1], [], [-1], []]


def test_series_geometric_inverse():
    one = DeltaSeries.constant(1, 4)
    d = DeltaSeries.delta(4)
    inv = series_arith(one, one - d, "div")
    assert all(c.coeffs == [1] for c in inv.coeffs)


def test_series_monomial_square():
    sd2 = DeltaSeries([SPoly(), SPoly(), SPoly([0, 1])], 6)
    sq = sd2 * sd2
    assert [(n, c.coeffs) for n, c in enumerate(sq.coeffs) if not c.is_zero()] \
        == [(4, [0, 0, 1])]


def test_series_sin_composition():
    sd2 = DeltaSeries([SPoly(), SPoly(), SPoly([0, 1])], 8)
    out = sin(sd2)
    nz = {n: c.coeffs for n, c in enumerate(out.coeffs) if not c.is_zero()}
    assert nz == {2: [0, 1], 6: [0, 0, 0, Fr(-1, 6)]}


def test_series_cos_of_constant_base():
    base = 0.739
    out = series_analytic("cos", DeltaSeries.constant(0.0, 4), base=base)
    assert abs(out.coefficient(0).constant_term() - math.cos(base)) < 1e-15
    assert all(out.coefficient(k).is_zero() for k in range(1, 4))


def test_series_exp():
    out = exp(DeltaSeries.delta(3))
    assert [c.coeffs for c in out.coeffs] == [[1], [1], [Fr(1, 2)]]


def test_series_division_needs_constant_lead():
    d = DeltaSeries.delta(3)
    with pytest.raises(DomainError):
        d.inverse()
    s_lead = DeltaSeries([SPoly([0, 1])], 3)
    with pytest.raises(DomainError):
        s_lead.inverse()


def test_series_order_mismatch():
    with pytest.raises(DomainError):
        DeltaSeries.delta(3) + DeltaSeries.delta(4)


def test_exact_trig_of_nonzero_rational_refused():
    s = DeltaSeries.constant(Fr(1, 3), 4)
    with pytest.raises(DomainError):
        sin(s)


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_series_ring_identities_exact(data):
    M = 5

    def rand_series():
        coeffs = []
        for _ in range(M):
            deg = data.draw(st.integers(0, 2))
            coeffs.append(SPoly([Fr(data.draw(st.integers(-4, 4)))
                                 for _ in range(deg + 1)]))
        return DeltaSeries(coeffs, M)

    a, b, c = rand_series(), rand_series(), rand_series()

    def eq(x, y):
        return all(p == q for p, q in zip(x.coeffs, y.coeffs))

    assert eq((a * b) * c, a * (b * c))
    assert eq(a * (b + c), a * b + a * c)
    assert eq(a + b, b + a)


def test_series_evaluation_and_shift():
    d = DeltaSeries.delta(5)
    s = DeltaSeries([SPoly([0, 1])], 5)
    expr = s * d * d + 2
    assert abs(expr(1.5, 0.1) - (1.5 * 0.01 + 2)) < 1e-15
    assert expr.shift(1).coefficient(3).coeffs == [0, 1]
