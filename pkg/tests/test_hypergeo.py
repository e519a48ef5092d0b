"""Gamma, 1F2, the Theta function and the lift-off/impact classifier."""

import math

import numpy as np
import pytest

from jamlab.hypergeo import (InnerPerturbation, RangeError, ThetaEvaluator,
                             classify_outcome, f12, gamma, inner_perturbation,
                             liftoff_signal_scan, perturbation_exponents,
                             theta, theta_asymptotic_ratio, theta_basis,
                             theta_initial_data, theta_positive_tail_log)
from jamlab.ring import DomainError

mp = pytest.importorskip("mpmath")


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------

def test_gamma_small_integers_and_half():
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_gamma_negative_reflection_value():
    # Gamma(-1.5) via reflection: pi / (sin(-1.5 pi) * Gamma(2.5)) = 4 sqrt(pi)/3
    assert gamma(-1.5) == pytest.approx(4.0 * math.sqrt(math.pi) / 3.0,
                                        rel=1e-12)
    assert gamma(-1.5) == pytest.approx(2.3632718, abs=1e-7)


def test_gamma_sign_pattern():
    # sign alternates on the negative axis: positive on (-2,-1), (-4,-3), ...
    assert gamma(-0.5) < 0
    assert gamma(-1.5) > 0
    assert gamma(-2.5) < 0
    assert gamma(-3.5) > 0


def test_gamma_poles():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(DomainError):
            gamma(x)


def test_gamma_reflection_identity():
    xs = np.linspace(-9.97, 9.97, 331)
    for x in xs:
        if abs(x - round(x)) < 1e-3 or abs((1 - x) - round(1 - x)) < 1e-3:
            continue
        lhs = gamma(x) * gamma(1.0 - x)
        rhs = math.pi / math.sin(math.pi * x)
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_gamma_against_stdlib():
    rng = np.random.default_rng(0)
    for x in rng.uniform(0.05, 30.0, 200):
        assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


# ---------------------------------------------------------------------------
# 1F2
# ---------------------------------------------------------------------------

def test_f12_at_zero():
    assert f12(0.3, 0.5, 1.5, 0.0) == 1.0


def test_f12_against_mpmath():
    rng = np.random.default_rng(1)
    for _ in range(40):
        a = rng.uniform(-3, 3)
        b1, b2 = rng.uniform(0.2, 4, 2)
        x = rng.uniform(-30, 30)
        ref = float(mp.hyp1f2(a, b1, b2, x))
        assert f12(a, b1, b2, x) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_f12_rejects_nonpositive_integer_lower():
    with pytest.raises(DomainError):
        f12(0.5, -1.0, 0.5, 1.0)


def test_f12_overflow_signals():
    with pytest.raises(RangeError):
        f12(0.5, 1.0 / 3.0, 2.0 / 3.0, 1e6)


def test_basis_identity_pattern_at_zero():
    vals, d1, d2, _ = theta_basis(0.0, 1.5)
    assert np.allclose(vals, (1.0, 0.0, 0.0), atol=1e-15)
    assert np.allclose(d1, (0.0, 1.0, 0.0), atol=1e-15)
    assert np.allclose(d2, (0.0, 0.0, 1.0), atol=1e-15)


def test_basis_combination_matches_ode_oracle():
    from scipy.integrate import solve_ivp
    rng = np.random.default_rng(2)
    beta = 1.7
    for _ in range(5):
        w0 = list(rng.uniform(-1, 1, 3))
        for tau in (-3.0, -1.2, 2.2, 3.0):
            sol = solve_ivp(lambda t, w: [w[1], w[2], t * w[1] - beta * w[0]],
                            [0.0, tau], w0, method="DOP853",
                            rtol=1e-12, atol=1e-14)
            vals = theta_basis(tau, beta)[0]
            mine = sum(c * v for c, v in zip(w0, vals))
            assert mine == pytest.approx(sol.y[0, -1], rel=1e-9, abs=1e-12)


# ---------------------------------------------------------------------------
# Theta
# ---------------------------------------------------------------------------

def test_theta_value_at_zero():
    val, _ = theta(0.0, 1.5)
    assert val == pytest.approx(-1.0 / (2.0 * math.sqrt(3.0)), abs=1e-10)


def test_theta_initial_data_consistency():
    t0, t1, t2 = theta_initial_data(1.5)
    assert t0 == pytest.approx(-0.2886751345948129, abs=1e-12)
    ev = ThetaEvaluator(1.5)
    tv = ev.theta(0.0)
    assert tv.value == pytest.approx(t0, abs=1e-14)
    assert tv.derivative == pytest.approx(t1, abs=1e-14)


def test_theta_dual_path_agreement():
    for beta in (0.5, 1.5, 2.5, 7.0 / 3.0):
        series_ev = ThetaEvaluator(beta, series_radius=5.0)
        ode_ev = ThetaEvaluator(beta, series_radius=0.5)
        for tau in np.linspace(1.0, 4.0, 7):
            for sgn in (-1.0, 1.0):
                a = series_ev.theta(sgn * tau)
                b = ode_ev.theta(sgn * tau)
                assert a.value == pytest.approx(b.value, rel=1e-8, abs=1e-12)
                assert a.derivative == pytest.approx(b.derivative,
                                                     rel=1e-8, abs=1e-12)


def test_theta_ode_residual_on_series_grid():
    # the term-wise differentiated series is independent of the defining
    # equation, so the residual check is not circular
    for beta in (0.5, 1.5, 2.5):
        t0, t1, t2 = theta_initial_data(beta)
        for tau in np.linspace(-4.0, 4.0, 17):
            vals, d1, _, d3 = theta_basis(tau, beta)
            th = t0 * vals[0] + t1 * vals[1] + t2 * vals[2]
            dth = t0 * d1[0] + t1 * d1[1] + t2 * d1[2]
            dddth = t0 * d3[0] + t1 * d3[1] + t2 * d3[2]
            assert abs(dddth - tau * dth + beta * th) <= 1e-8


def test_theta_tail_ratio_and_monotonicity():
    for beta in (0.5, 1.5, 2.5):
        ev = ThetaEvaluator(beta)
        taus = np.arange(-30.0, -9.9, 2.5)
        ratios = [abs(ev.theta(t).value / (-t) ** beta - 1.0) for t in taus]
        assert ratios[0] < 0.02
        assert all(a <= b + 1e-12 for a, b in zip(ratios, ratios[1:]))


def test_theta_algebraic_tail_first_terms():
    # truncated inverse-cube tail reproduces the ratio to 1% at tau = -30
    ev = ThetaEvaluator(1.5)
    ratio = ev.theta(-30.0).value / 30.0 ** 1.5
    assert ratio == pytest.approx(theta_asymptotic_ratio(-30.0, 1.5), rel=1e-2)


def test_theta_positive_tail_sign_and_magnitude():
    for beta in (0.5, 1.5, 2.5):
        ev = ThetaEvaluator(beta)
        tv = ev.theta(9.0)
        sign_expected = math.copysign(1.0, 1.0 / gamma(-beta))
        assert tv.sign == sign_expected
        _, log_mag = theta_positive_tail_log(9.0, beta)
        assert tv.log_abs == pytest.approx(log_mag, abs=0.35)


def test_theta_overflow_path():
    ev = ThetaEvaluator(1.5)
    tv = ev.theta(250.0)
    assert tv.overflowed
    assert math.isinf(tv.value)
    sign_expected, log_mag = theta_positive_tail_log(250.0, 1.5)
    assert tv.sign == sign_expected
    assert tv.log_abs == pytest.approx(log_mag, rel=1e-3)


def test_theta_integer_beta_refused():
    with pytest.raises(DomainError):
        ThetaEvaluator(2.0)


# ---------------------------------------------------------------------------
# classification and scalings
# ---------------------------------------------------------------------------

def test_classify_outcome_signs():
    assert classify_outcome(1.5, "-") == "lift-off"     # Gamma(-1.5) > 0
    assert classify_outcome(1.5, "+") == "iwc"
    assert classify_outcome(2.5, "-") == "iwc"          # Gamma(-2.5) < 0
    assert classify_outcome(2.5, "+") == "lift-off"
    assert classify_outcome(0.5, "-") == "iwc"
    assert classify_outcome(0.5, -2.0) == "iwc"


def test_classify_outcome_errors():
    with pytest.raises(DomainError):
        classify_outcome(2.0, "-")
    with pytest.raises(DomainError):
        classify_outcome(1.5, 0.0)
    with pytest.raises(DomainError):
        classify_outcome(0.5, "+")


def test_side_switch_across_integers():
    # which perturbation sign lifts off flips at every integer beta
    outcomes = [classify_outcome(b, "-") for b in (1.5, 2.5, 3.5, 4.5)]
    assert outcomes == ["lift-off", "iwc", "lift-off", "iwc"]


def test_liftoff_signal_scan_blowup_cases():
    taus = np.linspace(-30.0, 30.0, 241)
    for beta in (0.3, 0.5, 0.8):
        assert liftoff_signal_scan(beta, taus) == []


def test_perturbation_exponents_table():
    for beta in (0.5, 1.5, 2.5):
        ex = perturbation_exponents(beta)
        assert ex["b"] == pytest.approx(2 * beta / 3)
        assert ex["v"] == pytest.approx((2 * beta + 2) / 3)
        assert ex["y"] == pytest.approx((2 * beta + 4) / 3)
        assert ex["t"] == pytest.approx(2.0 / 3.0)
    ex = perturbation_exponents(1.5)
    assert (ex["b"], ex["v"], ex["y"]) == (1.0, pytest.approx(5 / 3),
                                           pytest.approx(7 / 3))


def test_inner_perturbation_at_origin():
    beta, a1, c1, eps = 1.5, -1.0, -0.7, 1e-3
    ip = InnerPerturbation(beta, a1, c1, eps)
    th0 = ThetaEvaluator(beta).theta(0.0).value
    expected = c1 * ip.kappa ** (-beta) * eps ** (2 * beta / 3) * th0
    assert inner_perturbation(beta, a1, c1, 0.0, eps) == pytest.approx(
        expected, rel=1e-12)


def test_inner_perturbation_needs_negative_alpha1():
    with pytest.raises(DomainError):
        InnerPerturbation(1.5, 0.5, -1.0, 1e-3)
