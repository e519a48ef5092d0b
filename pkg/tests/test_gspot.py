"""Singular-point location, case taxonomy, singular flow, fast spectrum."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jamlab.contact import (make_extended_example, make_impact_oscillator,
                            oscillator_gspot_guess)
from jamlab.gspot import (ConvergenceError, GSpotInfo, classify_case,
                          fast_spectrum, find_gspot, painleve_lambda,
                          singular_flow)
from jamlab.ring import DomainError


@pytest.fixture(scope="module")
def osc_gspot():
    sys = make_impact_oscillator(7.0 / 3.0, 0.0)
    return sys, find_gspot(sys, oscillator_gspot_guess(sys), tol=1e-13)


def test_oscillator_gspot_location(osc_gspot):
    _, gs = osc_gspot
    phi, psi, dphi, dpsi = gs.xi_star
    assert math.cos(phi) == pytest.approx(0.6, abs=1e-10)
    assert math.sin(phi) == pytest.approx(0.8, abs=1e-10)
    assert dphi == pytest.approx(-1.0, abs=1e-10)
    assert psi == pytest.approx(-0.4, abs=1e-10)
    assert dpsi == pytest.approx(0.8, abs=1e-10)
    assert gs.case == "III"
    assert gs.residual_norm <= 1e-10
    assert gs.jacobian_condition < 1e3


def test_oscillator_gspot_alphas(osc_gspot):
    _, gs = osc_gspot
    assert gs.alpha1 == pytest.approx(-0.42892, abs=5e-4)
    assert gs.alpha2 == pytest.approx(-1.8764, abs=5e-4)
    assert gs.alpha3 == pytest.approx(-1.0008, abs=5e-4)
    assert gs.beta == pytest.approx(7.0 / 3.0, abs=1e-9)
    assert not gs.beta_near_integer


def test_restart_from_solution_converges_fast(osc_gspot):
    sys, gs = osc_gspot
    again = find_gspot(sys, gs.xi_star, tol=1e-12)
    assert again.iterations <= 2


def test_extended_gspot_is_origin():
    sys = make_extended_example(1.0, -1.0, -1.0, -1.5)
    # surplus coordinates (x, u) are pinned at their guess values
    gs = find_gspot(sys, [0.0, 0.0, 0.015, -0.01, 0.02, -0.01])
    assert np.max(np.abs(gs.xi_star)) <= 1e-10
    assert gs.case == "III"
    gs2 = find_gspot(sys, [0.3, 7.0, 0.015, -0.01, 0.02, -0.01])
    assert np.allclose(gs2.xi_star[:2], [0.3, 7.0])
    assert np.max(np.abs(gs2.xi_star[2:])) <= 1e-10


def test_far_guess_fails():
    sys = make_impact_oscillator(7.0 / 3.0, 0.0)
    with pytest.raises(ConvergenceError):
        find_gspot(sys, [2.5, 5.0, 3.0, -4.0], max_iter=12)


def test_classify_cases():
    assert classify_case(-1.0, -1.0, -0.5) == "I"
    assert classify_case(-1.0, +1.0, -0.5) == "II"
    assert classify_case(-1.0, -1.0, -1.5) == "III"
    assert classify_case(+1.0, -1.0, -0.5) == "none"
    assert classify_case(-1.0, +1.0, -1.5) == "none"


@given(st.floats(0.1, 50.0), st.sampled_from(["I", "II", "III"]))
@settings(max_examples=40, deadline=None)
def test_classification_scale_invariant(scale, case):
    base = {"I": (-1.0, -1.0, -0.5), "II": (-1.0, 1.0, -0.5),
            "III": (-1.0, -1.0, -1.5)}[case]
    scaled = tuple(scale * a for a in base)
    assert classify_case(*scaled) == case


def test_singular_flow_case_iii_tangency():
    # the approach tangent converges like p^(beta-1), so a tighter jam
    # ball is needed for the 1e-4 ratio tolerance
    res = singular_flow(-1.0, -1.0, -1.5, (0.8, -0.4), (0.0, 80.0),
                        jam_radius=1e-10)
    assert res.terminal == "jam"
    assert res.tangent_ratio == pytest.approx(-2.0, abs=1e-4)
    assert res.lambda_limit == pytest.approx(2.0, abs=1e-4)


def test_singular_flow_case_i_force_blowup():
    res = singular_flow(-1.0, -1.0, -0.5, (0.8, -0.4), (0.0, 80.0))
    assert res.terminal == "jam"
    # p/b -> 0: force -b/p diverges
    assert abs(res.p[-1] / res.b[-1]) < 1e-4


def test_singular_flow_liftoff_exit():
    res = singular_flow(-1.0, -1.0, -1.5, (0.5, 0.2), (0.0, 20.0))
    assert res.terminal == "lift-off"


def test_fast_spectrum_signs():
    roots = fast_spectrum(1.0)
    assert np.all(roots.real < 0)
    roots = fast_spectrum(-1.0)
    pos_real = [r for r in roots if abs(r.imag) < 1e-12 and r.real > 0]
    assert len(pos_real) == 1
    assert np.sum(roots) == pytest.approx(-2.0, abs=1e-10)
    assert np.prod(roots).real == pytest.approx(1.0, abs=1e-10)
    roots = np.sort_complex(fast_spectrum(0.0))
    assert np.allclose(roots, [-2.0, 0.0, 0.0], atol=1e-12)


def test_fast_spectrum_symmetric_functions():
    rng = np.random.default_rng(8)
    for p in rng.uniform(-5, 5, 100):
        r = fast_spectrum(p)
        assert abs(np.sum(r) + 2.0) <= 1e-10
        e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
        assert abs(e2 - p) <= 1e-10
        assert abs(np.prod(r) + p) <= 1e-10
        # every root actually solves the cubic
        for lam in r:
            assert abs(lam**3 + 2 * lam**2 + p * lam + p) <= 1e-9


def test_painleve_lambda():
    assert painleve_lambda(-1.0, 0.5) == 2.0
    assert painleve_lambda(0.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        painleve_lambda(1.0, 0.0)
    # along the weak eigendirection b/p = alpha2/(alpha1-alpha3)
    a1, a2, a3 = -1.0, -1.0, -1.5
    slope = a2 / (a1 - a3)
    assert painleve_lambda(slope * 0.1, 0.1) == pytest.approx(
        a2 / (a3 - a1), abs=1e-14)


def test_gspot_text_roundtrip(osc_gspot):
    _, gs = osc_gspot
    back = GSpotInfo.from_text(gs.to_text())
    assert np.allclose(back.xi_star, gs.xi_star)
    assert back.case == gs.case
    assert back.beta == pytest.approx(gs.beta, abs=1e-15)
