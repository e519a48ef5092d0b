"""Contact systems: derived quantities, structural identities, built-ins."""

import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from jamlab.contact import (ContactSystem, ExtendedState,
                            make_extended_example, make_impact_oscillator,
                            make_simple_example, oscillator_closed_forms,
                            oscillator_gspot_guess)
from jamlab.ring import lie_derivative


@pytest.fixture(scope="module")
def extended():
    return make_extended_example(1, Fr(-1), Fr(-1), Fr(-3, 2))


@pytest.fixture(scope="module")
def oscillator():
    return make_impact_oscillator(7.0 / 3.0, 0.0)


def test_extended_derived_at_reference_state(extended):
    dq = extended.derived_quantities([0, 2, 0, 0, 0.3, -1.0])
    assert dq.p == pytest.approx(0.3, abs=1e-14)
    assert dq.b == pytest.approx(-1.0, abs=1e-14)
    assert dq.alpha1 == pytest.approx(-2.0, abs=1e-14)   # -1 + chi*b
    assert dq.alpha2 == pytest.approx(-1.0, abs=1e-14)
    assert dq.alpha3 == pytest.approx(-1.5, abs=1e-14)
    assert dq.u == pytest.approx(2.0, abs=1e-14)


def test_extended_force_direction_never_moves_p(extended):
    # the fifth component of the slip force field vanishes identically
    rng = np.random.default_rng(0)
    lgp = lie_derivative(extended.p_fn, extended.G)
    for _ in range(10):
        xi = [Fr(int(v), 8) for v in rng.integers(-8, 8, 6)]
        assert lgp(xi) == 0


def test_extended_lagrangian_residuals_exact(extended):
    rng = np.random.default_rng(1)
    for _ in range(10):
        xi = [Fr(int(v), 16) for v in rng.integers(-12, 12, 6)]
        res = extended.lagrangian_residuals(xi)
        assert np.all(res == 0.0)


def test_oscillator_lagrangian_residuals(oscillator):
    rng = np.random.default_rng(2)
    for _ in range(20):
        xi = list(rng.uniform(-1, 1, 4) + np.array([0.9, -0.4, -1.0, 0.8]))
        assert np.max(np.abs(oscillator.lagrangian_residuals(xi))) <= 1e-10


def test_broken_system_reports_nonzero_residual():
    base = make_simple_example(-1.0, -1.0, -1.5)
    # tangential field with a spurious x-direction component
    def bad_G_T(s):
        g = base.G_T(s)
        return [1.0 + 0 * s[0]] + list(g[1:])
    broken = ContactSystem(m=4, F=base.F, G_T=bad_G_T, G_N=base.G_N,
                           x=lambda s: s[2], y=base.y, mu=lambda s: 0.5 + 0 * s[0],
                           state_names=base.state_names, name="broken")
    res = broken.lagrangian_residuals([0.1, -0.2, 0.3, 0.4])
    assert np.max(np.abs(res)) > 1e-3


def test_mixed_second_derivatives_agree():
    rng = np.random.default_rng(3)
    systems = [make_simple_example(-1.0, -1.0, -1.5),
               make_extended_example(1.0, -1.0, -1.0, -1.5),
               make_impact_oscillator(7.0 / 3.0, 0.0)]
    for sys in systems:
        for _ in range(100):
            xi = list(rng.uniform(-0.8, 0.8, sys.m))
            if sys.name == "extended":
                xi[4] = min(xi[4], 0.5)      # keep mu = 1 - p away from 0
            B1 = float(sys.B_fn(xi))
            B2 = float(sys.B_alt_fn(xi))
            assert abs(B1 - B2) <= 1e-10 * max(1.0, abs(B1))


def test_oscillator_jets_match_closed_forms(oscillator):
    cf = oscillator_closed_forms(oscillator)
    rng = np.random.default_rng(4)
    for _ in range(50):
        xi = list(rng.uniform(-1, 1, 4) + np.array([0.9, -0.4, -1.0, 0.8]))
        dq = oscillator.derived_quantities(xi)
        for name, fn in cf.items():
            mine = getattr(dq, name) if name != "v" else dq.v
            ref = fn(xi)
            assert abs(mine - ref) <= 1e-9 * max(1.0, abs(ref)), name


def test_oscillator_singular_state_values(oscillator):
    phi = math.acos(0.6)
    xi = [phi, -0.4, -1.0, 0.8]
    dq = oscillator.derived_quantities(xi)
    assert abs(dq.p) < 1e-12
    assert abs(dq.b) < 1e-12
    assert dq.alpha1 == pytest.approx(-175.0 / 408.0, abs=1e-12)
    assert dq.alpha2 == pytest.approx(-1.8764, abs=5e-4)
    assert dq.alpha3 == pytest.approx(-175.0 / 408.0 * 7.0 / 3.0, abs=1e-12)


def test_oscillator_definiteness(oscillator):
    rng = np.random.default_rng(5)
    for _ in range(20):
        xi = list(rng.uniform(-0.5, 0.5, 4) + np.array([0.9, -0.4, -1.0, 0.8]))
        rep = oscillator.definiteness_check(xi)
        assert rep["ok"], rep


def test_extended_tangential_gains(extended):
    # positive/negative slip force gains of the tangential velocity and the
    # backward-slip normal gain are the advertised constants
    xi = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0]
    assert float(extended.k_pos_fn(xi)) == pytest.approx(-1.0, abs=1e-14)
    assert float(extended.k_neg_fn(xi)) == pytest.approx(2.0, abs=1e-14)
    assert float(extended.p_neg_fn(xi)) == pytest.approx(1.0, abs=1e-14)
    assert float(extended.a_fn(xi)) == 0.0


def test_stick_fraction(extended):
    c = extended.stick_fraction([0, 0, 0, 0, 0, 0], 1.0)
    assert c == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_extended_state_vector_layouts():
    ext = make_extended_example(0.0)
    st = ExtendedState(x=1, u=2, y=3, v=4, p=5, b=6, z=7)
    assert list(st.vector(ext)) == [1, 2, 3, 4, 5, 6]
    simple = make_simple_example(-1.0, -1.0, -0.5)
    assert list(st.vector(simple)) == [5, 6, 3, 4]
    osc = make_impact_oscillator(1.5, 0.0)
    with pytest.raises(ValueError):
        st.vector(osc)


def test_simple_example_constant_rates():
    sys = make_simple_example(-1.0, -1.0, -0.5)
    rng = np.random.default_rng(6)
    for _ in range(10):
        xi = list(rng.uniform(-1, 1, 4))
        dq = sys.derived_quantities(xi)
        assert dq.alpha1 == -1.0
        assert dq.alpha2 == -1.0
        assert dq.alpha3 == -0.5
        assert dq.p == xi[0]
        assert dq.b == xi[1]


def test_oscillator_requires_positive_scales():
    with pytest.raises(ValueError):
        make_impact_oscillator(1.5, 0.0, m1=-1.0)
