"""Planar frictional contact systems and their Lie-derived quantities.

A :class:`ContactSystem` packages the drift field F, the tangential and
normal force fields G_T and G_N, the contact coordinates x(xi), y(xi) and
the friction coefficient mu(xi), all written over the generic scalar ring
so that a single definition serves simulation (floats), Newton Jacobians
(jets) and series expansion (truncated delta-series).

During slipping contact the force enters through G = G_N -/+ mu*G_T
(positive/negative slip).  From the fields one derives the slip velocities
u, v, the free accelerations a, b, the mass-matrix projections A, B, C,
the slip-direction contact parameter p = C - mu*B, and its drift rates
alpha1, alpha2, alpha3.  Built-in factories provide the three systems used
throughout the test suite and experiment harness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import math

import numpy as np

from . import ring
from .ring import DomainError, cos, gradient, lie_derivative, sin


@dataclass(frozen=True)
class DerivedQuantities:
    """Scalar contact quantities at a single state (nondimensional)."""

    u: float
    v: float
    a: float
    b: float
    A: float
    B: float
    C: float
    p: float
    alpha1: float
    alpha2: float
    alpha3: float


@dataclass
class ExtendedState:
    """Labeled state for systems exposing tangential and normal contact
    variables directly, plus the surface deformation z and contact mode.

    For the six-dimensional extended system the vector ordering is
    (x, u, y, v, p, b); the four-dimensional constant-rate system uses
    (p, b, y, v) and ignores the tangential fields.
    """

    x: float = 0.0
    u: float = 0.0
    y: float = 0.0
    v: float = 0.0
    p: float = 0.0
    b: float = 0.0
    z: float = 0.0
    mode: str = "positive-slip"

    def vector(self, system: "ContactSystem") -> np.ndarray:
        if system.m == 6:
            return np.array([self.x, self.u, self.y, self.v, self.p, self.b], float)
        if system.m == 4 and system.state_names == ("p", "b", "y", "v"):
            return np.array([self.p, self.b, self.y, self.v], float)
        raise ValueError(f"no ExtendedState layout for system {system.name!r}")


class ContactSystem:
    """A planar rigid-body contact problem over the generic scalar ring.

    Parameters
    ----------
    m : state dimension
    F, G_T, G_N : callables mapping an m-sequence of ring scalars to an
        m-list of ring scalars
    x, y : contact-point coordinate functions of the state
    mu : friction coefficient function of the state (may be constant)
    state_names : component names, used for CSV headers and reports
    fixed_positive_slip : if True the tangential slip direction never
        reverses (belt-driven contact); mode logic then only toggles
        between contact and free flight.
    """

    def __init__(self, m: int, F: Callable, G_T: Callable, G_N: Callable,
                 x: Callable, y: Callable, mu: Callable,
                 state_names: Sequence[str], name: str = "contact-system",
                 fixed_positive_slip: bool = False,
                 params: Optional[dict] = None):
        self.m = m
        self.F = F
        self.G_T = G_T
        self.G_N = G_N
        self.x = x
        self.y = y
        self.mu = mu
        self.state_names = tuple(state_names)
        self.name = name
        self.fixed_positive_slip = fixed_positive_slip
        self.params = dict(params or {})

    # -- force fields ----------------------------------------------------
    def G(self, state):
        """Slip force field G_N - mu*G_T (positive slip)."""
        mu = self.mu(state)
        return [n - mu * t for n, t in zip(self.G_N(state), self.G_T(state))]

    def G_neg(self, state):
        """Negative-slip force field G_N + mu*G_T."""
        mu = self.mu(state)
        return [n + mu * t for n, t in zip(self.G_N(state), self.G_T(state))]

    def G_stick(self, state, c):
        """Stick force field: convex combination of the slip fields with
        positive-slip fraction ``c``."""
        mu = self.mu(state)
        w = (1 - 2 * c) * mu
        return [n + w * t for n, t in zip(self.G_N(state), self.G_T(state))]

    # -- derived scalar functions (lazily built, ring-generic) ------------
    @cached_property
    def u_fn(self):
        return lie_derivative(self.x, self.F)

    @cached_property
    def v_fn(self):
        return lie_derivative(self.y, self.F)

    @cached_property
    def a_fn(self):
        return lie_derivative(self.u_fn, self.F)

    @cached_property
    def b_fn(self):
        return lie_derivative(self.v_fn, self.F)

    @cached_property
    def A_fn(self):
        return lie_derivative(self.u_fn, self.G_T)

    @cached_property
    def B_fn(self):
        return lie_derivative(self.u_fn, self.G_N)

    @cached_property
    def B_alt_fn(self):
        # same quantity through the other mixed derivative; equality is a
        # consequence of the Lagrangian structure and is checked in tests
        return lie_derivative(self.v_fn, self.G_T)

    @cached_property
    def C_fn(self):
        return lie_derivative(self.v_fn, self.G_N)

    @cached_property
    def p_fn(self):
        def p(state):
            return self.C_fn(state) - self.mu(state) * self.B_fn(state)
        return p

    @cached_property
    def alpha1_fn(self):
        return lie_derivative(self.p_fn, self.F)

    @cached_property
    def alpha2_fn(self):
        return lie_derivative(self.b_fn, self.F)

    @cached_property
    def alpha3_fn(self):
        inner = lie_derivative(self.b_fn, self.G)
        def a3(state):
            return -inner(state)
        return a3

    # slip-tangential coefficients used by the stick logic:
    # du/dt = a + k_pos*lam (positive slip), a + k_neg*lam (negative slip)
    @cached_property
    def k_pos_fn(self):
        return lie_derivative(self.u_fn, self.G)

    @cached_property
    def k_neg_fn(self):
        return lie_derivative(self.u_fn, self.G_neg)

    # negative-slip analogues of p, and the force sensitivities of p and b
    # along the negative-slip field (zero in positive slip for Lagrangian
    # systems, nonzero once the slip direction reverses)
    @cached_property
    def p_neg_fn(self):
        return lie_derivative(self.v_fn, self.G_neg)

    @cached_property
    def b_gneg_fn(self):
        return lie_derivative(self.b_fn, self.G_neg)

    @cached_property
    def p_gneg_fn(self):
        return lie_derivative(self.p_fn, self.G_neg)

    # -- fused hot path for the simulator -----------------------------------
    def contact_rates(self, xi):
        """F, G (positive slip) and the drift rates alpha1, alpha2, alpha3
        at a state, sharing the field evaluations and jet passes.

        alpha2 and alpha3 both need the gradient of the free normal
        acceleration, so they come out of a single two-seed jet pass.
        """
        from .ring import Jet
        xi = list(xi)
        F0 = self.F(xi)
        G0 = self.G(xi)
        jp = [Jet(x, (f,)) for x, f in zip(xi, F0)]
        a1 = self.p_fn(jp)
        a1 = a1.parts[0] if isinstance(a1, Jet) else ring.ring_zero(a1)
        jb = [Jet(x, (f, g)) for x, f, g in zip(xi, F0, G0)]
        b2 = self.b_fn(jb)
        if isinstance(b2, Jet):
            a2, a3 = b2.parts[0], -b2.parts[1]
        else:
            a2 = a3 = ring.ring_zero(b2)
        return F0, G0, a1, a2, a3

    # -- evaluation helpers -----------------------------------------------
    def derived_quantities(self, xi) -> DerivedQuantities:
        xi = list(xi)
        return DerivedQuantities(
            u=self.u_fn(xi), v=self.v_fn(xi), a=self.a_fn(xi), b=self.b_fn(xi),
            A=self.A_fn(xi), B=self.B_fn(xi), C=self.C_fn(xi),
            p=self.p_fn(xi), alpha1=self.alpha1_fn(xi),
            alpha2=self.alpha2_fn(xi), alpha3=self.alpha3_fn(xi))

    def lagrangian_residuals(self, xi) -> np.ndarray:
        """The five structural identities that vanish for Lagrangian
        systems: L_{G_T}x, L_{G_N}x, L_{G_T}y, L_{G_N}y and L_G p."""
        xi = list(xi)
        vals = [
            lie_derivative(self.x, self.G_T)(xi),
            lie_derivative(self.x, self.G_N)(xi),
            lie_derivative(self.y, self.G_T)(xi),
            lie_derivative(self.y, self.G_N)(xi),
            lie_derivative(self.p_fn, self.G)(xi),
        ]
        return np.array([float(v) for v in vals])

    def definiteness_check(self, xi) -> dict:
        """Positive-definiteness proxies A>0, C>0, AC-B^2>0 at a state."""
        xi = list(xi)
        A = float(self.A_fn(xi))
        B = float(self.B_fn(xi))
        C = float(self.C_fn(xi))
        report = {"A": A, "C": C, "det": A * C - B * B}
        report["ok"] = report["A"] > 0 and report["C"] > 0 and report["det"] > 0
        return report

    def stick_fraction(self, xi, lam: float) -> float:
        """Positive-slip fraction c that keeps du/dt = 0 in stick.

        Solves a + (c*k_pos + (1-c)*k_neg)*lam = 0 for c; admissible
        stick requires the result to lie in [0, 1].
        """
        xi = list(xi)
        a = float(self.a_fn(xi))
        k_pos = float(self.k_pos_fn(xi))
        k_neg = float(self.k_neg_fn(xi))
        if lam == 0:
            raise DomainError("stick fraction undefined at zero normal force")
        return (k_neg + a / lam) / (k_neg - k_pos)

    def jacobian(self, f: Callable, xi) -> np.ndarray:
        """Float gradient row of a ring-generic scalar function."""
        return np.array([float(g) for g in gradient(f, list(xi))])

    def __repr__(self):
        return f"ContactSystem({self.name!r}, m={self.m})"


# ---------------------------------------------------------------------------
# built-in systems
# ---------------------------------------------------------------------------

def make_simple_example(alpha1, alpha2, alpha3) -> ContactSystem:
    """Four-state contact model (p, b, y, v) with constant drift rates.

    The normal force enters b at rate -alpha3 and the normal acceleration
    is b + p*lambda; there is no tangential degree of freedom, so slip
    never reverses and stick cannot occur.
    """
    a1, a2, a3 = alpha1, alpha2, alpha3

    def F(s):
        p, b, y, v = s
        z = ring.ring_zero(p)
        return [a1 + z, a2 + z, v, b]

    def G_T(s):
        z = ring.ring_zero(s[0])
        return [z, z, z, z]

    def G_N(s):
        p = s[0]
        z = ring.ring_zero(p)
        return [z, -a3 + z, z, p]

    return ContactSystem(
        m=4, F=F, G_T=G_T, G_N=G_N,
        x=lambda s: ring.ring_zero(s[0]),
        y=lambda s: s[2],
        mu=lambda s: ring.ring_zero(s[0]),
        state_names=("p", "b", "y", "v"),
        name="simple",
        fixed_positive_slip=True,
        params={"alpha1": a1, "alpha2": a2, "alpha3": a3})


def make_extended_example(chi, alpha1=Fraction(-1), alpha2=Fraction(-1),
                          alpha3=Fraction(-3, 2)) -> ContactSystem:
    """Six-state system (x, u, y, v, p, b) with tangential dynamics,
    state-dependent friction mu = 1 - p and two-way coupling chi.

    Fixed constants: backward-slip normal gain 1, tangential gains -1
    (positive slip) and 2 (negative slip), zero free tangential
    acceleration.  With chi = 0 the distinguished trajectory reduces to
    the straight-line solution of the four-state model.
    """
    a1, a2, a3 = alpha1, alpha2, alpha3
    half = Fraction(1, 2)

    def F(s):
        x1, x2, x3, x4, x5, x6 = s
        z = ring.ring_zero(x1)
        return [x2, z, x4, x6, a1 + chi * x6, a2 + z]

    def G_T(s):
        x5 = s[4]
        z = ring.ring_zero(x5)
        one_minus_p = 1 - x5
        return [z, Fraction(3, 2) / one_minus_p, z, half + z, z,
                (a3 * half) / one_minus_p]

    def G_N(s):
        x5 = s[4]
        z = ring.ring_zero(x5)
        return [z, half + z, z, (1 + x5) * half, z, -a3 * half + z]

    return ContactSystem(
        m=6, F=F, G_T=G_T, G_N=G_N,
        x=lambda s: s[0],
        y=lambda s: s[2],
        mu=lambda s: 1 - s[4],
        state_names=("x", "u", "y", "v", "p", "b"),
        name="extended",
        fixed_positive_slip=False,
        params={"chi": chi, "alpha1": a1, "alpha2": a2, "alpha3": a3})


def make_impact_oscillator(beta: float, kappa: float,
                           m1: float = 1.0, l: float = 1.0,
                           g: float = 1.0) -> ContactSystem:
    """Belt-driven frictional impact oscillator: two point masses, two
    springs and two dampers, pendulum angle phi and vertical offset psi.

    The spring/damper constants are reduced so that a contact singularity
    sits at cos(phi)=3/5, sin(phi)=4/5, d(phi)/dt=-sqrt(g/l), with drift
    ratio alpha3/alpha1 equal to ``beta`` and the sign of alpha2
    controlled by ``kappa``.  State ordering is (phi, psi, dphi, dpsi).
    """
    if m1 <= 0 or l <= 0 or g <= 0:
        raise ValueError("m1, l, g must be positive")
    m2 = m1
    mu = 25.0 / 12.0
    phi_star = math.acos(3.0 / 5.0)
    phi0 = phi_star + 49.0 / 20.0 - (7.0 / 12.0) * beta - (9.0 / 50.0) * kappa
    k_phi = m1 * g * l
    c_phi = 0.0
    k_psi = kappa * m1 * g / l
    c_psi = (25.0 / 108.0) * (18.0 - 7.0 * beta) * m1 * math.sqrt(g / l)

    def _minv_apply(state, w1, w2):
        phi = state[0]
        m11 = m1 * l * l
        m12 = m1 * l * sin(phi)
        m22 = m1 + m2
        det = m11 * m22 - m12 * m12
        return (m22 * w1 - m12 * w2) / det, (m11 * w2 - m12 * w1) / det

    def F(state):
        phi, psi, dphi, dpsi = state
        f1 = -k_phi * (phi - phi0) - c_phi * dphi - m1 * g * l * sin(phi)
        f2 = -k_psi * psi - c_psi * dpsi - (m1 + m2) * g - m1 * l * cos(phi) * dphi * dphi
        acc1, acc2 = _minv_apply(state, f1, f2)
        return [dphi, dpsi, acc1, acc2]

    def G_T(state):
        phi = state[0]
        z = ring.ring_zero(phi)
        acc1, acc2 = _minv_apply(state, l * cos(phi), z)
        return [z, z, acc1, acc2]

    def G_N(state):
        phi = state[0]
        z = ring.ring_zero(phi)
        acc1, acc2 = _minv_apply(state, l * sin(phi), 1 + z)
        return [z, z, acc1, acc2]

    return ContactSystem(
        m=4, F=F, G_T=G_T, G_N=G_N,
        x=lambda s: l * sin(s[0]),
        y=lambda s: s[1] + l * (1 - cos(s[0])),
        mu=lambda s: mu + ring.ring_zero(s[0]),
        state_names=("phi", "psi", "dphi", "dpsi"),
        name="oscillator",
        fixed_positive_slip=True,
        params={"beta": beta, "kappa": kappa, "m1": m1, "l": l, "g": g,
                "mu": mu, "phi0": phi0, "phi_star": phi_star,
                "k_phi": k_phi, "c_phi": c_phi, "k_psi": k_psi,
                "c_psi": c_psi})


# Closed-form oscillator quantities, kept separate from the jet-derived
# path so the two can be cross-checked against each other.

def oscillator_closed_forms(sys: ContactSystem) -> dict:
    """Direct expressions for v, p, b, alpha1, alpha2, alpha3 of the
    impact oscillator as plain float functions of (phi, psi, dphi, dpsi)."""
    pr = sys.params
    m1, l, g = pr["m1"], pr["l"], pr["g"]
    m2, mu = m1, pr["mu"]
    k_phi, c_phi = pr["k_phi"], pr["c_phi"]
    k_psi, c_psi = pr["k_psi"], pr["c_psi"]
    phi0 = pr["phi0"]

    def v(s):
        phi, psi, dphi, dpsi = s
        return dpsi + l * math.sin(phi) * dphi

    def p(s):
        phi = s[0]
        c, si = math.cos(phi), math.sin(phi)
        return (m1 * c * c + m2 * si * (si - mu * c)) / (m1 * (m2 + m1 * c * c))

    def b(s):
        phi, psi, dphi, dpsi = s
        c, si = math.cos(phi), math.sin(phi)
        num = (m1 * l * c * (m2 * l * dphi ** 2 - c * (k_psi * psi + c_psi * dpsi))
               - m2 * si * (k_phi * (phi - phi0) + c_phi * dphi))
        return num / (m1 * l * (m2 + m1 * c * c)) - g

    def alpha1(s):
        phi, psi, dphi, dpsi = s
        c, si = math.cos(phi), math.sin(phi)
        num = m2 * (mu * (c * c * (m1 + 2 * m2) - m2) - 2 * m2 * si * c)
        return -num / (m1 * (m2 + m1 * c * c) ** 2) * dphi

    def alpha2(s):
        phi, psi, dphi, dpsi = s
        c, si = math.cos(phi), math.sin(phi)
        D = m2 + m1 * c * c
        kphi_t = k_phi * (phi - phi0) + c_phi * dphi
        kpsi_t = k_psi * psi + c_psi * dpsi
        terms = (
            m1 ** 2 * D * l ** 3 * g * c_psi * c ** 2
            - m1 ** 2 * D * l ** 3 * k_psi * c ** 2 * dpsi
            + m1 ** 3 * l ** 4 * c_psi * c ** 3 * dphi ** 2
            - m1 ** 2 * l ** 2 * c_psi * c ** 2 * si * kphi_t
            + m1 ** 2 * l ** 3 * c_psi * c ** 2 * kpsi_t
            - m1 * m2 * l * c_phi * si ** 2 * kpsi_t
            - m1 ** 2 * m2 * l ** 2 * c_phi * c * si ** 2 * dphi ** 2
            - m1 ** 2 * m2 ** 2 * l ** 4 * si * dphi ** 3
            + m2 * (m1 + m2) * c_phi * si * kphi_t
            + 4 * m1 ** 2 * m2 * l ** 3 * c * si * dphi * kpsi_t
            - 3 * m1 * m2 ** 2 * l ** 2 * c * dphi * kphi_t
            + 3 * m1 ** 3 * m2 * l ** 4 * c ** 2 * si * dphi ** 3
            + m1 ** 2 * m2 * l ** 2 * c ** 3 * dphi * kphi_t
            - m1 * m2 * D * l ** 2 * k_phi * si * dphi
            - 4 * m1 ** 2 * m2 * l ** 2 * c * dphi * kphi_t
        )
        return terms / (m1 ** 2 * l ** 3 * D ** 2)

    def alpha3(s):
        phi, psi, dphi, dpsi = s
        c, si = math.cos(phi), math.sin(phi)
        D = m2 + m1 * c * c
        terms = (
            m1 ** 2 * l ** 2 * c_psi * c ** 3 * (mu * si + c)
            + 2 * m1 ** 2 * m2 * l ** 2 * mu * c * c * dphi
            + 2 * m1 * m2 ** 2 * l ** 2 * c * (mu * c - si) * dphi
            - m2 * (m1 + m2) * c_phi * mu * c * si
            + m2 ** 2 * c_phi * si ** 2
        )
        return terms / (m1 ** 2 * l ** 2 * D ** 2)

    return {"v": v, "p": p, "b": b,
            "alpha1": alpha1, "alpha2": alpha2, "alpha3": alpha3}


def oscillator_gspot_guess(sys: ContactSystem) -> np.ndarray:
    """Starting point near the oscillator's contact singularity."""
    pr = sys.params
    l, g = pr["l"], pr["g"]
    return np.array([pr["phi_star"] + 0.05, -0.35 * l,
                     -0.9 * math.sqrt(g / l), 0.7 * math.sqrt(g * l)])
