"""Generalized hypergeometric machinery for canard perturbations.

Perturbations from the distinguished trajectory obey, on the inner slow
scale, the third-order equation

    theta''' - tau * theta' + beta * theta = 0.

Its solution space is spanned by three 1F2 hypergeometric basis functions;
the particular combination Theta(tau, beta) fixed by Gamma-ratio initial
data is the unique solution free of fast oscillatory components, growing
like (-tau)**beta as tau -> -oo and exponentially as tau -> +oo.  The sign
of the exponential tail against the perturbation amplitude decides
lift-off versus impact without collision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .ring import DomainError


class RangeError(ArithmeticError):
    """Partial sums or solution magnitudes left the floating range."""


# ---------------------------------------------------------------------------
# gamma function
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, nine coefficients; relative accuracy of
# the positive-axis evaluation is ~1e-14, comfortably inside the 1e-12
# target.  Negative non-integer arguments go through reflection.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Real Gamma function via Lanczos plus reflection.

    Raises :class:`jamlab.ring.DomainError` at the poles (non-positive
    integers).
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"gamma pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


# ---------------------------------------------------------------------------
# 1F2
# ---------------------------------------------------------------------------

def f12(a: float, b1: float, b2: float, x: float, tol: float = 1e-15) -> float:
    """Taylor sum of the generalized hypergeometric function 1F2.

    Terms follow the ratio recurrence
    ``t_{k+1} = t_k * (a+k) / ((b1+k)(b2+k)(k+1)) * x`` and the sum stops
    once two consecutive terms fall below ``tol`` relative to the partial
    sum.  The series is entire, so this converges for every finite x.
    """
    for b in (b1, b2):
        if b <= 0 and b == math.floor(b):
            raise DomainError(f"1F2 lower parameter at non-positive integer {b}")
    term = 1.0
    total = 1.0
    small = 0
    for k in range(1000):
        term *= (a + k) / ((b1 + k) * (b2 + k) * (k + 1.0)) * x
        total += term
        if abs(total) > 1e290 or abs(term) > 1e290:
            raise RangeError("1F2 partial sums overflow")
        if abs(term) <= tol * max(1.0, abs(total)):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise RangeError("1F2 series failed to converge in 1000 terms")


def theta_basis(tau: float, beta: float):
    """The three smooth basis solutions and their first two derivatives.

    Basis u1, u2, u3 has (value, slope, curvature) = identity pattern at
    tau = 0: u1 = 1F2(-beta/3; 1/3, 2/3; tau^3/9), u2 = tau * 1F2(...),
    u3 = tau^2/2 * 1F2(...).  Summation is term-wise in powers of tau^3 so
    the derivatives are exact series, not finite differences.
    """
    x = tau ** 3 / 9.0
    params = ((-beta / 3.0, 1.0 / 3.0, 2.0 / 3.0, 0),
              ((1.0 - beta) / 3.0, 2.0 / 3.0, 4.0 / 3.0, 1),
              ((2.0 - beta) / 3.0, 4.0 / 3.0, 5.0 / 3.0, 2))
    vals, d1s, d2s, d3s = [], [], [], []
    for a, b1, b2, shift in params:
        coeff = 1.0
        val = d1 = d2 = d3 = 0.0
        for k in range(400):
            power = 3 * k + shift
            # term = coeff * tau**power / (shift!)
            c = coeff * (0.5 if shift == 2 else 1.0)
            val += c * tau ** power
            if power >= 1:
                d1 += c * power * tau ** (power - 1)
            if power >= 2:
                d2 += c * power * (power - 1) * tau ** (power - 2)
            if power >= 3:
                d3 += c * power * (power - 1) * (power - 2) * tau ** (power - 3)
            new = coeff * (a + k) / ((b1 + k) * (b2 + k) * (k + 1.0)) / 9.0
            if abs(new * tau ** (power + 3)) < 1e-17 * (1.0 + abs(val)) and k > 2:
                coeff = new
                break
            coeff = new
        vals.append(val)
        d1s.append(d1)
        d2s.append(d2)
        d3s.append(d3)
    return tuple(vals), tuple(d1s), tuple(d2s), tuple(d3s)


def theta_initial_data(beta: float):
    """Gamma-ratio initial values (Theta, Theta', Theta'') at tau = 0
    selecting the oscillation-free solution."""
    g = gamma(-beta)
    return (gamma(-beta / 3.0) / (3.0 ** ((3.0 + beta) / 3.0) * g),
            gamma((1.0 - beta) / 3.0) / (3.0 ** ((2.0 + beta) / 3.0) * g),
            gamma((2.0 - beta) / 3.0) / (3.0 ** ((1.0 + beta) / 3.0) * g))


class ThetaValue(NamedTuple):
    """Theta and its derivative; when ``overflowed`` the floats are
    +/-inf and the log-scaled fields carry the magnitude."""

    value: float
    derivative: float
    sign: float
    log_abs: float
    overflowed: bool


@dataclass
class ThetaEvaluator:
    """Hybrid evaluator for Theta(tau, beta).

    Inside ``series_radius`` the hypergeometric basis series is summed
    directly; beyond it the defining third-order equation is integrated
    outward from tau = 0 with renormalization to survive the exponential
    growth on the positive axis.
    """

    beta: float
    series_radius: float = 4.0
    ode_tol: float = 1e-12

    def __post_init__(self):
        if abs(self.beta - round(self.beta)) < 1e-12:
            raise DomainError("Theta is defined for non-integer beta only")
        self.init = theta_initial_data(self.beta)

    def _series(self, tau: float) -> ThetaValue:
        u, du = theta_basis(tau, self.beta)[:2]
        t0, t1, t2 = self.init
        val = t0 * u[0] + t1 * u[1] + t2 * u[2]
        der = t0 * du[0] + t1 * du[1] + t2 * du[2]
        mag = abs(val)
        return ThetaValue(val, der, math.copysign(1.0, val),
                          math.log(mag) if mag > 0 else -math.inf, False)

    def _ode(self, tau: float) -> ThetaValue:
        beta = self.beta

        def rhs(t, w):
            return [w[1], w[2], t * w[1] - beta * w[0]]

        w = list(self.init)
        log_shift = 0.0
        t_now = 0.0
        while abs(tau - t_now) > 1e-12 * max(1.0, abs(tau)):
            sol = solve_ivp(rhs, [t_now, tau], w, method="DOP853",
                            rtol=self.ode_tol, atol=1e-14,
                            events=self._overflow_event, dense_output=False)
            if sol.status == 1:           # renormalize and continue
                t_now = float(sol.t_events[0][0])
                w = [wi * 1e-150 for wi in sol.y_events[0][0]]
                log_shift += 150.0 * math.log(10.0)
                continue
            if sol.status != 0:
                raise RangeError(f"Theta integration failed: {sol.message}")
            t_now = sol.t[-1]
            w = [sol.y[i, -1] for i in range(3)]
            break
        mag = abs(w[0])
        log_abs = (math.log(mag) if mag > 0 else -math.inf) + log_shift
        if log_shift > 0 and log_abs > 700.0:
            sgn = math.copysign(1.0, w[0])
            return ThetaValue(sgn * math.inf,
                              math.copysign(math.inf, w[1]),
                              sgn, log_abs, True)
        scale = math.exp(log_shift)
        return ThetaValue(w[0] * scale, w[1] * scale,
                          math.copysign(1.0, w[0]), log_abs, False)

    @staticmethod
    def _overflow_event(t, w):
        return abs(w[0]) + abs(w[1]) + abs(w[2]) - 1e250
    _overflow_event.terminal = True

    def theta(self, tau: float) -> ThetaValue:
        if abs(tau) <= self.series_radius:
            return self._series(tau)
        return self._ode(tau)

    def theta_grid(self, taus: Sequence[float]) -> np.ndarray:
        """Evaluate Theta and Theta' on a grid; returns shape (n, 2).

        One ODE sweep per sign covers all points beyond the series
        radius, which keeps large overlay grids cheap.
        """
        taus = np.asarray(taus, float)
        out = np.empty((taus.size, 2))
        beta = self.beta

        def rhs(t, w):
            return [w[1], w[2], t * w[1] - beta * w[0]]

        for i, tau in enumerate(taus):
            if abs(tau) <= self.series_radius:
                tv = self._series(float(tau))
                out[i] = (tv.value, tv.derivative)
        for sgn in (-1.0, 1.0):
            sel = [i for i, tau in enumerate(taus)
                   if abs(tau) > self.series_radius and math.copysign(1, tau) == sgn]
            if not sel:
                continue
            far = max(abs(taus[i]) for i in sel)
            sol = solve_ivp(rhs, [0.0, sgn * far], list(self.init),
                            method="DOP853", rtol=self.ode_tol, atol=1e-14,
                            dense_output=True)
            if sol.status != 0:
                raise RangeError(f"Theta integration failed: {sol.message}")
            for i in sel:
                w = sol.sol(taus[i])
                out[i] = (w[0], w[1])
        return out


def theta(tau: float, beta: float, series_radius: float = 4.0,
          ode_tol: float = 1e-12) -> tuple:
    """Convenience wrapper: returns (Theta, Theta') at a point."""
    tv = ThetaEvaluator(beta, series_radius, ode_tol).theta(tau)
    return tv.value, tv.derivative


def theta_asymptotic_ratio(tau: float, beta: float, k_terms: int = 3) -> float:
    """Leading algebraic tail h(tau) of Theta for large negative tau,
    normalized so the ratio Theta/(-tau)**beta -> 1.

    Only the first few inverse-cube corrections are kept (the full
    correction sequence is not implemented; the ODE path supplies
    accurate values wherever the tail is insufficient).
    """
    if tau >= 0:
        raise DomainError("algebraic tail is for negative tau")
    total = 0.0
    for k in range(k_terms):
        arg = 1.0 + beta - 3 * k
        if arg <= 0 and arg == math.floor(arg):
            continue      # a 1/Gamma pole kills the term
        total += 1.0 / (math.factorial(k) * 3.0 ** k * (-tau) ** (3 * k)
                        * gamma(arg))
    return gamma(1.0 + beta) * total


def theta_positive_tail_log(tau: float, beta: float) -> tuple:
    """(sign, log magnitude) of the exponential tail for large positive
    tau, with the leading coefficient only."""
    if tau <= 0:
        raise DomainError("exponential tail is for positive tau")
    g = gamma(-beta)
    log_mag = (0.5 * math.log(math.pi) - math.log(abs(g))
               + (2.0 / 3.0) * tau ** 1.5
               - (beta / 2.0 + 0.75) * math.log(tau))
    return math.copysign(1.0, g), log_mag


# ---------------------------------------------------------------------------
# outcome classification and inner-solution scaling
# ---------------------------------------------------------------------------

def classify_outcome(beta: float, c1_sign) -> str:
    """Post-singularity outcome for a perturbation of signed amplitude C1.

    For beta > 1 (finite-force case) the exponential tail of Theta
    carries sign 1/Gamma(-beta): lift-off exactly when
    C1 / Gamma(-beta) < 0, impact without collision otherwise.  The sign
    of Gamma(-beta) is computed directly through reflection, and flips at
    every integer beta, which produces the side-switching.  For
    0 < beta < 1 (blow-up cases) the admissible perturbations have
    C1 < 0 and always impact.
    """
    c1 = {"+": 1.0, "-": -1.0}.get(c1_sign, None)
    if c1 is None:
        c1 = float(c1_sign)
    if c1 == 0:
        raise DomainError("C1 = 0 is the distinguished trajectory itself")
    c1 = math.copysign(1.0, c1)
    if beta <= 0 or abs(beta - round(beta)) < 1e-12:
        raise DomainError("classification needs beta > 0 and non-integer")
    if beta < 1.0:
        if c1 > 0:
            raise DomainError("inadmissible perturbation sign for the "
                              "force-blow-up cases")
        return "iwc"
    return "lift-off" if c1 / gamma(-beta) < 0 else "iwc"


def perturbation_exponents(beta: float) -> dict:
    """Small-parameter scaling exponents of the inner perturbation
    variables (and of the time offset between characteristic crossings)."""
    return {"b": 2.0 * beta / 3.0,
            "v": (2.0 * beta + 2.0) / 3.0,
            "y": (2.0 * beta + 4.0) / 3.0,
            "z": (2.0 * beta + 4.0) / 3.0,
            "lam": (2.0 * beta - 2.0) / 3.0,
            "t": 2.0 / 3.0}


@dataclass
class InnerPerturbation:
    """Scaled perturbation data for overlaying against simulation."""

    beta: float
    alpha1: float
    c1: float
    eps: float
    kappa: float = field(init=False)
    amplitude: float = field(init=False)

    def __post_init__(self):
        if self.alpha1 >= 0:
            raise DomainError("inner scaling requires alpha1 < 0")
        self.kappa = (-self.alpha1 / 2.0) ** (1.0 / 3.0)
        self.amplitude = (self.c1 * self.kappa ** (-self.beta)
                          * self.eps ** (2.0 * self.beta / 3.0))

    def bhat(self, s: float, evaluator: ThetaEvaluator | None = None) -> float:
        ev = evaluator or ThetaEvaluator(self.beta)
        return self.amplitude * ev.theta(self.kappa * s).value


def inner_perturbation(beta: float, alpha1_star: float, c1: float,
                       s: float, eps: float) -> float:
    """Leading inner perturbation of the free normal acceleration at
    scaled time s: C1 * kappa**(-beta) * eps**(2*beta/3) * Theta(kappa*s)."""
    return InnerPerturbation(beta, alpha1_star, c1, eps).bhat(s)


def liftoff_signal_scan(beta: float, taus: Sequence[float],
                        c1: float = -1.0) -> list:
    """Monitor for the sign-definiteness conjecture in the blow-up cases.

    For 0 < beta < 1 with the admissible C1 < 0 the contact-force
    perturbation is expected to stay positive (no lift-off signal); this
    scan returns every grid point where the signal appears, rather than
    asserting that it never can.
    """
    ev = ThetaEvaluator(beta)
    vals = ev.theta_grid(taus)
    # lift-off signal: perturbation force turns negative, i.e. C1*Theta' < 0
    return [float(t) for t, (v, dv) in zip(taus, vals) if c1 * dv < 0]
