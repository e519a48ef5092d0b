"""Location and classification of contact singularities.

The singular point of interest ("G-spot") is where the contact parameter
p, the free normal acceleration b, and the normal gap and velocity y, v
all vanish simultaneously.  Slipping trajectories can be attracted to it
in finite time (dynamic jam); what happens next depends on the signs of
the drift rates alpha1, alpha2, alpha3 evaluated there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .contact import ContactSystem
from .ring import DomainError, gradient


class ConvergenceError(RuntimeError):
    """Newton iteration failed to reach the requested residual."""


BETA_INTEGER_TOL = 1e-6


@dataclass
class GSpotInfo:
    """A located singular point with its local data.

    ``beta`` is the ratio alpha3/alpha1 of drift rates at the point; the
    expansion machinery refuses to run when it is within
    ``BETA_INTEGER_TOL`` of an integer.
    """

    xi_star: np.ndarray
    alpha1: float
    alpha2: float
    alpha3: float
    beta: float
    case: str
    jacobian_condition: float
    residual_norm: float
    iterations: int = 0

    @property
    def beta_near_integer(self) -> bool:
        return abs(self.beta - round(self.beta)) < BETA_INTEGER_TOL

    def to_text(self) -> str:
        lines = [f"xi_star: {' '.join(repr(float(x)) for x in self.xi_star)}"]
        for key in ("alpha1", "alpha2", "alpha3", "beta"):
            lines.append(f"{key}: {getattr(self, key)!r}")
        lines.append(f"case: {self.case}")
        lines.append(f"jacobian_condition: {self.jacobian_condition!r}")
        lines.append(f"residual_norm: {self.residual_norm!r}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "GSpotInfo":
        fields = {}
        for line in text.strip().splitlines():
            key, _, val = line.partition(":")
            fields[key.strip()] = val.strip()
        return GSpotInfo(
            xi_star=np.array([float(x) for x in fields["xi_star"].split()]),
            alpha1=float(fields["alpha1"]), alpha2=float(fields["alpha2"]),
            alpha3=float(fields["alpha3"]), beta=float(fields["beta"]),
            case=fields["case"],
            jacobian_condition=float(fields["jacobian_condition"]),
            residual_norm=float(fields["residual_norm"]))


def classify_case(alpha1: float, alpha2: float, alpha3: float) -> str:
    """Sign taxonomy of the singular phase plane.

    Case I:  alpha2 < 0, alpha1 < alpha3 < 0 (force blows up)
    Case II: alpha2 > 0, alpha1 < alpha3 < 0 (force blows up)
    Case III: alpha2 < 0, alpha3 < alpha1 < 0 (force stays finite)

    Any other sign combination is not attracting and returns "none".
    """
    if not (alpha1 < 0 and alpha3 < 0):
        return "none"
    if alpha1 < alpha3:
        if alpha2 < 0:
            return "I"
        if alpha2 > 0:
            return "II"
        return "none"
    if alpha3 < alpha1 and alpha2 < 0:
        return "III"
    return "none"


def default_pinning(sys: ContactSystem, guess: Sequence[float]) -> list:
    """Pin the first m-4 coordinates at their guess values.

    The four singularity conditions determine only four state directions;
    for larger systems the remaining freedom is removed by holding extra
    coordinates fixed.  Override by passing explicit pinning functions to
    :func:`find_gspot`.
    """
    guess = [float(g) for g in guess]
    fns = []
    for i in range(sys.m - 4):
        fns.append((lambda idx: lambda s: s[idx] - guess[idx])(i))
    return fns


def find_gspot(sys: ContactSystem, guess: Sequence[float],
               pin: Optional[Sequence[Callable]] = None,
               tol: float = 1e-12, max_iter: int = 50,
               max_halvings: int = 30) -> GSpotInfo:
    """Newton solve for the singular point p = b = y = v = 0.

    ``pin`` supplies the extra m-4 scalar conditions for systems with
    more than four states (defaults to freezing surplus coordinates at
    the guess).  Jacobians come from jets; steps are damped by halving
    until the residual decreases.
    """
    if pin is None:
        pin = default_pinning(sys, guess)
    res_fns = [sys.p_fn, sys.b_fn, sys.y, sys.v_fn, *pin]
    if len(res_fns) != sys.m:
        raise ValueError(f"need {sys.m - 4} pinning conditions, got {len(pin)}")

    xi = np.array([float(g) for g in guess])

    def residual(x):
        return np.array([float(f(list(x))) for f in res_fns])

    def jac(x):
        return np.array([[float(v) for v in gradient(f, list(x))]
                         for f in res_fns])

    r = residual(xi)
    rn = np.max(np.abs(r))
    it = 0
    J = jac(xi)
    while rn > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"no convergence in {max_iter} iterations (residual {rn:.3e})")
        J = jac(xi)
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > 1e12:
            raise ConvergenceError(f"singular Jacobian (condition {cond:.3e})")
        step = np.linalg.solve(J, r)
        lam = 1.0
        for _ in range(max_halvings):
            trial = xi - lam * step
            r_trial = residual(trial)
            if np.max(np.abs(r_trial)) < rn:
                break
            lam *= 0.5
        else:
            raise ConvergenceError("line search stalled")
        xi, r = trial, r_trial
        rn = np.max(np.abs(r))
        it += 1

    a1 = float(sys.alpha1_fn(list(xi)))
    a2 = float(sys.alpha2_fn(list(xi)))
    a3 = float(sys.alpha3_fn(list(xi)))
    if a1 == 0:
        raise DomainError("alpha1 vanishes at the singular point")
    J = jac(xi)
    return GSpotInfo(
        xi_star=xi, alpha1=a1, alpha2=a2, alpha3=a3, beta=a3 / a1,
        case=classify_case(a1, a2, a3),
        jacobian_condition=float(np.linalg.cond(J)),
        residual_norm=float(np.max(np.abs(r))), iterations=it)


# ---------------------------------------------------------------------------
# singular phase plane
# ---------------------------------------------------------------------------

@dataclass
class SingularFlowResult:
    """Outcome of integrating the rescaled-time (p, b) phase plane."""

    s: np.ndarray
    p: np.ndarray
    b: np.ndarray
    terminal: str                      # "lift-off" | "jam" | "exit"
    tangent_ratio: float = field(default=np.nan)  # b/p at termination
    lambda_limit: float = field(default=np.nan)   # -b/p at termination


def singular_flow(alpha1: float, alpha2: float, alpha3: float,
                  ic: Sequence[float], s_span: Sequence[float],
                  jam_radius: float = 1e-8,
                  n_samples: int = 400) -> SingularFlowResult:
    """Integrate dp/ds = alpha1*p, db/ds = alpha2*p + alpha3*b in the
    rescaled time where the singular point is an equilibrium.

    Terminal states: "lift-off" when b reaches zero with p > 0, "jam"
    when (p, b) enters the ball of radius ``jam_radius``, otherwise
    "exit" at the end of the requested span.
    """

    def rhs(s, w):
        p, b = w
        return [alpha1 * p, alpha2 * p + alpha3 * b]

    def ev_liftoff(s, w):
        return w[1]
    ev_liftoff.terminal = True

    def ev_jam(s, w):
        return np.hypot(w[0], w[1]) - jam_radius
    ev_jam.terminal = True
    ev_jam.direction = -1

    sol = solve_ivp(rhs, list(s_span), list(ic), method="RK45",
                    rtol=1e-12, atol=1e-14, dense_output=True,
                    events=[ev_liftoff, ev_jam])
    s_grid = np.linspace(s_span[0], sol.t[-1], n_samples)
    vals = sol.sol(s_grid)
    terminal = "exit"
    if sol.t_events[0].size and sol.y_events[0][0][0] > 0:
        terminal = "lift-off"
    elif sol.t_events[1].size:
        terminal = "jam"
    p_end, b_end = sol.y[:, -1]
    tangent = b_end / p_end if p_end != 0 else np.nan
    lam = -b_end / p_end if p_end != 0 else np.nan
    return SingularFlowResult(s=s_grid, p=vals[0], b=vals[1],
                              terminal=terminal, tangent_ratio=tangent,
                              lambda_limit=lam)


def fast_spectrum(p: float) -> np.ndarray:
    """The three roots of lambda^3 + 2*lambda^2 + p*lambda + p.

    This is the characteristic polynomial of the fast contact dynamics
    with the slow state frozen: all roots stable for p > 0, exactly one
    positive real root for p < 0.
    """
    return np.roots([1.0, 2.0, p, p])


def painleve_lambda(b: float, p: float) -> float:
    """Normal contact force -b/p during sustained slipping contact."""
    if p == 0:
        raise DomainError("contact force is singular at p = 0")
    return -b / p
