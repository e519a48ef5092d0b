"""Stiff integration of compliantly regularized contact dynamics.

The rigid unilateral constraint is replaced by a surface deformation
variable z with spring stiffness 1/eps^2 and damping 1/eps:

    eps * dz/dt = -z - eps^2 * lam,    lam = (z - y)/eps^2  while y < z,

and lam = 0 otherwise.  Contact starts and ends on the single condition
y = z.

The integrated state is the synchronized formulation: alongside the
physical state xi, the scalar contact variables p, b and the outer-scaled
y_o = y/eps^2, v_o = v/eps, z_o = z/eps^2 ride along as explicit states
obeying the same differential equations, matched to the state functions
at the initial time.  The normal force lam = z_o - y_o is then free of
1/eps^2 cancellation, which keeps the error control meaningful down to
eps = 1e-6.

The hybrid loop integrates one smooth mode at a time with an L-stable
implicit Runge-Kutta method (Radau IIA), localizes mode boundaries by
root-finding on the local interpolant, and stitches segments into a
single :class:`Trajectory` with an event log.  Modes: "free",
"positive-slip", "negative-slip", "stick"; stick carries the
positive-slip force fraction c that freezes the tangential velocity and
is admissible exactly while c stays in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .contact import ContactSystem, ExtendedState
from .ring import Jet


class SimulationError(RuntimeError):
    pass


class StiffnessError(SimulationError):
    """The implicit integrator could not continue (step-size collapse)."""


@dataclass
class SimConfig:
    """Integration controls for the regularized simulator."""

    eps: float
    t_span: Tuple[float, float]
    rtol: float = 1e-10
    atol: object = 1e-12        # scalar, or per-component array (xi..., p, b, y_o, v_o, z_o)
    event_tol: float = 1e-12
    max_steps: int = 500_000
    max_step: float = math.inf
    max_mode_switches: int = 400
    stop_at_iwc: bool = True
    iwc_factor: float = 1e3
    iwc_lambda_scale: Optional[float] = None   # default |alpha2/(alpha1-alpha3)| at IC
    u_tol: float = 1e-9
    stop_events: Tuple[str, ...] = ()          # event kinds that end the run
    t_eval: Optional[np.ndarray] = None        # extra dense sampling grid

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.eps < 1e-8:
            raise ValueError("eps below the 1e-8 conditioning floor")
        if self.rtol <= 0 or np.any(np.asarray(self.atol) <= 0):
            raise ValueError("tolerances must be positive")


@dataclass
class TrajectoryEvent:
    t: float
    kind: str
    state: np.ndarray      # xi components followed by z


@dataclass
class Trajectory:
    """Time-stamped simulation output.

    ``states`` holds one row per sample (xi components), ``z`` the
    deformation, ``lam`` the normal force max(0, (z - y)/eps^2) and
    ``modes`` the contact mode of the segment each sample belongs to.
    Rows exist for every accepted step and for every localized event.
    """

    system: str
    state_names: Tuple[str, ...]
    eps: float
    t: np.ndarray
    states: np.ndarray
    z: np.ndarray
    lam: np.ndarray
    modes: List[str]
    events: List[TrajectoryEvent] = dc_field(default_factory=list)

    @property
    def samples(self):
        for i in range(len(self.t)):
            yield (self.t[i], self.states[i], self.lam[i], self.modes[i])

    def state_at_event(self, kind: str) -> Optional[np.ndarray]:
        for ev in self.events:
            if ev.kind == kind:
                return ev.state
        return None

    def event_times(self, kind: str) -> List[float]:
        return [ev.t for ev in self.events if ev.kind == kind]

    def write_csv(self, path) -> None:
        names = ",".join(self.state_names + ("z",))
        rows = [f"t,mode,lambdaN,{names}"]
        for i in range(len(self.t)):
            comps = ",".join(_fmt(x) for x in self.states[i])
            rows.append(f"{_fmt(self.t[i])},{self.modes[i]},{_fmt(self.lam[i])},"
                        f"{comps},{_fmt(self.z[i])}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")

    def write_events_csv(self, path) -> None:
        names = ",".join(self.state_names + ("z",))
        rows = [f"t,kind,{names}"]
        for ev in self.events:
            comps = ",".join(_fmt(x) for x in ev.state)
            rows.append(f"{_fmt(ev.t)},{ev.kind},{comps}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------

def relaxed_initial_state(sys: ContactSystem, nu: float, eps: float,
                          p0: float = 0.5, u0: float = 0.0,
                          x0: float = 0.0) -> ExtendedState:
    """Perturbed slipping start that minimizes compliant transients.

    The normal block is seeded at p = p0 with
    b = -|nu * p0 * alpha2 / (alpha3 - alpha1)|, the deformation on its
    relaxed manifold z = y/2 with y = 2 eps^2 b / p, and v = 0; nu scales
    the perturbation relative to the straight-line slipping solution.
    """
    pr = sys.params
    a1, a2, a3 = float(pr["alpha1"]), float(pr["alpha2"]), float(pr["alpha3"])
    b0 = -abs(nu * p0 * a2 / (a3 - a1))
    y0 = 2.0 * eps ** 2 * b0 / p0
    z0 = eps ** 2 * b0 / p0
    return ExtendedState(x=x0, u=u0, y=y0, v=0.0, p=p0, b=b0, z=z0,
                         mode="positive-slip")


def oscillator_contact_ic(sys: ContactSystem, dphi: float,
                          phi_offset: float = 0.1) -> Tuple[np.ndarray, float]:
    """Oscillator start just in contact (y = v = 0, undeformed surface)."""
    pr = sys.params
    l = pr["l"]
    phi = pr["phi_star"] + phi_offset
    psi = l * (math.cos(phi) - 1.0)
    dpsi = -l * math.sin(phi) * dphi
    return np.array([phi, psi, dphi, dpsi]), 0.0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_CONTACT_MODES = ("positive-slip", "negative-slip", "stick")


class _ModeRHS:
    """Right-hand side, event functions and jet Jacobian for one mode.

    State layout: w = (xi[0..m-1], p, b, y_o, v_o, z_o).
    """

    def __init__(self, sys: ContactSystem, mode: str, eps: float):
        self.sys = sys
        self.mode = mode
        self.eps = eps
        self.m = sys.m

    def rhs_generic(self, w):
        sys, mode, eps, m = self.sys, self.mode, self.eps, self.m
        xi = list(w[:m])
        p, b, yo, vo, zo = w[m], w[m + 1], w[m + 2], w[m + 3], w[m + 4]
        if mode in ("free", "positive-slip"):
            F, Gv, a1, a2, a3 = sys.contact_rates(xi)
            if mode == "free":
                return list(F) + [a1, a2, vo / eps, b / eps, -zo / eps]
            lam = zo - yo
            dxi = [f + g * lam for f, g in zip(F, Gv)]
            return dxi + [a1, a2 - a3 * lam, vo / eps,
                          (b + p * lam) / eps, (-zo - lam) / eps]
        F = sys.F(xi)
        a1 = sys.alpha1_fn(xi)
        a2 = sys.alpha2_fn(xi)
        lam = zo - yo
        if mode == "negative-slip":
            Gv = sys.G_neg(xi)
            dp = a1 + lam * sys.p_gneg_fn(xi)
            db = a2 + lam * sys.b_gneg_fn(xi)
            dvo = (b + lam * sys.p_neg_fn(xi)) / eps
        else:   # stick
            a = sys.a_fn(xi)
            k_pos = sys.k_pos_fn(xi)
            k_neg = sys.k_neg_fn(xi)
            c = (k_neg + a / lam) / (k_neg - k_pos)
            Gv = sys.G_stick(xi, c)
            dp = a1 + lam * (1 - c) * sys.p_gneg_fn(xi)
            db = a2 + lam * (-c * sys.alpha3_fn(xi)
                             + (1 - c) * sys.b_gneg_fn(xi))
            dvo = (b + lam * (c * p + (1 - c) * sys.p_neg_fn(xi))) / eps
        dxi = [f + g * lam for f, g in zip(F, Gv)]
        return dxi + [dp, db, vo / eps, dvo, (-zo - lam) / eps]

    def __call__(self, t, w):
        return [float(v) for v in self.rhs_generic(list(w))]

    def jac(self, t, w):
        n = len(w)
        seeds = np.eye(n)
        state = [Jet(float(w[i]), tuple(seeds[i])) for i in range(n)]
        rows = []
        for comp in self.rhs_generic(state):
            if isinstance(comp, Jet):
                rows.append([float(x) for x in comp.parts])
            else:
                rows.append([0.0] * n)
        return np.asarray(rows)


def _initial_mode(sys: ContactSystem, xi, z: float, u_tol: float) -> str:
    y = float(sys.y(list(xi)))
    if y >= z:
        return "free"
    if sys.fixed_positive_slip:
        return "positive-slip"
    u = float(sys.u_fn(list(xi)))
    if u > u_tol:
        return "positive-slip"
    if u < -u_tol:
        return "negative-slip"
    return "stick"


def detect_mode_transition(sys: ContactSystem, xi, lam: float,
                           u_tol: float = 1e-9) -> Tuple[str, float]:
    """Contact mode at a tangential-velocity zero crossing.

    Returns (mode, c): stick with its force fraction when c from the
    tangential balance lies in [0, 1]; otherwise the slip branch whose
    acceleration is self-consistent at u = 0.
    """
    xi = list(xi)
    u = float(sys.u_fn(xi))
    if sys.fixed_positive_slip:
        return "positive-slip", 1.0
    if u > u_tol:
        return "positive-slip", 1.0
    if u < -u_tol:
        return "negative-slip", 0.0
    c = sys.stick_fraction(xi, lam)
    if 0.0 <= c <= 1.0:
        return "stick", c
    a = float(sys.a_fn(xi))
    du_pos = a + float(sys.k_pos_fn(xi)) * lam
    return ("positive-slip", 1.0) if du_pos > 0 else ("negative-slip", 0.0)


def simulate(sys: ContactSystem, ic, cfg: SimConfig,
             z0: Optional[float] = None, mode: Optional[str] = None) -> Trajectory:
    """Integrate the regularized system through mode changes.

    ``ic`` is either an :class:`ExtendedState` (for the built-in systems
    that expose one) or a raw state vector, in which case ``z0`` supplies
    the surface deformation.  The synchronized contact scalars are
    initialized from the state functions at the start time.  Events are
    localized on the integrator interpolant and logged; terminal events
    switch the mode, and kinds listed in ``cfg.stop_events`` (plus impact
    divergence when ``stop_at_iwc``) end the run.
    """
    if isinstance(ic, ExtendedState):
        xi = ic.vector(sys)
        z = float(ic.z)
    else:
        xi = np.asarray(ic, float)
        z = float(z0 if z0 is not None else 0.0)
    if xi.shape != (sys.m,):
        raise ValueError(f"state dimension {xi.shape} != {sys.m}")

    eps = cfg.eps
    m = sys.m
    if cfg.iwc_lambda_scale is not None:
        lam_scale = cfg.iwc_lambda_scale
    else:
        dq = sys.derived_quantities(list(xi))
        denom = dq.alpha1 - dq.alpha3
        lam_scale = abs(dq.alpha2 / denom) if denom != 0 else 1.0
        if lam_scale == 0 or not math.isfinite(lam_scale):
            lam_scale = 1.0
    iwc_threshold = cfg.iwc_factor * lam_scale

    mode = mode or _initial_mode(sys, xi, z, cfg.u_tol)

    t0, t1 = cfg.t_span
    t_now = float(t0)
    w = np.concatenate([xi, [float(sys.p_fn(list(xi))),
                             float(sys.b_fn(list(xi))),
                             float(sys.y(list(xi))) / eps ** 2,
                             float(sys.v_fn(list(xi))) / eps,
                             z / eps ** 2]])

    ts: List[np.ndarray] = []
    ws: List[np.ndarray] = []
    mode_tags: List[str] = []
    events: List[TrajectoryEvent] = []
    event_rows: List[Tuple[float, np.ndarray, str]] = []
    total_steps = 0
    iwc_bump = 1.0

    def ext_state(w_):          # external (xi..., z) view of a full row
        return np.concatenate([w_[:m], [eps ** 2 * w_[m + 4]]])

    for _switch in range(cfg.max_mode_switches):
        rhs = _ModeRHS(sys, mode, eps)
        ev_fns = []
        ev_kinds = []

        def gap(t, w_):
            return w_[m + 2] - w_[m + 4]        # y_o - z_o

        if mode == "free":
            gap.terminal = True
            gap.direction = -1
            ev_fns.append(gap)
            ev_kinds.append("touch-down")
        else:
            gap.terminal = True
            gap.direction = 1
            ev_fns.append(gap)
            ev_kinds.append("lift-off")

            def passage(t, w_):
                return w_[m]
            passage.terminal = "gspot-passage" in cfg.stop_events
            ev_fns.append(passage)
            ev_kinds.append("gspot-passage")

            if cfg.stop_at_iwc:
                def iwc(t, w_, _thr=iwc_threshold):
                    return (w_[m + 4] - w_[m + 2]) - _thr * iwc_bump
                iwc.terminal = True
                iwc.direction = 1
                ev_fns.append(iwc)
                ev_kinds.append("iwc-onset")

            if not sys.fixed_positive_slip:
                if mode in ("positive-slip", "negative-slip"):
                    def uzero(t, w_, _sys=sys):
                        return float(_sys.u_fn(list(w_[:m])))
                    uzero.terminal = True
                    uzero.direction = -1 if mode == "positive-slip" else 1
                    ev_fns.append(uzero)
                    ev_kinds.append("u-zero")
                else:   # stick: leave when the force fraction exits [0, 1]
                    def c_val(t, w_, _sys=sys):
                        lam = w_[m + 4] - w_[m + 2]
                        return _sys.stick_fraction(list(w_[:m]), lam)
                    def c_low(t, w_):
                        return c_val(t, w_)
                    def c_high(t, w_):
                        return c_val(t, w_) - 1.0
                    c_low.terminal = True
                    c_low.direction = -1
                    c_high.terminal = True
                    c_high.direction = 1
                    ev_fns.extend([c_low, c_high])
                    ev_kinds.extend(["stick-to-slip", "stick-to-slip"])

        seg_eval = None
        if cfg.t_eval is not None:
            pts = np.asarray(cfg.t_eval, float)
            seg_eval = pts[(pts >= t_now) & (pts <= t1)]
            if seg_eval.size == 0:
                seg_eval = None
        sol = solve_ivp(rhs, [t_now, t1], w, method="Radau",
                        rtol=cfg.rtol, atol=cfg.atol, jac=rhs.jac,
                        events=ev_fns, dense_output=False,
                        t_eval=seg_eval, max_step=cfg.max_step)
        if sol.status == -1:
            raise StiffnessError(
                f"integration failed at t={sol.t[-1]:.6g} in mode {mode}: "
                f"{sol.message}")
        total_steps += max(len(sol.t), 1)
        if total_steps > cfg.max_steps:
            raise SimulationError(f"exceeded max_steps={cfg.max_steps}")

        # samples for this segment (skip duplicated junction point)
        seg_t = np.asarray(sol.t, float)
        seg_w = (np.asarray(sol.y).T if seg_t.size
                 else np.zeros((0, m + 5)))
        prev_end = next((seg[-1] for seg in reversed(ts) if len(seg)), None)
        if seg_t.size and prev_end is not None and seg_t[0] == prev_end:
            seg_t, seg_w = seg_t[1:], seg_w[1:]
        ts.append(seg_t)
        ws.append(seg_w)
        mode_tags.extend([mode] * len(seg_t))

        # non-terminal event logging
        stopped_at_passage = False
        for k, kind in enumerate(ev_kinds):
            if kind == "gspot-passage":
                for te, we in zip(sol.t_events[k], sol.y_events[k]):
                    events.append(TrajectoryEvent(float(te), "gspot-passage",
                                                  ext_state(we)))
                    event_rows.append((float(te), np.array(we), mode))
                    if getattr(ev_fns[k], "terminal", False):
                        stopped_at_passage = True
        if stopped_at_passage:
            break

        if sol.status == 0:
            break

        # terminal event: find which one fired first
        k_fired = min((k for k in range(len(ev_fns))
                       if getattr(ev_fns[k], "terminal", False)
                       and sol.t_events[k].size),
                      key=lambda k: sol.t_events[k][0])
        t_now = float(sol.t_events[k_fired][0])
        w = np.array(sol.y_events[k_fired][0])
        kind = ev_kinds[k_fired]
        xi_ev = w[:m]
        lam_ev = max(0.0, w[m + 4] - w[m + 2])
        event_rows.append((t_now, w.copy(), mode))

        stop = False
        if kind == "lift-off":
            events.append(TrajectoryEvent(t_now, "lift-off", ext_state(w)))
            stop = "lift-off" in cfg.stop_events
            mode = "free"
        elif kind == "touch-down":
            events.append(TrajectoryEvent(t_now, "touch-down", ext_state(w)))
            stop = "touch-down" in cfg.stop_events
            if sys.fixed_positive_slip:
                mode = "positive-slip"
            else:
                mode, _c = detect_mode_transition(sys, xi_ev, 1e-30, cfg.u_tol)
        elif kind == "iwc-onset":
            v_ev = eps * w[m + 3]
            prior = [row for tt, row in zip(seg_t, seg_w) if tt < t_now]
            lam_hist = [max(0.0, row[m + 4] - row[m + 2]) for row in prior[-3:]]
            growing = all(a < b for a, b in zip(lam_hist, lam_hist[1:] + [lam_ev]))
            if v_ev < 0 and growing:
                events.append(TrajectoryEvent(t_now, "iwc-onset", ext_state(w)))
                break
            iwc_bump *= 10.0   # not a divergence yet: raise the bar, go on
        elif kind == "u-zero":
            new_mode, _c = detect_mode_transition(sys, xi_ev, max(lam_ev, 1e-30),
                                                  cfg.u_tol)
            if new_mode == "stick":
                events.append(TrajectoryEvent(t_now, "slip-to-stick", ext_state(w)))
                stop = "slip-to-stick" in cfg.stop_events
                mode = "stick"
            else:
                events.append(TrajectoryEvent(t_now, "slip-reversal", ext_state(w)))
                stop = "slip-reversal" in cfg.stop_events
                mode = new_mode
        elif kind == "stick-to-slip":
            events.append(TrajectoryEvent(t_now, "stick-to-slip", ext_state(w)))
            stop = "stick-to-slip" in cfg.stop_events
            a = float(sys.a_fn(list(xi_ev)))
            du_pos = a + float(sys.k_pos_fn(list(xi_ev))) * lam_ev
            mode = "positive-slip" if du_pos > 0 else "negative-slip"
        if stop or t_now >= t1:
            break
    else:
        raise SimulationError("exceeded max_mode_switches")

    t_all = np.concatenate(ts) if ts else np.array([])
    w_all = np.vstack(ws) if ws else np.zeros((0, m + 5))
    # fold event rows into the samples so both accepted steps and
    # localized events appear in the record
    for te, we, md in sorted(event_rows, key=lambda r: r[0]):
        idx = int(np.searchsorted(t_all, te))
        if idx < len(t_all) and t_all[idx] == te:
            continue
        t_all = np.insert(t_all, idx, te)
        w_all = np.insert(w_all, idx, we, axis=0)
        mode_tags.insert(idx, md)
    lam_all = np.zeros(len(t_all))
    for i in range(len(t_all)):
        if mode_tags[i] in _CONTACT_MODES:
            lam_all[i] = max(0.0, w_all[i, m + 4] - w_all[i, m + 2])
    return Trajectory(system=sys.name, state_names=sys.state_names, eps=eps,
                      t=t_all, states=w_all[:, :m],
                      z=eps ** 2 * w_all[:, m + 4],
                      lam=lam_all, modes=mode_tags, events=events)


# ---------------------------------------------------------------------------
# scalar high-order oracle for the constant-rate model
# ---------------------------------------------------------------------------

@dataclass
class OracleResult:
    t: np.ndarray
    b: np.ndarray
    db: np.ndarray
    y: np.ndarray
    v: np.ndarray
    z: np.ndarray
    lam: np.ndarray


def eliminated_oracle(alpha1: float, alpha2: float, alpha3: float, eps: float,
                      state0: ExtendedState, t_span: Sequence[float],
                      t_eval: Optional[Sequence[float]] = None,
                      rtol: float = 1e-10, atol: float = 1e-12) -> OracleResult:
    """Independent integration of the constant-rate model through the
    single scalar equation for b(t).

    Eliminating y, v, z (valid while the contact stays closed) leaves

        a3*b + a1*t*(a2 - b') + eps*[a3*b' + a1*(a2 - b') - a1*t*b'']
            - 2*eps^2*b''' - eps^3*b'''' = 0,

    nominally third order but carrying an eps^3 fourth-derivative term;
    it is integrated here in its full fourth-order form.  Time is
    anchored so that p = a1*t, i.e. state0.p must equal a1*t_span[0].
    The other variables are recovered algebraically from b and its
    derivatives, e.g. a3*lam = a2 - b'.
    """
    t0 = float(t_span[0])
    if abs(state0.p - alpha1 * t0) > 1e-9 * max(1.0, abs(state0.p)):
        raise ValueError("state0.p inconsistent with p = alpha1 * t at t0")

    # derivative chain from the primitive state
    lam0 = (state0.z - state0.y) / eps ** 2
    db0 = alpha2 - alpha3 * lam0
    dz0 = (-state0.z - eps ** 2 * lam0) / eps
    dlam0 = (dz0 - state0.v) / eps ** 2
    ddb0 = -alpha3 * dlam0
    ddz0 = (-dz0 - eps ** 2 * dlam0) / eps
    dv0 = state0.b + state0.p * lam0
    ddlam0 = (ddz0 - dv0) / eps ** 2
    dddb0 = -alpha3 * ddlam0
    w0 = [state0.b, db0, ddb0, dddb0]

    def rhs(t, w):
        b, b1, b2, b3 = w
        b4 = (alpha3 * b + alpha1 * t * (alpha2 - b1)
              + eps * (alpha3 * b1 + alpha1 * (alpha2 - b1) - alpha1 * t * b2)
              - 2.0 * eps ** 2 * b3) / eps ** 3
        return [b1, b2, b3, b4]

    sol = solve_ivp(rhs, [t0, float(t_span[1])], w0, method="Radau",
                    rtol=rtol, atol=atol, t_eval=t_eval, dense_output=False)
    if sol.status != 0:
        raise StiffnessError(f"oracle integration failed: {sol.message}")
    t = sol.t
    b, b1, b2, b3 = sol.y
    lamr = alpha2 - b1
    y = (eps ** 2 * (alpha3 * b + alpha1 * t * lamr - 2.0 * lamr)
         - eps ** 3 * b2 - eps ** 4 * b3) / alpha3
    v = (-eps * (alpha3 * b + alpha1 * t * lamr)
         + 2.0 * eps ** 2 * b2 + eps ** 3 * b3) / alpha3
    z = (eps ** 2 * (alpha3 * b + alpha1 * t * lamr - lamr)
         - eps ** 3 * b2 - eps ** 4 * b3) / alpha3
    return OracleResult(t=t, b=b, db=b1, y=y, v=v, z=z, lam=lamr / alpha3)
