"""Construction of the distinguished (maximally smooth) trajectory.

Near the contact singularity the regularized dynamics admit exactly one
trajectory that stays smooth in both time and the compliance scale.  On
the inner scale t = delta^2 * s (delta = eps^(1/3)) it is built order by
order in delta with coefficients that are polynomials in s confined to
the graded spaces checked by :func:`jamlab.ring.poly_class_check`:

  order 2v:   p, b, xi in class v+1;  y, z, lam in class v;  v in class v-1
  order 2v+1: p, b, xi in class v-3;  y, z in class v-1;  v in class v-2;
              lam in class v-4.

Each order solves a linear third-order balance for the free normal
acceleration coefficient by a descending-power ansatz, recovers the
remaining scalars algebraically, and integrates the state equation with
integration constants eliminated through the order-(n+2) terms of the
synchronization conditions at s = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .contact import ContactSystem
from .gspot import BETA_INTEGER_TOL, GSpotInfo
from .ring import (DeltaSeries, DomainError, SPoly, gradient,
                   poly_class_check)

logger = logging.getLogger(__name__)


class ExpansionError(RuntimeError):
    pass


class ClassMembershipError(ExpansionError):
    """A computed coefficient left its graded polynomial space."""

    def __init__(self, order: int, variable: str, poly: SPoly, klass: int):
        self.order = order
        self.variable = variable
        super().__init__(f"{variable}_{order} violates class P_{klass}: {poly!r}")


_EXACT = (int, Fraction)


def _is_exact_seq(xs) -> bool:
    return all(isinstance(x, _EXACT) for x in xs)


# graded-space index per variable and delta order
def _klass(var: str, n: int) -> int:
    nu, odd = divmod(n, 2)
    table = {
        "p": (nu + 1, nu - 3), "b": (nu + 1, nu - 3), "xi": (nu + 1, nu - 3),
        "y": (nu, nu - 1), "z": (nu, nu - 1),
        "v": (nu - 1, nu - 2), "lam": (nu, nu - 4),
    }
    return table[var][odd]


def solve_third_order_poly(r: SPoly, alpha1, alpha3) -> SPoly:
    """Unique polynomial solution of 2*b''' + alpha1*s*b' - alpha3*b = r.

    A monomial s^k maps to (k*alpha1 - alpha3)*s^k + 2k(k-1)(k-2)*s^(k-3),
    so coefficients are filled from the highest power down; the s^k
    factor never vanishes when alpha3/alpha1 is not an integer.  Only the
    particular solution is taken: the complementary functions are not
    polynomial and would break the smoothness requirement.
    """
    beta = alpha3 / alpha1
    if abs(float(beta) - round(float(beta))) < BETA_INTEGER_TOL:
        raise ExpansionError(f"beta = {float(beta)} is too close to an integer")
    rc = list(r.coeffs)
    out = [0] * len(rc)
    for k in range(len(rc) - 1, -1, -1):
        bk = rc[k] / (k * alpha1 - alpha3)
        out[k] = bk
        if k >= 3 and bk != 0:
            rc[k - 3] = rc[k - 3] - 2 * k * (k - 1) * (k - 2) * bk
    return SPoly(out)


@dataclass
class CanardExpansion:
    """Per-order polynomial tables of the distinguished trajectory."""

    order: int                       # number of delta orders computed (M)
    gspot: GSpotInfo
    xi_star: list
    alpha1: object
    alpha3: object
    exact: bool
    p: list = dc_field(default_factory=list)
    b: list = dc_field(default_factory=list)
    y: list = dc_field(default_factory=list)
    v: list = dc_field(default_factory=list)
    z: list = dc_field(default_factory=list)
    lam: list = dc_field(default_factory=list)
    xi: list = dc_field(default_factory=list)      # per order: list of m SPoly
    bc_condition: float = float("nan")

    def table(self, var: str) -> list:
        return getattr(self, var)

    def eval_scaled(self, var: str, s: float, delta: float) -> float:
        """Evaluate the inner-scaled series of one scalar variable."""
        acc = 0.0
        for coeff in reversed(self.table(var)):
            acc = acc * delta + float(coeff(s))
        return acc

    def eval_state(self, s: float, delta: float) -> np.ndarray:
        """Unscaled state xi(t, eps) at inner time s (Horner in delta)."""
        m = len(self.xi_star)
        tilde = np.zeros(m)
        for coeffs in reversed(self.xi):
            for i in range(m):
                tilde[i] = tilde[i] * delta + float(coeffs[i](s))
        return np.array([float(x) for x in self.xi_star]) + delta ** 2 * tilde

    def scaled_series_text(self) -> str:
        """Structured listing of every coefficient, exact or decimal."""
        lines = []
        for var in ("p", "b", "y", "v", "z", "lam"):
            for n, poly in enumerate(self.table(var)):
                if poly.is_zero():
                    continue
                terms = " ".join(f"s^{k}:{c}" for k, c in enumerate(poly.coeffs)
                                 if c != 0)
                lines.append(f"{var}[{n}] {terms}")
        for n, comps in enumerate(self.xi):
            for i, poly in enumerate(comps):
                if poly.is_zero():
                    continue
                terms = " ".join(f"s^{k}:{c}" for k, c in enumerate(poly.coeffs)
                                 if c != 0)
                lines.append(f"xi{i}[{n}] {terms}")
        return "\n".join(lines) + "\n"


def _series_state(xi_star, xi_tilde):
    return [xs + xt.shift(2) for xs, xt in zip(xi_star, xi_tilde)]


def _project_class(poly: SPoly, klass: int, order: int, var: str,
                   exact: bool) -> SPoly:
    if poly_class_check(poly, klass):
        return poly
    if exact:
        raise ClassMembershipError(order, var, poly, klass)
    scale = max((abs(c) for c in poly.coeffs if c != 0), default=0.0)
    kept = []
    for k, c in enumerate(poly.coeffs):
        if c != 0 and (klass < 0 or k > klass or (klass - k) % 3 != 0):
            if abs(c) > 1e-9 * (1.0 + scale):
                raise ClassMembershipError(order, var, poly, klass)
            kept.append(0.0)
        else:
            kept.append(c)
    return SPoly(kept)


def expand(sys: ContactSystem, gspot, M: int = 15,
           pin: Optional[Sequence[Callable]] = None,
           exact: Optional[bool] = None) -> CanardExpansion:
    """Run the order-by-order construction up to (excluding) order M.

    ``gspot`` is either a :class:`GSpotInfo` (floating singular point) or
    a sequence of exact scalars giving the singular state directly; exact
    rational arithmetic is used whenever the point and the system
    constants allow it (needed for coefficient-exact checks), floating
    otherwise.
    """
    if isinstance(gspot, GSpotInfo):
        xi_raw = list(gspot.xi_star)
        ginfo = gspot
    else:
        xi_raw = list(gspot)
        ginfo = None

    if exact is None:
        exact = _is_exact_seq(xi_raw)
    if exact:
        xi_star = [Fraction(x) for x in xi_raw]
    else:
        xi_star = [float(x) for x in xi_raw]

    m = sys.m
    a1s = sys.alpha1_fn(xi_star)
    a3s = sys.alpha3_fn(xi_star)
    beta = float(a3s) / float(a1s)
    if abs(beta - round(beta)) < BETA_INTEGER_TOL:
        raise ExpansionError(
            f"beta = {beta} within {BETA_INTEGER_TOL} of an integer: "
            "no polynomial expansion exists")
    if float(a1s) >= 0 or float(a3s) >= 0:
        raise ExpansionError("expansion requires alpha1 < 0 and alpha3 < 0")

    if pin is None:
        pin = [(lambda idx: lambda s: s[idx] - xi_star[idx])(i)
               for i in range(m - 4)]
    if len(pin) != m - 4:
        raise ValueError(f"need {m - 4} pinning conditions, got {len(pin)}")

    bc_fns = [sys.p_fn, sys.b_fn, sys.y, sys.v_fn, *pin]
    rows = [gradient(f, xi_star) for f in bc_fns]
    if exact:
        bc_solve = _make_exact_solver([list(r) for r in rows])
        bc_cond = float("nan")
    else:
        A = np.array([[float(v) for v in r] for r in rows])
        bc_cond = float(np.linalg.cond(A))
        if bc_cond > 1e12:
            raise ExpansionError(
                f"synchronization Jacobian nearly singular (cond {bc_cond:.3e})")
        bc_solve = lambda rhs: list(np.linalg.solve(A, np.array(rhs, float)))
        logger.debug("expansion BC matrix condition number: %.3e", bc_cond)

    if ginfo is None:
        ginfo = GSpotInfo(
            xi_star=np.array([float(x) for x in xi_star]),
            alpha1=float(a1s), alpha2=float(sys.alpha2_fn(xi_star)),
            alpha3=float(a3s), beta=beta,
            case="", jacobian_condition=bc_cond, residual_norm=0.0)
        from .gspot import classify_case
        ginfo.case = classify_case(ginfo.alpha1, ginfo.alpha2, ginfo.alpha3)

    exp = CanardExpansion(order=M, gspot=ginfo, xi_star=list(xi_star),
                          alpha1=a1s, alpha3=a3s, exact=exact,
                          bc_condition=bc_cond)
    zero = SPoly()
    xi_tilde_polys = [[] for _ in range(m)]     # per component, per order

    for n in range(M):
        trunc = n + 3
        xi_tilde = [DeltaSeries(xi_tilde_polys[i], trunc) for i in range(m)]
        st = _series_state(xi_star, xi_tilde)
        a1_series = _as_series(sys.alpha1_fn(st), trunc)
        a2_series = _as_series(sys.alpha2_fn(st), trunc)
        a3_series = _as_series(sys.alpha3_fn(st), trunc)
        F_series = [_as_series(c, trunc) for c in sys.F(st)]
        G_series = [_as_series(c, trunc) for c in sys.G(st)]

        # normal-direction drift rate integrates directly
        pn = a1_series.coefficient(n).antiderivative()
        pn = _project_class(pn, _klass("p", n), n, "p", exact)

        # forcing terms assembled from all lower orders
        rb = a2_series.coefficient(n)
        for k in range(n):
            rb = rb - a3_series.coefficient(n - k) * exp.lam[k]
        p_all = exp.p + [pn]
        rv = zero
        for k in range(n):
            rv = rv + p_all[n - k] * exp.lam[k]
        zprev = exp.z[n - 1] if n >= 1 else zero
        rn = (2 * rb.derivative().derivative()
              + a3s * zprev.derivative().derivative().derivative()
              + SPoly.monomial(a1s, 1) * rb + a3s * rv)
        bn = solve_third_order_poly(rn, a1s, a3s)
        bn = _project_class(bn, _klass("b", n), n, "b", exact)

        # algebraic recovery of the contact block
        yn = (2 * (bn.derivative() - rb) - a3s * zprev.derivative()) / a3s
        vn = (2 * (bn.derivative().derivative() - rb.derivative())
              - a3s * zprev.derivative().derivative()) / a3s
        ln = (rb - bn.derivative()) / a3s
        zn = (bn.derivative() - rb - a3s * zprev.derivative()) / a3s
        yn = _project_class(yn, _klass("y", n), n, "y", exact)
        vn = _project_class(vn, _klass("v", n), n, "v", exact)
        ln = _project_class(ln, _klass("lam", n), n, "lam", exact)
        zn = _project_class(zn, _klass("z", n), n, "z", exact)

        # state equation: integrate, then eliminate integration constants
        lam_all = exp.lam + [ln]
        r_xi = [F_series[i].coefficient(n) for i in range(m)]
        for k in range(n + 1):
            lk = lam_all[k]
            if lk.is_zero():
                continue
            for i in range(m):
                gi = G_series[i].coefficient(n - k)
                if not gi.is_zero():
                    r_xi[i] = r_xi[i] + gi * lk
        xi_int = [r.antiderivative() for r in r_xi]

        xi0 = [DeltaSeries([poly.constant_term() for poly in xi_tilde_polys[i]],
                           trunc) for i in range(m)]
        st0 = _series_state(xi_star, xi0)
        gvals = [_as_series(f(st0), trunc).coefficient(n + 2).constant_term()
                 for f in bc_fns]
        rhs = [pn.constant_term() - gvals[0],
               bn.constant_term() - gvals[1],
               (exp.y[n - 4].constant_term() if n >= 4 else 0) - gvals[2],
               (exp.v[n - 2].constant_term() if n >= 2 else 0) - gvals[3]]
        rhs += [-gv for gv in gvals[4:]]
        consts = bc_solve(rhs)
        xin = []
        for i in range(m):
            poly = xi_int[i] + consts[i] if consts[i] != 0 else xi_int[i]
            xin.append(_project_class(poly, _klass("xi", n), n, f"xi{i}", exact))

        exp.p.append(pn)
        exp.b.append(bn)
        exp.y.append(yn)
        exp.v.append(vn)
        exp.z.append(zn)
        exp.lam.append(ln)
        exp.xi.append(xin)
        for i in range(m):
            xi_tilde_polys[i].append(xin[i])

    return exp


def _as_series(v, trunc: int) -> DeltaSeries:
    if isinstance(v, DeltaSeries):
        return v
    return DeltaSeries.constant(v, trunc)


def _make_exact_solver(rows):
    """Gaussian elimination with exact pivoting over Fractions."""
    n = len(rows)
    base = [[Fraction(x) for x in row] for row in rows]

    def solve(rhs):
        M = [row[:] + [Fraction(r)] for row, r in zip(base, rhs)]
        for col in range(n):
            piv = next((r for r in range(col, n) if M[r][col] != 0), None)
            if piv is None:
                raise ExpansionError("singular synchronization matrix")
            M[col], M[piv] = M[piv], M[col]
            pv = M[col][col]
            M[col] = [x / pv for x in M[col]]
            for r in range(n):
                if r != col and M[r][col] != 0:
                    f = M[r][col]
                    M[r] = [x - f * y for x, y in zip(M[r], M[col])]
        return [M[i][n] for i in range(n)]

    return solve


# ---------------------------------------------------------------------------
# unscaling to (t, eps)
# ---------------------------------------------------------------------------

_DELTA_SHIFT = {"p": 2, "b": 2, "y": 6, "z": 6, "v": 4, "lam": 0}


@dataclass
class UnscaledPolynomial:
    """The distinguished trajectory as plain polynomials in (t, eps).

    ``terms[var]`` maps (t_power, eps_power) to the coefficient; the
    graded structure of the scaled tables guarantees all eps powers come
    out as non-negative integers.
    """

    terms: dict
    xi_star: list
    exact: bool

    def eval(self, var: str, t: float, eps: float) -> float:
        acc = 0.0
        for (i, k), c in self.terms[var].items():
            acc += float(c) * t ** i * eps ** k
        return acc


def unscale(exp: CanardExpansion) -> UnscaledPolynomial:
    """Collapse the (s, delta) tables to (t, eps) via t = delta^2 s,
    eps = delta^3; class membership makes every eps exponent integral."""
    out = {}
    for var, shift in _DELTA_SHIFT.items():
        table = {}
        for n, poly in enumerate(exp.table(var)):
            for rho, c in enumerate(poly.coeffs):
                if c == 0:
                    continue
                delta_pow = n + shift - 2 * rho
                if delta_pow < 0 or delta_pow % 3 != 0:
                    raise ExpansionError(
                        f"non-integral eps power for {var}[{n}] s^{rho}: "
                        f"delta^{delta_pow}")
                key = (rho, delta_pow // 3)
                table[key] = table.get(key, 0) + c
        out[var] = {k: v for k, v in table.items() if v != 0}
    return UnscaledPolynomial(terms=out, xi_star=list(exp.xi_star),
                              exact=exp.exact)


# ---------------------------------------------------------------------------
# residual validation
# ---------------------------------------------------------------------------

@dataclass
class ResidualReport:
    delta: float
    eq_norms: dict
    bc_norms: dict

    @property
    def eq_norm(self) -> float:
        return max(self.eq_norms.values())

    @property
    def bc_norm(self) -> float:
        return max(self.bc_norms.values())


def residual(exp: CanardExpansion, sys: ContactSystem, delta: float,
             s_grid: Sequence[float]) -> ResidualReport:
    """Substitute the truncated series into the inner equations and the
    synchronization conditions and report max-norm residuals.

    The equation residuals scale like delta^M and the boundary residuals
    like delta^(M+2) for an expansion computed through order M.
    """
    m = len(exp.xi_star)
    xi_star = [float(x) for x in exp.xi_star]

    def tables_float(var):
        return [p.as_float() for p in exp.table(var)]

    tabs = {var: tables_float(var) for var in ("p", "b", "y", "v", "z", "lam")}
    xi_tabs = [[exp.xi[n][i].as_float() for n in range(len(exp.xi))]
               for i in range(m)]

    def horner(polys, s, d):
        acc = 0.0
        for poly in reversed(polys):
            acc = acc * d + poly(s)
        return acc

    def horner_ds(polys, s, d):
        acc = 0.0
        for poly in reversed(polys):
            acc = acc * d + poly.derivative()(s)
        return acc

    names = ["p", "b", "y", "v", "z", "lam"]
    eq_norms = {k: 0.0 for k in
                ["p", "b", "y", "v", "z", "lam"] + [f"xi{i}" for i in range(m)]}
    for s in s_grid:
        vals = {k: horner(tabs[k], s, delta) for k in names}
        dvals = {k: horner_ds(tabs[k], s, delta) for k in names}
        xi_t = [horner(xi_tabs[i], s, delta) for i in range(m)]
        dxi_t = [horner_ds(xi_tabs[i], s, delta) for i in range(m)]
        state = [xs + delta ** 2 * xt for xs, xt in zip(xi_star, xi_t)]
        lam = vals["lam"]
        Fv = [float(c) for c in sys.F(state)]
        Gv = [float(c) for c in sys.G(state)]
        a1 = float(sys.alpha1_fn(state))
        a2 = float(sys.alpha2_fn(state))
        a3 = float(sys.alpha3_fn(state))
        eq_norms["p"] = max(eq_norms["p"], abs(dvals["p"] - a1))
        eq_norms["b"] = max(eq_norms["b"], abs(dvals["b"] - a2 + a3 * lam))
        eq_norms["y"] = max(eq_norms["y"], abs(dvals["y"] - vals["v"]))
        eq_norms["v"] = max(eq_norms["v"],
                            abs(dvals["v"] - vals["b"] - vals["p"] * lam))
        eq_norms["z"] = max(eq_norms["z"],
                            abs(delta * dvals["z"] + vals["z"] + lam))
        eq_norms["lam"] = max(eq_norms["lam"],
                              abs(lam - vals["z"] + vals["y"]))
        for i in range(m):
            eq_norms[f"xi{i}"] = max(eq_norms[f"xi{i}"],
                                     abs(dxi_t[i] - Fv[i] - Gv[i] * lam))

    # synchronization residuals at s = 0
    xi0 = [xi_star[i] + delta ** 2 * horner(xi_tabs[i], 0.0, delta)
           for i in range(m)]
    p0 = horner(tabs["p"], 0.0, delta)
    bc_norms = {
        "p-origin": abs(p0),
        "sync-p": abs(float(sys.p_fn(xi0)) - delta ** 2 * p0),
        "sync-b": abs(float(sys.b_fn(xi0)) - delta ** 2 * horner(tabs["b"], 0.0, delta)),
        "sync-y": abs(float(sys.y(xi0)) - delta ** 6 * horner(tabs["y"], 0.0, delta)),
        "sync-v": abs(float(sys.v_fn(xi0)) - delta ** 4 * horner(tabs["v"], 0.0, delta)),
    }
    return ResidualReport(delta=delta, eq_norms=eq_norms, bc_norms=bc_norms)
