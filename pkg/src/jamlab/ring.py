"""Generic scalar arithmetic for contact systems.

Two coupled constructions live here:

* first-order jets (:class:`Jet`) carrying a value together with one or
  more directional derivatives, used for Lie derivatives and Newton
  Jacobians;
* a truncated bivariate series ring (:class:`DeltaSeries` over
  :class:`SPoly`): series in a small parameter ``delta`` whose
  coefficients are polynomials in the slow variable ``s``.

System right-hand sides are written once against plain arithmetic plus
the :func:`sin`, :func:`cos`, :func:`exp` wrappers below, and can then be
evaluated over floats, exact rationals, series, or jets of any of these.
Jets nest: taking a Lie derivative of a function that itself is a Lie
derivative simply evaluates over jets whose values are jets.

All values are immutable after construction and all operations are pure,
so instances can be shared freely between threads or worker processes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence


class DomainError(ArithmeticError):
    """Raised when an operation leaves the scalar ring (division by zero,
    non-constant series divisor, transcendental of a nonzero rational in
    exact mode, ...)."""


_EXACT_SCALARS = (int, Fraction)
_SCALARS = (int, float, Fraction)


def _is_exact(x) -> bool:
    return isinstance(x, _EXACT_SCALARS)


# ---------------------------------------------------------------------------
# polynomials in s
# ---------------------------------------------------------------------------

class SPoly:
    """Polynomial in the slow variable ``s``.

    Coefficients are indexed by power of ``s`` and may be exact rationals
    (``int``/``Fraction``) or floats; the arithmetic mode is inferred from
    the coefficients and preserved where possible.  Trailing exact zeros
    are normalized away so ``degree`` is well defined.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = c

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(v) -> "SPoly":
        return SPoly([v])

    @staticmethod
    def monomial(v, power: int) -> "SPoly":
        if power < 0:
            raise DomainError("negative power in SPoly")
        return SPoly([0] * power + [v])

    @staticmethod
    def variable() -> "SPoly":
        """The polynomial ``s``."""
        return SPoly([0, 1])

    # -- structure ----------------------------------------------------
    @property
    def mode(self) -> str:
        """``"exact-rational"`` if every coefficient is an int/Fraction."""
        return "exact-rational" if all(_is_exact(c) for c in self.coeffs) else "floating"

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Degree, with the zero polynomial reported as -1."""
        return len(self.coeffs) - 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else 0

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, SPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, _SCALARS):
            return self.coeffs == ([other] if other != 0 else [])
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs))

    # -- ring operations ----------------------------------------------
    def _lift(self, other):
        if isinstance(other, SPoly):
            return other
        if isinstance(other, _SCALARS):
            return SPoly([other])
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return SPoly([self[i] + o[i] for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return SPoly([self[i] - o[i] for i in range(n)])

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return SPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            if other == 0:
                return SPoly()
            return SPoly([c * other for c in self.coeffs])
        if not isinstance(other, SPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return SPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return SPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _SCALARS):
            if other == 0:
                raise DomainError("division by zero scalar")
            inv = Fraction(1, other) if _is_exact(other) else 1.0 / other
            return self * inv
        if isinstance(other, SPoly):
            if not other.is_constant() or other.is_zero():
                raise DomainError("SPoly division only by nonzero constants")
            return self / other.constant_term()
        return NotImplemented

    # -- calculus -----------------------------------------------------
    def derivative(self) -> "SPoly":
        return SPoly([k * self.coeffs[k] for k in range(1, len(self.coeffs))])

    def antiderivative(self) -> "SPoly":
        """Antiderivative in s with zero constant term."""
        out = [0]
        for k, c in enumerate(self.coeffs):
            out.append(c / Fraction(k + 1) if _is_exact(c) else c / (k + 1))
        return SPoly(out)

    def __call__(self, s):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def as_float(self) -> "SPoly":
        return SPoly([float(c) for c in self.coeffs])

    def __repr__(self):
        if self.is_zero():
            return "SPoly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c != 0:
                terms.append(f"({c})*s^{k}" if k else f"({c})")
        return "SPoly(" + " + ".join(terms) + ")"


def poly_class_check(p: SPoly, n: int) -> bool:
    """Membership test for the graded space with powers ``n, n-3, n-6, ...``.

    For ``n < 0`` the space contains only the zero polynomial.  The zero
    polynomial belongs to every class.
    """
    if p.is_zero():
        return True
    if n < 0:
        return False
    for k, c in enumerate(p.coeffs):
        if c != 0 and (k > n or (n - k) % 3 != 0):
            return False
    return True


# ---------------------------------------------------------------------------
# truncated series in delta with SPoly coefficients
# ---------------------------------------------------------------------------

class DeltaSeries:
    """Series in ``delta`` truncated at order ``M`` with :class:`SPoly`
    coefficients: ``coeffs[n]`` multiplies ``delta**n`` for ``n < M``.

    Products and quotients are computed term-exactly for all retained
    powers.  Division requires the divisor's ``delta^0`` coefficient to be
    a nonzero constant (in ``s``); anything else has no inverse inside the
    polynomial-coefficient ring.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: int):
        if order < 1:
            raise DomainError("series order must be >= 1")
        self.order = order
        c = [x if isinstance(x, SPoly) else SPoly([x]) for x in coeffs[:order]]
        c += [SPoly()] * (order - len(c))
        self.coeffs = c

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(v, order: int) -> "DeltaSeries":
        return DeltaSeries([v if isinstance(v, SPoly) else SPoly([v])], order)

    @staticmethod
    def delta(order: int) -> "DeltaSeries":
        """The series ``delta`` itself."""
        return DeltaSeries([SPoly(), SPoly([1])], order)

    def coefficient(self, n: int) -> SPoly:
        return self.coeffs[n] if 0 <= n < self.order else SPoly()

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def constant_part(self):
        """The delta^0, s^0 scalar."""
        return self.coeffs[0].constant_term()

    # -- ring operations ----------------------------------------------
    def _lift(self, other):
        if isinstance(other, DeltaSeries):
            if other.order != self.order:
                raise DomainError("mismatched truncation orders")
            return other
        if isinstance(other, (SPoly,) + _SCALARS):
            return DeltaSeries([other if isinstance(other, SPoly) else SPoly([other])],
                               self.order)
        return None

    def __add__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DeltaSeries([a + b for a, b in zip(self.coeffs, o.coeffs)], self.order)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DeltaSeries([a - b for a, b in zip(self.coeffs, o.coeffs)], self.order)

    def __rsub__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return DeltaSeries([-c for c in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        if isinstance(other, (SPoly,) + _SCALARS):
            return DeltaSeries([c * other for c in self.coeffs], self.order)
        if not isinstance(other, DeltaSeries):
            return NotImplemented
        if other.order != self.order:
            raise DomainError("mismatched truncation orders")
        M = self.order
        out = [SPoly() for _ in range(M)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j in range(M - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return DeltaSeries(out, M)

    __rmul__ = __mul__

    def inverse(self) -> "DeltaSeries":
        c0 = self.coeffs[0]
        if c0.is_zero() or not c0.is_constant():
            raise DomainError("series divisor needs a nonzero constant leading term")
        lead = c0.constant_term()
        inv0 = Fraction(1, lead) if _is_exact(lead) else 1.0 / lead
        M = self.order
        out = [SPoly([inv0])] + [SPoly()] * (M - 1)
        for n in range(1, M):
            acc = SPoly()
            for k in range(1, n + 1):
                a = self.coeffs[k]
                if not a.is_zero() and not out[n - k].is_zero():
                    acc = acc + a * out[n - k]
            out[n] = acc * (-inv0)
        return DeltaSeries(out, M)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        if isinstance(other, _SCALARS):
            if other == 0:
                raise DomainError("division by zero scalar")
            inv = Fraction(1, other) if _is_exact(other) else 1.0 / other
            return self * inv
        if isinstance(other, SPoly):
            return DeltaSeries([c / other for c in self.coeffs], self.order)
        if isinstance(other, DeltaSeries):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, n: int):
        return _int_pow(self, n)

    # -- calculus and evaluation ----------------------------------------
    def d_ds(self) -> "DeltaSeries":
        """Derivative with respect to s, coefficient-wise."""
        return DeltaSeries([c.derivative() for c in self.coeffs], self.order)

    def shift(self, k: int) -> "DeltaSeries":
        """Multiply by ``delta**k`` (truncating)."""
        return DeltaSeries([SPoly()] * k + self.coeffs[: self.order - k], self.order)

    def __call__(self, s, delta):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * delta + c(s)
        return acc

    def as_float(self) -> "DeltaSeries":
        return DeltaSeries([c.as_float() for c in self.coeffs], self.order)

    def __repr__(self):
        terms = [f"{c!r}*d^{n}" for n, c in enumerate(self.coeffs) if not c.is_zero()]
        return f"DeltaSeries[{self.order}](" + (" + ".join(terms) or "0") + ")"


def series_arith(a: DeltaSeries, b: DeltaSeries, op: str) -> DeltaSeries:
    """Named-op entry point for series arithmetic (``add``/``mul``/``div``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

class Jet:
    """Value plus directional derivatives over an arbitrary scalar ring.

    ``parts`` holds one entry per seeded direction; a Lie derivative uses a
    single seed, a full gradient seeds the ``m`` basis directions at once.
    The product and chain rules are exact in exact arithmetic.
    """

    __slots__ = ("value", "parts")

    def __init__(self, value, parts: tuple):
        self.value = value
        self.parts = tuple(parts)

    @property
    def partials(self) -> tuple:
        return self.parts

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, (DeltaSeries, SPoly) + _SCALARS):
            z = ring_zero(self.value)
            return Jet(other, tuple(z for _ in self.parts))
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Jet(self.value + o.value,
                   tuple(a + b for a, b in zip(self.parts, o.parts)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Jet(self.value - o.value,
                   tuple(a - b for a, b in zip(self.parts, o.parts)))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Jet(-self.value, tuple(-p for p in self.parts))

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Jet(self.value * o.value,
                   tuple(self.value * q + p * o.value
                         for p, q in zip(self.parts, o.parts)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        q = self.value / o.value
        return Jet(q, tuple((p - q * r) / o.value
                            for p, r in zip(self.parts, o.parts)))

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        return _int_pow(self, n)

    def __repr__(self):
        return f"Jet({self.value!r}, parts={self.parts!r})"


def ring_zero(x):
    """Additive identity of the ring ``x`` lives in."""
    if isinstance(x, Jet):
        return Jet(ring_zero(x.value), tuple(ring_zero(p) for p in x.parts))
    if isinstance(x, DeltaSeries):
        return DeltaSeries([], x.order)
    if isinstance(x, SPoly):
        return SPoly()
    if _is_exact(x):
        return Fraction(0)
    return 0.0


def ring_one(x):
    """Multiplicative identity of the ring ``x`` lives in."""
    if isinstance(x, Jet):
        return Jet(ring_one(x.value), tuple(ring_zero(p) for p in x.parts))
    if isinstance(x, DeltaSeries):
        return DeltaSeries.constant(1, x.order)
    if isinstance(x, SPoly):
        return SPoly([1])
    if _is_exact(x):
        return Fraction(1)
    return 1.0


def _int_pow(x, n: int):
    if not isinstance(n, int):
        raise DomainError("only integer powers are supported")
    if n < 0:
        return ring_one(x) / _int_pow(x, -n)
    result = ring_one(x)
    base = x
    while n:
        if n & 1:
            result = result * base
        base = base * base if n > 1 else base
        n >>= 1
    return result


# ---------------------------------------------------------------------------
# analytic functions over the ring
# ---------------------------------------------------------------------------

def _series_taylor(h: DeltaSeries, coeff_fn) -> DeltaSeries:
    # h must have zero delta^0 coefficient, so h^k vanishes beyond order M
    M = h.order
    acc = DeltaSeries.constant(coeff_fn(0), M)
    power = ring_one(h)
    for k in range(1, M):
        power = power * h
        if power.is_zero():
            break
        c = coeff_fn(k)
        if c != 0:
            acc = acc + power * c
    return acc


def _split_series(a: DeltaSeries):
    c0 = a.coeffs[0]
    if not c0.is_constant():
        raise DomainError("analytic function of a series needs a constant base point")
    base = c0.constant_term()
    h = a - base
    return base, h


def _exact_trig_base(base, which: str):
    if _is_exact(base):
        if base == 0:
            return {"sin": Fraction(0), "cos": Fraction(1), "exp": Fraction(1)}[which]
        raise DomainError(
            f"{which} of nonzero exact rational {base}: result is irrational; "
            "use floating mode")
    return {"sin": math.sin, "cos": math.cos, "exp": math.exp}[which](base)


def sin(x):
    if isinstance(x, Jet):
        return Jet(sin(x.value), tuple(cos(x.value) * p for p in x.parts))
    if isinstance(x, DeltaSeries):
        base, h = _split_series(x)
        s0 = _exact_trig_base(base, "sin")
        c0 = _exact_trig_base(base, "cos")
        sin_h = _series_taylor(h, lambda k: Fraction((-1) ** ((k - 1) // 2), math.factorial(k)) if k % 2 else Fraction(0))
        cos_h = _series_taylor(h, lambda k: Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 == 0 else Fraction(0))
        return sin_h * c0 + cos_h * s0
    if isinstance(x, SPoly):
        raise DomainError("sin of a bare polynomial is outside the ring")
    if _is_exact(x):
        return _exact_trig_base(x, "sin")
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        return Jet(cos(x.value), tuple(-sin(x.value) * p for p in x.parts))
    if isinstance(x, DeltaSeries):
        base, h = _split_series(x)
        s0 = _exact_trig_base(base, "sin")
        c0 = _exact_trig_base(base, "cos")
        sin_h = _series_taylor(h, lambda k: Fraction((-1) ** ((k - 1) // 2), math.factorial(k)) if k % 2 else Fraction(0))
        cos_h = _series_taylor(h, lambda k: Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 == 0 else Fraction(0))
        return cos_h * c0 - sin_h * s0
    if isinstance(x, SPoly):
        raise DomainError("cos of a bare polynomial is outside the ring")
    if _is_exact(x):
        return _exact_trig_base(x, "cos")
    return math.cos(x)


def exp(x):
    if isinstance(x, Jet):
        e = exp(x.value)
        return Jet(e, tuple(e * p for p in x.parts))
    if isinstance(x, DeltaSeries):
        base, h = _split_series(x)
        e0 = _exact_trig_base(base, "exp")
        return _series_taylor(h, lambda k: Fraction(1, math.factorial(k))) * e0
    if isinstance(x, SPoly):
        raise DomainError("exp of a bare polynomial is outside the ring")
    if _is_exact(x):
        return _exact_trig_base(x, "exp")
    return math.exp(x)


def series_analytic(f: str, a: DeltaSeries, base=0) -> DeltaSeries:
    """Taylor composition ``f(base + a)`` truncated at the order of ``a``.

    ``f`` is one of ``"sin"``, ``"cos"``, ``"exp"``; integer powers go
    through ``a ** n`` directly.  The composed argument must have a
    constant leading coefficient once ``base`` is added.
    """
    arg = a + base
    try:
        fn = {"sin": sin, "cos": cos, "exp": exp}[f]
    except KeyError:
        raise ValueError(f"unsupported analytic function {f!r}") from None
    return fn(arg)


# ---------------------------------------------------------------------------
# Lie derivatives
# ---------------------------------------------------------------------------

def jet_lift(f: Callable, xi: Sequence, direction: Sequence) -> Jet:
    """Evaluate ``f`` at ``xi`` with one seeded direction.

    Returns a single-part :class:`Jet` whose ``value`` is ``f(xi)`` and
    whose part is the directional derivative of ``f`` along ``direction``.
    """
    state = [Jet(x, (d,)) for x, d in zip(xi, direction)]
    out = f(state)
    if isinstance(out, Jet):
        return out
    return Jet(out, (ring_zero(out),))


def lie_derivative(f: Callable, field: Callable) -> Callable:
    """The scalar function ``state -> L_field f`` (derivative of ``f``
    along the vector field), usable over any ring and nestable."""

    def lf(state):
        vec = field(state)
        jstate = [Jet(x, (d,)) for x, d in zip(state, vec)]
        out = f(jstate)
        if isinstance(out, Jet):
            return out.parts[0]
        return ring_zero(out)

    return lf


def gradient(f: Callable, xi: Sequence) -> list:
    """All m partial derivatives of ``f`` at ``xi`` in one jet pass."""
    m = len(xi)
    one = ring_one(xi[0]) if not isinstance(xi[0], _SCALARS) else (
        Fraction(1) if all(_is_exact(x) for x in xi) else 1.0)
    zero = ring_zero(xi[0]) if not isinstance(xi[0], _SCALARS) else (
        Fraction(0) if all(_is_exact(x) for x in xi) else 0.0)
    state = [Jet(x, tuple(one if i == j else zero for j in range(m)))
             for i, x in enumerate(xi)]
    out = f(state)
    if isinstance(out, Jet):
        return list(out.parts)
    return [ring_zero(out)] * m
