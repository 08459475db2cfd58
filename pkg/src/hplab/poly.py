"""Dense univariate polynomials and rational functions over a Scalar regime."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .errors import RegimeMismatch
from .regime import EXACT, common_regime


class Polynomial:
    """Immutable dense polynomial, coefficients in ascending powers.

    The zero polynomial has ``coeffs == ()`` and ``degree == -1`` (used as a
    stand-in for minus infinity).  In the float regime only exact zeros are
    stripped from the top; use :meth:`trim` for tolerance-based trimming.
    """

    __slots__ = ("coeffs", "regime")

    def __init__(self, coeffs=(), regime=EXACT):
        cs = [regime.coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.regime = regime

    @classmethod
    def _raw(cls, coeffs, regime):
        p = cls.__new__(cls)
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        p.coeffs = tuple(cs)
        p.regime = regime
        return p

    @classmethod
    def monomial(cls, k, c=1, regime=EXACT):
        return cls([0] * k + [c], regime)

    @classmethod
    def from_roots(cls, roots, regime=EXACT):
        p = cls([1], regime)
        for r in roots:
            p = p * cls([-regime.coerce(r), 1], regime)
        return p

    @classmethod
    def x(cls, regime=EXACT):
        return cls([0, 1], regime)

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.regime.zero

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.regime.zero

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[self.regime.to_string(c) for c in self.coeffs]}, {self.regime!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            s = self.regime.to_string(c)
            if k == 0:
                terms.append(s)
            elif k == 1:
                terms.append(f"({s})*z")
            else:
                terms.append(f"({s})*z^{k}")
        return " + ".join(terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other], self.regime)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.regime == other.regime and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.regime))

    # -- arithmetic --------------------------------------------------------
    def _other(self, other):
        if isinstance(other, Polynomial):
            if other.regime != self.regime:
                raise RegimeMismatch(f"{self.regime!r} vs {other.regime!r}")
            return other
        return Polynomial([other], self.regime)

    def __add__(self, other):
        other = self._other(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial._raw(out, self.regime)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw([-c for c in self.coeffs], self.regime)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.regime.coerce(other)
            return Polynomial._raw([c * a for a in self.coeffs], self.regime)
        other = self._other(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial((), self.regime)
        out = [self.regime.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial._raw(out, self.regime)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial([1], self.regime)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c):
        return self * c

    def derive(self, times: int = 1) -> Polynomial:
        p = self
        for _ in range(times):
            p = Polynomial._raw([k * c for k, c in enumerate(p.coeffs)][1:], p.regime)
        return p

    def divmod(self, other) -> tuple[Polynomial, Polynomial]:
        other = self._other(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        db = other.degree
        lead = other.lc
        q = [self.regime.zero] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] / lead
            q[k - db] = c
            if c == 0:
                continue
            for j, bj in enumerate(other.coeffs):
                rem[k - db + j] -= c * bj
        rem = rem[:db]
        if not self.regime.exact:
            rem = rem  # float remainders are left untrimmed beyond exact zeros
        return Polynomial._raw(q, self.regime), Polynomial._raw(rem, self.regime)

    __divmod__ = divmod

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other) -> Polynomial:
        q, r = self.divmod(other)
        if self.regime.exact and not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __call__(self, z):
        acc = 0 * z
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def evaluate(self, z, regime=None):
        """Horner evaluation after coercing coefficients into ``regime``."""
        if regime is None or regime == self.regime:
            return self(z)
        acc = regime.zero
        for c in reversed(self.coeffs):
            acc = acc * z + regime.coerce(c)
        return acc

    def compose_neg(self) -> Polynomial:
        """p(-z)."""
        return Polynomial._raw([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)], self.regime)

    def monic(self) -> Polynomial:
        if self.is_zero():
            return self
        return self * (1 / self.lc if not self.regime.exact else Fraction(1) / self.lc)

    def to_regime(self, regime) -> Polynomial:
        if regime == self.regime:
            return self
        return Polynomial([regime.coerce(c) for c in self.coeffs], regime)

    def trim(self, tol) -> Polynomial:
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= tol:
            cs.pop()
        return Polynomial._raw(cs, self.regime)

    def norm(self):
        """Max-norm of the coefficient vector."""
        return max((abs(c) for c in self.coeffs), default=0)

    # -- exact-regime structure -------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self/c a primitive integer polynomial."""
        if self.is_zero():
            return Fraction(0)
        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        num = 0
        for c in self.coeffs:
            num = gcd(num, (c * den).numerator)
        return Fraction(num, den)

    def primitive(self) -> Polynomial:
        if self.is_zero():
            return self
        c = self.content()
        if self.lc < 0:
            c = -c
        return self * (1 / c)

    def proportional_to(self, other: Polynomial, tol=None) -> bool:
        """True when self = c * other for a nonzero scalar c."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self.degree != other.degree:
            return False
        a, b = self.monic(), other.monic()
        if self.regime.exact:
            return a == b
        return all(abs(x - y) <= tol for x, y in zip(a.coeffs, b.coeffs))


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the rationals (exact regime only)."""
    if not a.regime.exact:
        raise RegimeMismatch("polynomial gcd is only defined in the exact regime")
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        a, b = b, a.divmod(b)[1].primitive()
    return a.monic() if not a.is_zero() else a


def poly_arith(a: Polynomial, b: Polynomial | None, op: str):
    """Dispatch form of the basic operations: add, mul, derive, divmod."""
    if op == "derive":
        return a.derive()
    if b is not None and a.regime != b.regime:
        raise RegimeMismatch(f"{a.regime!r} vs {b.regime!r}")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "divmod":
        return a.divmod(b)
    raise ValueError(f"unknown polynomial operation {op!r}")


class RationalFunction:
    """num/den with den nonzero.

    Exact regime: reduced by the gcd and ``den`` made monic.  Float regime:
    kept unreduced; equality uses cross-multiplication with a tolerance.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial([1], num.regime)
        common_regime(num.regime, den.regime)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.regime.exact:
            if num.is_zero():
                den = Polynomial([1], num.regime)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            lc = den.lc
            if lc != 1:
                num = num * (1 / lc)
                den = den * (1 / lc)
        self.num = num
        self.den = den

    @property
    def regime(self):
        return self.num.regime

    def __repr__(self):
        return f"RationalFunction({self.num}, {self.den})"

    def _other(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction(Polynomial([other], self.regime))

    def __add__(self, other):
        o = self._other(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        o = self._other(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return RationalFunction(self.num * o.den, self.den * o.num)

    def derive(self) -> RationalFunction:
        return RationalFunction(
            self.num.derive() * self.den - self.num * self.den.derive(), self.den * self.den
        )

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def evaluate(self, z, regime=None):
        return self.num.evaluate(z, regime) / self.den.evaluate(z, regime)

    def is_zero(self, tol=None) -> bool:
        if self.regime.exact or tol is None:
            return self.num.is_zero()
        return all(abs(c) <= tol for c in self.num.coeffs)

    def equals(self, other, tol=None) -> bool:
        o = self._other(other)
        if self.regime.exact:
            return self.num == o.num and self.den == o.den
        diff = self.num * o.den - o.num * self.den
        return all(abs(c) <= tol for c in diff.coeffs)

    def __eq__(self, other):
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        if not self.regime.exact:
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        return hash((self.num, self.den))
