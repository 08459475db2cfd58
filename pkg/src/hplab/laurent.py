"""Truncated Laurent expansions at infinity.

A :class:`LaurentTail` stores ``poly(z) + sum_{m=0}^{M} c_m z^{-m}``; only the
coefficients down to ``z^{-M}`` are known.  Every binary operation computes
the truncation order of its result and never reports a coefficient it cannot
know.  ``order=None`` marks an expansion with no unknown tail (a polynomial).
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from .errors import NonPolynomialTail, RegimeMismatch, TruncationTooShort
from .poly import Polynomial
from .regime import EXACT


def _min_order(*orders):
    known = [o for o in orders if o is not None]
    return min(known) if known else None


def _convolve_exact(a, b):
    """Full convolution of two Fraction sequences via integer arithmetic."""
    da = 1
    for x in a:
        da = lcm(da, x.denominator)
    db = 1
    for x in b:
        db = lcm(db, x.denominator)
    ia = [(x * da).numerator for x in a]
    ib = [(x * db).numerator for x in b]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(ia):
        if x == 0:
            continue
        for j, y in enumerate(ib):
            out[i + j] += x * y
    d = da * db
    return [Fraction(v, d) for v in out]


def _convolve_float(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class LaurentTail:
    __slots__ = ("top", "data", "order", "regime")

    def __init__(self, coeffs=(), order=None, polynomial_part=None, regime=EXACT):
        """``coeffs`` are the coefficients of z^0, z^-1, ..., z^-M.

        ``order`` defaults to ``len(coeffs) - 1``.  ``polynomial_part`` adds
        nonnegative powers (its constant term is added to ``coeffs[0]``).
        """
        cs = [regime.coerce(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise TruncationTooShort("truncation order must be >= 0")
        cs = cs[: order + 1] + [regime.zero] * (order + 1 - len(cs))
        top = 0
        head = []
        if polynomial_part is not None:
            if polynomial_part.regime != regime:
                raise RegimeMismatch(f"{polynomial_part.regime!r} vs {regime!r}")
            top = max(polynomial_part.degree, 0)
            head = [polynomial_part[k] for k in range(top, 0, -1)]
            cs[0] = cs[0] + polynomial_part[0]
        self.top = top
        self.data = tuple(head + cs)
        self.order = order
        self.regime = regime

    @classmethod
    def _make(cls, top, data, order, regime):
        t = cls.__new__(cls)
        data = list(data)
        # strip exact leading zeros above z^0
        while top > 0 and data and data[0] == 0:
            data.pop(0)
            top -= 1
        if order is not None:
            need = top + order + 1
            data = data[:need] + [regime.zero] * (need - len(data))
        else:
            while len(data) > top + 1 and data[-1] == 0:
                data.pop()
            if len(data) < top + 1:
                data = data + [regime.zero] * (top + 1 - len(data))
        t.top = top
        t.data = tuple(data)
        t.order = order
        t.regime = regime
        return t

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> LaurentTail:
        top = max(p.degree, 0)
        data = [p[k] for k in range(top, -1, -1)]
        return cls._make(top, data, None, p.regime)

    # -- views ---------------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        """Coefficients of z^0, z^-1, ..., z^-M (as far as stored)."""
        return self.data[self.top:]

    @property
    def polynomial_part(self) -> Polynomial:
        return Polynomial._raw(reversed(self.data[: self.top + 1]), self.regime)

    @property
    def tail(self) -> tuple:
        """Coefficients of z^-1, ..., z^-M."""
        return self.data[self.top + 1:]

    def coefficient(self, exponent: int):
        """Coefficient of z^exponent; raises if it lies beyond the truncation."""
        if exponent > self.top:
            return self.regime.zero
        if self.order is not None and exponent < -self.order:
            raise TruncationTooShort(f"z^{exponent} lies beyond truncation order {self.order}")
        i = self.top - exponent
        return self.data[i] if i < len(self.data) else self.regime.zero

    def __repr__(self):
        return f"LaurentTail(top={self.top}, order={self.order}, data={list(self.data)[:8]}...)"

    # -- arithmetic ------------------------------------------------------------
    def _coerce_other(self, other):
        if isinstance(other, LaurentTail):
            if other.regime != self.regime:
                raise RegimeMismatch(f"{self.regime!r} vs {other.regime!r}")
            return other
        if isinstance(other, Polynomial):
            if other.regime != self.regime:
                raise RegimeMismatch(f"{self.regime!r} vs {other.regime!r}")
            return LaurentTail.from_polynomial(other)
        return LaurentTail.from_polynomial(Polynomial([other], self.regime))

    def _aligned(self, top, low):
        """Coefficients for exponents top..low (missing entries as zero)."""
        out = []
        for e in range(top, low - 1, -1):
            i = self.top - e
            out.append(self.data[i] if 0 <= i < len(self.data) else self.regime.zero)
        return out

    def __add__(self, other):
        o = self._coerce_other(other)
        order = _min_order(self.order, o.order)
        top = max(self.top, o.top)
        low = -order if order is not None else -max(len(self.data) - self.top, len(o.data) - o.top)
        a = self._aligned(top, low)
        b = o._aligned(top, low)
        return LaurentTail._make(top, [x + y for x, y in zip(a, b)], order, self.regime)

    __radd__ = __add__

    def __neg__(self):
        return LaurentTail._make(self.top, [-c for c in self.data], self.order, self.regime)

    def __sub__(self, other):
        return self + (-self._coerce_other(other))

    def __rsub__(self, other):
        return self._coerce_other(other) - self

    def __mul__(self, other):
        if not isinstance(other, (LaurentTail, Polynomial)):
            c = self.regime.coerce(other)
            return LaurentTail._make(self.top, [c * x for x in self.data], self.order, self.regime)
        o = self._coerce_other(other)
        top = self.top + o.top
        cand = []
        if self.order is not None:
            cand.append(self.order - o.top)
        if o.order is not None:
            cand.append(o.order - self.top)
        order = min(cand) if cand else None
        if order is not None and order < 0:
            raise TruncationTooShort(
                f"product of expansions with orders {self.order}, {o.order} loses z^0"
            )
        if self.regime.exact:
            full = _convolve_exact(self.data, o.data)
        else:
            full = _convolve_float(self.data, o.data, self.regime.zero)
        return LaurentTail._make(top, full, order, self.regime)

    __rmul__ = __mul__

    def derive(self) -> LaurentTail:
        top = max(self.top - 1, 0)
        order = None if self.order is None else self.order + 1
        low = -order if order is not None else self.top - len(self.data)
        out = []
        for e in range(top, low - 1, -1):
            i = self.top - (e + 1)
            c = self.data[i] if 0 <= i < len(self.data) else self.regime.zero
            out.append((e + 1) * c)
        return LaurentTail._make(top, out, order, self.regime)

    def reciprocal(self) -> LaurentTail:
        if self.top != 0 or self.data[0] == 0:
            raise ZeroDivisionError("reciprocal needs a nonzero constant term and no polynomial part")
        if self.order is None:
            raise TruncationTooShort("reciprocal of an exact expansion needs an explicit order")
        M = self.order
        a = self.data
        one = self.regime.one
        inv0 = one / a[0]
        out = [inv0]
        for m in range(1, M + 1):
            s = self.regime.zero
            for j in range(1, m + 1):
                if j < len(a) and a[j] != 0:
                    s += a[j] * out[m - j]
            out.append(-s * inv0)
        return LaurentTail._make(0, out, M, self.regime)

    def truncate(self, order: int) -> LaurentTail:
        if self.order is not None and order > self.order:
            raise TruncationTooShort(f"cannot extend order {self.order} to {order}")
        return LaurentTail._make(self.top, self.data, order, self.regime)

    def to_regime(self, regime) -> LaurentTail:
        return LaurentTail._make(self.top, [regime.coerce(c) for c in self.data], self.order, regime)


def laurent_arith(a: LaurentTail, b: LaurentTail | None, op: str) -> LaurentTail:
    if op == "derive":
        return a.derive()
    if op == "reciprocal":
        return a.reciprocal()
    if b is not None and a.regime != b.regime:
        raise RegimeMismatch(f"{a.regime!r} vs {b.regime!r}")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown Laurent operation {op!r}")


def poly_from_tail(t: LaurentTail, tol=None) -> Polynomial:
    """Return the polynomial part after checking that the tail vanishes.

    Exact regime: every known tail coefficient must be exactly zero.  Float
    regime: each must satisfy ``|c| < tol``.
    """
    for m, c in enumerate(t.tail, start=1):
        if t.regime.exact or tol is None:
            bad = c != 0
        else:
            bad = not abs(c) < tol
        if bad:
            raise NonPolynomialTail(f"coefficient of z^-{m} is {t.regime.to_string(c)}")
    return t.polynomial_part
