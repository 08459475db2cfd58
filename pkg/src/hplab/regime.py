"""Scalar regimes: exact rationals or fixed-precision complex floats.

Every Polynomial, LaurentTail and linear solve carries one regime.  Values
themselves are plain ``fractions.Fraction`` (exact) or ``mpmath`` numbers
bound to a private context of the requested precision (BigComplex), so no
computation ever touches mpmath's global precision.
"""
from __future__ import annotations

import functools
import math
import os
import warnings
from fractions import Fraction

import mpmath

from .errors import IntegerExponent

DEFAULT_PRECISION_BITS = 256
PRECISION_ENV = "HP_LAB_PRECISION_BITS"


def default_precision() -> int:
    value = os.environ.get(PRECISION_ENV)
    return int(value) if value else DEFAULT_PRECISION_BITS


@functools.lru_cache(maxsize=None)
def _context(bits: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer, or a decimal string into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted where an exact rational is required")
    return Fraction(str(text).strip())


class Exact:
    """Error-free arithmetic over the rationals."""

    exact = True
    precision_bits = None

    def __repr__(self):
        return "Exact()"

    def __eq__(self, other):
        return isinstance(other, Exact)

    def __hash__(self):
        return hash("Exact")

    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return parse_rational(x)
        raise TypeError(f"cannot use {type(x).__name__} in the exact regime")

    def is_zero(self, x, tol=None) -> bool:
        return x == 0

    def is_integer(self, x) -> bool:
        return x.denominator == 1

    def to_string(self, x) -> str:
        return str(x)


class BigComplex:
    """Complex floating point at a fixed binary precision (>= 64 bits)."""

    exact = False

    def __init__(self, precision_bits: int | None = None):
        bits = default_precision() if precision_bits is None else int(precision_bits)
        if bits < 64:
            raise ValueError("BigComplex precision must be at least 64 bits")
        self.precision_bits = bits
        self.ctx = _context(bits)
        self.zero = self.ctx.mpc(0)
        self.one = self.ctx.mpc(1)

    def __repr__(self):
        return f"BigComplex({self.precision_bits})"

    def __eq__(self, other):
        return isinstance(other, BigComplex) and other.precision_bits == self.precision_bits

    def __hash__(self):
        return hash(("BigComplex", self.precision_bits))

    @property
    def digits(self) -> int:
        return int(self.precision_bits * math.log10(2))

    @property
    def eps(self):
        return self.ctx.mpf(2) ** (-self.precision_bits)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return self.ctx.mpc(self.ctx.mpf(x.numerator) / x.denominator)
        if isinstance(x, str):
            return self.coerce(parse_rational(x))
        return self.ctx.mpc(x)

    def is_zero(self, x, tol=None) -> bool:
        if tol is None:
            return x == 0
        return abs(x) <= tol

    def is_integer(self, x, tol=1e-12) -> bool:
        r = self.ctx.nint(x.real)
        return abs(x - r) < tol

    def to_string(self, x) -> str:
        x = self.ctx.mpc(x)
        if x.imag == 0:
            return self.ctx.nstr(x.real, self.digits)
        return self.ctx.nstr(x, self.digits)


EXACT = Exact()


def common_regime(*regimes):
    first = regimes[0]
    for r in regimes[1:]:
        if r != first:
            from .errors import RegimeMismatch

            raise RegimeMismatch(f"{first!r} vs {r!r}")
    return first


def check_exponent(regime, value, what="exponent"):
    """Reject exponents that are (numerically) integers."""
    if regime.exact:
        if regime.is_integer(value):
            raise IntegerExponent(f"{what} {value} is an integer")
        return
    if regime.is_integer(value, tol=1e-12):
        raise IntegerExponent(f"{what} {value} is within 1e-12 of an integer")
    r = regime.ctx.nint(value.real)
    if abs(value - r) < 1e-6:
        warnings.warn(f"{what} {value} is close to an integer", RuntimeWarning, stacklevel=3)
