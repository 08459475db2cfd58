"""Functions f(z) = prod (z - a_j)^alpha_j with sum alpha_j = 0, f(inf) = 1."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ExponentSumNonzero, IntegerExponent
from .laurent import LaurentTail
from .poly import Polynomial, RationalFunction
from .regime import EXACT, BigComplex, check_exponent, parse_rational


def _pearson_polys(points, exponents, regime):
    A = Polynomial.from_roots(points, regime)
    B = Polynomial((), regime)
    for j, (a, al) in enumerate(zip(points, exponents)):
        others = Polynomial.from_roots(points[:j] + points[j + 1:], regime)
        B = B + others * al
    return A, B


@dataclass(frozen=True, eq=False)
class SemiclassicalFn:
    """Branch of prod (z - a_j)^alpha_j normalized by f(inf) = 1.

    ``A`` is the monic polynomial with roots at the branch points and
    ``B = A f'/f``; ``deg B <= p - 2`` is equivalent to sum alpha_j = 0.
    """

    branch_points: tuple
    exponents: tuple
    regime: object = EXACT
    A: Polynomial = field(init=False)
    B: Polynomial = field(init=False)

    def __post_init__(self):
        reg = self.regime
        pts = tuple(reg.coerce(a) for a in self.branch_points)
        als = tuple(reg.coerce(a) for a in self.exponents)
        if len(pts) < 2 or len(pts) != len(als):
            raise ValueError("need p >= 2 branch points and one exponent per point")
        for i in range(len(pts)):
            for j in range(i):
                if pts[i] == pts[j]:
                    raise ValueError(f"branch point {pts[i]} repeated")
        for al in als:
            check_exponent(reg, al)
        A, B = _pearson_polys(list(pts), list(als), reg)
        p = len(pts)
        if reg.exact:
            nonzero_sum = sum(als) != 0
        else:
            nonzero_sum = abs(sum(als)) > reg.eps ** 0.5
        if nonzero_sum or B.degree > p - 2 and reg.exact:
            raise ExponentSumNonzero(f"sum of exponents is {sum(als)}; deg B = {B.degree} = p - 1")
        if not reg.exact:
            B = Polynomial(B.coeffs[: p - 1], reg)
        object.__setattr__(self, "branch_points", pts)
        object.__setattr__(self, "exponents", als)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def p(self) -> int:
        return len(self.branch_points)

    def flipped(self) -> SemiclassicalFn:
        """The function 1/f (all exponents negated)."""
        return SemiclassicalFn(self.branch_points, tuple(-a for a in self.exponents), self.regime)

    def power(self, k) -> SemiclassicalFn:
        return SemiclassicalFn(self.branch_points, tuple(k * a for a in self.exponents), self.regime)

    def to_regime(self, regime) -> SemiclassicalFn:
        return SemiclassicalFn(
            tuple(regime.coerce(a) for a in self.branch_points),
            tuple(regime.coerce(a) for a in self.exponents),
            regime,
        )

    def to_json(self) -> dict:
        r = self.regime
        return {
            "branch_points": [r.to_string(a) for a in self.branch_points],
            "exponents": [r.to_string(a) for a in self.exponents],
        }


def two_point(alpha, regime=EXACT) -> SemiclassicalFn:
    """f(z; alpha) = ((z - 1)/(z + 1))^alpha."""
    alpha = regime.coerce(alpha)
    return SemiclassicalFn((1, -1), (alpha, -alpha), regime)


def _parse_point(text, regime):
    """'p/q', an int, or a complex literal like '1/2*i', '2i', '-1+2i'."""
    if isinstance(text, (int, Fraction)):
        return regime.coerce(text)
    s = str(text).replace(" ", "").replace("*", "")
    if "i" not in s and "j" not in s:
        return regime.coerce(parse_rational(s))
    if regime.exact:
        raise ValueError(f"complex branch point {text!r} needs the BigComplex regime")
    s = s.replace("j", "i")
    # split real and imaginary parts at the last sign that is not leading
    cut = max(s.rfind("+", 1), s.rfind("-", 1))
    re_part, im_part = (s[:cut], s[cut:]) if cut > 0 else ("0", s)
    im_part = im_part.replace("i", "")
    if im_part in ("", "+", "-"):
        im_part += "1"
    ctx = regime.ctx
    to_mpf = lambda q: ctx.mpf(q.numerator) / q.denominator  # noqa: E731
    return ctx.mpc(to_mpf(parse_rational(re_part)), to_mpf(parse_rational(im_part)))


def from_json(doc, regime=None) -> SemiclassicalFn:
    """Read ``{"branch_points": [...], "exponents": [...]}`` (strings like "p/q")."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    pts = doc["branch_points"]
    if regime is None:
        complex_pts = any(isinstance(a, str) and ("i" in a or "j" in a) for a in pts)
        regime = BigComplex() if complex_pts else EXACT
    return SemiclassicalFn(
        tuple(_parse_point(a, regime) for a in pts),
        tuple(_parse_point(a, regime) for a in doc["exponents"]),
        regime,
    )


def pearson_pair(f: SemiclassicalFn) -> RationalFunction:
    if f.B.degree > f.p - 2:
        raise ExponentSumNonzero(f"deg B = {f.B.degree} = p - 1")
    return RationalFunction(f.B, f.A)


def pearson_series(A: Polynomial, B: Polynomial, M: int) -> LaurentTail:
    """Expansion at infinity of the solution of A g' = B g with g(inf) = 1.

    Matching the z^(p-1-K) coefficients of A g' and B g gives
    -K c_K = sum_{i<p} A_i (K-p+i) c_{K-p+i} + sum_i B_i c_{K-p+1+i}.
    """
    reg = A.regime
    p = A.degree
    if B.degree > p - 2:
        raise ExponentSumNonzero(f"deg B = {B.degree} exceeds p - 2 = {p - 2}")
    a = A.coeffs
    b = B.coeffs
    c = [reg.one]
    for K in range(1, M + 1):
        acc = reg.zero
        for i in range(p):
            m = K - p + i
            if m >= 0 and a[i] != 0:
                acc += a[i] * m * c[m]
        for i, bi in enumerate(b):
            m = K - p + 1 + i
            if m >= 0 and bi != 0:
                acc += bi * c[m]
        c.append(-acc / K)
    return LaurentTail(c, M, regime=reg)


def expand_at_infinity(f: SemiclassicalFn, M: int) -> LaurentTail:
    if M < 0:
        raise ValueError("truncation order must be >= 0")
    return pearson_series(f.A, f.B, M)


@dataclass(frozen=True, eq=False)
class PowerSystem:
    """Expansions of f^0, f^1, ..., f^s at infinity."""

    base: SemiclassicalFn
    s: int
    tails: tuple

    @property
    def regime(self):
        return self.base.regime

    @property
    def order(self) -> int:
        return min(t.order for t in self.tails)

    def row_pearson(self, k):
        """(A_k, B_k) with A_k (f^k)' = B_k f^k."""
        f = self.base
        if k == 0:
            return Polynomial([1], f.regime), Polynomial((), f.regime)
        return f.A, f.B * k

    def product_reciprocal(self, M: int) -> LaurentTail:
        """Expansion of 1/(f^1 f^2 ... f^s)."""
        T = self.s * (self.s + 1) // 2
        return pearson_series(self.base.A, self.base.B * (-T), M)

    def clearing_polynomial(self) -> Polynomial:
        # rows 1..s carry A-denominators; the largest column-order sum they
        # can take in one minor is 2 + 3 + ... + (s + 1)
        S = (self.s + 1) * (self.s + 2) // 2 - 1
        return self.base.A ** S


@dataclass(frozen=True, eq=False)
class FunctionSystem:
    """Expansions of (1, f_1, ..., f_s) for independent semiclassical f_k."""

    functions: tuple
    tails: tuple

    @property
    def s(self) -> int:
        return len(self.functions)

    @property
    def regime(self):
        return self.functions[0].regime

    @property
    def order(self) -> int:
        return min(t.order for t in self.tails)

    def row_pearson(self, k):
        if k == 0:
            reg = self.regime
            return Polynomial([1], reg), Polynomial((), reg)
        f = self.functions[k - 1]
        return f.A, f.B

    def product_reciprocal(self, M: int) -> LaurentTail:
        out = None
        for f in self.functions:
            t = pearson_series(f.A, -f.B, M)
            out = t if out is None else out * t
        return out

    def clearing_polynomial(self) -> Polynomial:
        out = Polynomial([1], self.regime)
        for f in self.functions:
            out = out * f.A ** (self.s + 1)
        return out


def power_tails(f: SemiclassicalFn, s: int, M: int, check: bool = True) -> PowerSystem:
    if s < 1:
        raise ValueError("s must be >= 1")
    for k in range(2, s + 1):
        for al in f.exponents:
            try:
                check_exponent(f.regime, k * al, what=f"{k} * exponent")
            except IntegerExponent as exc:
                raise IntegerExponent(f"{exc} (k*alpha in Z degenerates the system)") from None
    tails = [LaurentTail([1], M, regime=f.regime)]
    for k in range(1, s + 1):
        tails.append(pearson_series(f.A, f.B * k, M))
    if check and s >= 2:
        prod = tails[1]
        for k in range(2, s + 1):
            prod = prod * tails[1]
            diff = prod - tails[k]
            if f.regime.exact:
                ok = all(c == 0 for c in diff.data)
            else:
                scale = max((abs(c) for c in tails[k].data), default=1)
                ok = all(abs(c) <= scale * f.regime.eps ** 0.75 for c in diff.data)
            if not ok:
                raise ArithmeticError(f"f^{k} expansion disagrees with repeated products")
    return PowerSystem(f, s, tuple(tails))


def function_system(functions, M: int) -> FunctionSystem:
    functions = tuple(functions)
    reg = functions[0].regime
    tails = [LaurentTail([1], M, regime=reg)] + [expand_at_infinity(f, M) for f in functions]
    return FunctionSystem(functions, tuple(tails))
