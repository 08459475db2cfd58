"""Zero distributions of the p = 2 Hermite-Pade polynomials and their limits.

The limit measures nu (on F = R \\ (-1, 1)) and lambda (on E = [-1, 1]) have
closed-form densities; their Cauchy transforms are branches of the cubic
(z^2 - 1)^2 y^3 - 3 (z^2 - 1) y + 2z = 0, written through
Y(z) = ((1 + z)/(1 - z))^(1/3) with Y(0) = 1.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .errors import OnBranchCut, OutsideSupport, PathCrossesCut, SupportMismatch
from .hp import HPSolution
from .poly import Polynomial
from .regime import BigComplex, default_precision
from .roots import certify_real_roots, polynomial_roots, root_residuals


def _ctx(precision_bits=None):
    return BigComplex(precision_bits or default_precision()).ctx


def _real(ctx, x):
    """mpf from a Fraction (exactly), int, float, string or mpf."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


# -- empirical measures -------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalMeasure:
    """Equal point masses 1/n; ``None`` entries stand for mass at infinity."""

    points: tuple
    n: int
    multiplicities: tuple = ()

    @property
    def weight(self):
        return 1 / self.n

    @property
    def finite_points(self) -> tuple:
        return tuple(p for p in self.points if p is not None)

    @classmethod
    def from_points(cls, points, n: int | None = None) -> EmpiricalMeasure:
        pts = list(points)
        if n is None:
            n = len(pts)
        if len(pts) > n:
            raise ValueError("more points than the normalization allows")
        pts += [None] * (n - len(pts))
        real = all(p is None or not hasattr(p, "imag") or p.imag == 0 for p in pts)
        if real:
            finite = sorted(p.real if hasattr(p, "real") else p for p in pts if p is not None)
            pts = finite + [None] * (n - len(finite))
        return cls(tuple(pts), n, _multiplicities([p for p in pts if p is not None]))


def _multiplicities(points, rel_tol=1e-20):
    """Sizes of root clusters (points closer than rel_tol * max(1, |p|))."""
    seen = []
    for p in points:
        for c in seen:
            if abs(p - c[0]) <= rel_tol * max(1, abs(p)):
                c[1] += 1
                break
        else:
            seen.append([p, 1])
    return tuple(m for _, m in seen)


def roots(Q: Polynomial, precision_bits: int | None = None, n: int | None = None) -> EmpiricalMeasure:
    """Zero-counting measure of Q normalized by n (default deg Q).

    Raises NonConvergence when the iteration fails; every root is checked
    to have backward error below 10^-(0.6 digits).
    """
    precision_bits = precision_bits or default_precision()
    rs = polynomial_roots(Q, precision_bits)
    ctx = _ctx(precision_bits)
    limit = ctx.mpf(10) ** (-int(0.6 * ctx.dps))
    worst = max(root_residuals(Q, rs, precision_bits))
    if worst >= limit:
        from .errors import NonConvergence

        raise NonConvergence(f"root residual {ctx.nstr(worst, 5)} above {ctx.nstr(limit, 3)}")
    pts = []
    for r in rs:
        if ctx.im(r) == 0 or abs(ctx.im(r)) <= ctx.mpf(10) ** (-(ctx.dps // 2)) * max(1, abs(r)):
            pts.append(ctx.re(r))
        else:
            pts.append(r)
    return EmpiricalMeasure.from_points(pts, n if n is not None else Q.degree)


def zero_location_audit(Q: Polynomial, precision_bits: int | None = None, residual=None):
    """Real-rootedness and |x| > 1 for Q, with a backward-error certificate.

    Returns a dict with the smallest |root|, the largest residual and the
    sign-change certification outcome.
    """
    precision_bits = precision_bits or default_precision()
    ctx = _ctx(precision_bits)
    if residual is None:
        residual = ctx.mpf(10) ** -25
    rs = polynomial_roots(Q, precision_bits)
    res = max(root_residuals(Q, rs, precision_bits))
    try:
        xs = certify_real_roots(Q, rs, precision_bits)
        real = True
    except ValueError:
        xs = [ctx.re(r) for r in rs]
        real = False
    min_abs = min(abs(x) for x in xs)
    return {
        "degree": Q.degree,
        "all_real": real,
        "min_abs_root": min_abs,
        "max_residual": res,
        "outside_E": bool(real and min_abs > 1),
        "certified": bool(real and min_abs > 1 and res < residual),
    }


# -- the cubic and its branches -----------------------------------------------------

@dataclass(frozen=True)
class CubicBranches:
    z: object
    y1: object
    y2: object
    y3: object

    def as_tuple(self):
        return (self.y1, self.y2, self.y3)


def cubic_residual(z, y):
    return (z * z - 1) ** 2 * y ** 3 - 3 * (z * z - 1) * y + 2 * z


def _on_F(ctx, z, tol):
    return abs(ctx.im(z)) <= tol and abs(ctx.re(z)) >= 1 - tol


def Y_branch(z, precision_bits: int | None = None):
    """Y(z) = ((1+z)/(1-z))^(1/3), holomorphic off F with Y(0) = 1.

    (1+z)/(1-z) sends F onto the negative axis, so the principal cube root
    is exactly the branch continued from 0 inside C \\ F.
    """
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    if _on_F(ctx, z, ctx.mpf(2) ** (-ctx.prec + 8)):
        raise OnBranchCut(f"z = {ctx.nstr(z, 10)} lies on F")
    w = (1 + z) / (1 - z)
    return ctx.cbrt(ctx.mpc(w))


def track_Y(z, precision_bits: int | None = None, max_halvings: int = 40):
    """Y(z) by analytic continuation from Y(0) = 1 along the segment [0, z].

    Each step picks the cube root closest to the previous value; steps are
    halved while the argument of Y jumps by more than pi/4.
    """
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    if _on_F(ctx, z, ctx.mpf(2) ** (-ctx.prec + 8)):
        raise PathCrossesCut(f"segment [0, {ctx.nstr(z, 10)}] ends on F")
    w3 = [ctx.expjpi(ctx.mpf(2 * k) / 3) for k in range(3)]
    t = ctx.mpf(0)
    y = ctx.mpc(1)
    h = ctx.mpf(1) / 16
    while t < 1:
        step = min(h, 1 - t)
        for _ in range(max_halvings):
            zt = (t + step) * z
            base = ctx.cbrt(ctx.mpc((1 + zt) / (1 - zt)))
            cand = min((base * w for w in w3), key=lambda c: abs(c - y))
            if abs(ctx.arg(cand / y)) <= ctx.pi / 4:
                break
            step /= 2
        else:
            raise PathCrossesCut("continuation step collapsed")
        y = cand
        t += step
    return y


def cubic_branches(z, precision_bits: int | None = None) -> CubicBranches:
    """y1 = C^nu, y3 = -2 C^lambda, y2 = -y1 - y3 at z (z off F).

    y1 = Y/(z+1) + 1/((z-1) Y); y3 uses the phases e^(+-2 pi i/3), swapped
    between the half-planes; on (-1, 1) the upper-half-plane formula is used.
    """
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    if z == 1 or z == -1:
        raise OnBranchCut("z = +-1 is a branch point")
    Y = Y_branch(z, precision_bits)
    om = ctx.expjpi(ctx.mpf(2) / 3)
    y1 = Y / (z + 1) + 1 / ((z - 1) * Y)
    if ctx.im(z) >= 0:
        y3 = om * Y / (z + 1) + ctx.conj(om) / ((z - 1) * Y)
    else:
        y3 = ctx.conj(om) * Y / (z + 1) + om / ((z - 1) * Y)
    return CubicBranches(z, y1, -y1 - y3, y3)


def _branch_values(z, ctx):
    """Same as cubic_branches with no validation (z known off F)."""
    Y = ctx.cbrt(ctx.mpc((1 + z) / (1 - z)))
    om = ctx.expjpi(ctx.mpf(2) / 3)
    y1 = Y / (z + 1) + 1 / ((z - 1) * Y)
    if ctx.im(z) >= 0:
        y3 = om * Y / (z + 1) + ctx.conj(om) / ((z - 1) * Y)
    else:
        y3 = ctx.conj(om) * Y / (z + 1) + om / ((z - 1) * Y)
    return y1, -y1 - y3, y3


# -- limit densities --------------------------------------------------------------

def density(kind: str, x, precision_bits: int | None = None):
    """nu'(x) on F or lambda'(x) on (-1, 1), with positive real cube roots."""
    ctx = _ctx(precision_bits)
    x = _real(ctx, x)
    s3 = ctx.sqrt(3)
    if kind == "lambda":
        if not -1 < x < 1:
            raise OutsideSupport(f"lambda' lives on (-1, 1); x = {ctx.nstr(x, 10)}")
        return s3 / (4 * ctx.pi) / ctx.cbrt(1 - x * x) * (1 / ctx.cbrt(1 - x) + 1 / ctx.cbrt(1 + x))
    if kind == "nu":
        if not abs(x) > 1:
            raise OutsideSupport(f"nu' lives on |x| > 1; x = {ctx.nstr(x, 10)}")
        a = abs(x)
        return s3 / (2 * ctx.pi) / ctx.cbrt(x * x - 1) * (1 / ctx.cbrt(a - 1) - 1 / ctx.cbrt(a + 1))
    raise ValueError(f"unknown density kind {kind!r}")


class LimitDensity:
    """nu or lambda with CDFs by tanh-sinh quadrature.

    For nu the CDF is taken after the pushforward u = 1/x, which maps F onto
    [-1, 1] (infinity to 0); the pushed density nu'(1/u)/u^2 is bounded at 0.
    """

    def __init__(self, kind: str, dps: int = 30):
        if kind not in ("nu", "lambda"):
            raise ValueError(f"unknown density kind {kind!r}")
        self.kind = kind
        self.ctx = BigComplex(max(64, int(dps * 3.33) + 8)).ctx
        self.dps = dps

    def pdf(self, x):
        return density(self.kind, x, self.ctx.prec)

    def pushed_pdf(self, u):
        """Density in the variable used for CDFs (x for lambda, 1/x for nu).

        Zero outside the open interval (-1, 1), so quadrature nodes that
        round onto an endpoint contribute nothing.
        """
        ctx = self.ctx
        u = _real(ctx, u)
        if not -1 < u < 1:
            return ctx.mpf(0)
        if self.kind == "lambda":
            return self.pdf(u)
        if u == 0:
            return ctx.sqrt(3) / (3 * ctx.pi)
        return self.pdf(1 / u) / (u * u)

    def coordinate(self, x):
        """Map a support point to the CDF variable (None = infinity)."""
        ctx = self.ctx
        if self.kind == "lambda":
            return ctx.mpf(x)
        if x is None:
            return ctx.mpf(0)
        return 1 / ctx.mpf(x)

    def _segment(self, a, b):
        # u = -+(1 - t^3) near the endpoints removes the (1 -+ u)^(-2/3) singularity;
        # u is formed at 4x precision so 1 -+ u keeps its relative accuracy
        ctx = self.ctx
        hi = _ctx(4 * ctx.prec)
        if a == -1 and b == 1:
            return self._segment(a, ctx.mpf(0)) + self._segment(ctx.mpf(0), b)

        def near(sign):
            def h(t):
                u = sign * (hi.mpf(1) - hi.mpf(t) ** 3)
                with_hi = LimitDensity.pushed_pdf(_HiView(self, hi), u)
                return ctx.mpf(with_hi) * 3 * t * t
            return h

        if a == -1:
            return ctx.quad(near(-1), [0, ctx.cbrt(b + 1)])
        if b == 1:
            return ctx.quad(near(1), [0, ctx.cbrt(1 - a)])
        return ctx.quad(self.pushed_pdf, [a, b])

    def total_mass(self):
        return self._segment(self.ctx.mpf(-1), self.ctx.mpf(1))

    def cdf_quad(self, u):
        """CDF by quadrature; an independent check on ``cdf``."""
        u = self.ctx.mpf(u)
        return self._segment(self.ctx.mpf(-1), u) if u > -1 else self.ctx.mpf(0)

    def cdf(self, u):
        """Closed-form CDF in the pushed variable.

        r = ((1+x)/(1-x))^(1/3) turns lambda' dx into (3 sqrt3/(4 pi)) dr/(r^2 - r + 1);
        r = ((x-1)/(x+1))^(1/3) turns nu' dx on x > 1 into (3 sqrt3/(2 pi)) dr/(r^2 + r + 1).
        """
        ctx = self.ctx
        u = _real(ctx, u)
        s3 = ctx.sqrt(3)
        if u <= -1:
            return ctx.mpf(0)
        if u >= 1:
            return ctx.mpf(1)
        if self.kind == "lambda":
            r = ctx.cbrt((1 + u) / (1 - u))
            return 3 / (2 * ctx.pi) * (ctx.atan((2 * r - 1) / s3) + ctx.pi / 6)
        if u == 0:
            return ctx.mpf(1) / 2
        a = abs(u)
        r = ctx.cbrt((1 - a) / (1 + a))
        half = 3 / ctx.pi * (ctx.atan((2 * r + 1) / s3) - ctx.pi / 6)
        return half if u < 0 else 1 - half

    def cdf_many(self, us):
        return [self.cdf(u) for u in us]

    def quantile(self, p):
        """Inverse of ``cdf`` in closed form."""
        ctx = self.ctx
        p = ctx.mpf(p)
        if not 0 < p < 1:
            raise ValueError("p must lie in (0, 1)")
        s3 = ctx.sqrt(3)
        if self.kind == "lambda":
            r = (s3 * ctx.tan(2 * ctx.pi * p / 3 - ctx.pi / 6) + 1) / 2
            r3 = r ** 3
            return (r3 - 1) / (r3 + 1)
        if p == ctx.mpf(1) / 2:
            return ctx.mpf(0)
        half = p if p < ctx.mpf(1) / 2 else 1 - p
        r = (s3 * ctx.tan(ctx.pi * half / 3 + ctx.pi / 6) - 1) / 2
        r3 = r ** 3
        a = (1 - r3) / (1 + r3)
        return -a if p < ctx.mpf(1) / 2 else a

    def quantile_measure(self, n: int) -> EmpiricalMeasure:
        """Points at the quantiles (i - 1/2)/n, returned in the support variable."""
        us = [self.quantile(self.ctx.mpf(2 * i - 1) / (2 * n)) for i in range(1, n + 1)]
        if self.kind == "lambda":
            return EmpiricalMeasure.from_points(us)
        return EmpiricalMeasure.from_points([None if u == 0 else 1 / u for u in us])


class _HiView:
    """A LimitDensity seen through a higher-precision context."""

    def __init__(self, base, ctx):
        self.kind = base.kind
        self.ctx = ctx

    def pdf(self, x):
        return density(self.kind, x, self.ctx.prec)


def measure_distance(emp: EmpiricalMeasure, limit: LimitDensity, return_curve: bool = False):
    """Kolmogorov-Smirnov distance sup |F_emp - F_limit| in the CDF variable."""
    ctx = limit.ctx
    on, off = [], 0
    for p in emp.points:
        if p is not None and hasattr(p, "imag") and ctx.im(p) != 0:
            # complex points: project if they sit on the real line to precision
            if abs(ctx.im(p)) > ctx.mpf(10) ** (-10) * max(1, abs(p)):
                off += 1
                continue
            p = ctx.re(p)
        if limit.kind == "lambda":
            if p is None or not -1 <= p <= 1:
                off += 1
                continue
        else:
            if p is not None and abs(p) < 1:
                off += 1
                continue
        on.append(limit.coordinate(p))
    if off > 0.05 * emp.n:
        raise SupportMismatch(f"{off} of {emp.n} points lie off the support of {limit.kind}")
    us = sorted(on)
    G = limit.cdf_many(us)
    w = ctx.mpf(1) / emp.n
    # off-support mass (at most 5%) is left out of the empirical CDF
    d = ctx.mpf(0)
    for i, (u, g) in enumerate(zip(us, G)):
        d = max(d, abs((i + 1) * w - g), abs(i * w - g))
    if return_curve:
        return d, list(zip(us, [(i + 1) * w for i in range(len(us))], G))
    return d


def distance_csv(emp: EmpiricalMeasure, limit: LimitDensity) -> str:
    """CSV rows (x, density, empirical CDF, limit CDF) at the empirical points."""
    _, curve = measure_distance(emp, limit, return_curve=True)
    out = io.StringIO()
    wr = csv.writer(out)
    wr.writerow(["x", "density", "empirical_cdf", "limit_cdf"])
    for u, fe, g in curve:
        x = u if limit.kind == "lambda" else (None if u == 0 else 1 / u)
        dens = "" if x is None else limit.ctx.nstr(limit.pdf(x), 15)
        wr.writerow(["inf" if x is None else limit.ctx.nstr(x, 15), dens,
                     limit.ctx.nstr(fe, 15), limit.ctx.nstr(g, 15)])
    return out.getvalue()


# -- Sokhotskii-Plemelj ----------------------------------------------------------

def neville_zero(eps, values):
    """Polynomial extrapolation of values(eps) to eps = 0."""
    P = list(values)
    m = len(eps)
    for k in range(1, m):
        for i in range(m - k):
            P[i] = (eps[i + k] * P[i] - eps[i] * P[i + 1]) / (eps[i + k] - eps[i])
    return P[0]


def sokhotskii_crosscheck(x, kind: str, precision_bits: int | None = None, levels=(2, 3, 4, 5)):
    """(closed form, jump form) of the density at x.

    nu' = -(y1(x+i0) - y1(x-i0))/(2 pi i), lambda' = (y3(x+i0) - y3(x-i0))/(4 pi i).
    The one-sided limits come from Richardson extrapolation over
    eps = d * 10^-k, d = min(1, distance from x to +-1).
    """
    ctx = _ctx(precision_bits)
    x = _real(ctx, x)
    closed = density(kind, x, precision_bits)
    d = min(ctx.mpf(1), abs(x - 1), abs(x + 1))
    eps = [d * ctx.mpf(10) ** (-k) for k in levels]
    idx = 0 if kind == "nu" else 2
    jumps = []
    for e in eps:
        up = _branch_values(ctx.mpc(x, e), ctx)[idx]
        dn = _branch_values(ctx.mpc(x, -e), ctx)[idx]
        jumps.append(up - dn)
    J = neville_zero(eps, jumps)
    if kind == "nu":
        jump = -J / (2j * ctx.pi)
    else:
        jump = J / (4j * ctx.pi)
    return closed, ctx.re(jump)


# -- ratio asymptotics and Cauchy transforms ---------------------------------------

def f0(z, alpha, precision_bits: int | None = None):
    """((1 - z)/(1 + z))^alpha on C \\ F with f0(0) = 1."""
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    if _on_F(ctx, z, ctx.mpf(2) ** (-ctx.prec + 8)):
        raise OnBranchCut(f"z = {ctx.nstr(z, 10)} lies on F")
    a = ctx.mpf(alpha.numerator) / alpha.denominator if hasattr(alpha, "denominator") else ctx.mpmathify(alpha)
    return ctx.power(ctx.mpc((1 - z) / (1 + z)), a)


def delta_f(x, alpha, precision_bits: int | None = None):
    """Jump f^+ - f^- of ((z-1)/(z+1))^alpha across (-1, 1): 2i sin(alpha pi) f0(x)."""
    ctx = _ctx(precision_bits)
    a = ctx.mpf(alpha.numerator) / alpha.denominator if hasattr(alpha, "denominator") else ctx.mpmathify(alpha)
    return 2j * ctx.sin(a * ctx.pi) * f0(x, alpha, precision_bits)


def _poly_eval(Q: Polynomial, z, ctx):
    acc = ctx.mpc(0)
    for c in reversed(Q.coeffs):
        c = ctx.mpf(c.numerator) / c.denominator if hasattr(c, "denominator") else c
        acc = acc * z + c
    return acc


def ratio_limit_check(sol_list, z, alpha, precision_bits: int | None = None):
    """Per solution: (n, |Q1/Q2 + 2cos(alpha pi) f0|, |Q0/Q2 - f0^2|).

    A solution whose Q_{n,2} vanishes at z is reported with ``None`` errors.
    """
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    a = ctx.mpf(alpha.numerator) / alpha.denominator if hasattr(alpha, "denominator") else ctx.mpmathify(alpha)
    F0 = f0(z, alpha, precision_bits)
    t44 = -2 * ctx.cos(a * ctx.pi) * F0
    t45 = F0 * F0
    out = []
    for sol in sol_list:
        q0, q1, q2 = (_poly_eval(q, z, ctx) for q in sol.Q)
        if q2 == 0:
            out.append((sol.n, None, None))
            continue
        out.append((sol.n, abs(q1 / q2 - t44), abs(q0 / q2 - t45)))
    return out


def cauchy_transform(Q: Polynomial, z, n: int | None = None, precision_bits: int | None = None):
    """(1/n) Q'(z)/Q(z)."""
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    n = n or Q.degree
    q = _poly_eval(Q, z, ctx)
    if q == 0:
        raise ZeroDivisionError("z is a root of Q")
    return _poly_eval(Q.derive(), z, ctx) / (n * q)


def cauchy_transform_check(sol: HPSolution, k: int, z, precision_bits: int | None = None):
    """|(1/n) Q_{n,k}'/Q_{n,k}(z) - y1(z)|."""
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    if ctx.im(z) == 0:
        raise ValueError("z must be off the real line")
    y1 = cubic_branches(z, precision_bits).y1
    return abs(cauchy_transform(sol.Q[k], z, sol.n, precision_bits) - y1)


# -- Nuttall sheet ordering --------------------------------------------------------

def sheet_ordering(z, precision_bits: int | None = None, base=1, check: bool = True):
    """(phi1, phi2, phi3) = Re of the integrals of y_j from the branch point
    ``base`` to z along a straight segment.

    All three sheets meet at z = 1, so the three integrals share their
    starting value there; the segment (1, z] stays in one open half-plane.
    With ``check`` the ordering phi3 < phi2 < phi1 is asserted.
    """
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    if ctx.im(z) == 0:
        raise PathCrossesCut("z must be off the real line")
    base = ctx.mpmathify(base)
    if ctx.im(base) == 0 and not (base in (1, -1) or -1 < ctx.re(base) < 1):
        raise PathCrossesCut("base point must be +-1 or lie in (-1, 1)")
    dz = z - base
    side = 1 if ctx.im(z) > 0 else -1

    def integrand(j):
        def g(t):
            zt = base + t * dz
            if ctx.im(zt) == 0:
                zt = ctx.mpc(ctx.re(zt), side * ctx.mpf(2) ** (-ctx.prec))
            return _branch_values(zt, ctx)[j] * dz
        return g

    phis = tuple(ctx.re(ctx.quad(integrand(j), [0, 1])) for j in range(3))
    if check and not (phis[2] < phis[1] < phis[0]):
        raise AssertionError(
            "sheet ordering violated: " + ", ".join(ctx.nstr(p, 12) for p in phis)
        )
    return phis


def path_dependence(z, precision_bits: int | None = None, base=1):
    """Difference of the phi_j between the straight path and a detour
    through base + 2i*sign(Im z)*|z - base| (same homotopy class in the
    half-plane)."""
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    base = ctx.mpmathify(base)
    side = 1 if ctx.im(z) > 0 else -1
    mid = base + 2j * side * abs(z - base)
    straight = sheet_ordering(z, precision_bits, base, check=False)

    def leg(a, b, j):
        d = b - a

        def g(t):
            zt = a + t * d
            if ctx.im(zt) == 0:
                zt = ctx.mpc(ctx.re(zt), side * ctx.mpf(2) ** (-ctx.prec))
            return _branch_values(zt, ctx)[j] * d
        return ctx.quad(g, [0, 1])

    detour = tuple(ctx.re(leg(base, mid, j) + leg(mid, z, j)) for j in range(3))
    return max(abs(a - b) for a, b in zip(straight, detour))
