"""Type I Hermite-Pade and Pade polynomials for (1, f, ..., f^s) at infinity."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GridTooCoarse, TruncationTooShort
from .laurent import LaurentTail
from .linalg import nullspace_exact, nullspace_float
from .poly import Polynomial
from .regime import EXACT, BigComplex
from .semiclassical import PowerSystem, SemiclassicalFn, power_tails, two_point


@dataclass(frozen=True, eq=False)
class HPSolution:
    """Q_0 + Q_1 f_1 + ... + Q_s f_s = O(z^-(sn+s)) with deg Q_k <= n.

    ``remainder_tail`` is the expansion of the linear form.  ``defect`` counts
    how many coefficients beyond z^-(sn+s-1) also vanish.  When the solution
    space has dimension > 1, ``basis`` holds every basis vector (each a
    list of s + 1 polynomials) and ``Q`` is the first of them.
    """

    n: int
    s: int
    Q: tuple
    remainder_tail: LaurentTail
    normal: bool
    defect: int
    nullspace_dim: int
    basis: tuple = field(default=())

    @property
    def regime(self):
        return self.remainder_tail.regime

    @property
    def remainder_leading(self):
        """Coefficient of z^-(sn+s) in the remainder."""
        return self.remainder_tail.coefficient(-(self.s * self.n + self.s))

    def to_json(self) -> dict:
        r = self.regime
        doc = {
            "n": self.n,
            "s": self.s,
            "Q": [[r.to_string(c) for c in q.coeffs] for q in self.Q],
            "normal": self.normal,
            "defect": self.defect,
            "nullspace_dim": self.nullspace_dim,
            "remainder_leading": r.to_string(self.remainder_leading),
        }
        if not r.exact:
            doc["precision_bits"] = r.precision_bits
        return doc


def _split_vector(vec, s, n, regime):
    return [Polynomial([vec[(k - 1) * (n + 1) + i] for i in range(n + 1)], regime) for k in range(1, s + 1)]


def _assemble(sys, Qs, n):
    """Complete (Q_1..Q_s) with Q_0 and the remainder expansion."""
    reg = sys.regime
    S = None
    for k, q in enumerate(Qs, start=1):
        term = sys.tails[k] * q
        S = term if S is None else S + term
    Q0 = -S.polynomial_part
    return [Q0] + list(Qs), S + Q0


def _tol(regime, scale):
    return scale * regime.ctx.mpf(10) ** (-(regime.digits // 2))


def hp_solve(sys, n: int, rank_tol=None) -> HPSolution:
    """Solve the type I system for ``sys.tails`` = (1, f_1, ..., f_s).

    Q_0 enters the conditions at z^n ... z^0 with unit coefficient, so it
    is eliminated first; the remaining sn + s - 1 equations (powers z^-1 ...
    z^-(sn+s-1)) in s(n+1) unknowns form a block Hankel system.
    """
    s = sys.s
    reg = sys.regime
    need = (s + 1) * n + s + 2
    if sys.order < need:
        raise TruncationTooShort(f"expansion order {sys.order} < (s+1)n+s+2 = {need}")
    nrows = s * n + s - 1
    ncols = s * (n + 1)
    cs = [t.coeffs for t in sys.tails]
    rows = []
    for m in range(1, nrows + 1):
        rows.append([cs[k][m + i] for k in range(1, s + 1) for i in range(n + 1)])
    if nrows == 0:
        basis = [[reg.one]]
    elif reg.exact:
        basis = nullspace_exact(rows, ncols)
    else:
        basis, _ = nullspace_float(rows, ncols, reg.ctx, rank_tol)
    sols = []
    for vec in basis:
        Qs, R = _assemble(sys, _split_vector(vec, s, n, reg), n)
        sols.append((Qs, R))
    Qs, R = sols[0]
    if reg.exact:
        for e in range(0, -(s * n + s), -1):
            if R.coefficient(e) != 0:
                raise ArithmeticError(f"remainder coefficient at z^{e} does not vanish")
    dim = len(basis)

    scale = max(max((abs(c) for c in q.coeffs), default=0) for q in Qs)
    if reg.exact:
        full_degree = all(q.degree == n for q in Qs)
    else:
        full_degree = all(abs(q[n]) > _tol(reg, scale) for q in Qs)
    lead = R.coefficient(-(s * n + s))
    if reg.exact:
        nonzero_lead = lead != 0
    else:
        nonzero_lead = abs(lead) > _tol(reg, scale)

    # normalization: Q_s monic, else the highest-index Q_k with full degree
    if dim == 1:
        full = [k for k in range(s, -1, -1) if (Qs[k].degree == n if reg.exact else abs(Qs[k][n]) > _tol(reg, scale))]
        if full:
            c = Qs[full[0]][n]
        else:
            c = next(q for q in reversed(Qs) if not q.is_zero()).lc
        inv = (Fraction(1) / c) if reg.exact else 1 / c
        Qs = [q * inv for q in Qs]
        R = R * inv
        lead = R.coefficient(-(s * n + s))

    defect = 0
    e = -(s * n + s)
    while e >= -R.order:
        c = R.coefficient(e)
        if (c != 0) if reg.exact else (abs(c) > _tol(reg, max(scale, 1))):
            break
        defect += 1
        e -= 1
    normal = dim == 1 and full_degree and nonzero_lead
    return HPSolution(
        n=n, s=s, Q=tuple(Qs), remainder_tail=R, normal=normal, defect=defect,
        nullspace_dim=dim, basis=tuple(tuple(q) for q, _ in sols) if dim > 1 else (),
    )


def solve_power_system(f: SemiclassicalFn, s: int, n: int, extra: int = 4) -> HPSolution:
    """Convenience wrapper: expand f^k to the needed order and solve."""
    M = (s + 1) * n + s + 2 + extra
    return hp_solve(power_tails(f, s, M), n)


@dataclass(frozen=True, eq=False)
class PadePair:
    """Q f - P = M_n z^-(n+1+defect) (1 + O(1/z))."""

    P: Polynomial
    Q: Polynomial
    n: int
    M_n: object
    defect: int
    remainder_tail: LaurentTail
    normal: bool


def pade_solve(f: SemiclassicalFn, n: int, M: int | None = None) -> PadePair:
    if M is None:
        M = 2 * n + 6
    if M < 2 * n + 2:
        raise TruncationTooShort(f"expansion order {M} < 2n+2 = {2 * n + 2}")
    sys = power_tails(f, 1, M, check=False)
    sol = hp_solve(sys, n)
    R = sol.remainder_tail
    Mn = R.coefficient(-(n + 1 + sol.defect)) if sol.defect + n + 1 <= R.order else f.regime.zero
    return PadePair(
        P=-sol.Q[0], Q=sol.Q[1], n=n, M_n=Mn, defect=sol.defect, remainder_tail=R, normal=sol.normal
    )


# -- Jacobi polynomials ---------------------------------------------------------

def jacobi_polynomial(a, b, n: int, regime=EXACT) -> Polynomial:
    """P_n^(a,b) from the three-term recurrence (standard normalization)."""
    a = regime.coerce(a)
    b = regime.coerce(b)
    one = regime.one
    x = Polynomial.x(regime)
    p0 = Polynomial([one], regime)
    if n == 0:
        return p0
    p1 = x * ((a + b + 2) / (2 * one)) + (a - b) / (2 * one)
    for m in range(2, n + 1):
        c = 2 * m + a + b
        k1 = 2 * m * (m + a + b) * (c - 2)
        k2 = (c - 1) * c * (c - 2)
        k3 = (c - 1) * (a * a - b * b)
        k4 = 2 * (m + a - 1) * (m + b - 1) * c
        p0, p1 = p1, (p1 * x * k2 + p1 * k3 - p0 * k4) * (one / k1)
    return p1


def jacobi_crosscheck(alpha, n: int) -> bool:
    """Pade denominator of ((z-1)/(z+1))^alpha against P_n^(alpha,-alpha)."""
    alpha = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
    pade = pade_solve(two_point(alpha), n)
    J = jacobi_polynomial(alpha, -alpha, n)
    return pade.Q.proportional_to(J)


# -- the real form rho_n on (-1, 1) -----------------------------------------------

def clustered_grid(N: int):
    """N + 1 points of (-1, 1) clustered cubically at both endpoints.

    Uses x = (15t - 10t^3 + 3t^5)/8, whose first two derivatives vanish at
    t = +-1, so 1 - |x| shrinks like (1 - |t|)^3.
    """
    out = []
    for i in range(1, N):
        t = Fraction(2 * i - N, N)
        out.append((15 * t - 10 * t ** 3 + 3 * t ** 5) / 8)
    return out


class RhoForm:
    """rho_n(x) = Q_1(x) + 2 cos(alpha pi) f_0(x) Q_2(x), f_0 = ((1-x)/(1+x))^alpha."""

    def __init__(self, sol: HPSolution, alpha, precision_bits: int | None = None):
        if sol.s != 2:
            raise ValueError("rho_n is defined for s = 2")
        self.regime = BigComplex(precision_bits) if precision_bits else (
            sol.regime if not sol.regime.exact else BigComplex()
        )
        ctx = self.regime.ctx
        self.ctx = ctx
        # rho_n is real on (-1, 1) for real alpha and real Q; keep mpf values
        real = self._real
        self.alpha = real(self.regime.coerce(alpha))
        self.q1 = [real(self.regime.coerce(c)) for c in sol.Q[1].coeffs]
        self.q2 = [real(self.regime.coerce(c)) for c in sol.Q[2].coeffs]
        self.factor = 2 * ctx.cos(ctx.pi * self.alpha)

    def _real(self, v):
        ctx = self.ctx
        if ctx.im(v) != 0 and abs(ctx.im(v)) > ctx.mpf(2) ** (-self.regime.precision_bits // 2) * max(1, abs(v)):
            raise ValueError("rho_n needs real alpha and real coefficients")
        return ctx.re(v)

    @staticmethod
    def _horner(cs, x):
        acc = 0
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    def __call__(self, x):
        ctx = self.ctx
        x = ctx.re(self.regime.coerce(x)) if isinstance(x, Fraction) else ctx.mpf(x)
        f0 = ctx.power((1 - x) / (1 + x), self.alpha)
        return self._horner(self.q1, x) + self.factor * f0 * self._horner(self.q2, x)


def _count_changes(vals):
    signs = [v > 0 for v in vals if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _refine(rho, pts, max_refinements, spacing_limit):
    vals = [rho(x) for x in pts]
    count = _count_changes(vals)
    stable = 0
    for _ in range(max_refinements):
        new_pts, new_vals = [pts[0]], [vals[0]]
        for a, b, vb in zip(pts, pts[1:], vals[1:]):
            m = (a + b) / 2
            new_pts += [m, b]
            new_vals += [rho(m), vb]
        pts, vals = new_pts, new_vals
        c = _count_changes(vals)
        if c == count:
            stable += 1
            if stable >= 2:
                return pts, vals, count
        else:
            stable = 0
            count = c
    widest = max(b - a for a, b in zip(pts, pts[1:]))
    if widest > spacing_limit:
        raise GridTooCoarse(f"sign-change count still moving at spacing {float(widest):.3g}")
    return pts, vals, count


def _check_grid(grid):
    pts = sorted(grid)
    for x in pts:
        if not -1 < x < 1:
            raise ValueError(f"grid point {x} lies outside (-1, 1)")
    return pts


def rho_form(sol: HPSolution, alpha, grid, precision_bits: int | None = None,
             max_refinements: int = 8, spacing_limit=Fraction(1, 10 ** 4)):
    """Values of rho_n on ``grid`` and the number of sign changes.

    The count comes from midpoint refinement of the grid, repeated until it
    is unchanged across two consecutive refinements.  Raises GridTooCoarse
    when it never settles while some spacing still exceeds ``spacing_limit``.
    """
    rho = RhoForm(sol, alpha, precision_bits)
    pts = _check_grid(grid)
    _, _, count = _refine(rho, pts, max_refinements, spacing_limit)
    return [rho(x) for x in pts], count


def _to_mpf(ctx, x):
    return ctx.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else ctx.mpf(x)


def rho_zeros(sol: HPSolution, alpha, grid=None, precision_bits: int | None = None, tol=None,
              max_refinements: int = 8):
    """Zeros of rho_n in (-1, 1): sign-change brackets refined by bisection."""
    rho = RhoForm(sol, alpha, precision_bits)
    ctx = rho.ctx
    if tol is None:
        tol = ctx.mpf(10) ** -30
    if grid is None:
        grid = clustered_grid(max(400, 20 * (sol.n + 1)))
    pts, vals, _ = _refine(rho, _check_grid(grid), max_refinements, Fraction(1, 10 ** 4))
    roots = []
    for a, b, va, vb in zip(pts, pts[1:], vals, vals[1:]):
        if va == 0:
            roots.append(_to_mpf(ctx, a))
            continue
        if vb == 0 or (va > 0) == (vb > 0):
            continue
        lo, hi, flo = _to_mpf(ctx, a), _to_mpf(ctx, b), va
        while hi - lo > tol:
            mid = (lo + hi) / 2
            fm = rho(mid)
            if fm == 0:
                lo = hi = mid
            elif (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append((lo + hi) / 2)
    if vals[-1] == 0:
        roots.append(_to_mpf(ctx, pts[-1]))
    return roots
