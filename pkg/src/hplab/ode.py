"""Linear ODEs with polynomial coefficients satisfied by Hermite-Pade forms.

The explicit p = 2, s = 2 equation and the Laguerre-type Pade equation are
assembled coefficient by coefficient; the generic route builds the Wronskian
of the rows Q_k f^k from Laurent expansions at infinity and clears it into
polynomial coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .errors import NonPolynomialTail, OrderMismatch, StructureMismatch, TruncationTooShort
from .hp import HPSolution, hp_solve
from .laurent import LaurentTail, poly_from_tail
from .poly import Polynomial, RationalFunction, poly_gcd
from .regime import EXACT, BigComplex
from .semiclassical import FunctionSystem, PowerSystem, SemiclassicalFn, power_tails


@dataclass(frozen=True, eq=False)
class LinearODE:
    """sum_j Pi_j(z) w^(j) = 0; ``coeffs[j]`` is Pi_j."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero():
            raise ValueError("leading coefficient of an ODE must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def regime(self):
        return self.coeffs[0].regime

    @property
    def degrees(self) -> tuple:
        return tuple(c.degree for c in self.coeffs)

    def scaled(self, c) -> LinearODE:
        return LinearODE(tuple(p * c for p in self.coeffs))

    def monic(self) -> LinearODE:
        lead = self.coeffs[-1].lc
        inv = Fraction(1) / lead if self.regime.exact else 1 / lead
        return self.scaled(inv)

    def proportional_to(self, other: LinearODE, tol=None) -> bool:
        """True when self = c * other for a single nonzero scalar c."""
        if self.order != other.order:
            return False
        a, b = self.monic(), other.monic()
        for p, q in zip(a.coeffs, b.coeffs):
            if self.regime.exact:
                if p != q:
                    return False
            else:
                d = p - q
                if any(abs(c) > tol for c in d.coeffs):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, LinearODE):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def to_json(self) -> dict:
        r = self.regime
        doc = {
            "order": self.order,
            "coeffs": [[r.to_string(c) for c in p.coeffs] for p in self.coeffs],
        }
        if not r.exact:
            doc["precision_bits"] = r.precision_bits
        return doc


@dataclass(frozen=True, eq=False)
class QuasiSolution:
    """w = Q f^k."""

    Q: Polynomial
    k: int
    f: SemiclassicalFn | None = None

    def derivative_factors(self, count: int):
        """D_0, ..., D_count with w^(j) = D_j f^k as rational functions.

        D_0 = Q and D_{j+1} = D_j' + k (B/A) D_j.
        """
        D = RationalFunction(self.Q)
        out = [D]
        if self.k == 0 or self.f is None:
            for _ in range(count):
                D = D.derive()
                out.append(D)
            return out
        log_der = RationalFunction(self.f.B * self.k, self.f.A)
        for _ in range(count):
            D = D.derive() + D * log_der
            out.append(D)
        return out


# -- explicit builders ------------------------------------------------------------

PRINTED = "printed"
DERIVED = "derived"


def build_ode_p2_s2(alpha, n: int, flip: bool = False, regime=EXACT, constants: str = PRINTED) -> LinearODE:
    """Third order equation for Q_{n,0}, Q_{n,1} f, Q_{n,2} f^2 with
    f = ((z-1)/(z+1))^alpha; ``flip`` replaces alpha by -alpha (the equation
    of Q_{n,2} alone).

    (z^2-1)^2 w''' + 6(z^2-1)(z-alpha) w''
      - [3(n-1)(n+2) z^2 + 12 alpha z - (3n(n+1) + 8 alpha^2 - c)] w'
      + 2 [n(n^2-1) z + alpha (3n(n+1) - d)] w = 0

    ``constants="printed"`` uses (c, d) = (10, 8) as published.  These do not
    annihilate the Hermite-Pade forms; the Wronskian of the forms gives
    (c, d) = (2, 0), selected by ``constants="derived"``.
    """
    if constants == PRINTED:
        c, d = 10, 8
    elif constants == DERIVED:
        c, d = 2, 0
    else:
        raise ValueError(f"constants must be {PRINTED!r} or {DERIVED!r}")
    a = regime.coerce(alpha)
    if flip:
        a = -a
    one = regime.one
    n = regime.coerce(n)
    P = lambda cs: Polynomial(cs, regime)  # noqa: E731
    zz1 = P([-one, 0, one])
    pi3 = zz1 * zz1
    pi2 = zz1 * P([-a, one]) * 6
    pi1 = -P([-(3 * n * (n + 1) + 8 * a * a - c), 12 * a, 3 * (n - 1) * (n + 2)])
    pi0 = P([a * (3 * n * (n + 1) - d), n * (n * n - 1)]) * 2
    return LinearODE((pi0, pi1, pi2, pi3))


def build_ode_pade(f: SemiclassicalFn, H: Polynomial, C: Polynomial, N, flip: bool = False) -> LinearODE:
    """A H w'' + ((A' - B) H - A H') w' - N C w = 0 (B -> -B when ``flip``)."""
    A = f.A
    B = -f.B if flip else f.B
    pi2 = A * H
    pi1 = (A.derive() - B) * H - A * H.derive()
    pi0 = C * (-f.regime.coerce(N))
    return LinearODE((pi0, pi1, pi2))


def ode_residual(ode: LinearODE, w: QuasiSolution) -> RationalFunction:
    """sum_j Pi_j w^(j) / f^k as an exact rational function."""
    D = w.derivative_factors(ode.order)
    acc = RationalFunction(Polynomial((), ode.regime))
    for pi, d in zip(ode.coeffs, D):
        acc = acc + d * pi
    return acc


def hp_residuals(ode: LinearODE, sys, sol: HPSolution):
    """Residuals of every Q_k f^k of ``sol`` in ``ode``."""
    out = []
    for k, q in enumerate(sol.Q):
        f = None
        if isinstance(sys, PowerSystem):
            w = QuasiSolution(q, k, sys.base)
        else:
            w = QuasiSolution(q, 1 if k else 0, sys.functions[k - 1] if k else None)
        out.append(ode_residual(ode, w))
    return out


# -- Wronskian extraction -------------------------------------------------------

def _det(matrix):
    size = len(matrix)
    total = None
    for perm in permutations(range(size)):
        inv = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
        term = None
        for r, c in enumerate(perm):
            term = matrix[r][c] if term is None else term * matrix[r][c]
        if inv % 2:
            term = -term
        total = term if total is None else total + term
    return total


def wronskian_order(s: int, n: int, p: int, check_depth: int = 8) -> int:
    """Expansion order that keeps ``check_depth`` tail coefficients of every
    cleared minor known."""
    S = (s + 1) * (s + 2) // 2 - 1
    return (s + 1) * n + s + 2 + p * S + check_depth


def _strip_root_factors(polys, points, tol):
    """Divide every polynomial by (z - a) while all of them vanish at a."""
    reg = polys[0].regime
    for a in points:
        while True:
            scale = max(p.norm() for p in polys)
            if all(abs(p(a)) <= tol * scale for p in polys) and all(p.degree >= 1 for p in polys if not p.is_zero()):
                lin = Polynomial([-a, reg.one], reg)
                polys = [p.divmod(lin)[0] for p in polys]
            else:
                break
    return polys


def extract_ode_wronskian(sys, sol: HPSolution, tol=None) -> LinearODE:
    """ODE of order s + 1 whose solutions include every Q_k f^k of ``sol``.

    Pi_j = (-1)^j W_j where W_j is the minor of the (s+1) x (s+2) matrix
    [(Q_k f^k)^(i)] without column j.  Each minor is multiplied by the
    clearing polynomial and by 1/(f^1 ... f^s), and the result is checked to
    be a polynomial.  The common factor of the coefficients is removed (gcd
    in the exact regime, factors z - a_j in the float regime) and Pi_{s+1}
    is made monic.
    """
    if sol.nullspace_dim != 1:
        raise ValueError("extraction needs a one-dimensional solution space")
    s = sys.s
    reg = sys.regime
    clear = sys.clearing_polynomial()
    need = (s + 1) * sol.n + clear.degree + 1
    if sys.order < need:
        raise TruncationTooShort(f"expansion order {sys.order} < {need} needed for the Wronskian")
    rows = []
    for k, q in enumerate(sol.Q):
        w = sys.tails[k] * q
        row = [w]
        for _ in range(s + 1):
            w = w.derive()
            row.append(w)
        rows.append(row)
    recip = sys.product_reciprocal(sys.order)
    cleared = []
    for j in range(s + 2):
        minor = _det([[r[c] for c in range(s + 2) if c != j] for r in rows])
        if j % 2:
            minor = -minor
        cleared.append(minor * clear * recip)
    if reg.exact:
        polys = [poly_from_tail(t) for t in cleared]
    else:
        scale = max(max((abs(c) for c in t.data), default=0) for t in cleared)
        if tol is None:
            tol = scale * reg.ctx.mpf(10) ** (-(reg.digits // 2))
        polys = [poly_from_tail(t, tol) for t in cleared]
    if all(p.is_zero() for p in polys[1:]):
        raise NonPolynomialTail("Wronskian vanishes identically; rows are dependent")
    if reg.exact:
        g = None
        for p in polys:
            if not p.is_zero():
                g = p if g is None else poly_gcd(g, p)
        if g.degree > 0:
            polys = [p.exact_div(g) for p in polys]
    else:
        points = _branch_points(sys)
        scale = max(p.norm() for p in polys)
        polys = [p.trim(scale * reg.ctx.mpf(10) ** (-(reg.digits // 2))) for p in polys]
        polys = _strip_root_factors(polys, points, reg.ctx.mpf(10) ** (-(reg.digits // 3)))
    return LinearODE(tuple(polys)).monic()


def _branch_points(sys):
    if isinstance(sys, PowerSystem):
        return list(sys.base.branch_points)
    pts = []
    for f in sys.functions:
        pts += [a for a in f.branch_points if a not in pts]
    return pts


# -- structure audit --------------------------------------------------------------

@dataclass
class AuditReport:
    s: int
    n: int
    H: Polynomial | None
    accessory: dict
    checks: dict
    degenerate: bool
    degrees: tuple

    def to_json(self) -> dict:
        reg = self.H.regime if self.H is not None else EXACT
        poly = lambda p: None if p is None else [reg.to_string(c) for c in p.coeffs]  # noqa: E731
        return {
            "s": self.s,
            "n": self.n,
            "H": poly(self.H),
            "accessory": {k: poly(v) for k, v in self.accessory.items()},
            "checks": self.checks,
            "degenerate": self.degenerate,
            "degrees": list(self.degrees),
        }


def _div_check(num, den, name, tol):
    q, r = num.divmod(den)
    if num.regime.exact:
        ok = r.is_zero()
    else:
        ok = all(abs(c) <= tol for c in r.coeffs)
    if not ok:
        raise StructureMismatch(name, f"remainder {r}")
    return q


def _same(p, q, name, tol):
    d = p - q
    ok = d.is_zero() if p.regime.exact else all(abs(c) <= tol for c in d.coeffs)
    if not ok:
        raise StructureMismatch(name, f"difference {d}")


def structure_audit(ode: LinearODE, f: SemiclassicalFn, s: int, n: int, tol=None) -> AuditReport:
    """Recover the accessory polynomials and check the structural identities.

    s = 1: Pi_2 = A H, Pi_1 = (A' - B) H - A H', Pi_0 = -n(n+1) C.
    s = 2: Pi_3 = A^2 H, Pi_2 = A (3 (A' - B) H - A H'),
           Pi_1 = -3(n-1)(n+2) F, Pi_0 = 2n(n^2-1) G.
    H, C, F, G are monic when the index is normal.
    """
    if ode.order != s + 1:
        raise OrderMismatch(f"expected order {s + 1}, got {ode.order}")
    reg = ode.regime
    if tol is None and not reg.exact:
        tol = max(p.norm() for p in ode.coeffs) * reg.ctx.mpf(10) ** (-(reg.digits // 3))
    if not reg.exact:
        ode = LinearODE(tuple(p.trim(tol) for p in ode.coeffs))
    ode = ode.monic()
    A, B = f.A, f.B
    Ad = A.derive()
    checks = {}
    acc = {}
    if s == 1:
        H = _div_check(ode.coeffs[2], A, "Pi_2 = A H", tol)
        checks["Pi_2 = A H"] = True
        _same(ode.coeffs[1], (Ad - B) * H - A * H.derive(), "Pi_1 = (A'-B)H - AH'", tol)
        checks["Pi_1 = (A'-B)H - AH'"] = True
        N = n * (n + 1)
        degenerate = N == 0
        pi0 = ode.coeffs[0]
        if not degenerate:
            C = pi0 * (reg.coerce(Fraction(-1, N)) if reg.exact else reg.coerce(-1) / N)
            acc["C"] = C
            checks["leading Pi_0 = -n(n+1)"] = _lead_ok(C, 2 * A.degree - 4, reg, tol)
            if not checks["leading Pi_0 = -n(n+1)"]:
                raise StructureMismatch("leading Pi_0 = -n(n+1)", f"C = {C}")
        bounds = {"H": A.degree - 2, "C": 2 * A.degree - 4}
    elif s == 2:
        H = _div_check(ode.coeffs[3], A * A, "Pi_3 = A^2 H", tol)
        checks["Pi_3 = A^2 H"] = True
        _same(ode.coeffs[2], A * ((Ad - B) * H * 3 - A * H.derive()), "Pi_2 = A{3(A'-B)H - AH'}", tol)
        checks["Pi_2 = A{3(A'-B)H - AH'}"] = True
        k1 = 3 * (n - 1) * (n + 2)
        k2 = 2 * n * (n * n - 1)
        degenerate = k1 == 0 or k2 == 0
        p = A.degree
        if not degenerate:
            F = ode.coeffs[1] * (reg.coerce(Fraction(-1, k1)) if reg.exact else reg.coerce(-1) / k1)
            G = ode.coeffs[0] * (reg.coerce(Fraction(1, k2)) if reg.exact else reg.coerce(1) / k2)
            acc["F"], acc["G"] = F, G
            for name, poly, deg in (("leading Pi_1 = -3(n-1)(n+2)", F, 5 * p - 8),
                                    ("leading Pi_0 = 2n(n^2-1)", G, 5 * p - 9)):
                checks[name] = _lead_ok(poly, deg, reg, tol)
                if not checks[name]:
                    raise StructureMismatch(name, f"{poly}")
        bounds = {"H": 3 * A.degree - 6, "F": 5 * A.degree - 8, "G": 5 * A.degree - 9}
    else:
        raise OrderMismatch("structure audit covers s = 1 and s = 2")
    if H.degree > bounds["H"]:
        raise StructureMismatch("deg H bound", f"deg H = {H.degree} > {bounds['H']}")
    checks["deg H bound"] = True
    return AuditReport(s=s, n=n, H=H, accessory=acc, checks=checks, degenerate=degenerate, degrees=ode.degrees)


def _lead_ok(poly, deg, reg, tol):
    """poly has degree ``deg`` with leading coefficient 1."""
    if reg.exact:
        return poly.degree == deg and poly.lc == 1
    return poly.degree == deg and abs(poly.lc - 1) <= tol


# -- Riccati form and accessory parameters -----------------------------------------

def riccati_reduce(ode: LinearODE, n: int):
    """(s_n, r_n) with -(1/n) v' = v^2 + s_n v + r_n for v = w'/(n w)."""
    if ode.order != 2:
        raise OrderMismatch(f"Riccati reduction needs a second order equation, got {ode.order}")
    if n == 0:
        raise ValueError("n must be positive")
    pi0, pi1, pi2 = ode.coeffs
    s_n = RationalFunction(pi1, pi2 * n)
    r_n = RationalFunction(pi0, pi2 * (n * n))
    return s_n, r_n


def riccati_residual(s_n: RationalFunction, r_n: RationalFunction, v: RationalFunction, n: int):
    """(1/n) v' + v^2 + s_n v + r_n."""
    return v.derive() * (Fraction(1, n) if v.regime.exact else 1 / v.regime.coerce(n)) + v * v + s_n * v + r_n


@dataclass(frozen=True, eq=False)
class AccessoryTrack:
    """Per-n accessory data of the Pade equation for p = 3."""

    n_list: tuple
    H: tuple
    C: tuple
    V: tuple
    distances: tuple

    def to_json(self) -> dict:
        reg = self.H[0].regime
        poly = lambda p: [reg.to_string(c) for c in p.coeffs]  # noqa: E731
        return {
            "n_list": list(self.n_list),
            "H": [poly(h) for h in self.H],
            "C": [poly(c) for c in self.C],
            "V": [poly(v) for v in self.V],
            "distances": [reg.to_string(d) for d in self.distances],
        }


def pade_ode(f: SemiclassicalFn, n: int, extra: int = 0) -> tuple:
    """(ode, hp solution) for the s = 1 system of f via the Wronskian."""
    M = wronskian_order(1, n, f.p) + extra
    sys = power_tails(f, 1, M, check=False)
    sol = hp_solve(sys, n)
    return extract_ode_wronskian(sys, sol), sol


def accessory_track(f: SemiclassicalFn, n_list) -> AccessoryTrack:
    """H_n, C_n from the extracted Pade equation; V_n = C_n / (z - c*) where
    c* is the root of C_n nearest to the root of H_n."""
    from .roots import polynomial_roots

    if f.p != 3:
        raise ValueError("accessory tracking is set up for p = 3")
    Hs, Cs, Vs, ds = [], [], [], []
    for n in n_list:
        ode, _ = pade_ode(f, n)
        rep = structure_audit(ode, f, 1, n)
        H, C = rep.H, rep.accessory["C"]
        h0 = -H[0] / H[1]
        croots = polynomial_roots(C)
        near = min(croots, key=lambda c: abs(c - h0))
        reg = f.regime
        lin = Polynomial([-near, reg.one], reg)
        V = C.divmod(lin)[0]
        Hs.append(H)
        Cs.append(C)
        Vs.append(V.monic())
        ds.append(abs(near - h0))
    return AccessoryTrack(tuple(n_list), tuple(Hs), tuple(Cs), tuple(Vs), tuple(ds))


def verify_p2_s2(alpha, n: int, constants: str = PRINTED, sol: HPSolution | None = None) -> dict:
    """Exact residuals of the explicit p = 2, s = 2 equation.

    Keys "Q0", "Q1 f", "Q2 f^2" hold the residuals of the three forms in the
    equation; "Q2 (flipped)" is Q_{n,2} alone in the alpha -> -alpha equation.
    """
    from .hp import solve_power_system
    from .semiclassical import two_point

    f = two_point(alpha)
    if sol is None:
        sol = solve_power_system(f, 2, n)
    ode = build_ode_p2_s2(alpha, n, constants=constants)
    out = {}
    for k, name in enumerate(("Q0", "Q1 f", "Q2 f^2")):
        out[name] = ode_residual(ode, QuasiSolution(sol.Q[k], k, f))
    out["Q2 (flipped)"] = ode_residual(build_ode_p2_s2(alpha, n, flip=True, constants=constants),
                                       QuasiSolution(sol.Q[2], 0))
    return out
