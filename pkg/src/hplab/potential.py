"""Logarithmic and Green potentials of the limit measures, the mixed
equilibrium identities, and the g-function of Pade approximants.

Measure integrals are taken in a variable u on [-1, 1]: u = t for lambda,
u = 1/t for nu (infinity maps to 0).  Near u = +-1 the substitution
u = +-(1 - s^3) absorbs the (1 -+ u)^(-2/3) endpoint behaviour; logarithmic
kernel singularities become segment breakpoints for tanh-sinh quadrature.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .asymptotics import density
from .errors import NewtonDivergence, OnBoundary, QuadratureFailure
from .poly import Polynomial
from .regime import BigComplex
from .semiclassical import SemiclassicalFn

WORK_BITS = 192


def _ctx(bits=WORK_BITS):
    return BigComplex(bits).ctx


def _num(ctx, c):
    """Exact conversion of Fractions; anything else through mpmathify."""
    if isinstance(c, Fraction):
        return ctx.mpf(c.numerator) / c.denominator
    return ctx.mpmathify(c)


# -- Green functions ------------------------------------------------------------

def _exterior_map(ctx, z):
    """phi(z) = z + sqrt(z-1) sqrt(z+1), mapping C \\ [-1, 1] onto |w| > 1."""
    z = ctx.mpc(z)
    return z + ctx.sqrt(z - 1) * ctx.sqrt(z + 1)


def _is_inf(t):
    return t is None or (isinstance(t, str) and t in ("inf", "infinity"))


def _boundary_tol(ctx):
    return ctx.mpf(2) ** (-ctx.prec // 2)


def green_E(z, t=None, precision_bits: int = WORK_BITS):
    """Green function of C \\ [-1, 1] with pole at t (None = infinity)."""
    ctx = _ctx(precision_bits)
    z = ctx.mpmathify(z)
    tol = _boundary_tol(ctx)
    if abs(ctx.im(z)) <= tol and abs(ctx.re(z)) <= 1:
        raise OnBoundary(f"z = {ctx.nstr(z, 10)} lies on E")
    a = _exterior_map(ctx, z)
    if _is_inf(t) or (not isinstance(t, str) and ctx.isinf(ctx.mpmathify(t))):
        return ctx.log(abs(a))
    t = ctx.mpmathify(t)
    if abs(ctx.im(t)) <= tol and abs(ctx.re(t)) <= 1:
        raise OnBoundary(f"t = {ctx.nstr(t, 10)} lies on E")
    b = _exterior_map(ctx, t)
    return ctx.log(abs((a * ctx.conj(b) - 1) / (a - b)))


def _half_plane_coordinate(ctx, z):
    """sqrt((1-z)/(1+z)): C \\ F onto the right half-plane."""
    z = ctx.mpc(z)
    return ctx.sqrt((1 - z) / (1 + z))


def _on_F(ctx, z):
    tol = _boundary_tol(ctx)
    return abs(ctx.im(z)) <= tol and abs(ctx.re(z)) >= 1 - tol


def green_F(z, t, precision_bits: int = WORK_BITS):
    """Green function of Omega = C \\ F with pole at t."""
    ctx = _ctx(precision_bits)
    z, t = ctx.mpmathify(z), ctx.mpmathify(t)
    for w, name in ((z, "z"), (t, "t")):
        if _on_F(ctx, w):
            raise OnBoundary(f"{name} = {ctx.nstr(w, 10)} lies on F")
    u = _half_plane_coordinate(ctx, z)
    u0 = _half_plane_coordinate(ctx, t)
    return ctx.log(abs((u + ctx.conj(u0)) / (u - u0)))


def psi(x, precision_bits: int = WORK_BITS):
    """External field 3 g_E(x, infinity) = 3 log(|x| + sqrt(x^2 - 1)) on F."""
    ctx = _ctx(precision_bits)
    x = ctx.mpf(_num(ctx, x))
    if abs(x) < 1:
        raise OnBoundary("psi is evaluated on F")
    a = abs(x)
    return 3 * ctx.log(a + ctx.sqrt(a * a - 1))


@dataclass(frozen=True)
class PotentialKernel:
    """kind in {log, green_E, green_F}; ``evaluate(z, t)`` returns a real."""

    kind: str
    precision_bits: int = WORK_BITS

    def evaluate(self, z, t):
        if self.kind == "log":
            ctx = _ctx(self.precision_bits)
            d = abs(ctx.mpmathify(z) - ctx.mpmathify(t))
            if d == 0:
                return ctx.inf
            return -ctx.log(d)
        if self.kind == "green_E":
            return green_E(z, t, self.precision_bits)
        if self.kind == "green_F":
            return green_F(z, t, self.precision_bits)
        raise ValueError(f"unknown kernel {self.kind!r}")


# -- integration against lambda and nu -------------------------------------------

class _MeasureIntegrator:
    """Integrals of kernels against lambda or nu, in the variable u.

    ``quad_n`` is the maximal tanh-sinh degree; the working context carries
    ``precision_bits`` so the endpoint substitution keeps 1 -+ u accurate.
    """

    def __init__(self, kind: str, quad_n: int = 8, precision_bits: int = WORK_BITS):
        self.kind = kind
        self.quad_n = quad_n
        self.ctx = _ctx(precision_bits)
        self.bits = precision_bits

    def weight(self, u):
        """Pushed density at u in (-1, 1)."""
        ctx = self.ctx
        if not -1 < u < 1:
            return ctx.mpf(0)
        if self.kind == "lambda":
            return density("lambda", u, self.bits)
        if u == 0:
            return ctx.sqrt(3) / (3 * ctx.pi)
        return density("nu", 1 / u, self.bits) / (u * u)

    def _quad(self, f, a, b):
        ctx = self.ctx
        val, err = ctx.quad(f, [a, b], maxdegree=self.quad_n, error=True)
        if not ctx.isfinite(val):
            raise QuadratureFailure(f"non-finite integral on [{ctx.nstr(a, 6)}, {ctx.nstr(b, 6)}]")
        return val

    def integrate(self, g, breaks=()):
        """int g(u) w(u) du over [-1, 1], split at ``breaks``."""
        ctx = self.ctx
        pts = sorted({ctx.mpf(b) for b in breaks if -1 < b < 1} | {ctx.mpf(0)})
        nodes = [ctx.mpf(-1)] + pts + [ctx.mpf(1)]
        total = ctx.mpf(0)

        def h(u):
            if not -1 < u < 1:
                return ctx.mpf(0)
            return g(u) * self.weight(u)

        for i, (a, b) in enumerate(zip(nodes, nodes[1:])):
            if i == 0:
                total += self._quad(lambda s: h(-1 + s ** 3) * 3 * s * s, 0, ctx.cbrt(b + 1))
            elif i == len(nodes) - 2:
                total += self._quad(lambda s: h(1 - s ** 3) * 3 * s * s, 0, ctx.cbrt(1 - a))
            else:
                total += self._quad(h, a, b)
        return total


def _log_potential(I: _MeasureIntegrator, x):
    """V^mu(x) = int log(1/|x - t|) dmu(t) for real x."""
    ctx = I.ctx
    x = ctx.mpf(x)
    if I.kind == "lambda":
        return I.integrate(lambda t: -ctx.log(abs(x - t)) if t != x else ctx.mpf(0), [x])
    # t = 1/u: log(1/|x - 1/u|) = log|u| - log|x u - 1|
    def g(u):
        if u == 0:
            return ctx.mpf(0) if x == 0 else -ctx.inf
        d = abs(x * u - 1)
        if d == 0:
            return ctx.mpf(0)
        return ctx.log(abs(u)) - ctx.log(d)
    brk = [1 / x] if x != 0 else []
    # the log|u| singularity at 0 is integrable; avoid evaluating exactly there
    return I.integrate(lambda u: g(u) if u != 0 else ctx.mpf(0), brk)


def potential_lambda(x, quad_n: int = 8):
    return _log_potential(_MeasureIntegrator("lambda", quad_n), x)


def potential_nu(x, quad_n: int = 8):
    return _log_potential(_MeasureIntegrator("nu", quad_n), x)


def _eq1_value(x, quad_n):
    I = _MeasureIntegrator("lambda", quad_n)
    ctx = I.ctx
    x = ctx.mpf(x)
    if not -1 < x < 1:
        raise ValueError("eq1 lives on the interior of E")
    ux = _half_plane_coordinate(ctx, x)

    def g(t):
        if t == x:
            return ctx.mpf(0)
        u0 = _half_plane_coordinate(ctx, t)
        gF = ctx.log(abs((ux + ctx.conj(u0)) / (ux - u0)))
        return -3 * ctx.log(abs(x - t)) + gF

    return I.integrate(g, [x])


def _eq2_value(x, quad_n):
    I = _MeasureIntegrator("nu", quad_n)
    ctx = I.ctx
    x = ctx.mpf(x)
    if not abs(x) > 1:
        raise ValueError("eq2 lives on the interior of F")
    a = _exterior_map(ctx, x)

    def g(u):
        if u == 0:
            return ctx.log(abs(a))  # g_E(x, infinity); the log kernel's log|u| is handled below
        t = 1 / u
        if t == x:
            return ctx.mpf(0)
        b = _exterior_map(ctx, t)
        return ctx.log(abs((a * ctx.conj(b) - 1) / (a - b)))

    G = I.integrate(g, [1 / x])
    return 3 * _log_potential(I, x) + G + psi(x, I.bits)


def equilibrium_check(which: str, grid, quad_n: int = 8):
    """Values of 3V^lambda + G^lambda_F on E (eq1) or 3V^nu + G^nu_E + psi on F
    (eq2) over ``grid``, and their spread max - min."""
    if which == "eq1":
        vals = [_eq1_value(x, quad_n) for x in grid]
    elif which == "eq2":
        vals = [_eq2_value(x, quad_n) for x in grid]
    else:
        raise ValueError(f"unknown identity {which!r}")
    if not vals:
        raise ValueError("empty grid")
    return vals, max(vals) - min(vals)


def balayage_check(grid_F, quad_n: int = 8, return_values: bool = False):
    """Spread of V^nu - V^lambda over a grid on F."""
    In = _MeasureIntegrator("nu", quad_n)
    Il = _MeasureIntegrator("lambda", quad_n)
    vals = []
    for x in grid_F:
        if not abs(x) > 1:
            raise ValueError("balayage grid must lie in the interior of F")
        vals.append(_log_potential(In, x) - _log_potential(Il, x))
    if not vals:
        raise ValueError("empty grid")
    spread = max(vals) - min(vals)
    return (vals, spread) if return_values else spread


def equilibrium_csv(which: str, grid, quad_n: int = 8) -> str:
    vals, _ = equilibrium_check(which, grid, quad_n)
    out = io.StringIO()
    wr = csv.writer(out)
    wr.writerow(["x", "value"])
    ctx = _ctx()
    for x, v in zip(grid, vals):
        wr.writerow([ctx.nstr(ctx.mpf(x), 15), ctx.nstr(v, 15)])
    return out.getvalue()


# -- Pade g-function ---------------------------------------------------------------

def stahl_g(f: SemiclassicalFn, z, precision_bits: int = WORK_BITS):
    """Re int_a^z dt / sqrt((t-a)(t-b)) for the two branch points a, b of f.

    The affine map onto [-1, 1] reduces it to Re int dt/sqrt(t^2-1), which
    is integrated numerically from the nearer of +-1 and checked against
    log|w + sqrt(w^2 - 1)| = g_E(w, infinity).
    """
    if f.p != 2:
        raise ValueError("stahl_g needs two branch points")
    ctx = _ctx(precision_bits)
    a, b = (_num(ctx, c) for c in f.branch_points)
    if ctx.im(a) != 0 or ctx.im(b) != 0:
        raise ValueError("branch points must be real")
    a, b = sorted((ctx.re(a), ctx.re(b)))
    w = (2 * ctx.mpmathify(z) - a - b) / (b - a)
    w = ctx.mpc(w)
    if abs(ctx.im(w)) <= _boundary_tol(ctx) and abs(ctx.re(w)) <= 1:
        if abs(abs(ctx.re(w)) - 1) <= _boundary_tol(ctx):
            return ctx.mpf(0)
        raise OnBoundary("z lies on the cut")
    base = ctx.mpf(1) if ctx.re(w) >= 0 else ctx.mpf(-1)
    dw = w - base

    root_dw = ctx.sqrt(dw)

    def integrand(s):
        # t = base + s^2 dw: sqrt(t - base) = s sqrt(dw) cancels the 2 s dw
        t = base + s * s * dw
        return 2 * root_dw / ctx.sqrt(t + base)

    val = abs(ctx.re(ctx.quad(integrand, [0, 1])))
    ref = green_E(w, None, precision_bits)
    if abs(val - ref) > ctx.mpf(10) ** -10 * max(1, abs(ref)):
        raise AssertionError(
            f"g-function quadrature {ctx.nstr(val, 15)} disagrees with g_E {ctx.nstr(ref, 15)}"
        )
    return val


# -- closed quadratic differential for p = 3 ---------------------------------------

def _rotated_sqrt(ctx, w, mid_arg):
    """sqrt with its cut on the ray opposite to direction mid_arg."""
    rot = ctx.expj(mid_arg / 2)
    return rot * ctx.sqrt(w / (rot * rot))


def _segment_integrals(ctx, pts, v, j, quad_n):
    """(int_v^{a_j} sqrt((z-v)/A) dz, -1/2 int_v^{a_j} dz/sqrt((z-v)A))
    along the straight segment, with one continuous branch."""
    aj = pts[j]
    d = aj - v
    others = [a for k, a in enumerate(pts) if k != j]
    # for k != j, (z - a_k)/(v - a_k) runs along a line from 1 avoiding 0
    mids = []
    for a in others:
        end = (aj - a) / (v - a)
        mids.append(ctx.arg(end) / 2)
    base = [ctx.sqrt(v - a) for a in others]
    sd = ctx.sqrt(d)
    smd = ctx.sqrt(-d)

    def prod_sqrt(t):
        z = v + t * d
        out = sd / smd  # sqrt(z - v)/sqrt(z - a_j) up to sqrt(t/(1-t))
        for a, m, b in zip(others, mids, base):
            out /= b * _rotated_sqrt(ctx, (z - a) / (v - a), m)
        return out

    def f(t):
        return prod_sqrt(t) * ctx.sqrt(t / (1 - t)) * d

    def fp(t):
        # 1/sqrt((z-v) A) = [sqrt(z-v)/sqrt(z-a_j) prod 1/sqrt(z-a_k)] / (z - v)
        return -prod_sqrt(t) / (ctx.sqrt(t) * ctx.sqrt(1 - t)) / 2

    I = ctx.quad(f, [0, 1], maxdegree=quad_n)
    Ip = ctx.quad(fp, [0, 1], maxdegree=quad_n)
    return I, Ip


@dataclass(frozen=True)
class ClosedV:
    V: Polynomial
    v: object
    residuals: tuple
    certificate: object
    iterations: int

    def to_json(self) -> dict:
        ctx = _ctx()
        return {
            "v": [ctx.nstr(ctx.re(self.v), 30), ctx.nstr(ctx.im(self.v), 30)],
            "residuals": [ctx.nstr(r, 5) for r in self.residuals],
            "certificate": ctx.nstr(self.certificate, 5),
            "iterations": self.iterations,
        }


def find_closed_V(f: SemiclassicalFn, v0=None, quad_n: int = 8, tol=None,
                  max_iter: int = 50, precision_bits: int = WORK_BITS) -> ClosedV:
    """V = z - v making -(V/A) dz^2 closed, for three branch points.

    Newton on Re int_v^{a_j} sqrt(V/A) dz = 0 for j = 1, 2 (straight segments);
    the j = 3 period is returned as an independent certificate.  The start
    v0 defaults to the centroid of the branch points.
    """
    if f.p != 3:
        raise ValueError("find_closed_V needs p = 3")
    ctx = _ctx(precision_bits)
    pts = [ctx.mpc(_num(ctx, a)) for a in f.branch_points]
    v = ctx.mpc(sum(pts) / 3) if v0 is None else ctx.mpc(v0)
    if tol is None:
        tol = ctx.mpf(10) ** -20
    scale = max(abs(a - b) for a in pts for b in pts)
    for it in range(1, max_iter + 1):
        if any(abs(v - a) < scale * ctx.mpf(10) ** -12 for a in pts):
            raise NewtonDivergence("Newton iterate hit a branch point")
        (I1, D1), (I2, D2) = (_segment_integrals(ctx, pts, v, j, quad_n) for j in (0, 1))
        F = (ctx.re(I1), ctx.re(I2))
        J = ctx.matrix([[ctx.re(D1), -ctx.im(D1)], [ctx.re(D2), -ctx.im(D2)]])
        try:
            step = ctx.lu_solve(J, ctx.matrix([-F[0], -F[1]]))
        except ZeroDivisionError as exc:
            raise NewtonDivergence("singular Jacobian") from exc
        dv = ctx.mpc(step[0], step[1])
        # damp steps that would jump further than the configuration size
        if abs(dv) > scale:
            dv *= scale / abs(dv)
        v += dv
        if abs(dv) < tol * scale:
            break
    else:
        raise NewtonDivergence(f"no convergence in {max_iter} iterations from the centroid")
    res = tuple(abs(ctx.re(_segment_integrals(ctx, pts, v, j, quad_n)[0])) for j in range(3))
    V = Polynomial([-v, ctx.mpc(1)], BigComplex(precision_bits))
    return ClosedV(V=V, v=v, residuals=res[:2], certificate=res[2], iterations=it)


def sqrt_V_over_A(V: Polynomial, A: Polynomial, z, precision_bits: int = WORK_BITS, steps: int = 64):
    """sqrt(V/A)(z) on the branch with z sqrt(V/A) -> 1 at infinity, continued
    radially inward from |z| = R with R beyond every root of A and V."""
    ctx = _ctx(precision_bits)
    z = ctx.mpc(ctx.mpmathify(z))

    def ev(p, w):
        acc = ctx.mpc(0)
        for c in reversed(p.coeffs):
            acc = acc * w + _num(ctx, c)
        return acc

    R = 4 * (1 + max(abs(_num(ctx, c)) for c in list(A.coeffs) + list(V.coeffs))) + abs(z)
    direction = z / abs(z) if z != 0 else ctx.mpc(1)
    start = direction * R
    s = ctx.sqrt(ev(V, start) / ev(A, start))
    if ctx.re(start * s) < 0:
        s = -s
    r0, r1 = R, abs(z)
    for k in range(1, steps + 1):
        w = direction * (r0 + (r1 - r0) * ctx.mpf(k) / steps)
        c = ctx.sqrt(ev(V, w) / ev(A, w))
        s = c if abs(c - s) <= abs(c + s) else -c
    return s
