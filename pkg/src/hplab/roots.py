"""Polynomial roots by Aberth-Ehrlich simultaneous iteration."""
from __future__ import annotations

from .errors import NonConvergence
from .poly import Polynomial
from .regime import BigComplex


def _coeffs_in(ctx, p: Polynomial):
    out = []
    for c in p.coeffs:
        if hasattr(c, "numerator") and hasattr(c, "denominator") and not hasattr(c, "imag"):
            out.append(ctx.mpf(c.numerator) / c.denominator)
        else:
            out.append(ctx.mpmathify(c))
    return out


def _eval_with_derivative(cs, z):
    p = cs[-1]
    dp = 0
    for c in reversed(cs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def polynomial_roots(p: Polynomial, precision_bits: int | None = None, max_iter: int = 500):
    """All complex roots of p, refined to the working precision.

    Aberth-Ehrlich updates z_i -= N_i / (1 - N_i sum_j 1/(z_i - z_j)) with
    N_i = p(z_i)/p'(z_i), started on a circle, stopping each root once p(z_i)
    is at the level of its rounding error; a final Newton step polishes.
    """
    if p.degree < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if precision_bits is None:
        precision_bits = p.regime.precision_bits if not p.regime.exact else BigComplex().precision_bits
    ctx = BigComplex(precision_bits).ctx
    cs = _coeffs_in(ctx, p)
    lead = cs[-1]
    cs = [c / lead for c in cs]
    # exact roots at the origin are split off first
    zeros = 0
    while cs[zeros] == 0:
        zeros += 1
    cs = cs[zeros:]
    d = len(cs) - 1
    if d == 0:
        return [ctx.mpc(0)] * zeros
    if d == 1:
        return [-cs[0]] + [ctx.mpc(0)] * zeros
    radius = 1 + max(abs(c) for c in cs[:-1])
    # start radius: geometric mean of the root moduli, capped by the Cauchy bound
    r0 = abs(cs[0]) ** (ctx.mpf(1) / d) if cs[0] != 0 else ctx.mpf(1) / 2
    r0 = min(r0, radius)
    zs = [r0 * ctx.expj(2 * ctx.pi * k / d + ctx.mpf("0.4")) for k in range(d)]
    eps = ctx.mpf(2) ** (-precision_bits)
    abs_cs = [abs(c) for c in cs]
    done = [False] * d
    for _ in range(max_iter):
        for i in range(d):
            if done[i]:
                continue
            pz, dpz = _eval_with_derivative(cs, zs[i])
            # stop once |p(z)| is at the level of its own rounding error
            bound = _eval_with_derivative(abs_cs, abs(zs[i]))[0] * eps * 4 * d
            if abs(pz) <= bound:
                done[i] = True
                continue
            ratio = pz / dpz if dpz != 0 else pz
            s = sum(1 / (zs[i] - zs[j]) for j in range(d) if j != i)
            step = ratio / (1 - ratio * s)
            zs[i] -= step
            # clustered roots converge slowly; stop once the steps stall
            if abs(step) <= 4 * eps * abs(zs[i]):
                done[i] = True
        if all(done):
            break
    else:
        raise NonConvergence(f"Aberth iteration did not settle in {max_iter} sweeps")
    out = []
    for z in zs:
        pz, dpz = _eval_with_derivative(cs, z)
        if dpz != 0:
            z = z - pz / dpz
        out.append(z)
    return out + [ctx.mpc(0)] * zeros


def root_residuals(p: Polynomial, roots, precision_bits: int | None = None):
    """Backward errors |p(r)| / sum_k |c_k| |r|^k of the given roots.

    The denominator is the natural size of p near r; for |r| <= 1 it is
    within a factor deg p + 1 of the coefficient norm.
    """
    if precision_bits is None:
        precision_bits = p.regime.precision_bits if not p.regime.exact else BigComplex().precision_bits
    ctx = BigComplex(precision_bits).ctx
    cs = _coeffs_in(ctx, p)
    abs_cs = [abs(c) for c in cs]
    out = []
    for r in roots:
        num = abs(_eval_with_derivative(cs, r)[0])
        den = _eval_with_derivative(abs_cs, abs(r))[0]
        out.append(num / den if den != 0 else num)
    return out


def count_sign_changes_real(p: Polynomial, a, b, ctx, samples: int = 0):
    """Sturm-free check of real roots: sign changes of p on a point list."""
    pts = a if samples == 0 else [a + (b - a) * k / samples for k in range(samples + 1)]
    cs = _coeffs_in(ctx, p)
    vals = [_eval_with_derivative(cs, ctx.mpf(x))[0] for x in pts]
    signs = [v > 0 for v in vals if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def certify_real_roots(p: Polynomial, roots, precision_bits: int | None = None, width=None):
    """Confirm each root is real by a sign change of p across [r - w, r + w].

    Returns the real parts sorted.  Raises ValueError naming the first root
    without a bracketing sign change.
    """
    if precision_bits is None:
        precision_bits = BigComplex().precision_bits
    ctx = BigComplex(precision_bits).ctx
    cs = _coeffs_in(ctx, p)
    xs = sorted(ctx.re(r) for r in roots)
    if width is None:
        width = ctx.mpf(10) ** (-(ctx.dps // 3))
    for i, x in enumerate(xs):
        # keep the bracket inside the gap to the neighbouring roots
        w = width
        if i > 0:
            w = min(w, (x - xs[i - 1]) / 3)
        if i + 1 < len(xs):
            w = min(w, (xs[i + 1] - x) / 3)
        lo = _eval_with_derivative(cs, x - w)[0]
        hi = _eval_with_derivative(cs, x + w)[0]
        if ctx.im(lo) != 0 or ctx.im(hi) != 0:
            lo, hi = ctx.re(lo), ctx.re(hi)
        if w <= 0 or (lo > 0) == (hi > 0):
            raise ValueError(f"root near {ctx.nstr(x, 20)} has no bracketing sign change")
    return xs
