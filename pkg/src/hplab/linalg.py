"""Nullspaces of dense matrices: fraction-free elimination (exact) and QR (float)."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = int


def _integer_rows(rows):
    out = []
    for r in rows:
        d = 1
        for x in r:
            d = lcm(d, Fraction(x).denominator)
        out.append([mpz((Fraction(x) * d).numerator) for x in r])
    return out


def bareiss_reduce(rows, ncols):
    """Fraction-free Gauss-Jordan elimination of an integer matrix in place.

    Returns ``(pivot_columns, d)`` where ``d`` is the final pivot.  After the
    call, pivot row t has ``d`` at column ``pivot_columns[t]`` and zeros in
    the other pivot columns; every intermediate division is exact because
    entries stay minors of the input.
    """
    prev = mpz(1)
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        pv = pr[c]
        for i in range(nrows):
            if i == r:
                continue
            ri = rows[i]
            f = ri[c]
            if i < r:
                # rows above carry pivot prev; rescale the whole row to pv
                for j in range(ncols):
                    ri[j] = (pv * ri[j] - f * pr[j]) // prev
            elif f == 0:
                for j in range(c + 1, ncols):
                    ri[j] = (pv * ri[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    ri[j] = (pv * ri[j] - f * pr[j]) // prev
                ri[c] = mpz(0)
        prev = pv
        pivots.append(c)
        r += 1
    return pivots, prev


def nullspace_exact(rows, ncols=None):
    """Basis of the rational nullspace; each vector is primitive over Z."""
    if ncols is None:
        ncols = len(rows[0])
    work = _integer_rows(rows)
    pivots, d = bareiss_reduce(work, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        x = [mpz(0)] * ncols
        x[fc] = d
        for t, pc in enumerate(pivots):
            x[pc] = -work[t][fc]
        g = 0
        for v in x:
            g = gcd(g, int(v))
        basis.append([Fraction(int(v) // g) for v in x])
    return basis


def nullspace_float(rows, ncols, ctx, rank_tol=None):
    """Numerical nullspace from a full QR factorization of the adjoint.

    The rank is the number of diagonal entries of R exceeding
    ``rank_tol * max|R_ii|`` (default 10^-(digits/2)).
    """
    if rank_tol is None:
        rank_tol = ctx.mpf(10) ** (-(ctx.dps // 2))
    A = ctx.matrix(len(rows), ncols)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            A[i, j] = v
    Q, R = ctx.qr(A.H, mode="full")
    diag = [abs(R[i, i]) for i in range(min(R.rows, R.cols))]
    top = max(diag) if diag else ctx.mpf(0)
    rank = sum(1 for v in diag if v > rank_tol * top)
    basis = []
    for c in range(rank, ncols):
        basis.append([Q[i, c] for i in range(ncols)])
    return basis, diag
