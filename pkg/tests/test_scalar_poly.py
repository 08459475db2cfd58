from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hplab.errors import NonPolynomialTail, RegimeMismatch, TruncationTooShort
from hplab.laurent import LaurentTail, laurent_arith, poly_from_tail
from hplab.linalg import nullspace_exact, nullspace_float
from hplab.poly import Polynomial, RationalFunction, poly_arith, poly_gcd
from hplab.regime import EXACT, BigComplex

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(fracs, min_size=0, max_size=6).map(Polynomial)


def P(*cs):
    return Polynomial([Fraction(c) for c in cs])


# -- polynomials -------------------------------------------------------------------

def test_derive():
    assert poly_arith(P(-1, 0, 1), None, "derive") == P(0, 2)


def test_mul():
    assert poly_arith(P(-1, 1), P(1, 1), "mul") == P(-1, 0, 1)


def test_divmod_by_hand():
    q, r = poly_arith(P(0, 0, 0, 1), P(-1, 0, 1), "divmod")
    assert q == P(0, 1) and r == P(0, 1)


def test_zero_polynomial_degree():
    assert Polynomial().degree == -1 and Polynomial([0, 0]).is_zero()


def test_regime_mismatch():
    with pytest.raises(RegimeMismatch):
        poly_arith(P(1, 1), Polynomial([1, 1], BigComplex(128)), "add")


@given(polys, polys)
def test_divmod_identity(a, b):
    if b.is_zero():
        return
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(polys, polys)
def test_product_rule(a, b):
    assert (a * b).derive() == a.derive() * b + a * b.derive()


@given(polys, polys)
def test_gcd_divides(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = poly_gcd(a, b)
    assert a.divmod(g)[1].is_zero() and b.divmod(g)[1].is_zero()


def test_rational_function_reduced():
    r = RationalFunction(P(-1, 0, 1), P(-1, 1))
    assert r.num == P(1, 1) and r.den == P(1)
    assert RationalFunction(P()).is_zero()


# -- Laurent tails ---------------------------------------------------------------

def test_laurent_mul():
    out = laurent_arith(LaurentTail([1, -1, 0, 0]), LaurentTail([1, 1, 0, 0]), "mul")
    assert out.coeffs == (1, 0, -1, 0)


def test_laurent_reciprocal_geometric():
    assert laurent_arith(LaurentTail([1, -1, 0, 0, 0]), None, "reciprocal").coeffs == (1, 1, 1, 1, 1)


def test_laurent_derive():
    # differentiation gains one order of truncation
    out = laurent_arith(LaurentTail([0, 1, 0, 0]), None, "derive")
    assert out.coeffs == (0, 0, -1, 0, 0) and out.order == 4


def test_poly_from_tail_exact():
    t = LaurentTail([0, 0, 0], polynomial_part=P(0, 1))
    assert poly_from_tail(t) == P(0, 1)


def test_poly_from_tail_tolerance():
    reg = BigComplex(256)
    tiny = reg.ctx.mpf(10) ** -40
    t = LaurentTail([-1, tiny], polynomial_part=Polynomial([0, 0, 1], reg), regime=reg)
    p = poly_from_tail(t, reg.ctx.mpf(10) ** -30)
    assert p.degree == 2 and abs(p[0] + 1) < 1e-70 and abs(p[2] - 1) < 1e-70


def test_poly_from_tail_rejects():
    reg = BigComplex(256)
    t = LaurentTail([1, reg.ctx.mpf(0.5)], regime=reg)
    with pytest.raises(NonPolynomialTail):
        poly_from_tail(t, reg.ctx.mpf(10) ** -30)


def test_negative_order():
    with pytest.raises(TruncationTooShort):
        LaurentTail([], order=-1)


tails = st.lists(fracs, min_size=6, max_size=6)


def _convolve(a, b, M):
    return [sum(a[i] * b[m - i] for i in range(m + 1)) for m in range(M + 1)]


@given(tails, tails)
def test_mul_matches_convolution(a, b):
    got = (LaurentTail(a) * LaurentTail(b)).coeffs
    assert list(got) == _convolve(a, b, 5)


@given(tails, tails)
def test_add_matches_termwise(a, b):
    assert list((LaurentTail(a) + LaurentTail(b)).coeffs) == [x + y for x, y in zip(a, b)]


@given(tails)
def test_reciprocal_roundtrip(a):
    if a[0] == 0:
        return
    t = LaurentTail(a)
    assert (t * t.reciprocal()).coeffs == (1, 0, 0, 0, 0, 0)
    assert t.reciprocal().reciprocal().coeffs == t.coeffs


def test_exact_bit_identical():
    t = LaurentTail([1, Fraction(-2, 3), Fraction(5, 7), 0, 3]).reciprocal()
    assert repr(t.coeffs) == repr(LaurentTail([1, Fraction(-2, 3), Fraction(5, 7), 0, 3]).reciprocal().coeffs)


# -- linear algebra --------------------------------------------------------------

def test_nullspace_exact_simple():
    basis = nullspace_exact([[1, 1, 1], [0, 1, 2]])
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] + v[2] == 0 and v[1] + 2 * v[2] == 0


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=3))
def test_nullspace_exact_annihilates(rows):
    basis = nullspace_exact(rows, 4)
    rank = 4 - len(basis)
    assert rank <= len(rows)
    for v in basis:
        assert all(sum(Fraction(r[j]) * v[j] for j in range(4)) == 0 for r in rows)


def test_nullspace_float_matches_exact():
    reg = BigComplex(128)
    rows = [[reg.coerce(x) for x in r] for r in ([1, 2, 3], [2, 4, 7])]
    basis, _ = nullspace_float(rows, 3, reg.ctx)
    assert len(basis) == 1
    v = basis[0]
    ratio = v[0] / v[1]
    assert abs(ratio + 2) < 1e-30 and abs(v[2] / v[1]) < 1e-30


def test_exact_regime_rejects_float():
    with pytest.raises(TypeError):
        EXACT.coerce(0.5)
