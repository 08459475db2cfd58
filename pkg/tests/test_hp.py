from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import hp_sol
from hplab.errors import IntegerExponent
from hplab.hp import (clustered_grid, hp_solve, jacobi_crosscheck, jacobi_polynomial, pade_solve, rho_form,
                      rho_zeros, solve_power_system)
from hplab.poly import Polynomial
from hplab.regime import BigComplex
from hplab.semiclassical import power_tails, two_point

alphas = st.fractions(min_value=Fraction(-5, 12), max_value=Fraction(5, 12), max_denominator=12).filter(
    lambda a: a != 0 and (2 * a).denominator != 1)


def P(*cs):
    return Polynomial([Fraction(c) for c in cs])


@pytest.mark.parametrize("alpha", [Fraction(1, 3), Fraction(1, 4), Fraction(-2, 5)])
def test_n0_by_hand(alpha):
    sol = hp_sol(alpha, 2, 0)
    assert sol.Q == (P(1), P(-2), P(1))
    assert sol.remainder_leading == 4 * alpha ** 2
    assert sol.normal and sol.nullspace_dim == 1


def test_s1_n1():
    sol = hp_sol(Fraction(1, 3), 1, 1)
    assert sol.Q[1].monic() == P(Fraction(1, 3), 1)


def test_n2_frozen():
    sol = hp_sol(Fraction(1, 3), 2, 2)
    F = Fraction
    assert sol.Q == (P(F(-85, 27), 2, 1), P(F(86, 27), 0, -2), P(F(-85, 27), -2, 1))


@given(alphas, st.integers(0, 4), st.integers(1, 2))
def test_remainder_order(alpha, n, s):
    sol = solve_power_system(two_point(alpha), s, n)
    R = sol.remainder_tail
    assert all(R.coefficient(e) == 0 for e in range(-(s * n + s - 1), n + 1))


@given(alphas, st.integers(0, 5))
def test_mirror(alpha, n):
    a = solve_power_system(two_point(alpha), 2, n)
    b = solve_power_system(two_point(-alpha), 2, n)
    assert a.Q[2].proportional_to(b.Q[0])
    assert a.Q[1].proportional_to(b.Q[1])


@given(alphas, st.integers(0, 7))
def test_solution_space_one_dimensional(alpha, n):
    sol = solve_power_system(two_point(alpha), 2, n)
    assert sol.nullspace_dim == 1
    assert sol.Q[2].degree == n and sol.Q[2].lc == 1 and sol.Q[0].degree == n
    # Q_{n,1} is even, so it loses one degree at odd n
    assert sol.Q[1].degree == n - n % 2
    assert sol.normal == (n % 2 == 0)


@given(alphas, st.integers(0, 7))
def test_q1_even(alpha, n):
    q = solve_power_system(two_point(alpha), 2, n).Q[1]
    assert q.compose_neg() == q


def test_scaling_invariance():
    sys = power_tails(two_point(Fraction(1, 3)), 2, 14)
    sol = hp_solve(sys, 3)
    lin = sum((t * q for t, q in zip(sys.tails, [q * 7 for q in sol.Q])), start=sys.tails[0] * P(0))
    assert all(lin.coefficient(e) == 0 for e in range(-(2 * 3 + 1), 4))


def test_float_regime_agrees():
    reg = BigComplex(256)
    exact = hp_sol(Fraction(1, 3), 2, 4)
    approx = solve_power_system(two_point(Fraction(1, 3), reg), 2, 4)
    assert approx.normal
    for qe, qa in zip(exact.Q, approx.Q):
        for ce, ca in zip(qe.coeffs, qa.coeffs):
            assert abs(reg.coerce(ce) - ca) < 1e-60


def test_half_integer_alpha():
    with pytest.raises(IntegerExponent):
        solve_power_system(two_point(Fraction(1, 2)), 2, 1)


# -- Pade and Jacobi ---------------------------------------------------------------

def test_pade_n1():
    pp = pade_solve(two_point(Fraction(1, 3)), 1)
    assert pp.Q == P(Fraction(1, 3), 1)
    assert pp.P == P(Fraction(-1, 3), 1)
    R = pp.remainder_tail
    assert R.coefficient(0) == 0 and R.coefficient(-1) == 0 and R.coefficient(-2) != 0


def test_pade_n0():
    pp = pade_solve(two_point(Fraction(1, 3)), 0)
    assert pp.Q.degree == 0 and pp.defect == 0


@pytest.mark.parametrize("n", [1, 5, 12])
def test_pade_no_defect(n):
    pp = pade_solve(two_point(Fraction(1, 3)), n)
    assert pp.defect == 0 and pp.normal


def test_jacobi_closed_form():
    a = Fraction(1, 3)
    assert jacobi_polynomial(a, -a, 1) == P(a, 1)


@pytest.mark.parametrize("alpha,n", [(Fraction(1, 3), 0), (Fraction(1, 3), 1), (Fraction(1, 4), 10)])
def test_jacobi_crosscheck(alpha, n):
    assert jacobi_crosscheck(alpha, n)


def test_jacobi_recurrence_legendre():
    # P_2^(0,0) = (3x^2 - 1)/2
    assert jacobi_polynomial(0, 0, 2) == P(Fraction(-1, 2), 0, Fraction(3, 2))


# -- rho_n -------------------------------------------------------------------------

def test_rho0_at_zero():
    alpha = Fraction(1, 3)
    vals, _ = rho_form(hp_sol(alpha, 2, 0), alpha, [Fraction(0)])
    with mpmath.workdps(80):
        assert abs(vals[0] - (2 * mpmath.cos(mpmath.pi / 3) - 2)) < 1e-60


def test_rho2_at_zero():
    alpha = Fraction(1, 3)
    vals, _ = rho_form(hp_sol(alpha, 2, 2), alpha, [Fraction(0)])
    with mpmath.workdps(80):
        assert abs(vals[0] - mpmath.mpf(1) / 27) < 1e-60


@pytest.mark.parametrize("n", [0, 1, 3, 8, 15])
def test_rho_sign_changes(n):
    alpha = Fraction(1, 3)
    _, changes = rho_form(hp_sol(alpha, 2, n), alpha, clustered_grid(400))
    assert changes >= 2 * n + 1


def test_rho_zeros_are_zeros():
    alpha = Fraction(1, 4)
    sol = hp_sol(alpha, 2, 6)
    zs = rho_zeros(sol, alpha)
    assert len(zs) >= 13
    vals, _ = rho_form(sol, alpha, zs)
    assert max(abs(v) for v in vals) < 1e-25
    assert all(-1 < z < 1 for z in zs)
