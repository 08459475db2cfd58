from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import hp_sol
from hplab.errors import OrderMismatch
from hplab.hp import hp_solve, pade_solve
from hplab.ode import (DERIVED, PRINTED, QuasiSolution, build_ode_p2_s2, build_ode_pade, extract_ode_wronskian,
                       hp_residuals, ode_residual, pade_ode, riccati_reduce, riccati_residual, structure_audit,
                       verify_p2_s2, wronskian_order)
from hplab.poly import Polynomial, RationalFunction
from hplab.semiclassical import from_json, power_tails, two_point

F = Fraction
alphas = st.fractions(min_value=F(-5, 12), max_value=F(5, 12), max_denominator=12).filter(
    lambda a: a != 0 and (2 * a).denominator != 1)


def P(*cs):
    return Polynomial([F(c) for c in cs])


def extracted(alpha, s, n):
    sys = power_tails(two_point(alpha), s, wronskian_order(s, n, 2))
    return extract_ode_wronskian(sys, hp_solve(sys, n))


# -- explicit p = 2, s = 2 equation ------------------------------------------------

def test_printed_coefficients():
    ode = build_ode_p2_s2(F(1, 3), 2)
    pi0, pi1, pi2, pi3 = ode.coeffs
    assert pi1 == P(F(80, 9), -4, -12)
    assert pi0 == P(F(20, 3), 12)


@given(alphas, st.integers(0, 10), st.sampled_from([PRINTED, DERIVED]))
def test_top_coefficients(alpha, n, constants):
    ode = build_ode_p2_s2(alpha, n, constants=constants)
    A = P(-1, 0, 1)
    assert ode.coeffs[3] == A * A
    assert ode.coeffs[2] == A * P(-alpha, 1) * 6


@given(alphas, st.integers(0, 10))
def test_flip_negates_alpha(alpha, n):
    assert build_ode_p2_s2(alpha, n, flip=True).coeffs == build_ode_p2_s2(-alpha, n).coeffs


def test_printed_residual_frozen():
    # independent symbolic oracle for alpha = 1/3, n = 2
    res = verify_p2_s2(F(1, 3), 2, PRINTED)
    assert res["Q0"].equals(RationalFunction(P(F(64, 81), F(-80, 3), F(-16, 3))))
    assert not any(r.is_zero() for r in res.values())


@pytest.mark.parametrize("alpha", [F(1, 3), F(1, 4), F(2, 5)])
@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_derived_residuals_vanish(alpha, n):
    res = verify_p2_s2(alpha, n, DERIVED, hp_sol(alpha, 2, n))
    assert all(r.is_zero() for r in res.values())


def test_printed_fails_at_n0():
    # Pi_0 = -16 alpha at n = 0 for the printed equation; w = 1 is not a solution
    ode = build_ode_p2_s2(F(1, 3), 0)
    assert ode.coeffs[0] == P(F(-16, 3))


def test_mirror_residuals():
    a, n = F(1, 4), 4
    direct = verify_p2_s2(a, n, DERIVED)["Q0"]
    mirrored = verify_p2_s2(-a, n, DERIVED)["Q2 (flipped)"]
    assert direct.is_zero() == mirrored.is_zero()


def test_residual_k1_path():
    alpha = F(1, 3)
    sol = hp_sol(alpha, 2, 2)
    ode = build_ode_p2_s2(alpha, 2, constants=DERIVED)
    assert ode_residual(ode, QuasiSolution(sol.Q[1], 1, two_point(alpha))).is_zero()


# -- Pade equation ---------------------------------------------------------------------

def test_pade_ode_p2():
    alpha = F(1, 3)
    ode = build_ode_pade(two_point(alpha), P(1), P(1), 2)
    assert ode.coeffs == (P(-2), P(-2 * alpha, 2), P(-1, 0, 1))


def test_pade_denominator_solves_flipped():
    alpha = F(1, 3)
    f = two_point(alpha)
    Q = pade_solve(f, 1).Q
    assert Q == P(alpha, 1)
    plain = ode_residual(build_ode_pade(f, P(1), P(1), 2), QuasiSolution(Q, 0))
    flipped = ode_residual(build_ode_pade(f, P(1), P(1), 2, flip=True), QuasiSolution(Q, 0))
    assert plain.equals(RationalFunction(P(-4 * alpha)))
    assert flipped.is_zero()


@pytest.mark.parametrize("n", [2, 5, 9])
def test_pade_denominators_jacobi_equation(n):
    alpha = F(1, 4)
    f = two_point(alpha)
    ode = build_ode_pade(f, P(1), P(1), n * (n + 1), flip=True)
    assert ode_residual(ode, QuasiSolution(pade_solve(f, n).Q, 0)).is_zero()


def test_constant_solves_n0():
    f = two_point(F(1, 3))
    ode = build_ode_pade(f, P(1), P(1), 0)
    assert ode_residual(ode, QuasiSolution(P(5), 0)).is_zero()


def test_pade_ode_p3_shape():
    f = from_json({"branch_points": ["-1", "1", "1/2"], "exponents": ["1/4", "1/4", "-1/2"]})
    H = Polynomial([F(-1, 5), 1])
    C = Polynomial([F(1, 7), F(2, 3), 1])
    ode = build_ode_pade(f, H, C, 12)
    assert ode.degrees == (2, 3, 4)
    assert ode.coeffs[2] == f.A * H
    assert ode.coeffs[1] == (f.A.derive() - f.B) * H - f.A * H.derive()
    assert ode.coeffs[0] == C * (-12)


# -- Wronskian extraction ------------------------------------------------------------

@pytest.mark.parametrize("alpha,n", [(F(1, 3), 2), (F(1, 4), 3), (F(2, 5), 4)])
def test_extraction_matches_derived(alpha, n):
    ode = extracted(alpha, 2, n)
    assert ode.proportional_to(build_ode_p2_s2(alpha, n, constants=DERIVED))
    sys = power_tails(two_point(alpha), 2, 8)
    assert all(r.is_zero() for r in hp_residuals(ode, sys, hp_sol(alpha, 2, n)))


def test_extraction_s1_p2():
    alpha = F(1, 3)
    ode = extracted(alpha, 1, 3)
    A = P(-1, 0, 1)
    lead = ode.coeffs[2]
    assert lead.divmod(A)[1].is_zero() and lead.exact_div(A).degree == 0


def test_extraction_s2_p2_top():
    ode = extracted(F(1, 3), 2, 3)
    A = P(-1, 0, 1)
    assert ode.coeffs[3].proportional_to(A * A)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_extracted_degree_bounds(n):
    ode = extracted(F(1, 4), 2, n)
    # p = 2: deg Pi_j <= j + 1 for the s = 2 equation
    assert ode.degrees == (1, 2, 3, 4)


# -- structure audit ---------------------------------------------------------------------

def test_audit_s1():
    alpha = F(1, 3)
    rep = structure_audit(extracted(alpha, 1, 3), two_point(alpha), 1, 3)
    assert rep.H == P(1)
    assert all(rep.checks.values())
    assert extracted(alpha, 1, 3).coeffs[1] == P(-2 * alpha, 2)


def test_audit_s2_leading():
    alpha = F(1, 3)
    ode = extracted(alpha, 2, 3)
    rep = structure_audit(ode, two_point(alpha), 2, 3)
    assert all(rep.checks.values()) and not rep.degenerate
    assert ode.coeffs[1].lc == -30


def test_audit_s2_degenerate_n1():
    alpha = F(1, 3)
    ode = build_ode_p2_s2(alpha, 1, constants=DERIVED)
    rep = structure_audit(ode, two_point(alpha), 2, 1)
    assert rep.degenerate


# -- Riccati ---------------------------------------------------------------------------

def test_riccati_p2():
    alpha, n = F(1, 3), 3
    f = two_point(alpha)
    ode = build_ode_pade(f, P(1), P(1), n * (n + 1), flip=True)
    s_n, r_n = riccati_reduce(ode, n)
    assert r_n.equals(RationalFunction(P(F(-(n + 1), n)), P(-1, 0, 1)))
    Q = pade_solve(f, n).Q
    v = RationalFunction(Q.derive(), Q * n)
    assert riccati_residual(s_n, r_n, v, n).is_zero()


def test_riccati_order_mismatch():
    with pytest.raises(OrderMismatch):
        riccati_reduce(build_ode_p2_s2(F(1, 3), 2), 2)


def test_riccati_limit_rate():
    z = 2j
    f = two_point(F(1, 3))
    errs = []
    for n in (10, 20, 40):
        _, r_n = riccati_reduce(build_ode_pade(f, P(1), P(1), n * (n + 1)), n)
        val = complex(r_n.num(z)) / complex(r_n.den(z))
        errs.append(abs(val + 1 / (z * z - 1)))
    assert errs[0] > errs[1] > errs[2]
    assert all(abs(e * n - 0.2) < 1e-12 for e, n in zip(errs, (10, 20, 40)))


# -- p = 3 -----------------------------------------------------------------------------

def test_p3_extraction_solves():
    f = from_json({"branch_points": ["-1", "1", "1/2*i"], "exponents": ["1/4", "1/4", "-1/2"]})
    ode, sol = pade_ode(f, 6)
    sys = power_tails(f, 1, sol.remainder_tail.order + 10, check=False)
    scale = max(p.norm() for p in ode.coeffs)
    assert all(r.num.norm() / scale < 1e-50 for r in hp_residuals(ode, sys, sol))
    rep = structure_audit(ode, f, 1, 6)
    assert rep.H.degree <= 1 and rep.accessory["C"].degree <= 2
    assert all(rep.checks.values())
