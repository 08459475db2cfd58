from __future__ import annotations

import functools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hplab.errors import NewtonDivergence, OnBoundary
from hplab.potential import (PotentialKernel, balayage_check, equilibrium_check, equilibrium_csv,
                             find_closed_V, green_E, green_F, psi, sqrt_V_over_A, stahl_g)
from hplab.regime import BigComplex
from hplab.semiclassical import SemiclassicalFn, from_json, two_point

M = mpmath.MPContext()
M.prec = 192

# points off [-1, 1] and off F = R \ (-1, 1)
off_E = st.tuples(st.floats(-3, 3), st.floats(0.05, 3)).map(lambda t: complex(t[0], t[1]))
in_omega = st.tuples(st.floats(-0.95, 0.95), st.floats(-2, 2)).map(lambda t: complex(*t))


def test_green_E_at_infinity():
    assert abs(green_E(Fraction(5, 4)) - M.log(2)) < 1e-50


def test_psi():
    assert abs(psi(Fraction(5, 4)) - 3 * M.log(2)) < 1e-50


def test_green_E_boundary_limit():
    assert green_E(1 + 1e-12) < 1e-5
    with pytest.raises(OnBoundary):
        green_E(Fraction(1, 2))


@given(off_E, off_E)
def test_green_E_symmetric(z, t):
    if abs(z - t) < 1e-3:
        return
    assert abs(green_E(z, t) - green_E(t, z)) < 1e-40
    assert green_E(z, t) > 0


@given(in_omega, in_omega)
def test_green_F_symmetric(z, t):
    if abs(z - t) < 1e-3:
        return
    assert abs(green_F(z, t) - green_F(t, z)) < 1e-10
    assert green_F(z, t) >= 0


def test_green_F_pole():
    vals = [green_F(0, M.mpf(10) ** -k) for k in (2, 4, 8)]
    assert vals[0] < vals[1] < vals[2]
    assert abs(vals[2] - vals[1] - 4 * M.log(10)) < 1e-3


def test_green_F_vanishes_on_F():
    assert green_F(2 + 1e-12j, 0.5j) < 1e-6
    with pytest.raises(OnBoundary):
        green_F(3, 0.5j)


@pytest.mark.parametrize("z0", [0.3 + 0.2j, -0.4 - 0.7j, 0.1 + 1.5j])
def test_green_F_harmonic(z0):
    h = M.mpf(10) ** -4
    t = 0.5j
    lap = sum(green_F(z0 + d, t) for d in (h, -h, 1j * h, -1j * h)) - 4 * green_F(z0, t)
    assert abs(lap) / h ** 2 < 1e-6


def test_kernel_dispatch():
    k = PotentialKernel("green_E")
    assert abs(k.evaluate(2, 3) - green_E(2, 3)) < 1e-40
    assert abs(PotentialKernel("log").evaluate(1, 3) - M.log(0.5)) < 1e-40


def test_equilibrium_eq1():
    vals, spread = equilibrium_check("eq1", [M.mpf(-0.5), M.mpf(0), M.mpf(0.5)])
    assert spread < 1e-6


def test_equilibrium_eq2():
    vals, spread = equilibrium_check("eq2", [M.mpf(1.5), M.mpf(2), M.mpf(3)])
    assert spread < 1e-6


def test_equilibrium_constants_match():
    # both identities produce the same constant, about 2.8643137573
    v1, _ = equilibrium_check("eq1", [M.mpf(0)])
    v2, _ = equilibrium_check("eq2", [M.mpf(2)])
    assert abs(v1[0] - M.mpf("2.864313757326657683")) < 1e-15
    assert abs(v2[0] - v1[0]) < 1e-15


def test_equilibrium_single_point():
    assert equilibrium_check("eq1", [M.mpf(0.2)])[1] == 0


def test_balayage():
    assert balayage_check([M.mpf(1.5), M.mpf(2), M.mpf(4)]) < 1e-6
    vals, _ = balayage_check([M.mpf(2), M.mpf(-2)], return_values=True)
    assert abs(vals[0] - vals[1]) < 1e-20
    assert balayage_check([M.mpf(3)]) == 0


def test_equilibrium_csv():
    text = equilibrium_csv("eq1", [M.mpf(0), M.mpf(0.5)])
    assert len(text.strip().splitlines()) == 3


# -- Stahl g-function -----------------------------------------------------------------

def test_stahl_g_values():
    f = two_point(Fraction(1, 3))
    assert abs(stahl_g(f, Fraction(5, 4)) - M.log(2)) < 1e-40
    assert stahl_g(f, 1) == 0
    y = M.mpf(10) ** 6
    assert abs(stahl_g(f, 1j * y) - M.log(2 * y)) < 1e-10


@given(off_E)
def test_stahl_g_matches_green(z):
    f = two_point(Fraction(1, 4))
    assert abs(stahl_g(f, z) - green_E(z)) < 1e-10


# -- closed quadratic differential, p = 3 ----------------------------------------------------

@functools.lru_cache(maxsize=None)
def asymmetric():
    f = from_json({"branch_points": ["-1", "1", "2*i"], "exponents": ["1/4", "1/4", "-1/2"]})
    return f, find_closed_V(f)


def test_closed_V_symmetric():
    reg = BigComplex(256)
    w = reg.ctx.expj(2 * reg.ctx.pi / 3)
    f = SemiclassicalFn((1, w, reg.ctx.conj(w)), (Fraction(1, 3), Fraction(1, 3), Fraction(-2, 3)), reg)
    assert f.A.coeffs[1] == 0 or abs(f.A.coeffs[1]) < 1e-60
    res = find_closed_V(f)
    assert abs(res.v) < 1e-10


def test_closed_V_asymmetric():
    f, res = asymmetric()
    assert res.certificate < 1e-12
    assert abs(res.v - M.mpc(0, "0.608239736766866390736")) < 1e-18
    again = find_closed_V(f, quad_n=10)
    assert abs(again.v - res.v) < 1e-8


def test_closed_V_near_merge():
    # 1 and 1 + i/100 nearly merge: v sits next to the pair (p = 2 limit)
    f = from_json({"branch_points": ["-1", "1", "1+1/100*i"], "exponents": ["1/4", "1/4", "-1/2"]})
    res = find_closed_V(f)
    assert abs(res.v - 1) < 1e-2
    assert res.certificate < 1e-10


def test_closed_V_collinear_degenerates():
    # for collinear points the closed differential has V = z - a_2, a branch point
    f = from_json({"branch_points": ["-1", "1", "101/100"], "exponents": ["1/4", "1/4", "-1/2"]})
    with pytest.raises(NewtonDivergence):
        find_closed_V(f, v0=1)


def test_sqrt_V_over_A_normalized():
    f, res = asymmetric()
    z = M.mpc(1e6, 1e6)
    assert abs(z * sqrt_V_over_A(res.V, f.A, z) - 1) < 1e-5
