from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from epsdr.errors import DomainViolation, UnsupportedLocalType
from epsdr.globalcurve import (INF, GlobalFamily, TRat, UFun, derham, gm_det_class, local_nu,
                               product_formula_check, ufun_matrix)
from epsdr.kforms import KForm, witness_associate
from epsdr.laurent import Laurent
from epsdr.scalars import QQX, RatFunc
from epsdr.suites import product_battery

X = QQX.gen()
P = (Fraction(0),)


def fam(at, ax, punctures=P):
    return GlobalFamily(punctures, ufun_matrix(at, punctures), None if ax is None else ufun_matrix(ax, punctures))


T = TRat.t(P)
ZERO = TRat.const(0, P)
XS = TRat.const(X, P)
IRREGULAR = fam([[XS * T ** -2]], [[-(T ** -1)]])  # d - dx/t + x dt/t^2
KUMMER = fam([[XS * T ** -1]], None)
TRIVIAL = fam([[ZERO]], [[ZERO]])


def test_kummer_has_no_cohomology():
    s = derham(KUMMER)
    assert (s.h0, s.h1) == (0, 0)
    assert gm_det_class(KUMMER).is_zero()


def test_irregular_family_cohomology():
    s = derham(IRREGULAR)
    assert (s.h0, s.h1) == (0, 1)
    assert s.euler_poincare["ok"] and s.euler_poincare["expected"] == 1
    # [dt/t] = -[dt]/x, so d/dx acts on [dt] by 1/x
    assert gm_det_class(IRREGULAR, s) == KForm(1 / X)


def test_trivial_family_cohomology():
    s = derham(TRIVIAL)
    assert (s.h0, s.h1) == (1, 1)
    assert gm_det_class(TRIVIAL, s).is_zero()


def test_flatness_of_families():
    assert IRREGULAR.is_flat()
    assert not fam([[XS * T ** -2]], [[T ** -1]]).is_flat()


def test_local_expansions():
    at0 = IRREGULAR.local_at(Fraction(0), 8)
    assert at0.a_t[0][0].agrees(Laurent.from_dict(QQX, {-2: X}))
    # t = 1/s, dt = -ds/s^2: x dt/t^2 becomes -x ds and -dx/t becomes -s dx
    inf = IRREGULAR.local_at(INF, 8)
    assert inf.a_t[0][0].agrees(Laurent.const(QQX, -X))
    assert inf.a_x[0][0].agrees(Laurent.from_dict(QQX, {1: -1}))
    one = (Fraction(1),)
    at1 = fam([[TRat.const(1, one) / (TRat.t(one) - TRat.const(1, one))]], None, one).local_at(Fraction(1), 8)
    assert at1.a_t[0][0].agrees(Laurent.from_dict(QQX, {-1: 1}))


def test_local_nu_at_infinity():
    # dt = -ds/s^2 and dt/t = -ds/s
    nu = local_nu(UFun.const(1), INF, 8)
    assert nu.ell == -2 and nu.u.coeff(0) == -1
    nu = local_nu(UFun.pole(Fraction(0), 1), INF, 8)
    assert nu.ell == -1 and nu.u.coeff(0) == -1


def test_product_formula_examples():
    rep = product_formula_check(IRREGULAR, UFun.const(1))
    assert rep.passed
    assert rep.lhs == KForm(-1 / X) and rep.rhs == KForm(1 / X)
    assert witness_associate(rep.witness, RatFunc.x() ** -2)
    assert rep.degree_sum == rep.h1 - rep.h0 == 1
    for f in (KUMMER, TRIVIAL):
        rep = product_formula_check(f, UFun.pole(Fraction(0), 1))
        assert rep.passed and rep.lhs.is_zero() and rep.rhs.is_zero()


@pytest.mark.parametrize("case", product_battery(), ids=lambda c: c[0][:5])
def test_battery(case):
    label, f, phi, expect = case
    rep = product_formula_check(f, phi)
    assert rep.passed and rep.euler_poincare_ok
    if expect is not None:
        assert witness_associate(rep.witness, expect)


def test_gauge_requires_inverse():
    g = [[UFun.const(X)]]
    with pytest.raises(DomainViolation):
        IRREGULAR.gauge(g, [[UFun.const(1)]])


def test_negative_t_power_is_a_pole_at_zero():
    assert UFun.t_power(-2) == UFun.pole(Fraction(0), 2)
    assert (UFun.t_power(-1) * UFun.t_power(1)) == UFun.const(1)


# gauges that keep every local connection admissible or regular singular
entries = st.sampled_from([UFun.const(1), UFun.const(X), UFun.t_power(-1),
                           UFun.t_power(-1) * UFun.const(X), UFun.t_power(-1) * UFun.const(1 + X)])


def test_gauge_leaving_supported_types_is_reported():
    # G = [[1, t], [0, 1]] has a pole at infinity; there the gauged matrix leads
    # with a nilpotent s^-2 term, which neither local formula covers
    _, f, phi, _ = product_battery()[3]
    g = [[UFun.const(1), UFun.t_power(1)], [UFun.const(0), UFun.const(1)]]
    ginv = [[UFun.const(1), -UFun.t_power(1)], [UFun.const(0), UFun.const(1)]]
    with pytest.raises(UnsupportedLocalType):
        product_formula_check(f.gauge(g, ginv), phi)


@settings(max_examples=10)
@given(st.integers(0, 3), entries, st.sampled_from([1, -2, Fraction(1, 3)]))
def test_product_formula_survives_gauge(which, entry, scale):
    _, f, phi, _ = product_battery()[which]
    if f.rank == 1:
        # constant determinant: a nonzero element of Q(x)
        c = RatFunc(scale) * (RatFunc.x() if isinstance(scale, int) else 1)
        g, ginv = [[UFun.const(c)]], [[UFun.const(1 / c)]]
    else:
        g = [[UFun.const(1), entry], [UFun.const(0), UFun.const(1)]]
        ginv = [[UFun.const(1), -entry], [UFun.const(0), UFun.const(1)]]
    moved = f.gauge(g, ginv)
    assert moved.is_flat()
    assert product_formula_check(moved, phi).passed
