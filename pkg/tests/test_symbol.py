from fractions import Fraction

from hypothesis import assume, given, settings, strategies as st

from epsdr.laurent import Laurent
from epsdr.scalars import QQ, NilRing, inverse
from epsdr.symbol import (SplitRational, cc_symbol, lie_compatibility, lie_expected, residue_pairing,
                          residue_theorem_check, tame_symbol, weil_reciprocity_check)
from epsdr.tate import symbol_oracle

from strategies import NIL3, field_units, nonzero_rationals, rationals, units

N2 = NilRing(QQ, 2)
t = Laurent.gen(QQ)


def L(ring, d):
    return Laurent.from_dict(ring, d)


def test_symbol_examples():
    assert cc_symbol(t, t) == -1
    r = Fraction(7, 3)
    assert cc_symbol(Laurent.const(QQ, r), t) == 1 / r
    assert cc_symbol(t ** 2, t ** 3) == 1


def test_positive_parts_pair_trivially():
    f, g = 1 + t, 1 + 2 * t
    assert cc_symbol(f, g) == 1 == symbol_oracle(f, g)


def test_nilpotent_tail_pairing():
    a, b = Fraction(3), Fraction(-2, 5)
    eps = N2.eps()
    f = L(N2, {0: 1, 1: -a})
    g = L(N2, {0: 1, -1: -b * eps})
    # log(1 - a t) has alpha_1 = -a and log(1 - b eps/t) has beta_1 = -b eps
    assert cc_symbol(f, g) == 1 + a * b * eps == symbol_oracle(f, g)


def test_field_symbol_closed_form():
    u = L(QQ, {0: 3, 1: 1})
    v = L(QQ, {0: Fraction(-1, 2), 2: 5})
    for m in range(-2, 3):
        for n in range(-2, 3):
            value = cc_symbol(t ** m * u, t ** n * v)
            assert value == (-1) ** ((m * n) % 2) * Fraction(3) ** (-n) * Fraction(-1, 2) ** m


def test_residue_pairing_table():
    for m in range(-4, 5):
        for n in range(-4, 5):
            if m == 0 or n == 0:
                continue
            assert residue_pairing(t ** m, t ** n) == (m if m == -n else 0)
    assert residue_pairing(t, t ** -1) == 1
    assert residue_pairing(t ** 2, t) == 0


def test_lie_examples():
    eps = N2.eps()
    assert lie_compatibility(t, t ** -1) == 0
    c = Fraction(5, 2)
    assert lie_compatibility(1 + t, t ** -1 * c) == c * eps
    assert lie_compatibility(t, Laurent.const(QQ, 1)) == eps
    assert lie_expected(t, Laurent.const(QQ, 1)) == eps


def test_reciprocity_examples():
    f = SplitRational(Fraction(1), {Fraction(0): 1})
    g = SplitRational(Fraction(-1), {Fraction(1): 1})  # 1 - t
    assert weil_reciprocity_check(f, g).product == 1
    rep = weil_reciprocity_check(f, f)
    values = dict(rep.per_point)
    assert values[Fraction(0)] == -1 and values["inf"] == -1 and rep.product == 1
    const = SplitRational(Fraction(4), {})
    assert weil_reciprocity_check(const, g).product == 1


def test_residue_theorem_examples():
    f = SplitRational(Fraction(1), {Fraction(0): -1})
    g = SplitRational(Fraction(1), {Fraction(0): 1})
    rep = residue_theorem_check(f, g)
    assert dict(rep.per_point) == {Fraction(0): 1, "inf": -1} and rep.product == 0
    p = SplitRational(Fraction(2), {Fraction(1): 2, Fraction(-3): 1})
    q = SplitRational(Fraction(1), {Fraction(5): 1})
    assert residue_theorem_check(p, q).product == 0
    h = SplitRational(Fraction(1), {Fraction(1): -1})
    assert residue_theorem_check(h, SplitRational(Fraction(1), {Fraction(0): 2})).product == 0


@settings(max_examples=25)
@given(units(NIL3), units(NIL3), units(NIL3))
def test_bimultiplicative_nil(f, g, h):
    assert cc_symbol(f * g, h) == cc_symbol(f, h) * cc_symbol(g, h)
    assert cc_symbol(f, g * h) == cc_symbol(f, g) * cc_symbol(f, h)


@given(field_units(), field_units(), field_units())
def test_bimultiplicative_field(f, g, h):
    assert cc_symbol(f * g, h) == cc_symbol(f, h) * cc_symbol(g, h)


@given(units(NIL3), units(NIL3))
def test_antisymmetry_and_diagonal(f, g):
    assert cc_symbol(f, g) * cc_symbol(g, f) == NIL3.one()
    assert cc_symbol(f, f) == (-1) ** (f.val() % 2)


@given(field_units())
def test_steinberg(f):
    one_minus = 1 - f
    assume(not one_minus.is_zero())
    assert cc_symbol(f, one_minus) == 1


@given(field_units(), field_units())
def test_field_case_is_inverse_tame_symbol(f, g):
    assert cc_symbol(f, g) == inverse(tame_symbol(f, g))


@settings(max_examples=15)
@given(units(NIL3), units(NIL3))
def test_oracle_agrees(f, g):
    assert cc_symbol(f, g) == symbol_oracle(f, g)


@given(st.lists(rationals, min_size=1, max_size=4), nonzero_rationals, rationals, rationals)
def test_norm_formula_linear(tail, c0, a1, a2):
    # f in R[[t]] with unit constant term, g = t - a with a nilpotent:
    # the symbol is f(a)^-1
    eps = NIL3.eps()
    f = L(NIL3, {0: c0, **{k + 1: q for k, q in enumerate(tail)}})
    a = eps * a1 + eps * eps * a2
    g = L(NIL3, {1: 1, 0: -a})
    f_at_a = sum((f.coeff(k) * a ** k for k in range(0, len(tail) + 1)), NIL3.zero())
    assert cc_symbol(f, g) == inverse(f_at_a)
