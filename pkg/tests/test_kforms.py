from fractions import Fraction

from hypothesis import given, strategies as st

from epsdr.kforms import AbsForm, KForm, dlog_class_test, res_wedge, witness_associate
from epsdr.laurent import Laurent
from epsdr.scalars import QQX, RatFunc

from strategies import rationals

X = QQX.gen()


def lq(d):
    return Laurent.from_dict(QQX, d)


def test_res_wedge_examples():
    a = AbsForm.dx(lq({-1: 1}))
    # t^-2 has no residue
    assert res_wedge(a, AbsForm.dt(lq({-1: 1}))).is_zero()
    assert res_wedge(a, AbsForm.dt(lq({0: 1}))) == KForm(1)
    f = lq({-2: X, 1: 3})
    assert res_wedge(AbsForm.dt(f), AbsForm.dt(f)).is_zero()


def test_dlog_examples():
    r = dlog_class_test(KForm(2 / X))
    assert r.is_dlog and witness_associate(r.witness, X ** 2)
    assert not dlog_class_test(KForm(1 / X ** 2)).is_dlog
    assert not dlog_class_test(KForm(Fraction(1, 2) / X)).is_dlog
    assert not dlog_class_test(KForm(X)).is_dlog


IRREDUCIBLES = [X, X + 1, X - 2, X ** 2 + 1, X ** 2 - 3, 2 * X + 3]


@st.composite
def witnesses(draw):
    h = RatFunc(draw(st.sampled_from([1, -2, Fraction(3, 5)])))
    for _ in range(draw(st.integers(0, 4))):
        h = h * draw(st.sampled_from(IRREDUCIBLES)) ** draw(st.integers(-3, 3))
    return h


@given(witnesses())
def test_dlog_of_product_is_detected(h):
    r = dlog_class_test(KForm.dlog(h))
    assert r.is_dlog and witness_associate(r.witness, h)


@given(witnesses(), witnesses())
def test_dlog_sum_has_product_witness(h1, h2):
    r = dlog_class_test(KForm.dlog(h1) + KForm.dlog(h2))
    assert r.is_dlog and witness_associate(r.witness, h1 * h2)


@st.composite
def abs_forms(draw):
    def series():
        return lq({k: draw(rationals) * X ** draw(st.integers(0, 2)) for k in range(-3, 2)})
    return AbsForm(series(), series())


@given(abs_forms(), abs_forms(), abs_forms(), rationals)
def test_res_wedge_bilinear_alternating(a, b, c, q):
    assert res_wedge(a, a).is_zero()
    assert res_wedge(a, b) == -res_wedge(b, a)
    scaled = AbsForm(b.a_t * q + c.a_t, b.a_x * q + c.a_x)
    assert res_wedge(a, scaled) == res_wedge(a, b) * q + res_wedge(a, c)
