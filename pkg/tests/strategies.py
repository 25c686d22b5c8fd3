"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from epsdr.laurent import Laurent
from epsdr.scalars import QQ, NilRing, RatFunc

NIL2 = NilRing(QQ, 2)
NIL3 = NilRing(QQ, 3)

small_int = st.integers(-4, 4)
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
nonzero_rationals = rationals.filter(bool)


@st.composite
def ratfuncs(draw, nonzero=False):
    num = draw(st.lists(rationals, min_size=1, max_size=3))
    den = draw(st.lists(rationals, min_size=0, max_size=2)) + [Fraction(1)]
    f = RatFunc.from_coeffs(num, den) if any(den) else RatFunc.from_coeffs(num)
    if nonzero and f.is_zero():
        f = f + 1
    return f


@st.composite
def nil_elements(draw, ring=NIL3):
    c = [draw(rationals) for _ in range(ring.nil_order)]
    eps = ring.eps()
    out = ring.zero()
    power = ring.one()
    for a in c:
        out = out + power * a
        power = power * eps
    return out


@st.composite
def units(draw, ring=QQ, spread=3, tail=True):
    """c t^v (1 + short positive part) plus a nilpotent tail when the ring has one."""
    v = draw(st.integers(-spread, spread))
    terms = {v: draw(nonzero_rationals)}
    for k in range(1, draw(st.integers(1, 3))):
        terms[v + k] = draw(rationals)
    f = Laurent.from_dict(ring, terms)
    if tail and ring.nil_order > 1:
        eps = ring.eps()
        nil = {}
        for k in range(-2, 3):
            if draw(st.booleans()):
                nil[k] = eps * draw(rationals)
        f = f + Laurent.from_dict(ring, nil)
    return f


@st.composite
def field_units(draw, spread=3):
    return draw(units(QQ, spread))
