"""Exact scalars: rationals, the rational function field Q(x), and truncated
nilpotent extensions B[eps]/(eps^N).

Rationals are `fractions.Fraction`.  Elements of Q(x) are `RatFunc`, stored as
a reduced quotient of flint polynomials with monic denominator.  Elements of
B[eps]/(eps^N) are `Nil`, a coefficient tuple over B = Q or Q(x).
"""
from fractions import Fraction
from numbers import Rational

import flint

from .errors import DivisionByNonUnit, RingMismatch


def _fmpq(c):
    if isinstance(c, flint.fmpq):
        return c
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _frac(c):
    return Fraction(int(c.p), int(c.q))


def poly(coeffs):
    """fmpq_poly from a low-to-high coefficient list of rationals."""
    return flint.fmpq_poly([_fmpq(c) for c in coeffs])


_ONE = flint.fmpq_poly([1])
_X = flint.fmpq_poly([0, 1])


def _poly_str(p):
    terms = []
    for k in range(p.degree(), -1, -1):
        c = _frac(p[k])
        if c == 0:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class RatFunc:
    """Element of Q(x): num/den with gcd 1 and den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        if not isinstance(num, flint.fmpq_poly):
            num = flint.fmpq_poly([_fmpq(num)])
        if den is None:
            den = _ONE
        elif not isinstance(den, flint.fmpq_poly):
            den = flint.fmpq_poly([_fmpq(den)])
        if not _reduced:
            if den.is_zero():
                raise DivisionByNonUnit("zero denominator")
            if num.is_zero():
                den = _ONE
            elif not den.is_one():
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den

    @classmethod
    def x(cls):
        return cls(_X, _ONE, True)

    @classmethod
    def from_coeffs(cls, num, den=(1,)):
        return cls(poly(num), poly(den))

    # -- coercion -----------------------------------------------------------
    @staticmethod
    def _lift(other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return RatFunc(flint.fmpq_poly([_fmpq(other)]), _ONE, True)
        return None

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.den.is_one() and self.num.degree() <= 0

    def constant_value(self):
        return _frac(self.num[0]) if self.is_constant() else None

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.is_constant():
            return hash(_frac(self.num[0]))
        return hash((tuple(str(c) for c in self.num.coeffs()),
                     tuple(str(c) for c in self.den.coeffs())))

    def __add__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RatFunc(self.num + o.num, _ONE, True)
        # adding a polynomial keeps the fraction reduced
        if o.den.is_one():
            return RatFunc(self.num + o.num * self.den, self.den, True)
        if self.den.is_one():
            return RatFunc(o.num + self.num * o.den, o.den, True)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, True)

    def __sub__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RatFunc(self.num * o.num, _ONE, True)
        for a, b in ((self, o), (o, self)):
            if b.den.is_one() and b.num.degree() <= 0:
                if b.num.is_zero():
                    return RatFunc(b.num, _ONE, True)
                return RatFunc(a.num * b.num, a.den, True)
        # cross cancellation keeps the gcd computations small
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num, o.den) if g1.is_one() else (self.num / g1, o.den / g1)
        n2, d1 = (o.num, self.den) if g2.is_one() else (o.num / g2, self.den / g2)
        return RatFunc(n1 * n2, d1 * d2, True)._monic()

    __rmul__ = __mul__

    def _monic(self):
        lc = self.den.leading_coefficient()
        if lc != 1:
            self.num = self.num / lc
            self.den = self.den / lc
        return self

    def inverse(self):
        if self.num.is_zero():
            raise DivisionByNonUnit("division by zero in Q(x)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = RatFunc._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k, True)

    def derivative(self):
        n, d = self.num, self.den
        if d.is_one():
            return RatFunc(n.derivative(), _ONE, True)
        return RatFunc(n.derivative() * d - n * d.derivative(), d * d)

    def __call__(self, value):
        v = _fmpq(value)
        den = self.den(v)
        if den == 0:
            raise DivisionByNonUnit("pole at evaluation point")
        return _frac(self.num(v) / den)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den.is_one():
            return _poly_str(self.num)
        num = _poly_str(self.num)
        if " " in num or "/" in num or num.startswith("-"):
            num = f"({num})"
        return f"{num}/({_poly_str(self.den)})"


class _Field:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, _Field) and other.name == self.name

    def __hash__(self):
        return hash(self.name)


class RationalField(_Field):
    """The field Q; elements are Fractions."""

    nil_order = 1
    base = None

    def __init__(self):
        super().__init__("QQ")

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def __call__(self, a):
        if isinstance(a, RatFunc):
            c = a.constant_value()
            if c is None:
                raise RingMismatch("non-constant rational function in QQ")
            return c
        if isinstance(a, Nil):
            raise RingMismatch("nilpotent extension element in QQ")
        return Fraction(a)

    def contains(self, a):
        return isinstance(a, (int, Fraction))


class RationalFunctionField(_Field):
    """The field Q(x)."""

    nil_order = 1
    base = None

    def __init__(self):
        super().__init__("QQ(x)")

    def zero(self):
        return RatFunc(0)

    def one(self):
        return RatFunc(1)

    def gen(self):
        return RatFunc.x()

    def __call__(self, a):
        if isinstance(a, RatFunc):
            return a
        if isinstance(a, Nil):
            raise RingMismatch("nilpotent extension element in QQ(x)")
        return RatFunc(Fraction(a))

    def contains(self, a):
        return isinstance(a, (int, Fraction, RatFunc))


QQ = RationalField()
QQX = RationalFunctionField()


class NilRing:
    """B[eps]/(eps^N) with B = QQ or QQX."""

    def __init__(self, base, order):
        if base not in (QQ, QQX):
            raise RingMismatch("nilpotent extensions are only built over QQ or QQ(x)")
        if order < 1:
            raise ValueError("truncation order must be at least 1")
        self.base = base
        self.nil_order = order
        self.name = f"{base.name}[eps]/(eps^{order})"

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, NilRing) and other.base == self.base and other.nil_order == self.nil_order

    def __hash__(self):
        return hash((self.base, self.nil_order))

    def zero(self):
        return Nil(self, (self.base.zero(),) * self.nil_order)

    def one(self):
        return Nil(self, (self.base.one(),) + (self.base.zero(),) * (self.nil_order - 1))

    def eps(self):
        cs = [self.base.zero()] * self.nil_order
        if self.nil_order > 1:
            cs[1] = self.base.one()
        return Nil(self, cs)

    def __call__(self, a):
        if isinstance(a, Nil):
            if a.ring != self:
                raise RingMismatch(f"{a.ring} vs {self}")
            return a
        return Nil(self, (self.base(a),) + (self.base.zero(),) * (self.nil_order - 1))

    def contains(self, a):
        return isinstance(a, Nil) and a.ring == self


class Nil:
    """Element c_0 + c_1 eps + ... + c_{N-1} eps^{N-1}."""

    __slots__ = ("ring", "c")

    def __init__(self, ring, coeffs):
        self.ring = ring
        base = ring.base
        cs = [base(v) for v in coeffs]
        if len(cs) > ring.nil_order:
            cs = cs[: ring.nil_order]
        cs += [base.zero()] * (ring.nil_order - len(cs))
        self.c = tuple(cs)

    @classmethod
    def _make(cls, ring, cs):
        """Trusted constructor: cs already has the right length and base type."""
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.c = tuple(cs)
        return obj

    def _lift(self, other):
        if isinstance(other, Nil):
            if other.ring != self.ring:
                raise RingMismatch(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, (int, Fraction, Rational, RatFunc)):
            return self.ring(other)
        return None

    def is_zero(self):
        return all(v == 0 for v in self.c)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except RingMismatch:
            return False
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        if all(v == 0 for v in self.c[1:]):
            return hash(self.c[0])
        return hash(self.c)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Nil._make(self.ring, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Nil._make(self.ring, [-a for a in self.c])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Nil._make(self.ring, [a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = self.ring.nil_order
        out = [self.ring.base.zero()] * n
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j in range(n - i):
                b = o.c[j]
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return Nil._make(self.ring, out)

    __rmul__ = __mul__

    def is_unit(self):
        return self.c[0] != 0

    def inverse(self):
        c0 = self.c[0]
        if c0 == 0:
            raise DivisionByNonUnit(f"{self} has zero unit part")
        inv0 = 1 / c0
        nu = (self * inv0) - 1
        term = self.ring.one()
        total = self.ring.one()
        for _ in range(1, self.ring.nil_order):
            term = term * (-nu)
            total = total + term
        return total * inv0

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        return f"Nil({self})"

    def __str__(self):
        parts = []
        for k, v in enumerate(self.c):
            if v == 0:
                continue
            s = str(v)
            if k and (isinstance(v, RatFunc) and not v.is_constant() or "/" in s or " " in s or s.startswith("-")):
                s = f"({s})"
            if k == 0:
                parts.append(s)
            else:
                mono = "eps" if k == 1 else f"eps^{k}"
                parts.append(mono if v == 1 else f"{s}*{mono}")
        return " + ".join(parts) if parts else "0"


# -- generic helpers -------------------------------------------------------

def ring_of(a):
    if isinstance(a, Nil):
        return a.ring
    if isinstance(a, RatFunc):
        return QQX
    return QQ


def common_ring(*rings):
    """Smallest ring containing all arguments (QQ < QQ(x); nil rings must agree)."""
    nil = None
    has_x = False
    for r in rings:
        if isinstance(r, NilRing):
            if nil is not None and nil.nil_order != r.nil_order:
                raise RingMismatch(f"{nil} vs {r}")
            if nil is None or r.base == QQX:
                nil = r
            has_x = has_x or r.base == QQX
        elif r == QQX:
            has_x = True
    if nil is not None:
        if has_x and nil.base != QQX:
            return NilRing(QQX, nil.nil_order)
        return nil
    return QQX if has_x else QQ


def is_zero(a):
    if isinstance(a, (RatFunc, Nil)):
        return a.is_zero()
    return a == 0


def is_unit(a):
    if isinstance(a, Nil):
        return a.is_unit()
    return not is_zero(a)


def unit_nil_split(a):
    """a = u + nu with u the eps^0 coefficient and nu nilpotent."""
    if isinstance(a, Nil):
        u = a.c[0]
        return u, a - u
    return a, ring_of(a).zero()


def reduce_nil(a):
    return a.c[0] if isinstance(a, Nil) else a


def d_dx(a):
    """Exact x-derivative; constants differentiate to 0."""
    if isinstance(a, RatFunc):
        return a.derivative()
    if isinstance(a, Nil):
        return Nil(a.ring, [d_dx(v) for v in a.c])
    return Fraction(0)


def arith(a, b, op):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not is_unit(b):
            raise DivisionByNonUnit(f"{b} is not a unit")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def inverse(a):
    if isinstance(a, (RatFunc, Nil)):
        return a.inverse()
    if a == 0:
        raise DivisionByNonUnit("division by zero")
    return 1 / Fraction(a)


def scalar_str(a):
    return str(a)
