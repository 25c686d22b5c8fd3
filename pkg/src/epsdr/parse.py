"""Expression parser for scalars, Laurent series, forms and rational families.

Grammar (whitespace ignored):

    input  := expr [ "(" "prec" INT ")" ]
    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom [ "^" exponent ]
    exponent := ["-" | "+"] INT | "(" ["-" | "+"] INT ")"
    atom   := INT | "x" | "t" | "eps" | "dx" | "dt" | "(" expr ")"

The parse tree is evaluated in a domain chosen by the caller.
"""
import re
from fractions import Fraction

from .errors import ParseError
from .laurent import Laurent
from .scalars import QQ, QQX, NilRing

_TOKEN = re.compile(r"\s*(?:(\d+)|(eps|dx|dt|prec|x|t)|(.))")
NAMES = ("x", "t", "eps", "dx", "dt")


def tokenize(src):
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        num, name, op = m.groups()
        col = m.start(m.lastindex) + 1
        if num is not None:
            out.append(("int", int(num), col))
        elif name is not None:
            out.append(("name", name, col))
        elif op in "+-*/^()":
            out.append(("op", op, col))
        elif op.isspace():
            pass
        else:
            raise ParseError(f"unexpected character {op!r}", col, "a number, a variable or an operator")
        pos = m.end()
    out.append(("end", None, len(src) + 1))
    return out


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind, value, what):
        tok = self.next()
        if tok[0] != kind or tok[1] != value:
            raise ParseError(f"unexpected {_desc(tok)}", tok[2], what)
        return tok

    def parse(self):
        tree = self.expr()
        prec = None
        tok = self.peek()
        if tok[:2] == ("op", "(") and self.peek(1)[:2] == ("name", "prec"):
            self.next()
            self.next()
            num = self.next()
            if num[0] != "int":
                raise ParseError(f"unexpected {_desc(num)}", num[2], "an integer precision")
            self.expect("op", ")", "')'")
            prec = num[1]
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {_desc(tok)}", tok[2], "an operator or end of input")
        return tree, prec

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.next()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.next()[1]
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.next()
            return ("neg", self.unary())
        if tok[:2] == ("op", "+"):
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.next()
            node = ("pow", node, self.exponent())
        return node

    def exponent(self):
        paren = False
        if self.peek()[:2] == ("op", "("):
            self.next()
            paren = True
        sign = 1
        if self.peek()[:2] in (("op", "-"), ("op", "+")):
            sign = -1 if self.next()[1] == "-" else 1
        tok = self.next()
        if tok[0] != "int":
            raise ParseError(f"unexpected {_desc(tok)}", tok[2], "an integer exponent")
        if paren:
            self.expect("op", ")", "')'")
        return sign * tok[1]

    def atom(self):
        tok = self.next()
        if tok[0] == "int":
            return ("num", Fraction(tok[1]))
        if tok[0] == "name" and tok[1] in NAMES:
            return ("var", tok[1])
        if tok[:2] == ("op", "("):
            node = self.expr()
            self.expect("op", ")", "')'")
            return node
        raise ParseError(f"unexpected {_desc(tok)}", tok[2], "a number, a variable or '('")


def _desc(tok):
    return "end of input" if tok[0] == "end" else repr(str(tok[1]))


def parse_tree(src):
    """Parse into (tree, precision suffix or None)."""
    return _Parser(src).parse()


def names_in(tree):
    if tree[0] == "var":
        return {tree[1]}
    if tree[0] == "num":
        return set()
    out = set()
    for sub in tree[1:]:
        if isinstance(sub, tuple):
            out |= names_in(sub)
    return out


def evaluate(tree, dom):
    kind = tree[0]
    if kind == "num":
        return dom.const(tree[1])
    if kind == "var":
        return dom.var(tree[1])
    if kind == "neg":
        return dom.neg(evaluate(tree[1], dom))
    if kind == "pow":
        return dom.pow(evaluate(tree[1], dom), tree[2])
    a, b = evaluate(tree[1], dom), evaluate(tree[2], dom)
    return getattr(dom, kind)(a, b)


# -- graded values: functions, f dt, f dx --------------------------------------------

class Graded:
    """A value together with its form degree marker: None, 'dt' or 'dx'."""

    __slots__ = ("v", "mark")

    def __init__(self, v, mark=None):
        self.v = v
        self.mark = mark


class _GradedDomain:
    """Shared handling of dt/dx markers; subclasses supply the function algebra."""

    def var(self, name):
        if name in ("dt", "dx"):
            return Graded(self.one(), name)
        return Graded(self.variable(name))

    def const(self, c):
        return Graded(self.constant(c))

    def add(self, a, b):
        if a.mark != b.mark:
            raise ValueError("cannot add a function and a form")
        return Graded(a.v + b.v, a.mark)

    def sub(self, a, b):
        if a.mark != b.mark:
            raise ValueError("cannot subtract a function and a form")
        return Graded(a.v - b.v, a.mark)

    def neg(self, a):
        return Graded(-a.v, a.mark)

    def mul(self, a, b):
        if a.mark and b.mark:
            raise ValueError("product of two forms is not supported")
        return Graded(a.v * b.v, a.mark or b.mark)

    def div(self, a, b):
        if b.mark:
            raise ValueError("cannot divide by a form")
        return Graded(self.divide(a.v, b.v), a.mark)

    def pow(self, a, k):
        if a.mark:
            raise ValueError("cannot raise a form to a power")
        return Graded(self.power(a.v, k), None)


class LaurentDomain(_GradedDomain):
    def __init__(self, ring, prec=None):
        self.ring = ring
        self.prec = prec

    def one(self):
        return Laurent.const(self.ring, 1)

    def constant(self, c):
        return Laurent.const(self.ring, c)

    def variable(self, name):
        if name == "t":
            return Laurent.monomial(self.ring, 1, 1)
        if name == "x":
            return Laurent.const(self.ring, QQX.gen())
        return Laurent.const(self.ring, self.ring.eps())

    def divide(self, a, b):
        return a * b.inv(self.prec)

    def power(self, a, k):
        if k >= 0:
            return a ** k
        return a.inv(self.prec) ** (-k)


def ring_for(names, nil_order=2, base=None):
    if base is None:
        base = QQX if "x" in names else QQ
    if "eps" in names:
        return NilRing(base, nil_order)
    return base


def parse_value(src, ring=None, nil_order=2):
    """Parse to a Graded Laurent value (constants included), honoring a precision suffix."""
    tree, prec = parse_tree(src)
    names = names_in(tree)
    ring = ring or ring_for(names, nil_order)
    g = _eval_checked(tree, LaurentDomain(ring, prec), src)
    if prec is not None:
        g.v = g.v.truncate(prec)
    return g, names


def _eval_checked(tree, dom, src):
    try:
        return evaluate(tree, dom)
    except ValueError as exc:
        raise ParseError(str(exc), 1, "a well-formed expression") from exc


def parse_expression(src, ring=None, nil_order=2):
    """Parse into a Scalar, a Laurent series, a KForm, or a (Laurent, 'dt') pair."""
    from .kforms import KForm
    g, names = parse_value(src, ring, nil_order)
    if g.mark == "dx":
        if "t" in names or not g.v.exact or g.v.v0 != 0 or len(g.v.c) > 1:
            raise ParseError("dx-forms must have coefficients in Q(x)", 1, "an expression in x")
        return KForm(g.v.coeff(0) if g.v.c else 0)
    if g.mark == "dt":
        return (g.v, "dt")
    if "t" not in names and g.v.exact and (not g.v.c or (g.v.v0 == 0 and len(g.v.c) == 1)):
        return g.v.coeff(0) if g.v.c else g.v.ring.zero()
    return g.v


def format_value(v):
    """Printed form accepted back by parse_expression."""
    from .kforms import KForm
    if isinstance(v, KForm):
        return str(v)
    if isinstance(v, tuple) and len(v) == 2 and v[1] == "dt":
        return f"({v[0]})*dt"
    return str(v)


# -- rational families -------------------------------------------------------------

class FamilyDomain(_GradedDomain):
    """Rational functions in t over Q(x) whose poles lie in the finite punctures."""

    def __init__(self, punctures):
        from .globalcurve import TRat
        self.TRat = TRat
        self.punctures = tuple(punctures)

    def one(self):
        return self.TRat.const(1, self.punctures)

    def constant(self, c):
        return self.TRat.const(c, self.punctures)

    def variable(self, name):
        if name == "t":
            return self.TRat.t(self.punctures)
        if name == "x":
            return self.TRat.const(QQX.gen(), self.punctures)
        raise ValueError("eps is not allowed in family entries")

    def divide(self, a, b):
        if b.unit_factors() is None:
            raise ValueError("division by a function vanishing outside the punctures")
        return a / b

    def power(self, a, k):
        if k < 0 and a.unit_factors() is None:
            raise ValueError("negative power of a function vanishing outside the punctures")
        return a ** k


def _family_graded(src, punctures):
    tree, prec = parse_tree(src)
    if prec is not None:
        raise ParseError("precision suffix not allowed in family entries", 1, "a rational expression")
    return _eval_checked(tree, FamilyDomain(punctures), src)


def parse_family_entry(src, punctures):
    """A rational function of t and x with poles only at the finite punctures."""
    g = _family_graded(src, punctures)
    if g.mark:
        raise ParseError("matrix entries are functions, not forms", 1, "an expression without dt or dx")
    return g.v


def parse_family_form(src, punctures):
    """phi for a global form phi dt written like "dt" or "x*dt/t"."""
    g = _family_graded(src, punctures)
    if g.mark != "dt":
        raise ParseError("expected a multiple of dt", 1, "an expression ending in *dt")
    return g.v


def parse_puncture(s):
    s = str(s).strip()
    if s in ("inf", "oo", "infinity"):
        return None
    return Fraction(s)


# -- split rational functions for reciprocity ----------------------------------

class SplitDomain:
    """Products of linear factors in t with coefficients in Q or Q[eps]/(eps^N).

    Values are Laurent polynomials (dict exponent -> scalar) until a product
    of two non-monomials forces the factored form (SplitRational).
    """

    def __init__(self, ring):
        self.ring = ring

    def _split(self, a):
        from .scalars import inverse, is_unit
        from .symbol import SplitRational, split_from_poly_factors
        if isinstance(a, SplitRational):
            return a
        terms = {k: v for k, v in a.items() if v}
        if not terms:
            raise ValueError("zero is not allowed in reciprocity inputs")
        lo, hi = min(terms), max(terms)
        roots = {0: lo} if lo else {}
        if hi == lo:
            return SplitRational(terms[lo], roots)
        if hi - lo == 1:
            c0, c1 = terms.get(lo, 0), terms[hi]
            if not is_unit(c1):
                raise ValueError("linear factor whose t-coefficient is not a unit")
            root = -c0 * inverse(c1)
            roots[root] = roots.get(root, 0) + 1
            return SplitRational(c1, roots)
        if self.ring == QQ:
            from .scalars import poly
            f = poly([terms.get(k, 0) for k in range(lo, hi + 1)])
            c, factors = f.factor()
            out = split_from_poly_factors(Fraction(int(c.p), int(c.q)), factors)
            for r, e in roots.items():
                out.roots[r] = out.roots.get(r, 0) + e
            return out
        raise ValueError("write the function as a product of linear factors")

    def const(self, c):
        return {0: self.ring(c)}

    def var(self, name):
        if name == "t":
            return {1: self.ring.one()}
        if name == "eps":
            return {0: self.ring.eps()}
        raise ValueError(f"{name} is not allowed in reciprocity inputs")

    def add(self, a, b):
        if isinstance(a, dict) and isinstance(b, dict):
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, self.ring.zero()) + v
            return out
        raise ValueError("write the function as a product of linear factors")

    def neg(self, a):
        return self.mul(self.const(-1), a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        from .symbol import SplitRational
        if isinstance(a, dict) and isinstance(b, dict) and (len(a) == 1 or len(b) == 1):
            out = {}
            for i, u in a.items():
                for j, w in b.items():
                    out[i + j] = out.get(i + j, self.ring.zero()) + u * w
            return out
        sa, sb = self._split(a), self._split(b)
        roots = dict(sa.roots)
        for r, e in sb.roots.items():
            roots[r] = roots.get(r, 0) + e
        return SplitRational(sa.const * sb.const, {r: e for r, e in roots.items() if e})

    def div(self, a, b):
        return self.mul(a, self.pow(b, -1))

    def pow(self, a, k):
        from .scalars import inverse
        from .symbol import SplitRational
        if isinstance(a, dict) and len(a) == 1:
            (j, c), = a.items()
            if k >= 0:
                return {j * k: c ** k}
            return {j * k: inverse(c) ** (-k)}
        s = self._split(a)
        c = s.const ** k if k >= 0 else inverse(s.const) ** (-k)
        return SplitRational(c, {r: e * k for r, e in s.roots.items() if e})


def parse_split(src, nil_order=2):
    """Parse a rational function of t whose zeros and poles are rational points."""
    tree, _ = parse_tree(src)
    names = names_in(tree)
    ring = ring_for(names - {"x"}, nil_order, base=QQ)
    dom = SplitDomain(ring)
    return dom._split(_eval_checked(tree, dom, src))
