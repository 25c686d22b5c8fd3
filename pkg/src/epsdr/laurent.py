"""Truncated Laurent series R((t)) with explicit precision.

A series stores coefficients for exponents v0, v0+1, ... and a precision bound
`prec`: every coefficient with exponent < prec is known.  `prec is None` marks
an exact Laurent polynomial.  Arithmetic propagates the smallest precision that
is still justified, so results never claim unknown coefficients.
"""
from fractions import Fraction
from math import factorial

from .config import default_precision
from .errors import DomainViolation, NotAUnit, PrecisionExhausted
from .scalars import QQ, common_ring, d_dx, inverse, is_unit, reduce_nil, ring_of

INF = float("inf")


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Laurent:
    __slots__ = ("ring", "v0", "c", "prec")

    def __init__(self, ring, v0, coeffs, prec=None):
        cs = [ring(a) for a in coeffs]
        if prec is not None:
            keep = max(0, prec - v0)
            cs = cs[:keep]
            cs += [ring.zero()] * (keep - len(cs))
        i = 0
        while i < len(cs) and not cs[i]:
            i += 1
        v0 += i
        cs = cs[i:]
        if prec is None:
            while cs and not cs[-1]:
                cs.pop()
            if not cs:
                v0 = 0
        elif not cs:
            v0 = prec
        self.ring = ring
        self.v0 = v0
        self.c = cs
        self.prec = prec

    # -- constructors -------------------------------------------------------
    @classmethod
    def _raw(cls, ring, v0, cs, prec):
        obj = cls.__new__(cls)
        i = 0
        while i < len(cs) and not cs[i]:
            i += 1
        if i:
            v0 += i
            cs = cs[i:]
        if prec is None:
            while cs and not cs[-1]:
                cs.pop()
            if not cs:
                v0 = 0
        elif not cs:
            v0 = prec
        obj.ring, obj.v0, obj.c, obj.prec = ring, v0, cs, prec
        return obj

    @classmethod
    def from_dict(cls, ring, terms, prec=None):
        terms = {k: v for k, v in terms.items() if prec is None or k < prec}
        if not terms:
            return cls(ring, 0 if prec is None else prec, [], prec)
        lo = min(terms)
        hi = max(terms) if prec is None else prec - 1
        return cls(ring, lo, [terms.get(k, 0) for k in range(lo, hi + 1)], prec)

    @classmethod
    def monomial(cls, ring, k, coeff=1):
        return cls(ring, k, [coeff])

    @classmethod
    def const(cls, ring, coeff):
        return cls(ring, 0, [coeff])

    @classmethod
    def zero(cls, ring, prec=None):
        return cls(ring, 0 if prec is None else prec, [], prec)

    @classmethod
    def gen(cls, ring=QQ):
        return cls(ring, 1, [1])

    # -- inspection ---------------------------------------------------------
    @property
    def exact(self):
        return self.prec is None

    def top(self):
        """One past the last stored exponent."""
        return self.v0 + len(self.c)

    def coeff(self, k):
        if self.prec is not None and k >= self.prec:
            raise PrecisionExhausted(f"coefficient of t^{k} is beyond precision {self.prec}")
        i = k - self.v0
        if 0 <= i < len(self.c):
            return self.c[i]
        return self.ring.zero()

    def terms(self):
        return {self.v0 + i: a for i, a in enumerate(self.c) if a}

    def is_zero(self):
        return not self.c

    def val(self):
        """Lowest exponent whose coefficient is a unit (nilpotents ignored)."""
        for i, a in enumerate(self.c):
            if is_unit(a):
                return self.v0 + i
        raise PrecisionExhausted("no unit coefficient within the known window")

    def order(self):
        """Lowest exponent with a nonzero coefficient (may be nilpotent)."""
        if not self.c:
            raise PrecisionExhausted("series is zero to its precision")
        return self.v0

    def res_t(self):
        return self.coeff(-1)

    def constant_term(self):
        return self.coeff(0)

    # -- ring plumbing ------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Laurent):
            if other.ring != self.ring:
                r = common_ring(self.ring, other.ring)
                return self.change_ring(r), other.change_ring(r)
            return self, other
        r = common_ring(self.ring, ring_of(other))
        a = self if r == self.ring else self.change_ring(r)
        return a, Laurent.const(r, other)

    def change_ring(self, ring):
        if ring == self.ring:
            return self
        return Laurent._raw(ring, self.v0, [ring(a) for a in self.c], self.prec)

    def truncate(self, prec):
        if prec is None:
            return self
        p = _pmin(self.prec, prec)
        keep = max(0, p - self.v0)
        cs = self.c[:keep]
        cs = cs + [self.ring.zero()] * (keep - len(cs))
        return Laurent._raw(self.ring, self.v0, cs, p)

    def with_relative_precision(self, rel):
        """Truncate an exact series to `rel` terms past its order."""
        if not self.exact or not self.c:
            return self
        return self.truncate(self.v0 + rel)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._coerce(other)
        prec = _pmin(a.prec, b.prec)
        if not a.c:
            lo = b.v0
        elif not b.c:
            lo = a.v0
        else:
            lo = min(a.v0, b.v0)
        hi = max(a.top(), b.top())
        if prec is not None:
            hi = prec
            lo = min(lo, prec)
        zero = a.ring.zero()
        cs = [zero] * max(0, hi - lo)
        for src in (a, b):
            off = src.v0 - lo
            for i, v in enumerate(src.c):
                j = off + i
                if j < len(cs):
                    cs[j] = cs[j] + v
        return Laurent._raw(a.ring, lo, cs, prec)

    __radd__ = __add__

    def __neg__(self):
        return Laurent._raw(self.ring, self.v0, [-v for v in self.c], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            a, _ = self._coerce(other)
            s = a.ring(other)
            if not s:
                return Laurent.zero(a.ring)
            return Laurent._raw(a.ring, a.v0, [v * s for v in a.c], a.prec)
        a, b = self._coerce(other)
        if a.prec is None and b.prec is None:
            prec = None
        else:
            pa = INF if a.prec is None else a.prec
            pb = INF if b.prec is None else b.prec
            prec = int(min(a.v0 + pb, b.v0 + pa))
        lo = a.v0 + b.v0
        if not a.c or not b.c:
            return Laurent.zero(a.ring, prec)
        hi = a.top() + b.top() - 1
        if prec is not None:
            hi = min(hi, prec)
            if hi <= lo:
                return Laurent.zero(a.ring, prec)
        n = hi - lo
        zero = a.ring.zero()
        cs = [zero] * n
        bc = b.c
        lb = len(bc)
        for i, u in enumerate(a.c):
            if i >= n:
                break
            if not u:
                continue
            lim = min(lb, n - i)
            for j in range(lim):
                w = bc[j]
                if w:
                    cs[i + j] = cs[i + j] + u * w
        return Laurent._raw(a.ring, lo, cs, prec)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by t^k."""
        return Laurent._raw(self.ring, self.v0 + k, list(self.c),
                            None if self.prec is None else self.prec + k)

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        out = Laurent.const(self.ring, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __truediv__(self, other):
        if isinstance(other, Laurent):
            return self * other.inv()
        a, _ = self._coerce(other)
        return a * inverse(a.ring(other))

    def __rtruediv__(self, other):
        return self.inv() * other

    def __eq__(self, other):
        if not isinstance(other, Laurent):
            if isinstance(other, (int, Fraction)) or hasattr(other, "is_zero"):
                other = Laurent.const(self.ring if self.ring != QQ else ring_of(other), other)
            else:
                return NotImplemented
        return (self.prec == other.prec and self.v0 == other.v0 and
                len(self.c) == len(other.c) and all(x == y for x, y in zip(self.c, other.c)))

    def __hash__(self):
        return hash((self.v0, self.prec, tuple(hash(a) for a in self.c)))

    def agrees(self, other, prec=None):
        """Equality of all coefficients known on both sides (and below `prec`)."""
        p = _pmin(_pmin(self.prec, other.prec), prec)
        lo = min(self.v0 if self.c else INF, other.v0 if other.c else INF)
        if lo == INF:
            return True
        hi = p if p is not None else max(self.top(), other.top())
        return all(self.coeff(k) == other.coeff(k) for k in range(int(lo), int(hi)))

    # -- derivatives and substitutions ---------------------------------------
    def deriv_t(self):
        cs = [(self.v0 + i) * a for i, a in enumerate(self.c)]
        return Laurent._raw(self.ring, self.v0 - 1, cs,
                            None if self.prec is None else self.prec - 1)

    def deriv_x(self):
        return Laurent._raw(self.ring, self.v0, [d_dx(a) for a in self.c], self.prec)

    def map_coeffs(self, fn, ring=None):
        ring = ring or self.ring
        return Laurent._raw(ring, self.v0, [ring(fn(a)) for a in self.c], self.prec)

    def subs_power(self, e):
        """Substitute t -> t^e for e >= 1."""
        if e < 1:
            raise ValueError("ramification index must be positive")
        if e == 1:
            return self
        zero = self.ring.zero()
        cs = []
        for i, a in enumerate(self.c):
            if i:
                cs.extend([zero] * (e - 1))
            cs.append(a)
        prec = None if self.prec is None else e * self.prec
        if prec is not None:
            cs += [zero] * max(0, prec - self.v0 * e - len(cs))
        return Laurent._raw(self.ring, self.v0 * e, cs, prec)

    def section(self, e, j):
        """Series S_j(t) with self = sum_j s^j S_j(s^e); here self is in s."""
        terms = {}
        for i, a in enumerate(self.c):
            k = self.v0 + i
            if (k - j) % e == 0 and a:
                terms[(k - j) // e] = a
        prec = None
        if self.prec is not None:
            prec = -((j - self.prec) // e)  # ceil((prec - j) / e)
        return Laurent.from_dict(self.ring, terms, prec)

    # -- units ----------------------------------------------------------------
    def _normalized(self):
        """Return (v, c, h) with self = c t^v (1 + h)."""
        v = self.val()
        c = self.coeff(v)
        g = self.shift(-v) * inverse(c)
        return v, c, g - 1

    def inv(self, prec=None):
        try:
            v, c, h = self._normalized()
        except PrecisionExhausted as exc:
            raise NotAUnit(f"{self} is not a unit within precision") from exc
        if h.exact and h.is_zero():
            return Laurent.monomial(self.ring, -v, inverse(c))
        total = _geometric(h, prec)
        return total.shift(-v) * inverse(c)

    def is_unit(self):
        try:
            self.val()
        except PrecisionExhausted:
            return False
        return True

    def __repr__(self):
        return f"Laurent({self})"

    def __str__(self):
        parts = []
        for i, a in enumerate(self.c):
            if not a:
                continue
            k = self.v0 + i
            s = str(a)
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if not mono:
                parts.append(f"({s})" if (" " in s or s.startswith("-")) else s)
            elif a == 1:
                parts.append(mono)
            else:
                if " " in s or s.startswith("-") or "/" in s:
                    s = f"({s})"
                parts.append(f"{s}*{mono}")
        body = " + ".join(parts) if parts else "0"
        if self.prec is not None:
            body += f" (prec {self.prec})"
        return body


def _tail_depth(h):
    """Depth d >= 0 of the non-positive (necessarily nilpotent) part of h."""
    return max(0, -h.v0) if h.c else 0


def _check_top_nilpotent(h, what):
    for i, a in enumerate(h.c):
        k = h.v0 + i
        if k > 0:
            break
        if reduce_nil(a):
            raise DomainViolation(f"{what}: coefficient of t^{k} is not nilpotent")


def _prepare(h, prec):
    if h.exact and any(h.v0 + i > 0 for i, a in enumerate(h.c) if a):
        return h.truncate(prec if prec is not None else default_precision())
    if prec is not None:
        return h.truncate(prec)
    return h


def _series(h, weights, prec=None):
    """sum_k weights(k) h^k for topologically nilpotent h (k = 0, 1, ...)."""
    h = _prepare(h, prec)
    nil = h.ring.nil_order
    d = _tail_depth(h)
    # A product of copies of h has at most nil - 1 factors from the tail, so
    # every power is known below h.prec - (nil - 1) d.  Multiply the known
    # parts exactly and cut there instead of tracking the loss per factor.
    cut = None if h.prec is None else h.prec - (nil - 1) * d
    known = h if h.prec is None else _forget_prec(h)
    total = Laurent.const(h.ring, weights(0)) if weights(0) else Laurent.zero(h.ring)
    term = Laurent.const(h.ring, 1)
    k = 0
    while True:
        k += 1
        term = term * known
        if cut is not None:
            term = _forget_prec(term.truncate(cut))
        w = weights(k)
        if w:
            total = total + term * w
        if term.is_zero():
            break
        bound = (k + 1) - (nil - 1) * (1 + d)
        if cut is not None and bound >= cut:
            break
        if k > 10000:
            raise PrecisionExhausted("series did not terminate")
    return total if cut is None else total.truncate(cut)


def _forget_prec(h):
    return Laurent._raw(h.ring, h.v0, h.c, None)


def _geometric(h, prec=None):
    return _series(-h, lambda k: 1, prec)


def log_unip(f, prec=None):
    """log f for f in 1 + (t R[[t]] + nilpotents)."""
    h = f - 1
    _check_top_nilpotent(h, "log")
    return _series(h, lambda k: Fraction((-1) ** (k + 1), k) if k else 0, prec)


def exp_nilp(a, prec=None):
    """exp a for a topologically nilpotent (positive part plus nilpotents)."""
    _check_top_nilpotent(a, "exp")
    return _series(a, lambda k: Fraction(1, factorial(k)), prec)


def decompose(f):
    """f = t^d * r * f_plus * f_minus per the four-factor splitting of R((t))^x.

    f_plus lies in 1 + t R[[t]], f_minus in 1 + (nilpotent) t^-1 Q[t^-1].
    """
    try:
        d = f.val()
    except PrecisionExhausted as exc:
        raise NotAUnit(f"{f} is not a unit within precision") from exc
    c = f.coeff(d)
    r0 = reduce_nil(c)
    g = f.shift(-d) * inverse(f.ring(r0))
    ring = f.ring
    if _is_plain(f):
        # no nilpotent coefficients: nothing below t^d, no tail factor
        return d, c, f.shift(-d) * inverse(c), Laurent.const(ring, 1)
    L = log_unip(g)
    if L.prec is not None and L.prec <= 0:
        raise PrecisionExhausted("precision too small to split off the nilpotent tail")
    neg = Laurent.from_dict(ring, {k: a for k, a in L.terms().items() if k < 0})
    l0 = L.coeff(0)
    r = ring(r0) * _exp_scalar(l0)
    f_minus = exp_nilp(neg)
    f_plus = g * f_minus.inv() * inverse(_exp_scalar(l0))
    return d, r, f_plus, f_minus


def _is_plain(g):
    """True when g has no nilpotent coefficients at all."""
    return all(not (a - reduce_nil(a)) for a in g.c) if g.ring.nil_order > 1 else True


def _exp_scalar(a):
    out = 0
    term = 1
    for k in range(a.ring.nil_order if hasattr(a, "ring") else 1):
        if k:
            term = term * a * Fraction(1, k)
        out = out + term
    return out


def t_series(ring=QQ):
    return Laurent.gen(ring)
