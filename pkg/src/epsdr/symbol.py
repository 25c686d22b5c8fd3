"""Closed-form commutator (Contou-Carrere) symbol, residue pairing and the
global reciprocity checks on the projective line.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonRationalDivisor
from .laurent import Laurent, decompose, exp_nilp, log_unip
from .scalars import NilRing, QQ, common_ring, inverse, reduce_nil, ring_of


def _wpairing(f_plus, g_minus):
    """exp(sum_i i alpha_i beta_i) for f_plus in 1 + tR[[t]], g_minus in 1 + nil t^-1 R[t^-1]."""
    if g_minus.is_zero() or (g_minus.exact and g_minus.terms() == {0: g_minus.ring.one()}):
        return g_minus.ring.one()
    neg = {-k: a for k, a in g_minus.terms().items()}
    flipped = Laurent.from_dict(g_minus.ring, neg)
    beta = log_unip(flipped)
    top = max(beta.terms(), default=0)
    if top <= 0:
        return g_minus.ring.one()
    alpha = log_unip(f_plus.truncate(top + 1))
    s = g_minus.ring.zero()
    for i, b in beta.terms().items():
        if i > 0 and b:
            s = s + i * alpha.coeff(i) * b
    return _exp_scalar(s, g_minus.ring)


def _exp_scalar(a, ring):
    out = ring.one()
    term = ring.one()
    for k in range(1, ring.nil_order):
        term = term * a * Fraction(1, k)
        out = out + term
    return out


def cc_symbol(f, g):
    """{f, g} for units of R((t)), assembled from the four-factor splitting.

    {t^m, t^n} = (-1)^(mn), {r, t^n} = r^(-n), {t^m, s} = s^m, and the pairing
    of the 1 + tR[[t]] factor with the nilpotent tail is
    exp(sum_i i alpha_i beta_i), where log f_+ = sum alpha_i t^i and
    log g_-(1/t) = sum beta_i t^i.  All other pairs of factors contribute 1.
    """
    ring = common_ring(f.ring, g.ring)
    f, g = f.change_ring(ring), g.change_ring(ring)
    if ring.nil_order > 1:
        f, g = _trim_pair(f, g, ring.nil_order)
    m, r, fp, fm = decompose(f)
    n, s, gp, gm = decompose(g)
    out = ring.one() * (-1) ** ((m * n) % 2)
    out = out * (inverse(ring(r)) ** n if n >= 0 else ring(r) ** (-n))
    out = out * (ring(s) ** m if m >= 0 else inverse(ring(s)) ** (-m))
    if ring.nil_order > 1:
        out = out * _wpairing(fp, gm) * inverse(_wpairing(gp, fm))
    return out


def _depth(h):
    return max(0, h.val() - h.order())


def _trim_pair(f, g, nil_order):
    """Drop coefficients that cannot influence the pairing.

    A coefficient of index j in the logarithm only involves input coefficients
    up to j + (N - 1) d, where d is the depth of the nilpotent tail, and the
    pairing needs indices up to (N - 1) times the depth of the other tail.
    The dropped part changes f by a factor 1 + O(t^k) whose symbol with g is 1,
    so a cut of a series known that far is again treated as exact.
    """
    reach = (nil_order - 1) * (_depth(f) + _depth(g)) + 2
    return _cut_exact(f, f.val() + reach), _cut_exact(g, g.val() + reach)


def _cut_exact(h, bound):
    if h.prec is not None and h.prec < bound:
        return h
    cut = h.truncate(bound)
    return Laurent._raw(h.ring, cut.v0, cut.c, None)


def tame_symbol(f, g):
    """Classical tame symbol (-1)^(mn) f^n / g^m evaluated at t = 0 (field case)."""
    m, n = f.val(), g.val()
    a = f.coeff(m)
    b = g.coeff(n)
    sign = (-1) ** ((m * n) % 2)
    return sign * (a ** n if n >= 0 else inverse(a) ** (-n)) * (inverse(b) ** m if m >= 0 else b ** (-m))


def residue_pairing(a, b):
    """Res(b da) = res_t(b * d a / dt)."""
    return (b * a.deriv_t()).res_t()


def lie_compatibility(f, a):
    """{f, exp(eps a)} - 1 over Q[eps]/(eps^2); equals eps * Res(a dlog f)."""
    base = ring_of(reduce_nil(f.c[0])) if f.c else QQ
    ring = NilRing(base if not isinstance(f.ring, NilRing) else f.ring.base, 2)
    f2 = f.change_ring(ring)
    e = ring.eps()
    g = exp_nilp(a.change_ring(ring) * e)
    return cc_symbol(f2, g) - 1


def lie_expected(f, a):
    """eps * Res(a dlog f), the right-hand side of the Lie compatibility."""
    ring = NilRing(f.ring if not isinstance(f.ring, NilRing) else f.ring.base, 2)
    res = (a * f.deriv_t() * f.inv()).res_t()
    return ring.eps() * res


# -- split rational functions on P^1 -----------------------------------------------

@dataclass
class SplitRational:
    """c * prod (t - a)^e with roots a in Q or Q[eps]/(eps^N) and integer e."""

    const: object
    roots: dict = field(default_factory=dict)

    def ring(self):
        return common_ring(ring_of(self.const), *[ring_of(a) for a in self.roots])

    def points(self):
        """Reduced locations of zeros and poles, as Fractions."""
        return {reduce_nil(a) for a, e in self.roots.items() if e}

    def degree(self):
        return sum(self.roots.values())

    def local(self, p, prec=None):
        """Laurent expansion in z = t - p (p finite) or s = 1/t (p = None)."""
        ring = self.ring()
        out = Laurent.const(ring, self.const)
        for a, e in self.roots.items():
            if not e:
                continue
            if p is None:
                # t - a = s^-1 (1 - a s)
                lin = Laurent(ring, 0, [1, -ring(a)]).shift(-1)
            else:
                lin = Laurent(ring, 0, [ring(p) - ring(a), 1])
            if e < 0:
                lin = lin.inv(prec)
            out = out * lin ** abs(e)
        return out


def split_from_poly_factors(const, factors):
    """Build a SplitRational from (flint polynomial, exponent) pairs over Q."""
    roots = {}
    for p, e in factors:
        if p.degree() != 1:
            raise NonRationalDivisor(f"irreducible factor {p} of degree {p.degree()}")
        lc = p.leading_coefficient()
        root = -Fraction(int(p[0].p), int(p[0].q)) / Fraction(int(lc.p), int(lc.q))
        const = const * Fraction(int(lc.p), int(lc.q)) ** e
        roots[root] = roots.get(root, 0) + e
    return SplitRational(const, roots)


def _support(f, g):
    pts = sorted(f.points() | g.points())
    return pts + [None]


@dataclass
class ReciprocityReport:
    product: object
    per_point: list


def weil_reciprocity_check(f, g, prec=None):
    """Local symbols at every point of the combined divisor, and their product."""
    per_point = []
    ring = common_ring(f.ring(), g.ring())
    total = ring.one()
    for p in _support(f, g):
        value = cc_symbol(f.local(p, prec), g.local(p, prec))
        per_point.append(("inf" if p is None else p, value))
        total = total * value
    return ReciprocityReport(total, per_point)


def residue_theorem_check(f, g, prec=None):
    """Sum of the residues of f dg over all points; must vanish."""
    ring = common_ring(f.ring(), g.ring())
    total = ring.zero()
    per_point = []
    for p in _support(f, g):
        fl, gl = f.local(p, prec), g.local(p, prec)
        res = residue_pairing(gl, fl)
        per_point.append(("inf" if p is None else p, res))
        total = total + res
    return ReciprocityReport(total, per_point)
