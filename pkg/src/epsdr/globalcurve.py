"""Connections on open subsets U of the projective line over K = Q(x).

Functions on U = P^1 minus D are stored in partial-fraction coordinates:
the basis t^k (k >= 0) together with (t - p)^-k (k >= 1) for finite p in D.
De Rham cohomology of d/dt + A_t is computed by truncated linear algebra in
this basis and checked for stability under growth of the pole bound.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .config import DERHAM_POLE_BOUND, default_precision
from .connect import Connection, NuChoice, irregularity
from .epsilon import eps_class
from .errors import DomainViolation, StabilizationFailed, UnsupportedLocalType
from .kforms import KForm, dlog_class_test
from .laurent import Laurent
from .linalg import SparseEchelon
from .scalars import QQX, d_dx

INF = "inf"


def _binom_neg(b, j):
    """Binomial coefficient C(-b, j)."""
    return (-1) ** j * comb(b + j - 1, j)


# -- products of basis elements ----------------------------------------------------

def _poly_shift(i, p):
    """(t - p)^i as {k: coefficient of t^k}."""
    return {k: Fraction(comb(i, k)) * Fraction(-p) ** (i - k) for k in range(i + 1)}


@lru_cache(maxsize=None)
def _basis_product(a, b):
    """Product of two basis keys as a tuple of (key, rational coefficient)."""
    (p, i), (q, j) = sorted([a, b], key=lambda k: (k[0] != INF, str(k)))
    out = {}
    if p == INF and q == INF:
        out[(INF, i + j)] = Fraction(1)
    elif p == INF:
        # t^i (t - q)^-j, expand t^i = sum C(i, r) q^(i - r) (t - q)^r
        for r in range(i + 1):
            c = Fraction(comb(i, r)) * Fraction(q) ** (i - r)
            if r < j:
                out[(q, j - r)] = out.get((q, j - r), 0) + c
            else:
                for k, v in _poly_shift(r - j, q).items():
                    out[(INF, k)] = out.get((INF, k), 0) + c * v
    elif p == q:
        out[(p, i + j)] = Fraction(1)
    else:
        # principal parts of (t - p)^-i (t - q)^-j at p and at q
        for (u, e), (w, f) in (((p, i), (q, j)), ((q, j), (p, i))):
            d = Fraction(u - w)
            for r in range(e):
                c = _binom_neg(f, r) * d ** (-f - r)
                out[(u, e - r)] = out.get((u, e - r), 0) + c
    return tuple((k, v) for k, v in out.items() if v)


class UFun:
    """Regular function on U: dict basis key -> coefficient in Q(x)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: QQX(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, c):
        return cls({(INF, 0): c})

    @classmethod
    def t_power(cls, k):
        if k < 0:
            return cls.pole(Fraction(0), -k)
        return cls({(INF, k): 1})

    @classmethod
    def pole(cls, p, k):
        return cls({(p, k): 1}) if k else cls.const(1)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, QQX.zero()) + v
        return UFun(out)

    def __neg__(self):
        return UFun({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return UFun({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, UFun):
            return self.scale(other)
        out = {}
        for a, u in self.terms.items():
            for b, w in other.terms.items():
                uw = u * w
                for key, c in _basis_product(a, b):
                    out[key] = out.get(key, QQX.zero()) + uw * c
        return UFun(out)

    def __eq__(self, other):
        return isinstance(other, UFun) and (self - other).is_zero()

    def deriv_t(self):
        out = {}
        for (p, k), v in self.terms.items():
            if p == INF:
                if k:
                    out[(INF, k - 1)] = out.get((INF, k - 1), 0) + v * k
            else:
                out[(p, k + 1)] = out.get((p, k + 1), 0) + v * (-k)
        return UFun(out)

    def deriv_x(self):
        return UFun({k: d_dx(v) for k, v in self.terms.items()})

    def pole_order(self, p):
        """Pole order at p (finite) or degree as a polynomial at p = INF."""
        ks = [k for (q, k) in self.terms if q == p]
        return max(ks) if ks else 0

    def is_t_constant(self):
        return all(k == (INF, 0) for k in self.terms)

    def constant(self):
        return self.terms.get((INF, 0), QQX.zero())

    def local(self, p, prec):
        """Expansion at finite p in z = t - p, or at p = INF in s = 1/t."""
        out = Laurent.zero(QQX)
        for (q, k), v in self.terms.items():
            out = out + _local_basis(q, k, p, prec) * v
        return out

    def __repr__(self):
        return f"UFun({self.terms})"


def _local_basis(q, k, p, prec):
    if p == INF:
        if q == INF:
            return Laurent.monomial(QQX, -k, 1)
        # (t - q)^-k = s^k (1 - q s)^-k
        terms = {k + j: _binom_neg(k, j) * Fraction(-q) ** j for j in range(max(0, prec - k))}
        return Laurent.from_dict(QQX, terms, prec)
    if q == INF:
        # t^k = (z + p)^k
        return Laurent.from_dict(QQX, {j: Fraction(comb(k, j)) * Fraction(p) ** (k - j) for j in range(k + 1)})
    if q == p:
        return Laurent.monomial(QQX, -k, 1)
    d = Fraction(p - q)
    terms = {j: _binom_neg(k, j) * d ** (-k - j) for j in range(prec)}
    return Laurent.from_dict(QQX, terms, prec)


# -- rational functions in t over Q(x) with poles in D ---------------------------

def _pmul(a, b):
    if not a or not b:
        return []
    out = [QQX.zero()] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, w in enumerate(b):
                if w:
                    out[i + j] = out[i + j] + u * w
    return _ptrim(out)


def _padd(a, b):
    n = max(len(a), len(b))
    a = a + [QQX.zero()] * (n - len(a))
    b = b + [QQX.zero()] * (n - len(b))
    return _ptrim([u + w for u, w in zip(a, b)])


def _ptrim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _peval(a, p):
    s = QQX.zero()
    for c in reversed(a):
        s = s * p + c
    return s


def _pdiv_linear(a, p):
    """Quotient of a by (t - p), assuming a(p) = 0."""
    out = [QQX.zero()] * (len(a) - 1)
    acc = QQX.zero()
    for i in range(len(a) - 1, 0, -1):
        acc = acc * p + a[i]
        out[i - 1] = acc
    return _ptrim(out)


def _linear_power(p, k):
    out = [QQX.one()]
    for _ in range(k):
        out = _pmul(out, [QQX(-p), QQX.one()])
    return out


class TRat:
    """num(t) / prod (t - p)^k_p with num over Q(x) and p ranging over finite punctures."""

    def __init__(self, num, poles=None, punctures=()):
        self.num = _ptrim([QQX(c) for c in num])
        self.poles = {p: k for p, k in (poles or {}).items() if k}
        self.punctures = tuple(punctures)
        self._normalize()

    def _normalize(self):
        for p in list(self.poles):
            while self.poles.get(p) and self.num and not _peval(self.num, p):
                self.num = _pdiv_linear(self.num, p)
                self.poles[p] -= 1
            if not self.poles.get(p):
                self.poles.pop(p, None)
        if not self.num:
            self.poles = {}

    @classmethod
    def const(cls, c, punctures=()):
        return cls([c], {}, punctures)

    @classmethod
    def t(cls, punctures=()):
        return cls([0, 1], {}, punctures)

    def _common(self, other):
        poles = {p: max(self.poles.get(p, 0), other.poles.get(p, 0)) for p in set(self.poles) | set(other.poles)}
        a, b = self.num, other.num
        for p, k in poles.items():
            a = _pmul(a, _linear_power(p, k - self.poles.get(p, 0)))
            b = _pmul(b, _linear_power(p, k - other.poles.get(p, 0)))
        return a, b, poles

    def __add__(self, other):
        a, b, poles = self._common(other)
        return TRat(_padd(a, b), poles, self.punctures)

    def __neg__(self):
        return TRat([-c for c in self.num], self.poles, self.punctures)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        poles = dict(self.poles)
        for p, k in other.poles.items():
            poles[p] = poles.get(p, 0) + k
        return TRat(_pmul(self.num, other.num), poles, self.punctures)

    def unit_factors(self):
        """(c, {p: k}) with self = c prod (t - p)^k, or None if not a unit on U."""
        num = self.num
        if not num:
            return None
        zeros = {}
        for p in self.punctures:
            while len(num) > 1 and not _peval(num, p):
                num = _pdiv_linear(num, p)
                zeros[p] = zeros.get(p, 0) + 1
        if len(num) != 1:
            return None
        expo = {p: zeros.get(p, 0) - self.poles.get(p, 0) for p in set(zeros) | set(self.poles)}
        return num[0], {p: k for p, k in expo.items() if k}

    def inverse(self):
        uf = self.unit_factors()
        if uf is None:
            raise DomainViolation("division by a function with zeros outside the punctures")
        c, expo = uf
        num = [QQX.one() / c]
        poles = {}
        for p, k in expo.items():
            if k > 0:
                poles[p] = k
            else:
                num = _pmul(num, _linear_power(p, -k))
        return TRat(num, poles, self.punctures)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = TRat.const(1, self.punctures)
        for _ in range(k):
            out = out * self
        return out

    def deriv_x(self):
        return TRat([d_dx(c) for c in self.num], self.poles, self.punctures)

    def is_t_constant(self):
        return not self.poles and len(self.num) <= 1

    def to_ufun(self):
        out = UFun()
        den = UFun.const(1)
        for p, k in self.poles.items():
            if p not in self.punctures:
                raise DomainViolation(f"pole at t = {p} outside the punctures")
            den = den * UFun.pole(p, k)
        for i, c in enumerate(self.num):
            if c:
                out = out + (den * UFun.t_power(i)).scale(c)
        return out


# -- families -----------------------------------------------------------------------

def _umat_mul(a, b):
    n, m = len(a), len(b[0])
    return [[sum_ufun(a[i][k] * b[k][j] for k in range(len(b))) for j in range(m)] for i in range(n)]


def sum_ufun(items):
    out = UFun()
    for u in items:
        out = out + u
    return out


@dataclass
class GlobalFamily:
    """Trivial bundle of rank n on U = P^1 - D with d + A_t dt + A_x dx."""

    punctures: tuple
    a_t: list
    a_x: list = None

    def __post_init__(self):
        self.punctures = tuple(sorted(set(self.punctures)))
        self.rank = len(self.a_t)

    @property
    def points(self):
        return list(self.punctures) + [INF]

    def flatness_defect(self):
        if self.a_x is None:
            return None
        n = self.rank
        xt = _umat_mul(self.a_x, self.a_t)
        tx = _umat_mul(self.a_t, self.a_x)
        return [[self.a_t[i][j].deriv_x() - self.a_x[i][j].deriv_t() + xt[i][j] - tx[i][j]
                 for j in range(n)] for i in range(n)]

    def is_flat(self):
        d = self.flatness_defect()
        return d is None or all(e.is_zero() for row in d for e in row)

    def local_at(self, p, prec=None):
        """Connection in the local coordinate t - p, or s = 1/t at INF (dt = -ds/s^2)."""
        prec = prec or default_precision()
        n = self.rank
        a_t = [[e.local(p, prec) for e in row] for row in self.a_t]
        if p == INF:
            jac = Laurent.monomial(QQX, -2, -1)
            a_t = [[e * jac for e in row] for row in a_t]
        a_x = None
        if self.a_x is not None:
            a_x = [[e.local(p, prec) for e in row] for row in self.a_x]
        return Connection(a_t, a_x, check_flat=False) if n else None

    def gauge(self, g, ginv):
        """A -> G A G^-1 - dG G^-1 with G^-1 supplied (checked)."""
        n = self.rank
        ident = _umat_mul(g, ginv)
        for i in range(n):
            for j in range(n):
                if ident[i][j] != UFun.const(1 if i == j else 0):
                    raise DomainViolation("supplied inverse does not invert G")

        def conj(a, deriv):
            first = _umat_mul(_umat_mul(g, a), ginv)
            second = _umat_mul([[deriv(e) for e in row] for row in g], ginv)
            return [[first[i][j] - second[i][j] for j in range(n)] for i in range(n)]
        a_x = None if self.a_x is None else conj(self.a_x, UFun.deriv_x)
        return GlobalFamily(self.punctures, conj(self.a_t, UFun.deriv_t), a_x)


def local_nu(phi, p, prec=None):
    """Expand the global form phi(t) dt at p into a NuChoice."""
    prec = prec or default_precision()
    loc = phi.local(p, prec)
    if p == INF:
        loc = loc * Laurent.monomial(QQX, -2, -1)
    return NuChoice.from_coefficient(loc)


# -- de Rham cohomology ---------------------------------------------------------

@dataclass
class CohomologySummary:
    h0: int
    h1: int
    representatives: list
    flat_sections: list
    bound: int
    euler_poincare: dict = field(default_factory=dict)
    gm_h1: list = None
    gm_h0: list = None


def _complexity(key):
    p, k = key
    return k


def _apply_nabla(fam, vec):
    """d/dt + A_t on a vector of UFun."""
    n = fam.rank
    return [sum_ufun([vec[i].deriv_t()] + [fam.a_t[i][j] * vec[j] for j in range(n)]) for i in range(n)]


def _flatten(vec):
    out = {}
    for i, u in enumerate(vec):
        for key, v in u.terms.items():
            out[(i, key)] = v
    return out


def _unflatten(flat, n):
    vec = [dict() for _ in range(n)]
    for (i, key), v in flat.items():
        vec[i][key] = v
    return [UFun(d) for d in vec]


def _basis_keys(punctures, bound):
    keys = [(INF, k) for k in range(bound + 1)]
    for p in punctures:
        keys += [(p, k) for k in range(1, bound + 1)]
    return keys


class _Solver:
    """Truncated d/dt + A_t with target bound B and source bound B + slack."""

    def __init__(self, fam, bound, slack=4):
        self.fam = fam
        self.bound = bound
        n = fam.rank
        inside = set((i, key) for i in range(n) for key in _basis_keys(fam.punctures, bound))
        self.inside = inside

        def priority(col):
            i, (p, k) = col
            return (col not in inside, k, p != INF, str(p), i)
        self.ech = SparseEchelon(priority, track=True)
        self.sources = []
        for key in _basis_keys(fam.punctures, bound + slack):
            for i in range(n):
                vec = [UFun() for _ in range(n)]
                vec[i] = UFun({key: 1})
                tag = (i, key)
                self.sources.append(tag)
                self.ech.add(_flatten(_apply_nabla(fam, vec)), tag)
        piv = self.ech.pivots()
        self.representatives = sorted((c for c in inside if c not in piv),
                                      key=lambda c: (c[1][1], c[1][0] != INF, str(c[1][0]), c[0]))
        self.kernel = [_unflatten(k, n) for k in self.ech.kernel]

    def reduce(self, vec):
        """Coordinates of the class of vec on the representatives."""
        red = self.ech.reduce(_flatten(vec))
        outside = [c for c in red if c not in self.inside]
        if outside:
            raise StabilizationFailed("reduction left the truncation window", columns=len(outside))
        return [red.get(r, QQX.zero()) for r in self.representatives]


def _kernel_coordinates(kernel, vec):
    """Express vec in the basis `kernel` (lists of UFun)."""
    basis = [_flatten(k) for k in kernel]
    target = _flatten(vec)
    ech = SparseEchelon(priority=lambda c: (str(c[1][0]), c[1][1], c[0]), track=True)
    for idx, b in enumerate(basis):
        ech.add(b, idx)
    red = dict(target)
    coords = [QQX.zero()] * len(basis)
    # reduce target by stored rows and collect the combination
    while True:
        cand = [c for c in red if c in ech.rows]
        if not cand:
            break
        c = max(cand, key=ech.priority)
        f = red[c]
        for k, v in ech.rows[c].items():
            nv = red.get(k, 0) - f * v
            if nv:
                red[k] = nv
            else:
                red.pop(k, None)
        for idx, v in ech.combos[c].items():
            coords[idx] = coords[idx] + f * v
    if red:
        raise StabilizationFailed("horizontal derivative of a flat section left the kernel")
    return coords


def _gm(fam, solver):
    n = fam.rank
    reps = solver.representatives
    gm1 = []
    for (i, key) in reps:
        vec = [UFun() for _ in range(n)]
        for r in range(n):
            vec[r] = fam.a_x[r][i] * UFun({key: 1})
        gm1.append(solver.reduce(vec))
    gm0 = []
    for f in solver.kernel:
        dv = [sum_ufun([f[r].deriv_x()] + [fam.a_x[r][j] * f[j] for j in range(n)]) for r in range(n)]
        gm0.append(_kernel_coordinates(solver.kernel, dv))
    # column j of the matrix holds the image of basis vector j
    return ([[gm1[j][i] for j in range(len(reps))] for i in range(len(reps))],
            [[gm0[j][i] for j in range(len(gm0))] for i in range(len(gm0))])


def _trace(m):
    return sum((m[i][i] for i in range(len(m))), QQX.zero())


def derham(fam, bound=DERHAM_POLE_BOUND, grow=4, with_gm=None):
    """Kernel and cokernel of d/dt + A_t on O(U)^n, stable at bound and bound + grow."""
    with_gm = fam.a_x is not None if with_gm is None else with_gm
    runs = []
    for b in (bound, bound + grow):
        s = _Solver(fam, b)
        data = (len(s.kernel), len(s.representatives))
        gm = _gm(fam, s) if with_gm else (None, None)
        runs.append((s, data, gm))
    (s, data, gm), (_, data2, gm2) = runs
    if data != data2:
        raise StabilizationFailed(f"cohomology dimensions changed with the pole bound: {data} vs {data2}")
    if with_gm and (_trace(gm[0]) != _trace(gm2[0]) or _trace(gm[1]) != _trace(gm2[1])):
        raise StabilizationFailed("Gauss-Manin traces changed with the pole bound")
    h0, h1 = data
    irr = {str(p): irregularity(fam.local_at(p)) for p in fam.points}
    expected = sum(irr.values()) + fam.rank * (len(fam.points) - 2)
    ep = {"irregularities": irr, "expected": expected, "ok": h1 - h0 == expected}
    return CohomologySummary(h0, h1, s.representatives, s.kernel, bound, ep, gm[0], gm[1])


def gm_det_class(fam, summary=None):
    """Tr(GM on H^1) dx - Tr(GM on H^0) dx in the computed bases."""
    if summary is None or summary.gm_h1 is None:
        if fam.a_x is None:
            summary = summary or derham(fam, with_gm=False)
            if summary.h0 or summary.h1:
                raise DomainViolation("horizontal part needed for nonzero cohomology")
            return KForm(0)
        summary = derham(fam, with_gm=True)
    return KForm(_trace(summary.gm_h1) - _trace(summary.gm_h0))


@dataclass
class ProductReport:
    passed: bool
    local: dict
    lhs: KForm
    rhs: KForm
    difference: KForm
    is_dlog: bool
    witness: object
    degree_sum: int
    h0: int
    h1: int
    degrees_ok: bool
    euler_poincare_ok: bool


def product_formula_check(fam, phi, prec=None):
    """Compare the sum of local classes at phi dt with the Gauss-Manin determinant class."""
    local = {}
    lhs = KForm(0)
    deg = 0
    for p in fam.points:
        c = fam.local_at(p, prec)
        nu = local_nu(phi, p, prec)
        e = eps_class(c, nu)
        if e.form is None:
            raise UnsupportedLocalType(f"local connection at {p} is neither admissible nor regular singular",
                                       point=str(p))
        local[str(p)] = e
        lhs = lhs + e.form
        deg += e.degree
    summary = derham(fam)
    rhs = gm_det_class(fam, summary)
    diff = lhs - rhs
    res = dlog_class_test(diff)
    deg_ok = deg == summary.h1 - summary.h0
    return ProductReport(res.is_dlog and deg_ok, local, lhs, rhs, diff, res.is_dlog, res.witness,
                         deg, summary.h0, summary.h1, deg_ok, summary.euler_poincare["ok"])


def ufun_matrix(rows, punctures):
    """Convert a matrix of TRat (or constants) to UFun."""
    out = []
    for row in rows:
        out.append([e.to_ufun() if isinstance(e, TRat) else UFun.const(e) for e in row])
    return out
