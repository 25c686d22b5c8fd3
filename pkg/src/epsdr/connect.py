"""Formal connections on K((t))^n: gauge changes, cyclic vectors,
irregularity, the determinant-line degree, and the basis-level tests for the
admissible and regular singular shapes.

A connection is d + A_t dt + A_x dx acting on column vectors, so the column
of A_t with index j is the image of e_j under the derivation along d/dt.
"""
import random
from fractions import Fraction
from dataclasses import dataclass

from .config import MAX_CYCLIC_ATTEMPTS
from .errors import (CyclicSearchFailed, DivisionByNonUnit, DomainViolation, NotAdmissible, NotInvertible,
                     NotRegularSingularInBasis, PrecisionExhausted)
from .laurent import Laurent
from .linalg import (det, lmat_add, lmat_det, lmat_inverse, lmat_map, lmat_mul, lmat_sub,
                     lmat_trace, lmat_transpose, lsolve)
from .scalars import QQ, QQX
from .tate import BandedOperator
from .tate import index as fredholm_index


def _lm(ring, rows):
    return [[e if isinstance(e, Laurent) else Laurent.const(ring, e) for e in row] for row in rows]


class Connection:
    """d + A_t dt + A_x dx on K((t))^n in a fixed basis; A_x may be None."""

    def __init__(self, a_t, a_x=None, check_flat=True):
        ring = QQX
        self.ring = ring
        self.a_t = [[(e if isinstance(e, Laurent) else Laurent.const(ring, e)).change_ring(ring)
                     for e in row] for row in a_t]
        self.a_x = None
        if a_x is not None:
            self.a_x = [[(e if isinstance(e, Laurent) else Laurent.const(ring, e)).change_ring(ring)
                         for e in row] for row in a_x]
        self.rank = len(a_t)
        if check_flat and self.a_x is not None and not self.is_flat():
            raise DomainViolation("A_t dt + A_x dx is not integrable")

    @property
    def precision(self):
        precs = [e.prec for row in self.a_t + (self.a_x or []) for e in row if e.prec is not None]
        return min(precs) if precs else None

    def flatness_defect(self):
        """d_x A_t - d_t A_x + [A_x, A_t]."""
        if self.a_x is None:
            return None
        dx_at = lmat_map(self.a_t, Laurent.deriv_x)
        dt_ax = lmat_map(self.a_x, Laurent.deriv_t)
        comm = lmat_sub(lmat_mul(self.a_x, self.a_t), lmat_mul(self.a_t, self.a_x))
        return lmat_add(lmat_sub(dx_at, dt_ax), comm)

    def is_flat(self):
        d = self.flatness_defect()
        if d is None:
            return True
        return all(e.is_zero() for row in d for e in row)

    def direct_sum(self, other):
        n, m = self.rank, other.rank
        z = Laurent.zero(self.ring)

        def block(a, b):
            if a is None and b is None:
                return None
            a = a or [[z] * n for _ in range(n)]
            b = b or [[z] * m for _ in range(m)]
            return [list(r) + [z] * m for r in a] + [[z] * n + list(r) for r in b]
        return Connection(block(self.a_t, other.a_t),
                          block(self.a_x, other.a_x) if (self.a_x or other.a_x) else None,
                          check_flat=False)

    def tensor(self, other):
        """Kronecker connection A (x) 1 + 1 (x) B."""
        n, m = self.rank, other.rank

        def kron(a, b):
            if a is None or b is None:
                return None
            out = []
            for i in range(n):
                for k in range(m):
                    row = []
                    for j in range(n):
                        for l in range(m):
                            e = Laurent.zero(self.ring)
                            if k == l:
                                e = e + a[i][j]
                            if i == j:
                                e = e + b[k][l]
                            row.append(e)
                    out.append(row)
            return out
        return Connection(kron(self.a_t, other.a_t), kron(self.a_x, other.a_x), check_flat=False)

    def dual(self):
        neg_t = [[-e for e in row] for row in lmat_transpose(self.a_t)]
        neg_x = None if self.a_x is None else [[-e for e in row] for row in lmat_transpose(self.a_x)]
        return Connection(neg_t, neg_x, check_flat=False)

    def trace_t(self):
        return lmat_trace(self.a_t)

    def trace_x(self):
        return lmat_trace(self.a_x) if self.a_x is not None else Laurent.zero(self.ring)

    def operator(self, coef=None):
        """Banded operator v -> coef (dv/dt + A_t v)."""
        return BandedOperator.connection(self.a_t, coef)

    def apply_derivation(self, vec, coef):
        """coef * (d/dt + A_t) applied to a column vector."""
        n = self.rank
        out = []
        for i in range(n):
            s = vec[i].deriv_t()
            for k in range(n):
                s = s + self.a_t[i][k] * vec[k]
            out.append(coef * s)
        return out

    def __repr__(self):
        return f"Connection(rank={self.rank}, A_t={self.a_t}, A_x={self.a_x})"


# -- one-forms nu = u t^l dt ---------------------------------------------------------

@dataclass
class NuChoice:
    """nu = u t^ell dt with u a unit of K[[t]]."""

    ell: int
    u: Laurent

    @classmethod
    def from_coefficient(cls, phi):
        ell = phi.val()
        return cls(ell, phi.shift(-ell))

    @classmethod
    def simple(cls, ell, u0=1, ring=QQX):
        return cls(ell, Laurent.const(ring, u0))

    def coefficient(self):
        return self.u.shift(self.ell)

    @property
    def u0(self):
        return self.u.coeff(0)

    def negate(self):
        return NuChoice(self.ell, -self.u)


def as_nu(nu, ring=QQX):
    if isinstance(nu, NuChoice):
        return nu
    if isinstance(nu, Laurent):
        return NuChoice.from_coefficient(nu.change_ring(ring) if nu.ring != ring else nu)
    raise TypeError(f"cannot interpret {nu!r} as a one-form")


def tau_coefficient(nu):
    """Coefficient of d/dt in the vector field dual to nu."""
    return nu.coefficient().inv()


# -- gauge, pullback, pushforward ----------------------------------------------------

def gauge(c, g, ginv=None):
    """A -> G A G^-1 - dG G^-1 (new coordinates w = G v)."""
    if ginv is None:
        ginv = lmat_inverse(g)
    a_t = lmat_sub(lmat_mul(lmat_mul(g, c.a_t), ginv), lmat_mul(lmat_map(g, Laurent.deriv_t), ginv))
    a_x = None
    if c.a_x is not None:
        a_x = lmat_sub(lmat_mul(lmat_mul(g, c.a_x), ginv), lmat_mul(lmat_map(g, Laurent.deriv_x), ginv))
    return Connection(a_t, a_x, check_flat=False)


def pullback_ramified(c, e):
    """Substitute t = s^e, so dt = e s^(e-1) ds."""
    if e == 1:
        return c
    jac = Laurent.monomial(c.ring, e - 1, e)
    a_s = [[x.subs_power(e) * jac for x in row] for row in c.a_t]
    a_x = None if c.a_x is None else [[x.subs_power(e) for x in row] for row in c.a_x]
    return Connection(a_s, a_x, check_flat=False)


def pushforward(c, e):
    """Direct image along t = s^e; basis s^j v_k (0 <= j < e), index j * r + k."""
    if e == 1:
        return c
    r = c.rank
    ring = c.ring
    n = r * e
    a_t = [[None] * n for _ in range(n)]
    a_x = None if c.a_x is None else [[None] * n for _ in range(n)]
    scale = Laurent.monomial(ring, 1 - e, Fraction(1, e))
    for j in range(e):
        for k in range(r):
            col = j * r + k
            # image of s^j v_k under the derivation along d/dt, in s-coordinates
            images = []
            for kk in range(r):
                w = Laurent.monomial(ring, j, 1) * c.a_t[kk][k]
                if kk == k and j:
                    w = w + Laurent.monomial(ring, j - 1, j)
                images.append(w * scale)
            for jj in range(e):
                for kk in range(r):
                    a_t[jj * r + kk][col] = images[kk].section(e, jj)
            if a_x is not None:
                for kk in range(r):
                    w = Laurent.monomial(ring, j, 1) * c.a_x[kk][k]
                    for jj in range(e):
                        a_x[jj * r + kk][col] = w.section(e, jj)
    return Connection(a_t, a_x, check_flat=False)


# -- cyclic vectors and irregularity ----------------------------------------------------

@dataclass
class CyclicData:
    vector: list
    coefficients: list
    attempts: int


def _candidates(n, ring, seed):
    one = Laurent.const(ring, 1)
    zero = Laurent.zero(ring)
    for i in range(n):
        yield [one if k == i else zero for k in range(n)]
    yield [one for _ in range(n)]
    for shift in range(n):
        yield [Laurent.monomial(ring, (k + shift) % n, 1) for k in range(n)]
    rng = random.Random(seed)
    while True:
        yield [Laurent.monomial(ring, rng.randint(0, 3), rng.randint(-3, 3)) if rng.random() < 0.8 else zero
               for _ in range(n)]


def _solve_relation(vecs, n):
    basis = [[vecs[k][i] for k in range(n)] for i in range(n)]
    lmat_det(basis).val()
    return lsolve(basis, vecs[n])


_PROBES = ((Fraction(7, 3), Fraction(5, 11)), (Fraction(-11, 5), Fraction(-3, 13)))


def _probably_dependent(vecs, n):
    """True when the first n vectors are singular at every probe point (x, t).

    A nonzero value at one point proves independence; vanishing at all probes
    only lets the search skip the candidate, so nothing is concluded wrongly.
    """
    if any(not e.exact for v in vecs[:n] for e in v):
        return False
    for x0, t0 in _PROBES:
        try:
            rows = [[sum((a(x0) * t0 ** (e.v0 + k) for k, a in enumerate(e.c) if a), Fraction(0))
                     for e in (vecs[k][i] for k in range(n))] for i in range(n)]
        except (DivisionByNonUnit, ZeroDivisionError):
            continue
        try:
            det(rows)
            return False
        except NotInvertible:
            pass
    return True


def _relation(vecs, n, start=8, cap=64):
    """Coefficients a_i of the relation, needed only up to t^0.

    The series are cut to a growing number of terms past their lowest order
    until every coefficient is known through t^0; the untruncated solve is the
    last resort.
    """
    orders = [e.order() for v in vecs for e in v if e.c]
    if not orders:
        raise NotInvertible("zero vectors")
    low = min(orders)
    rel = start
    while rel <= cap:
        cut = [[e.truncate(low + rel) for e in v] for v in vecs]
        try:
            coeffs = _solve_relation(cut, n)
        except PrecisionExhausted:
            coeffs = None
        if coeffs is None:
            rel *= 2
            continue
        short = min(1 if a.prec is None else a.prec for a in coeffs)
        if short >= 1:
            return coeffs
        # the loss of precision is roughly fixed, so grow by the deficit
        rel += 2 - short
    return _solve_relation(vecs, n)


def cyclic_vector(c, tau=None, seed=0, max_attempts=MAX_CYCLIC_ATTEMPTS):
    """Find e with e, tau e, ..., tau^(n-1) e a basis; return the relation coefficients.

    `tau` is the coefficient of d/dt of the vector field (default t, i.e. t d/dt).
    The coefficients a_i satisfy tau^n e = sum_i a_i tau^i e.
    """
    n = c.rank
    if tau is None:
        tau = Laurent.monomial(c.ring, 1, 1)
    attempts = 0
    for e in _candidates(n, c.ring, seed):
        attempts += 1
        if attempts > max_attempts:
            break
        if all(v.is_zero() for v in e):
            continue
        vecs = [e]
        try:
            for _ in range(n):
                vecs.append(c.apply_derivation(vecs[-1], tau))
            if _probably_dependent(vecs, n):
                continue
            coeffs = _relation(vecs, n)
        except (PrecisionExhausted, NotInvertible):
            continue
        return CyclicData(e, coeffs, attempts)
    raise CyclicSearchFailed(f"no cyclic vector among {max_attempts} candidates", attempts=max_attempts)


def irregularity(c, seed=0):
    """max(0, max_i -v(a_i)) for the operator of t d/dt on a cyclic vector."""
    data = cyclic_vector(c, seed=seed)
    worst = 0
    for a in data.coefficients:
        if a.is_zero():
            if a.prec is not None and a.prec < 0:
                raise PrecisionExhausted("relation coefficient unknown below t^0")
            continue
        worst = max(worst, -a.val())
    return worst


def epsilon_degree(c, nu, seed=0):
    """Degree of the determinant line: i(nabla) + (v(nu) + 1) n."""
    nu = as_nu(nu, c.ring)
    return irregularity(c, seed) + (nu.ell + 1) * c.rank


SPECIALIZATION_POINTS = (Fraction(7, 3), Fraction(-11, 5), Fraction(13, 17), Fraction(-29, 7))


def _specialize(f, x0):
    return Laurent._raw(QQ, f.v0, [a(x0) for a in f.c], f.prec)


def index_of_derivation(c, nu, window=(-36, -24), points=2):
    """Fredholm index of the derivation along the vector field dual to nu.

    Only d/dt acts, so the truncated matrices are computed with x set to a
    rational value.  Specializing can only lower a rank, hence the maximum over
    `points` regular values is taken.
    """
    nu = as_nu(nu, c.ring)
    tau = tau_coefficient(nu)
    best, used = None, 0
    for x0 in SPECIALIZATION_POINTS:
        if used == points:
            break
        try:
            a_t = [[_specialize(e, x0) for e in row] for row in c.a_t]
            coef = _specialize(tau, x0)
        except DivisionByNonUnit:
            continue
        # x0 must not lower the pole order of any entry or of the vector field
        pairs = [(e, f) for r1, r2 in zip(c.a_t, a_t) for e, f in zip(r1, r2)] + [(tau, coef)]
        if any(e.c and (not f.c or f.order() != e.order()) for e, f in pairs):
            continue
        used += 1
        value = fredholm_index(BandedOperator.connection(a_t, coef), window)
        best = value if best is None else max(best, value)
    if best is None:
        raise DivisionByNonUnit("no regular specialization point")
    return best


# -- structure in the stored basis ------------------------------------------------------

@dataclass
class AdmissibleData:
    m: int
    g: list
    eta: list


def _min_order(mat):
    orders = [e.order() for row in mat for e in row if e.c]
    return min(orders) if orders else None


def _constant_matrix(mat):
    return [[e.coeff(0) for e in row] for row in mat]


def detect_admissible(c):
    """A_t = t^-m g with g(0) invertible, m >= 2, and A_x = t^(1-m) eta over O."""
    if c.a_x is None:
        raise NotAdmissible("connection has no horizontal part")
    low = _min_order(c.a_t)
    if low is None or low > -2:
        raise NotAdmissible("pole order of A_t is below 2")
    m = -low
    g = [[e.shift(m) for e in row] for row in c.a_t]
    try:
        det(_constant_matrix(g))
    except NotInvertible as exc:
        raise NotAdmissible("leading coefficient g(0) is not invertible") from exc
    eta = [[e.shift(m - 1) for e in row] for row in c.a_x]
    low_x = _min_order(eta)
    if low_x is not None and low_x < 0:
        raise NotAdmissible(f"horizontal part has a pole of order > {m - 1}")
    return AdmissibleData(m, g, eta)


@dataclass
class RegularData:
    kappa: list
    eta0: list
    nonsingular: bool


def regular_singular_data(c):
    """Residue kappa of A_t (pole order <= 1) and the fiber value eta0 = A_x(0)."""
    low = _min_order(c.a_t)
    if low is not None and low < -1:
        raise NotRegularSingularInBasis(f"A_t has a pole of order {-low}")
    kappa = [[e.coeff(-1) for e in row] for row in c.a_t]
    eta0 = None
    if c.a_x is not None:
        low_x = _min_order(c.a_x)
        if low_x is not None and low_x < 0:
            raise NotRegularSingularInBasis("horizontal part is not over K[[t]]")
        eta0 = _constant_matrix(c.a_x)
    nonsingular = all(not k for row in kappa for k in row)
    return RegularData(kappa, eta0, nonsingular)


def blocks(c):
    """Index sets of the finest block-diagonal splitting of (A_t, A_x)."""
    n = c.rank
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i
    for mat in (c.a_t, c.a_x or []):
        for i, row in enumerate(mat):
            for j, e in enumerate(row):
                if i != j and (e.c or not e.exact):
                    parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def restrict(c, idx):
    sub = lambda m: None if m is None else [[m[i][j] for j in idx] for i in idx]
    return Connection(sub(c.a_t), sub(c.a_x), check_flat=False)
