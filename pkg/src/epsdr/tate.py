"""Finite-window Fredholm calculus on R((t))^n.

Index of banded operators, the Koszul sign, and an independent route to the
commutator pairing of R((t))^x via relative determinants of lattices.
"""
from dataclasses import dataclass

from .errors import NotAUnit, NotInvertible, WindowTooSmall
from .laurent import Laurent
from .linalg import SparseEchelon, det, pivot_columns
from .scalars import inverse


@dataclass(frozen=True)
class GradedLineTag:
    degree: int

    @property
    def parity(self):
        return self.degree % 2


def koszul_sign(p, q):
    return -1 if (p % 2) and (q % 2) else 1


class BandedOperator:
    """Continuous operator on R((t))^n given by its action on column vectors.

    `apply` maps a list of n Laurent series to a list of n Laurent series.
    `band` is an integer s with op(t^a O^n) inside t^(a-s) O^n.
    """

    def __init__(self, rank, ring, apply, band):
        self.rank = rank
        self.ring = ring
        self.apply = apply
        self.band = band

    def image(self, j, i):
        vec = [Laurent.zero(self.ring) for _ in range(self.rank)]
        vec[i] = Laurent.monomial(self.ring, j, 1)
        return self.apply(vec)

    def check_band(self, exponents=(-3, 0, 5)):
        for j in exponents:
            for i in range(self.rank):
                for entry in self.image(j, i):
                    if entry.c and entry.v0 < j - self.band:
                        return False
        return True

    # -- constructors ---------------------------------------------------------
    @classmethod
    def multiplication(cls, f, rank=1):
        def apply(vec):
            return [f * v for v in vec]
        return cls(rank, f.ring, apply, -f.order())

    @classmethod
    def matrix_multiplication(cls, m):
        n = len(m)
        ring = m[0][0].ring
        band = -min(e.order() for row in m for e in row if e.c)

        def apply(vec):
            return [sum((m[i][k] * vec[k] for k in range(n)), Laurent.zero(ring)) for i in range(n)]
        return cls(n, ring, apply, band)

    @classmethod
    def connection(cls, a_t, coef=None):
        """v -> coef * (d/dt v + A_t v); coef = 1 gives the derivation along d/dt."""
        n = len(a_t)
        ring = a_t[0][0].ring
        if coef is None:
            coef = Laurent.const(ring, 1)
        orders = [e.order() for row in a_t for e in row if e.c]
        low = min([-1] + orders)
        band = -(coef.order() + low)

        def apply(vec):
            out = []
            for i in range(n):
                s = vec[i].deriv_t()
                for k in range(n):
                    if a_t[i][k].c or not a_t[i][k].exact:
                        s = s + a_t[i][k] * vec[k]
                out.append(coef * s)
            return out
        return cls(n, ring, apply, band)

    def compose(self, other):
        """self after other."""
        return BandedOperator(self.rank, self.ring, lambda v: self.apply(other.apply(v)),
                              self.band + other.band)

    def perturb(self, table):
        """Add a finite-rank operator: table[(j, i)] is the extra image of t^j e_i."""
        def apply(vec):
            out = self.apply(vec)
            for (j, i), col in table.items():
                c = vec[i].coeff(j)
                if c:
                    out = [o + w * c for o, w in zip(out, col)]
            return out
        band = self.band
        for (j, i), col in table.items():
            for w in col:
                if w.c:
                    band = max(band, j - w.v0)
        return BandedOperator(self.rank, self.ring, apply, band)


def _window_rank(op, a, b):
    s = op.band
    n = op.rank
    if b + s <= a:
        raise WindowTooSmall(f"window ({a}, {b}) is empty for band {s}")
    ech = SparseEchelon(priority=lambda col: col)
    for j in range(a, b + s):
        for i in range(n):
            img = op.image(j, i)
            vec = {}
            for r, entry in enumerate(img):
                for k in range(max(a - s, entry.v0 if entry.c else b), b):
                    c = entry.coeff(k)
                    if c:
                        vec[(k, r)] = c
            ech.add(vec)
    return len(ech.rows)


def index_on_window(op, a, b):
    """rank of the truncated map minus n (b - a) for one window."""
    return _window_rank(op, a, b) - op.rank * (b - a)


def index(op, window=(-36, -24), grow=8):
    """Fredholm index of a banded operator, read off at very negative exponents.

    The truncated matrix maps span{t^j e_i : a <= j < b + s} to
    span{t^k e_i : a - s <= k < b}.  Its rank minus n (b - a) is the index,
    provided the window sits below the exceptional exponents of the operator.
    The value is recomputed on an enlarged and on a shifted window; any
    disagreement raises WindowTooSmall.
    """
    a, b = window
    values = {
        "base": index_on_window(op, a, b),
        "enlarged": index_on_window(op, a - grow, b),
        "shifted": index_on_window(op, a - grow, b - grow),
    }
    if len(set(values.values())) != 1:
        raise WindowTooSmall(f"index did not stabilize: {values}")
    return values["base"]


# -- commutator pairing via relative determinants ---------------------------------

def _rows(h, shifts, lo, hi):
    """Coefficient rows of h t^j (j in shifts) on exponents lo..hi-1."""
    out = []
    zero = h.ring.zero()
    for j in shifts:
        row = [zero] * (hi - lo)
        for k in range(max(lo, h.v0 + j), hi):
            c = h.coeff(k - j)
            if c:
                row[k - lo] = c
        out.append(row)
    return out


def _unit_rows(ring, exps, lo, hi):
    zero, one = ring.zero(), ring.one()
    out = []
    for k in exps:
        row = [zero] * (hi - lo)
        row[k - lo] = one
        out.append(row)
    return out


def _ratio(p_rows, q_rows):
    """det T for P = T Q, two bases of one free module."""
    cols = pivot_columns(q_rows)
    dq = det([[row[c] for c in cols] for row in q_rows])
    dp = det([[row[c] for c in cols] for row in p_rows])
    return dp * inverse(dq)


def plain_commutator(f, g, depth, deep):
    """{f, g}^plain from lattice bases taken modulo t^deep (lattices contain t^depth O)."""
    ring = f.ring
    vf, vg = f.val(), g.val()
    fg = f * g
    lo = min(0, f.order(), g.order(), fg.order())
    D, W = depth, deep
    if D - vf < 0 or D - vg < 0 or W - vf <= D or W - vg <= D:
        raise WindowTooSmall("window too small for the valuations involved")
    rho_f = _ratio(_rows(f, range(D - vf), lo, W) + _unit_rows(ring, range(D, W), lo, W),
                   _rows(f, range(W - vf), lo, W))
    rho_g = _ratio(_rows(g, range(D - vg), lo, W) + _unit_rows(ring, range(D, W), lo, W),
                   _rows(g, range(W - vg), lo, W))
    num = _rows(fg, range(D - vg), lo, W) + _rows(f, range(D, W - vf), lo, W)
    den = _rows(fg, range(D - vf), lo, W) + _rows(g, range(D, W - vg), lo, W)
    return rho_f * _ratio(num, den) * inverse(rho_g)


def symbol_oracle(f, g, window=32, grow=8):
    """Super commutator pairing {f, g} of units of R((t)).

    Lifts of f and g to the determinant-line extension are built from explicit
    lattice bases; their commutator scalar is a ratio of determinants.  The
    Koszul sign (-1)^(v(f) v(g)) turns the plain pairing into the super one.
    Computed at windows M and M + grow; disagreement raises WindowTooSmall.
    """
    if f.ring != g.ring:
        from .scalars import common_ring
        r = common_ring(f.ring, g.ring)
        f, g = f.change_ring(r), g.change_ring(r)
    for h in (f, g):
        if not h.is_unit():
            raise NotAUnit(f"{h} is not a unit")
    vals = []
    for m in (window, window + grow):
        try:
            vals.append(plain_commutator(f, g, m // 2, m))
        except NotInvertible as exc:
            raise WindowTooSmall(f"lattice bases degenerate at window {m}: {exc}") from exc
    if vals[0] != vals[1]:
        raise WindowTooSmall(f"commutator did not stabilize: {vals[0]} vs {vals[1]}")
    return vals[0] * koszul_sign(f.val(), g.val())
