"""Exact linear algebra over the scalar rings and over K((t)).

Dense routines work over local rings (a pivot must be a unit); the sparse
echelon is used over fields for the large truncated systems.
"""
from .errors import NotInvertible, PrecisionExhausted
from .laurent import Laurent
from .scalars import inverse, is_unit


def _unit_pivot(a, col, start):
    for r in range(start, len(a)):
        if is_unit(a[r][col]):
            return r
    return None


def det(m):
    """Determinant over a local scalar ring by unit-pivot elimination.

    Raises NotInvertible when some column has no unit pivot (the determinant
    is then a non-unit, which is all callers need to know).
    """
    a = [list(row) for row in m]
    n = len(a)
    sign = 1
    out = 1
    for j in range(n):
        p = _unit_pivot(a, j, j)
        if p is None:
            raise NotInvertible(f"no unit pivot in column {j}")
        if p != j:
            a[j], a[p] = a[p], a[j]
            sign = -sign
        piv = a[j][j]
        out = out * piv
        inv = inverse(piv)
        for r in range(j + 1, n):
            f = a[r][j]
            if not f:
                continue
            f = f * inv
            rowj = a[j]
            rowr = a[r]
            for k in range(j + 1, n):
                if rowj[k]:
                    rowr[k] = rowr[k] - f * rowj[k]
    return out * sign


def pivot_columns(rows):
    """Columns on which the row list is invertible, chosen by unit pivots."""
    a = [list(r) for r in rows]
    n = len(a)
    width = len(a[0]) if a else 0
    cols = []
    r = 0
    for j in range(width):
        if r == n:
            break
        p = _unit_pivot(a, j, r)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = inverse(a[r][j])
        for i in range(r + 1, n):
            f = a[i][j]
            if not f:
                continue
            f = f * inv
            for k in range(j, width):
                if a[r][k]:
                    a[i][k] = a[i][k] - f * a[r][k]
        cols.append(j)
        r += 1
    if r < n:
        raise NotInvertible("rows do not span a free module of full rank")
    return cols


def solve_left(p_rows, q_rows):
    """T with P = T Q, when P and Q are bases of the same module (verified)."""
    cols = pivot_columns(q_rows)
    qs = [[row[c] for c in cols] for row in q_rows]
    ps = [[row[c] for c in cols] for row in p_rows]
    qinv = inverse_matrix(qs)
    t = mat_mul(ps, qinv)
    back = mat_mul(t, q_rows)
    for r1, r2 in zip(back, p_rows):
        if any(u != v for u, v in zip(r1, r2)):
            raise NotInvertible("rows are not in the span of the reference basis")
    return t


def inverse_matrix(m):
    n = len(m)
    a = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    for j in range(n):
        p = _unit_pivot(a, j, j)
        if p is None:
            raise NotInvertible(f"no unit pivot in column {j}")
        a[j], a[p] = a[p], a[j]
        inv = inverse(a[j][j])
        a[j] = [v * inv if v else v for v in a[j]]
        for r in range(n):
            if r == j:
                continue
            f = a[r][j]
            if not f:
                continue
            a[r] = [u - f * v if v else u for u, v in zip(a[r], a[j])]
    return [row[n:] for row in a]


def mat_mul(a, b):
    n, m = len(a), len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            s = 0
            for k, u in enumerate(ai):
                if u:
                    v = b[k][j]
                    if v:
                        s = s + u * v
            row.append(s)
        out.append(row)
    return out


# -- matrices over K((t)) -----------------------------------------------------

def lmat_zero(ring, n, m=None):
    return [[Laurent.zero(ring) for _ in range(m or n)] for _ in range(n)]


def lmat_identity(ring, n):
    return [[Laurent.const(ring, 1) if i == j else Laurent.zero(ring) for j in range(n)] for i in range(n)]


def lmat_mul(a, b):
    n, m = len(a), len(b[0])
    ring = a[0][0].ring
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = Laurent.zero(ring)
            for k in range(len(b)):
                s = s + a[i][k] * b[k][j]
            row.append(s)
        out.append(row)
    return out


def lmat_add(a, b):
    return [[u + v for u, v in zip(ra, rb)] for ra, rb in zip(a, b)]


def lmat_sub(a, b):
    return [[u - v for u, v in zip(ra, rb)] for ra, rb in zip(a, b)]


def lmat_scale(a, s):
    return [[u * s for u in row] for row in a]


def lmat_map(a, fn):
    return [[fn(u) for u in row] for row in a]


def lmat_transpose(a):
    return [list(col) for col in zip(*a)]


def lmat_trace(a):
    s = a[0][0]
    for i in range(1, len(a)):
        s = s + a[i][i]
    return s


def _best_pivot(a, col, start):
    best, best_v = None, None
    for r in range(start, len(a)):
        e = a[r][col]
        try:
            v = e.val()
        except PrecisionExhausted:
            continue
        if best is None or v < best_v:
            best, best_v = r, v
    return best


def lmat_inverse(m):
    """Inverse over K((t)) (or R((t)) with unit pivots), propagating precision."""
    n = len(m)
    ring = m[0][0].ring
    a = [list(row) + [Laurent.const(ring, 1) if i == j else Laurent.zero(ring) for j in range(n)]
         for i, row in enumerate(m)]
    for j in range(n):
        p = _best_pivot(a, j, j)
        if p is None:
            raise NotInvertible(f"matrix over Laurent series is singular to precision (column {j})")
        a[j], a[p] = a[p], a[j]
        inv = a[j][j].inv()
        a[j] = [v * inv for v in a[j]]
        for r in range(n):
            if r == j or a[r][j].is_zero() and a[r][j].exact:
                continue
            f = a[r][j]
            a[r] = [u - f * v for u, v in zip(a[r], a[j])]
    return [row[n:] for row in a]


def lmat_det(m):
    n = len(m)
    a = [list(row) for row in m]
    ring = m[0][0].ring
    out = Laurent.const(ring, 1)
    for j in range(n):
        p = _best_pivot(a, j, j)
        if p is None:
            return Laurent.zero(ring, min((e.prec for row in a for e in row if e.prec is not None), default=None))
        if p != j:
            a[j], a[p] = a[p], a[j]
            out = -out
        piv = a[j][j]
        out = out * piv
        inv = piv.inv()
        for r in range(j + 1, n):
            f = a[r][j] * inv
            a[r] = [u - f * v for u, v in zip(a[r], a[j])]
    return out


def lsolve(m, rhs):
    """Solve m y = rhs (column vector) over K((t))."""
    inv = lmat_inverse(m)
    return [col[0] for col in lmat_mul(inv, [[v] for v in rhs])]


# -- sparse echelon over a field -------------------------------------------------

class SparseEchelon:
    """Incremental echelon form for sparse vectors (dict column -> value).

    `priority(col)` orders columns; a reduced vector's pivot is its
    highest-priority column.  Optional combination tags record how each stored
    row was built from the inserted vectors, which yields kernel vectors.
    """

    def __init__(self, priority, track=False):
        self.priority = priority
        self.rows = {}
        self.track = track
        self.combos = {}
        self.kernel = []

    def _reduce(self, vec, combo):
        vec = dict(vec)
        while True:
            cand = [c for c in vec if c in self.rows]
            if not cand:
                return vec, combo
            c = max(cand, key=self.priority)
            f = vec[c]
            for k, v in self.rows[c].items():
                nv = vec.get(k, 0) - f * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            if combo is not None:
                for k, v in self.combos[c].items():
                    nv = combo.get(k, 0) - f * v
                    if nv:
                        combo[k] = nv
                    else:
                        combo.pop(k, None)

    def add(self, vec, tag=None):
        combo = {tag: 1} if self.track else None
        vec = {k: v for k, v in vec.items() if v}
        vec, combo = self._reduce(vec, combo)
        if not vec:
            if self.track:
                self.kernel.append(combo)
            return None
        c = max(vec, key=self.priority)
        inv = inverse(vec[c])
        self.rows[c] = {k: v * inv for k, v in vec.items()}
        if self.track:
            self.combos[c] = {k: v * inv for k, v in combo.items()}
        return c

    def reduce(self, vec):
        out, _ = self._reduce({k: v for k, v in vec.items() if v}, None)
        return out

    def pivots(self):
        return set(self.rows)
