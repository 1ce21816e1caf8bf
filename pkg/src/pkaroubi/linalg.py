"""Exact Gaussian elimination over a :class:`~pkaroubi.field.Field`.

Matrices are lists of rows; vectors are tuples.  Everything here is plain
row reduction, written out so that it works identically over Q and F_p.
"""
from __future__ import annotations


def rref(rows, ncols: int, field):
    """Reduced row echelon form.  Returns ``(nonzero_rows, pivot_columns)``."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        inv = field.one / row[c]
        if inv != field.one:
            row = [x * inv for x in row]
            m[r] = row
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    other = m[i]
                    m[i] = [a - f * b for a, b in zip(other, row)]
        pivots.append(c)
        r += 1
    return [tuple(x) for x in m[:r]], pivots


def rank(rows, ncols: int, field) -> int:
    return len(rref(rows, ncols, field)[1])


def nullspace(rows, ncols: int, field) -> list:
    """Basis of {x : M x = 0}, one vector per free column (in column order)."""
    red, piv = rref(rows, ncols, field)
    pivset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for row, p in zip(red, piv):
            if row[f]:
                v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(rows, rhs, ncols: int, field):
    """A particular solution of M x = b with free variables set to zero, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug, ncols + 1, field)
    if piv and piv[-1] == ncols:
        return None
    x = [field.zero] * ncols
    for row, p in zip(red, piv):
        x[p] = row[ncols]
    return tuple(x)


def transpose(rows, ncols: int) -> list:
    return [tuple(r[j] for r in rows) for j in range(ncols)]


def matmul(a, b, field, inner: int | None = None):
    if not a:
        return []
    if inner is None:
        inner = len(a[0])
    if not b:
        return [() for _ in a]
    bt = list(zip(*b))
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append(tuple(_dot_sparse(nz, col, field) for col in bt))
    return out


def _dot_sparse(nz, col, field):
    s = field.zero
    for k, x in nz:
        y = col[k]
        if y:
            s = s + x * y
    return s


def matvec(a, v, field) -> tuple:
    nz = [(k, x) for k, x in enumerate(v) if x]
    return tuple(_dot_sparse(nz, row, field) for row in a)


def add(u, v) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v) -> tuple:
    return tuple(c * a for a in v)


def is_zero(v) -> bool:
    return not any(v)


class Span:
    """Incrementally grown subspace with membership and coordinate queries.

    Vectors are kept reduced against each other; ``combo`` records every
    stored row as a combination of the vectors that were added, so that
    ``coordinates`` can express a member in terms of the inputs.
    """

    def __init__(self, ncols: int, field):
        self.ncols = ncols
        self.field = field
        self.rows = []       # (pivot, row, combo)
        self.count = 0

    def _reduce(self, v, combo):
        v = list(v)
        for p, row, c in self.rows:
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
                combo = [a - f * b for a, b in zip(combo, c)]
        return v, combo

    def add(self, v) -> bool:
        """Add ``v``; returns True if it enlarged the span."""
        f = self.field
        combo = [f.zero] * self.count + [f.one]
        self.rows = [(p, row, list(c) + [f.zero]) for p, row, c in self.rows]
        self.count += 1
        v, combo = self._reduce(v, combo)
        for p, x in enumerate(v):
            if x:
                inv = f.one / x
                v = [a * inv for a in v]
                combo = [a * inv for a in combo]
                new_rows = []
                for q, row, c in self.rows:
                    g = row[p]
                    if g:
                        row = [a - g * b for a, b in zip(row, v)]
                        c = [a - g * b for a, b in zip(c, combo)]
                    new_rows.append((q, row, c))
                new_rows.append((p, v, combo))
                self.rows = new_rows
                return True
        return False

    def contains(self, v) -> bool:
        w, _ = self._reduce(v, [self.field.zero] * self.count)
        return not any(w)

    def coordinates(self, v):
        """Coefficients over the added vectors expressing ``v``, or None."""
        w = list(v)
        coeffs = [self.field.zero] * self.count
        for p, row, c in self.rows:
            f = w[p]
            if f:
                w = [a - f * b for a, b in zip(w, row)]
                coeffs = [a + f * b for a, b in zip(coeffs, c)]
        if any(w):
            return None
        return tuple(coeffs)

    @property
    def dim(self) -> int:
        return len(self.rows)
