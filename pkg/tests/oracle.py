"""Independent reference computations built on sympy's DomainMatrix.

Nothing here touches the package's own elimination code: ranks come from
sympy over QQ or GF(p), and dimensions are recomputed from the raw data
(generators, births, relation vectors, differentials).
"""
from fractions import Fraction

from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix


def _domain(field):
    return GF(field.p) if field.p else QQ


def _conv(x, dom, field):
    if field.p:
        return dom(int(x) % field.p)
    x = Fraction(x)
    return dom(x.numerator, x.denominator)


def rank(rows, ncols, field) -> int:
    rows = [list(r) for r in rows if any(r)]
    if not rows or not ncols:
        return 0
    dom = _domain(field)
    M = DomainMatrix([[_conv(x, dom, field) for x in r] for r in rows], (len(rows), ncols), dom)
    return M.rank()


def module_dim(M, r) -> int:
    """dim V_r = #generators born <= r minus rank of the relations of weight <= r."""
    r = Fraction(r)
    alive = [i for i, b in enumerate(M.births) if b <= r]
    rels = [[v[i] for i in alive] for w, v in M.rels if w <= r]
    return len(alive) - rank(rels, len(alive), M.field)


def module_rank(M, r, s) -> int:
    """Rank of the structure map V_r -> V_s."""
    r, s = Fraction(r), Fraction(s)
    n = len(M.births)
    rels = [list(v) for w, v in M.rels if w <= s]
    units = [[1 if j == i else 0 for j in range(n)] for i, b in enumerate(M.births) if b <= r]
    return rank(rels + units, n, M.field) - rank(rels, n, M.field)


def _dmatrix(C, t, n):
    """Matrix of d: C_n -> C_{n-1} restricted to generators born <= t (rows = targets)."""
    t = Fraction(t)
    src = [x for x in C.names if C.degree(x) == n and C.birth(x) <= t]
    tgt = [y for y in C.names if C.degree(y) == n - 1 and C.birth(y) <= t]
    rows = [[C.d.get(x, {}).get(y, 0) for x in src] for y in tgt]
    return rows, src, tgt


def homology_dim(C, t, n) -> int:
    rows, src, _ = _dmatrix(C, t, n)
    up, _, _ = _dmatrix(C, t, n + 1)
    return len(src) - rank(rows, len(src), C.field) - rank(up, len(up[0]) if up else 0, C.field)


def homology_rank(C, t, s, n) -> int:
    """Rank of H_n(C^{<=t}) -> H_n(C^{<=s}) computed as dim(Z_t + B_s) - dim B_s."""
    t, s = Fraction(t), Fraction(s)
    F = C.field
    basis = [x for x in C.names if C.degree(x) == n and C.birth(x) <= s]
    idx = {x: i for i, x in enumerate(basis)}
    rows, src, _ = _dmatrix(C, t, n)
    # cycles at level t: nullspace of d restricted to src, via sympy
    cyc = []
    if src:
        dom = _domain(F)
        if rows:
            D = DomainMatrix([[_conv(x, dom, F) for x in r] for r in rows], (len(rows), len(src)), dom)
            null = D.nullspace().to_Matrix().tolist()
        else:
            null = [[1 if j == i else 0 for j in range(len(src))] for i in range(len(src))]
        for v in null:
            w = [0] * len(basis)
            for j, x in enumerate(src):
                w[idx[x]] = v[j]
            cyc.append([_back(c, F) for c in w])
    bnd = []
    for y in C.names:
        if C.degree(y) == n + 1 and C.birth(y) <= s:
            w = [0] * len(basis)
            for x, c in C.d.get(y, {}).items():
                w[idx[x]] = c
            bnd.append(w)
    return rank(cyc + bnd, len(basis), F) - rank(bnd, len(basis), F)


def _back(c, F):
    if F.p:
        return int(c) % F.p
    return Fraction(int(c.numerator), int(c.denominator)) if hasattr(c, "numerator") else Fraction(str(c))


def levels(C, extra=()):
    bs = sorted(set(C.births()) | set(Fraction(x) for x in extra))
    mids = [(a + b) / 2 for a, b in zip(bs, bs[1:])]
    lo = [bs[0] - 1] if bs else [Fraction(0)]
    hi = [bs[-1] + 1] if bs else []
    return sorted(set(lo + bs + mids + hi))


def is_r_acyclic(C, r) -> bool:
    """Every bar shorter than or equal to r, checked at all critical levels and midpoints."""
    r = Fraction(r)
    for n in C.degrees():
        for t in levels(C):
            if homology_rank(C, t, t + r, n):
                return False
    return True
