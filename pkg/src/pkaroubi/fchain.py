"""Filtered chain complexes over an exact field.

A complex has generators (name, degree, birth) and a differential of degree
-1 that never raises births.  Chain maps carry a level λ: an entry y <- x is
allowed when birth(y) - birth(x) <= λ.  Morphisms of the homology category
are chain maps up to filtered homotopy, i.e. H_0 of the filtered Hom complex.

Shifts are materialised: ``C.shift(a)`` is a new complex with births moved
by +a, so a weight-0 map X -> S^{-r}Y has the same entries as a level-r map
X -> Y.
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product

from . import idem, linalg
from .field import INF, Field, fmt_level, level
from .idem import WIdem
from .pcat import PCatPresentation, ShiftedObject, WMorphism
from .pmod import FPModule, barcode, present_subquotient
from .reports import Report


# -- complexes ---------------------------------------------------------------

class FilteredComplex:
    """Generators ``(name, degree, birth)`` and ``diff[name] = {name: coeff}``."""

    def __init__(self, field: Field, gens, diff=None, name: str = "C"):
        self.field = field
        self.name = name
        raw = [(str(n), int(d), level(b)) for n, d, b in gens]
        if len({n for n, _, _ in raw}) != len(raw):
            raise ValueError("duplicate generator names in %s" % name)
        self.gens = tuple(sorted(raw, key=lambda g: (g[1], g[2], g[0])))
        self._deg = {n: d for n, d, _ in self.gens}
        self._birth = {n: b for n, _, b in self.gens}
        self.d = {}
        for src, row in (diff or {}).items():
            if src not in self._deg:
                raise ValueError("differential of unknown generator %r" % src)
            clean = {}
            for tgt, c in row.items():
                if tgt not in self._deg:
                    raise ValueError("differential hits unknown generator %r" % tgt)
                c = field(c)
                if c:
                    clean[tgt] = c
            if clean:
                self.d[src] = clean
        self._T = None

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return "FilteredComplex(%s, %d gens)" % (self.name, len(self.gens))

    def __str__(self):
        return self.name

    @property
    def names(self):
        return tuple(n for n, _, _ in self.gens)

    def degree(self, n) -> int:
        return self._deg[n]

    def birth(self, n) -> Fraction:
        return self._birth[n]

    def degrees(self) -> list:
        return sorted({d for _, d, _ in self.gens})

    def in_degree(self, k) -> list:
        """Names in degree k ordered by (birth, name)."""
        return [n for n, d, b in sorted(self.gens, key=lambda g: (g[2], g[0])) if d == k]

    def births(self) -> list:
        return sorted({b for _, _, b in self.gens})

    def validate(self) -> Report:
        return validate_fcc(self)

    def shift(self, a, name=None) -> "FilteredComplex":
        """S^a C: births move by +a."""
        a = level(a)
        if a == 0:
            return self
        return FilteredComplex(self.field, [(n, d, b + a) for n, d, b in self.gens], self.d,
                               name or "S^%s %s" % (a, self.name))

    def T(self) -> "FilteredComplex":
        """Suspension: degrees +1, differential negated.  Cached, so T(C) is one object."""
        if self._T is None:
            self._T = suspend(self, 1)
        return self._T

    def same_as(self, other) -> bool:
        """Literal equality of generators and differential."""
        return self.gens == other.gens and self.d == other.d

    def to_json(self):
        return {"name": self.name,
                "gens": [[n, d, fmt_level(b)] for n, d, b in self.gens],
                "d": {s: {t: self.field.fmt(c) for t, c in sorted(row.items())} for s, row in sorted(self.d.items())}}


def suspend(C: FilteredComplex, k: int = 1, name=None) -> FilteredComplex:
    sign = C.field(-1) if k % 2 else C.field.one
    diff = {s: {t: sign * c for t, c in row.items()} for s, row in C.d.items()}
    label = name or ("T %s" % C.name if k == 1 else "T^%d %s" % (k, C.name))
    return FilteredComplex(C.field, [(n, d + k, b) for n, d, b in C.gens], diff, label)


def zero_complex(field: Field, name: str = "0") -> FilteredComplex:
    return FilteredComplex(field, [], {}, name)


def direct_sum(C: FilteredComplex, D: FilteredComplex, name=None, tags=("1:", "2:")) -> FilteredComplex:
    t1, t2 = tags
    gens = [(t1 + n, d, b) for n, d, b in C.gens] + [(t2 + n, d, b) for n, d, b in D.gens]
    diff = {t1 + s: {t1 + t: c for t, c in row.items()} for s, row in C.d.items()}
    diff.update({t2 + s: {t2 + t: c for t, c in row.items()} for s, row in D.d.items()})
    return FilteredComplex(C.field, gens, diff, name or "(%s+%s)" % (C.name, D.name))


def validate_fcc(C: FilteredComplex) -> Report:
    """d has degree -1, respects the filtration and squares to zero."""
    rep = Report("fcc[%s]" % C.name)
    bad_deg, bad_filt = [], []
    for s, row in sorted(C.d.items()):
        for t in sorted(row):
            if C.degree(t) != C.degree(s) - 1:
                bad_deg.append({"generator": s, "hits": t})
            if C.birth(t) > C.birth(s):
                bad_filt.append({"generator": s, "hits": t, "birth": C.birth(s), "hit_birth": C.birth(t)})
    rep.add("degree", not bad_deg, violations=bad_deg[:10])
    rep.add("filtered", not bad_filt, violations=bad_filt[:10])
    bad = []
    for s in C.names:
        dd = _apply_d(C, _apply_d(C, {s: C.field.one}))
        if dd:
            bad.append({"generator": s, "dd": {k: C.field.fmt(v) for k, v in sorted(dd.items())}})
    rep.add("d_squared_zero", not bad, violations=bad[:10])
    return rep


def require_valid(C: FilteredComplex) -> FilteredComplex:
    rep = validate_fcc(C)
    if not rep.ok:
        raise ValueError("invalid filtered complex: " + rep.summary())
    return C


def _apply_d(C, vec: dict) -> dict:
    out = {}
    for s, c in vec.items():
        for t, x in C.d.get(s, {}).items():
            out[t] = out.get(t, C.field.zero) + c * x
    return {k: v for k, v in out.items() if v}


# -- chain maps ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChainMap:
    """A degree-0 map with entries ``{(y, x): c}`` allowed at ``level``."""
    src: FilteredComplex
    tgt: FilteredComplex
    level: Fraction
    entries: dict = dc_field(default_factory=dict)

    @property
    def weight(self) -> Fraction:
        return self.level

    def apply(self, vec: dict) -> dict:
        out = {}
        F = self.tgt.field
        for (y, x), c in self.entries.items():
            if x in vec:
                out[y] = out.get(y, F.zero) + c * vec[x]
        return {k: v for k, v in out.items() if v}

    def min_level(self):
        """Least level the entries allow (None for the zero map)."""
        vals = [self.tgt.birth(y) - self.src.birth(x) for (y, x) in self.entries]
        return max(vals) if vals else None

    def to_json(self):
        F = self.tgt.field
        return {"src": self.src.name, "tgt": self.tgt.name, "level": fmt_level(self.level),
                "entries": [[y, x, F.fmt(c)] for (y, x), c in sorted(self.entries.items())]}


def chain_map(src, tgt, lev, entries, check=True) -> ChainMap:
    F = tgt.field
    clean = {}
    for (y, x), c in entries.items():
        c = F(c)
        if c:
            clean[(y, x)] = c
    f = ChainMap(src, tgt, level(lev), clean)
    if check and not chain_map_check(f):
        raise ValueError("not a chain map filtered at level %s" % fmt_level(f.level))
    return f


def chain_map_check(f: ChainMap, shift=None) -> bool:
    """f commutes with d and is filtered at ``shift`` (default: its own level)."""
    lev = f.level if shift is None else level(shift)
    X, Y = f.src, f.tgt
    for (y, x) in f.entries:
        if y not in Y._deg or x not in X._deg or Y.degree(y) != X.degree(x):
            return False
        if Y.birth(y) - X.birth(x) > lev:
            return False
    for x in X.names:
        one = {x: X.field.one}
        if f.apply(_apply_d(X, one)) != _apply_d(Y, f.apply(one)):
            return False
    return True


def identity_map(C: FilteredComplex, lev=0) -> ChainMap:
    return ChainMap(C, C, level(lev), {(n, n): C.field.one for n in C.names})


def zero_map(X, Y, lev=0) -> ChainMap:
    return ChainMap(X, Y, level(lev), {})


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    if f.tgt is not g.src:
        raise ValueError("chain maps %s -> %s and %s -> %s do not compose"
                         % (f.src, f.tgt, g.src, g.tgt))
    F = g.tgt.field
    by_src = {}
    for (z, y), c in g.entries.items():
        by_src.setdefault(y, []).append((z, c))
    out = {}
    for (y, x), c in f.entries.items():
        for z, c2 in by_src.get(y, ()):
            out[(z, x)] = out.get((z, x), F.zero) + c2 * c
    return ChainMap(f.src, g.tgt, f.level + g.level, {k: v for k, v in out.items() if v})


def _combine(f, g, sign):
    if f.src is not g.src or f.tgt is not g.tgt or f.level != g.level:
        raise ValueError("chain maps are not parallel")
    F = f.tgt.field
    out = dict(f.entries)
    for k, c in g.entries.items():
        out[k] = out.get(k, F.zero) + (c if sign > 0 else -c)
    return ChainMap(f.src, f.tgt, f.level, {k: v for k, v in out.items() if v})


def add_maps(f, g) -> ChainMap:
    return _combine(f, g, 1)


def sub_maps(f, g) -> ChainMap:
    return _combine(f, g, -1)


def scale_map(c, f) -> ChainMap:
    c = f.tgt.field(c)
    return ChainMap(f.src, f.tgt, f.level, {k: c * v for k, v in f.entries.items() if c * v})


def push_map(f, dr) -> ChainMap:
    dr = level(dr)
    if dr < 0:
        raise ValueError("structure maps only go up")
    return ChainMap(f.src, f.tgt, f.level + dr, f.entries)


def relabel(f: ChainMap, src=None, tgt=None, lev=None, check=True) -> ChainMap:
    """The same entries between (shifted) copies of the endpoints."""
    g = ChainMap(src or f.src, tgt or f.tgt, f.level if lev is None else level(lev), f.entries)
    if check and not chain_map_check(g):
        raise ValueError("relabelled map is not filtered at level %s" % fmt_level(g.level))
    return g


def T_map(f: ChainMap) -> ChainMap:
    """T f : T X -> T Y (same entries)."""
    return ChainMap(f.src.T(), f.tgt.T(), f.level, f.entries)


# -- the filtered Hom complex ----------------------------------------------------

class HomComplex:
    """Hom(X, Y) in degrees 1, 0, -1; the elementary map y <- x is born at
    birth(y) - birth(x) and D φ = dφ - (-1)^n φ d."""

    def __init__(self, X: FilteredComplex, Y: FilteredComplex):
        self.X, self.Y = X, Y
        self.field = Y.field
        self.gens, self.index, self.births = {}, {}, {}
        for n in (1, 0, -1):
            gl = []
            for x in X.names:
                for y in Y.names:
                    if Y.degree(y) - X.degree(x) == n:
                        gl.append((Y.birth(y) - X.birth(x), "%s<-%s" % (y, x), y, x))
            gl.sort(key=lambda g: (g[0], g[1]))
            self.gens[n] = gl
            self.index[n] = {(g[2], g[3]): i for i, g in enumerate(gl)}
            self.births[n] = [g[0] for g in gl]
        self._D = {}
        self._bspan = {}
        self._h0 = None
        # d_X transposed: x -> [(x', c)] with x in d x'
        self._dX_in = {}
        for xs, row in X.d.items():
            for x, c in row.items():
                self._dX_in.setdefault(x, []).append((xs, c))

    def prefix(self, n, lev) -> int:
        if lev is INF:
            return len(self.gens[n])
        return bisect_right(self.births[n], lev)

    def vec(self, f: ChainMap, n: int = 0) -> tuple:
        v = [self.field.zero] * len(self.gens[n])
        idx = self.index[n]
        for k, c in f.entries.items():
            v[idx[k]] = v[idx[k]] + c
        return tuple(v)

    def to_map(self, vec, lev) -> ChainMap:
        ent = {(g[2], g[3]): c for g, c in zip(self.gens[0], vec) if c}
        return ChainMap(self.X, self.Y, level(lev), ent)

    def D(self, n: int, i: int) -> tuple:
        key = (n, i)
        if key in self._D:
            return self._D[key]
        F = self.field
        _, _, y, x = self.gens[n][i]
        out = [F.zero] * len(self.gens[n - 1]) if n - 1 in self.gens else None
        if out is None:
            raise ValueError("Hom complex kept only in degrees -1..1")
        idx = self.index[n - 1]
        for y2, c in self.Y.d.get(y, {}).items():
            j = idx[(y2, x)]
            out[j] = out[j] + c
        sign = F.one if n % 2 == 0 else -F.one
        for x2, c in self._dX_in.get(x, ()):
            j = idx[(y, x2)]
            out[j] = out[j] - sign * c
        self._D[key] = tuple(out)
        return self._D[key]

    def boundary_span(self, lev) -> linalg.Span:
        k = self.prefix(1, lev)
        sp = self._bspan.get(k)
        if sp is None:
            sp = linalg.Span(len(self.gens[0]), self.field)
            for i in range(k):
                sp.add(self.D(1, i))
            self._bspan[k] = sp
        return sp

    def is_filtered(self, vec, lev) -> bool:
        k = self.prefix(0, lev)
        return not any(vec[k:])

    def is_cycle(self, vec) -> bool:
        acc = [self.field.zero] * len(self.gens[-1])
        for i, c in enumerate(vec):
            if c:
                for j, x in enumerate(self.D(0, i)):
                    if x:
                        acc[j] = acc[j] + c * x
        return not any(acc)

    def is_boundary(self, vec, lev) -> bool:
        return self.is_filtered(vec, lev) and self.boundary_span(lev).contains(vec)

    def homotopy(self, vec, lev):
        """Coefficients on E_1 generators (born <= lev) whose boundary is vec, or None."""
        k = self.prefix(1, lev)
        n0 = len(self.gens[0])
        cols = [self.D(1, i) for i in range(k)]
        rows = [tuple(c[j] for c in cols) for j in range(n0)]
        if not k:
            return () if not any(vec) else None
        return linalg.solve(rows, list(vec), k, self.field)

    def cycles(self, lev) -> list:
        """Basis of chain maps filtered at ``lev`` (as E_0 vectors)."""
        k = self.prefix(0, lev)
        n0 = len(self.gens[0])
        if not k:
            return []
        m = len(self.gens[-1])
        cols = [self.D(0, i) for i in range(k)]
        rows = [tuple(c[j] for c in cols) for j in range(m)]
        z = self.field.zero
        if not rows:
            basis = [tuple(self.field.one if j == i else z for j in range(k)) for i in range(k)]
        else:
            basis = linalg.nullspace(rows, k, self.field)
        return [tuple(b) + (z,) * (n0 - k) for b in basis]

    def h0(self):
        """H_0 as a presented subquotient of the free module on E_0."""
        if self._h0 is None:
            amb = FPModule(self.field, [(g[1], g[0]) for g in self.gens[0]])
            grid = set(self.births[0]) | set(self.births[1])

            def sub(t):
                k = amb.dim_at(t)
                return [v[:k] for v in self.cycles(t)]

            def kill(t):
                k = amb.dim_at(t)
                return [self.D(1, i)[:k] for i in range(self.prefix(1, t))]

            self._h0 = present_subquotient(amb, sorted(grid) or [Fraction(0)], sub, kill, prefix="h")
        return self._h0


_HOM_CACHE = {}


def hom_complex(X: FilteredComplex, Y: FilteredComplex) -> HomComplex:
    key = (id(X), id(Y))
    hit = _HOM_CACHE.get(key)
    if hit is None or hit.X is not X or hit.Y is not Y:
        if len(_HOM_CACHE) > 4096:
            _HOM_CACHE.clear()
        hit = HomComplex(X, Y)
        _HOM_CACHE[key] = hit
    return hit


def homotopic(f: ChainMap, g: ChainMap, lev=None) -> bool:
    """f ≃ g through a homotopy filtered at ``lev`` (default: the common level; INF allowed)."""
    if f.src is not g.src or f.tgt is not g.tgt:
        raise ValueError("maps are not parallel")
    lev = max(f.level, g.level) if lev is None else lev
    E = hom_complex(f.src, f.tgt)
    d = linalg.sub(E.vec(f), E.vec(g))
    return E.is_boundary(d, lev)


def limit_equal(f: ChainMap, g: ChainMap) -> bool:
    """[f] = [g] in the limit category."""
    return homotopic(f, g, INF)


def chain_maps_at(X, Y, lev) -> list:
    E = hom_complex(X, Y)
    return [E.to_map(v, lev) for v in E.cycles(level(lev))]


class HoCtx:
    """Level-form ctx: complexes and chain maps up to filtered homotopy."""

    def __init__(self, field: Field):
        self.field = field

    def compose(self, g, f):
        return compose(g, f)

    def unit(self, X, r):
        r = level(r)
        if r < 0:
            raise ValueError("unit needs r >= 0")
        return identity_map(X, r)

    def zero(self, X, Y, w=0):
        return zero_map(X, Y, w)

    def add(self, f, g):
        return add_maps(f, g)

    def sub(self, f, g):
        return sub_maps(f, g)

    def scale(self, c, f):
        return scale_map(c, f)

    def push(self, f, dr):
        return push_map(f, dr)

    def equal(self, f, g) -> bool:
        if f.level != g.level:
            raise ValueError("maps of different weights")
        return homotopic(f, g, f.level)

    def is_zero(self, f) -> bool:
        return homotopic(f, zero_map(f.src, f.tgt, f.level), f.level)


# -- homology ----------------------------------------------------------------------

def homology_persistence(C: FilteredComplex) -> dict:
    """{degree: FPModule} with H_n at level t = cycles / boundaries among generators born <= t."""
    out = {}
    F = C.field
    for n in C.degrees():
        names = C.in_degree(n)
        amb = FPModule(F, [(x, C.birth(x)) for x in names])
        pos = {x: amb.index(x) for x in names}
        upper = C.in_degree(n + 1)
        lower = C.in_degree(n - 1)
        lpos = {x: i for i, x in enumerate(lower)}

        def dvec(s, target_pos, size):
            v = [F.zero] * size
            for t, c in C.d.get(s, {}).items():
                if t in target_pos:
                    v[target_pos[t]] = v[target_pos[t]] + c
            return v

        def sub(t, names=names, amb=amb, lower=lower, lpos=lpos):
            k = amb.dim_at(t)
            cols = [dvec(amb.names[i], lpos, len(lower)) for i in range(k)]
            if not lower or not k:
                return [tuple(F.one if j == i else F.zero for j in range(k)) for i in range(k)]
            rows = [tuple(c[j] for c in cols) for j in range(len(lower))]
            return linalg.nullspace(rows, k, F)

        def kill(t, amb=amb, upper=upper, pos=pos):
            k = amb.dim_at(t)
            out = []
            for s in upper:
                if C.birth(s) <= t:
                    v = dvec(s, pos, len(amb.gens))
                    out.append(tuple(v[:k]))
            return out

        grid = {C.birth(x) for x in names} | {C.birth(x) for x in upper}
        sq = present_subquotient(amb, sorted(grid), sub, kill, prefix="H%d_" % n)
        out[n] = sq.module
    return out


def homology_barcodes(C: FilteredComplex) -> dict:
    return {n: barcode(m) for n, m in homology_persistence(C).items()}


def barcode_signature(C: FilteredComplex) -> tuple:
    """Hashable barcodes per degree, empty degrees dropped."""
    out = []
    for n, bc in sorted(homology_barcodes(C).items()):
        if len(bc):
            out.append((n, tuple(bc.bars)))
    return tuple(out)


def is_r_acyclic(C: FilteredComplex, r) -> bool:
    """η_r = 0, decided from the barcode: no infinite bars and none longer than r."""
    r = level(r)
    for bc in homology_barcodes(C).values():
        m = bc.max_finite_length()
        if m is INF or m > r:
            return False
    return True


def is_r_acyclic_hom(C: FilteredComplex, r) -> bool:
    """η_r = 0, decided in the Hom complex: the level-r identity is null-homotopic."""
    return homotopic(identity_map(C, r), zero_map(C, C, r), level(r))


def homology_at(C: FilteredComplex, t, n) -> int:
    """dim H_n(C^{<=t}) by direct rank counts."""
    F = C.field
    t = level(t)
    cn = [x for x in C.in_degree(n) if C.birth(x) <= t]
    up = [x for x in C.in_degree(n + 1) if C.birth(x) <= t]
    low = [x for x in C.in_degree(n - 1) if C.birth(x) <= t]
    dn = [[C.d.get(x, {}).get(y, F.zero) for x in cn] for y in low]
    dn1 = [[C.d.get(x, {}).get(y, F.zero) for x in up] for y in cn]
    rk_n = linalg.rank(dn, len(cn), F) if low and cn else 0
    rk_n1 = linalg.rank(dn1, len(up), F) if cn and up else 0
    return len(cn) - rk_n - rk_n1


# -- cones and triangles ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StrictWitness:
    """C' with v': B -> C', w': C' -> TA (weight 0), φ: C -> C' and f: C' -> C.

    φ is the level-r form of S^r C -> C'.  ``theta`` identifies cone(u) with C'
    (identity when C' is literally the cone)."""
    Cp: FilteredComplex
    vp: ChainMap
    wp: ChainMap
    phi: ChainMap
    f: ChainMap
    theta: ChainMap | None = None


@dataclass(frozen=True, eq=False)
class Triangle:
    """A -u-> B -v-> C -w-> S^{-r}TA with u, v at level 0 and w at level r."""
    A: FilteredComplex
    B: FilteredComplex
    C: FilteredComplex
    u: ChainMap
    v: ChainMap
    w: ChainMap
    weight: Fraction
    witness: StrictWitness | None = None

    @property
    def TA(self):
        return self.w.tgt

    def to_json(self):
        return {"A": self.A.name, "B": self.B.name, "C": self.C.name, "weight": fmt_level(self.weight),
                "u": self.u.to_json(), "v": self.v.to_json(), "w": self.w.to_json(),
                "witness": self.witness is not None}


def cone(f: ChainMap, name=None):
    """Cone of a map filtered at level <= 0: returns (K, v: Y -> K, w: K -> TX)."""
    X, Y = f.src, f.tgt
    ml = f.min_level()
    if ml is not None and ml > 0:
        raise ValueError("cone needs a map filtered at level 0")
    F = Y.field
    depth = 1
    while True:
        tag = lambda x, k=depth: "<" * k + x + ">" * k
        gens = [(tag(x), d + 1, b) for x, d, b in X.gens] + list(Y.gens)
        if len({g[0] for g in gens}) == len(gens):
            break
        depth += 1
    diff = {}
    fx = {}
    for (y, x), c in f.entries.items():
        fx.setdefault(x, {})[y] = c
    for x in X.names:
        row = {tag(t): -c for t, c in X.d.get(x, {}).items()}
        for y, c in fx.get(x, {}).items():
            row[y] = row.get(y, F.zero) + c
        diff[tag(x)] = row
    for y, row in Y.d.items():
        diff[y] = dict(row)
    K = FilteredComplex(F, gens, diff, name or "Cone(%s->%s)" % (X.name, Y.name))
    TX = X.T()
    v = ChainMap(Y, K, Fraction(0), {(y, y): F.one for y in Y.names})
    w = ChainMap(K, TX, Fraction(0), {(x, tag(x)): F.one for x in X.names})
    return K, v, w


def mapping_cone(f: ChainMap, t=None):
    """Cone of f seen as a weight-0 map X -> S^{-t}Y, with its triangle of weight t.

    The triangle is X -> S^{-t}Y -> K -> S^{-t}TX, the last map being η_t∘w."""
    ml = f.min_level()
    t = max(Fraction(0), ml if ml is not None else Fraction(0)) if t is None else level(t)
    if ml is not None and ml > t:
        raise ValueError("map is not filtered at level %s" % fmt_level(t))
    X = f.src
    Yt = f.tgt.shift(-t)
    u = ChainMap(X, Yt, Fraction(0), f.entries)
    K, v, w = cone(u)
    wit = StrictWitness(K, v, w, identity_map(K, t), identity_map(K, 0))
    return K, Triangle(X, Yt, K, u, v, push_map(w, t), t, wit)


def eta_triangle(A: FilteredComplex, r) -> Triangle:
    """A -η_r-> S^{-r}A -> cone(η_r) -> S^{-r}TA, strict exact of weight r."""
    r = level(r)
    if r < 0:
        raise ValueError("eta_triangle needs r >= 0")
    _, tri = mapping_cone(identity_map(A, r), r)
    return tri


def eta_zero_triangle(A: FilteredComplex, r) -> Triangle:
    """A -η_r-> S^{-r}A -> 0 -> S^{-r}TA, strict exact of weight r (η_r is a limit iso)."""
    r = level(r)
    Z = zero_complex(A.field, "0")
    Ar = A.shift(-r)
    u = ChainMap(A, Ar, Fraction(0), {(n, n): A.field.one for n in A.names})
    K, vp, wp = cone(u)
    wit = StrictWitness(K, vp, wp, zero_map(Z, K, r), zero_map(K, Z, 0))
    return Triangle(A, Ar, Z, u, zero_map(Ar, Z, 0), zero_map(Z, A.T(), r), r, wit)


def is_suspension(TA: FilteredComplex, A: FilteredComplex) -> bool:
    if TA is A.T():
        return True
    return TA.same_as(A.T())


def is_homotopy_equivalence(f: ChainMap) -> bool:
    """A level-0 map is an iso in C_0 iff its cone has zero persistent homology."""
    if f.level != 0:
        return False
    K, _, _ = cone(f)
    return all(len(bc) == 0 for bc in homology_barcodes(K).values())


def strict_exact_report(T: Triangle, r=None, witness: StrictWitness | None = None) -> Report:
    r = T.weight if r is None else level(r)
    W = witness or T.witness
    rep = Report("strict_exact")
    shape = (T.u.src is T.A and T.u.tgt is T.B and T.v.src is T.B and T.v.tgt is T.C
             and T.w.src is T.C and is_suspension(T.w.tgt, T.A)
             and T.u.level == 0 and T.v.level == 0 and T.w.level == r)
    if not shape:
        raise ValueError("triangle shape mismatch")
    rep.add("maps_are_chain_maps", all(chain_map_check(m) for m in (T.u, T.v, T.w)))
    if W is None:
        rep.add("witness_present", False)
        return rep
    TA = T.w.tgt
    K, vc, wc = cone(T.u)
    theta = W.theta
    if theta is None:
        if not W.Cp.same_as(K):
            rep.add("witness_cone", False, why="C' is not the cone of u and no comparison map was given")
            return rep
        theta = ChainMap(K, W.Cp, Fraction(0), {(n, n): K.field.one for n in K.names})
        vc_, wc_ = ChainMap(T.B, W.Cp, Fraction(0), vc.entries), ChainMap(W.Cp, TA, Fraction(0), wc.entries)
        rep.add("base_exact", homotopic(W.vp, vc_, 0) and homotopic(W.wp, wc_, 0))
    else:
        wc_ = ChainMap(K, TA, Fraction(0), wc.entries)
        ok = (chain_map_check(theta) and homotopic(compose(theta, vc), W.vp, 0)
              and homotopic(compose(W.wp, theta), wc_, 0) and is_homotopy_equivalence(theta))
        rep.add("base_exact", ok)
    for m in (W.vp, W.wp, W.phi, W.f):
        if not chain_map_check(m):
            rep.add("witness_maps", False, bad=m.to_json())
            return rep
    rep.add("witness_levels", W.vp.level == 0 and W.wp.level == 0 and W.f.level == 0 and W.phi.level == r)
    rep.add("f_phi_is_eta", homotopic(compose(W.f, W.phi), identity_map(T.C, r), r))
    rep.add("v_factors", homotopic(compose(W.f, W.vp), T.v, 0))
    rep.add("w_factors", homotopic(compose(W.wp, W.phi), ChainMap(T.C, W.wp.tgt, r, T.w.entries), r)
            if W.wp.tgt is TA or W.wp.tgt.same_as(TA) else False)
    Kf, _, _ = cone(W.f)
    a1, a2 = is_r_acyclic(Kf, r), is_r_acyclic_hom(Kf, r)
    rep.add("cone_f_r_acyclic", a1 and a2, barcode_route=a1, hom_route=a2)
    return rep


def is_strict_exact(T: Triangle, r=None, witness: StrictWitness | None = None) -> bool:
    return strict_exact_report(T, r, witness).ok


def triangle_levels(*cs) -> list:
    pts = set()
    for C in cs:
        pts |= set(C.births())
    return sorted(pts)


def _cycles_at(C, t, n):
    F = C.field
    cn = [x for x in C.in_degree(n) if C.birth(x) <= t]
    low = [x for x in C.in_degree(n - 1) if C.birth(x) <= t]
    if not cn:
        return cn, []
    if not low:
        return cn, [{x: F.one} for x in cn]
    rows = [tuple(C.d.get(x, {}).get(y, F.zero) for x in cn) for y in low]
    return cn, [{cn[i]: c for i, c in enumerate(v) if c} for v in linalg.nullspace(rows, len(cn), F)]


def _boundaries_at(C, t, n):
    return [_apply_d(C, {x: C.field.one}) for x in C.in_degree(n + 1) if C.birth(x) <= t]


def _induced_rank(f: ChainMap, t, n) -> int:
    """rank of H_n(X^{<=t}) -> H_n(Y^{<=t + level})."""
    X, Y = f.src, f.tgt
    F = Y.field
    ty = t + f.level
    ny = [y for y in Y.in_degree(n) if Y.birth(y) <= ty]
    pos = {y: i for i, y in enumerate(ny)}

    def vec(d):
        v = [F.zero] * len(ny)
        for k, c in d.items():
            v[pos[k]] = v[pos[k]] + c
        return tuple(v)

    B = [vec(b) for b in _boundaries_at(Y, ty, n)]
    _, Z = _cycles_at(X, t, n)
    imgs = [vec(f.apply(z)) for z in Z]
    rb = linalg.rank(B, len(ny), F) if B else 0
    return (linalg.rank(B + imgs, len(ny), F) if B or imgs else 0) - rb


def les_report(T: Triangle, levels=None) -> Report:
    """Long exact homology sequence of a weight-0 triangle, level by level."""
    if T.weight != 0:
        raise ValueError("les_report needs a weight-0 triangle")
    rep = Report("les")
    TA, TB = T.w.tgt, T.B.T()
    Tu = ChainMap(TA, TB, Fraction(0), T.u.entries)
    levels = levels or triangle_levels(T.A, T.B, T.C)
    degs = sorted(set(T.A.degrees()) | set(T.B.degrees()) | set(T.C.degrees()) | set(TA.degrees()))
    if degs:
        degs = list(range(degs[0] - 1, degs[-1] + 2))
    bad = []
    for t in levels:
        for n in degs:
            for f, g, M in ((T.u, T.v, T.B), (T.v, T.w, T.C), (T.w, Tu, TA)):
                hm = homology_at(M, t, n)
                gf = compose(g, f)
                ok = (_induced_rank(gf, t, n) == 0
                      and hm - _induced_rank(g, t, n) == _induced_rank(f, t, n))
                if not ok:
                    bad.append({"level": t, "degree": n, "at": M.name})
    rep.add("long_exact", not bad, violations=bad[:10])
    return rep


def retract_triangle_report(top: Triangle, central: Triangle, sec, ret) -> Report:
    """A weight-0 triangle that is a retract of an exact one is exact.

    ``sec`` and ``ret`` are the level-0 maps (on A, B, C) from ``top`` into
    ``central`` and back.  The hypotheses are checked up to homotopy; the
    conclusion is the long exact sequence of ``top``.
    """
    if top.weight != 0 or central.weight != 0:
        raise ValueError("retract ladders are checked in weight 0")
    rep = Report("retract_triangle")
    rep.add("central_exact", les_report(central).ok)
    rows = ((top.A, central.A), (top.B, central.B), (top.C, central.C))
    bad = [X.name for (X, _), s, r in zip(rows, sec, ret) if not homotopic(compose(r, s), identity_map(X), 0)]
    rep.add("retractions", not bad, failures=bad)

    def ladder(m, src, tgt, name):
        mA, mB, mC = m
        TmA = ChainMap(src.w.tgt, tgt.w.tgt, Fraction(0), mA.entries)
        sq = {"u": (compose(tgt.u, mA), compose(mB, src.u)),
              "v": (compose(tgt.v, mB), compose(mC, src.v)),
              "w": (compose(tgt.w, mC), compose(TmA, src.w))}
        bad = [k for k, (f, g) in sq.items() if not homotopic(f, g, 0)]
        rep.add(name, not bad, failures=bad)

    ladder(sec, top, central, "section_ladder")
    ladder(ret, central, top, "retraction_ladder")
    rep.add("top_exact", les_report(top).ok)
    return rep


def sum_retract_ladder(u: ChainMap, u2: ChainMap):
    """(top, central, sec, ret): the cone triangle of u as a retract of that of u ⊕ u2."""
    F = u.src.field
    A = direct_sum(u.src, u2.src, name="A")
    B = direct_sum(u.tgt, u2.tgt, name="B")
    ent = {("1:" + y, "1:" + x): c for (y, x), c in u.entries.items()}
    ent.update({("2:" + y, "2:" + x): c for (y, x), c in u2.entries.items()})
    _, top = mapping_cone(u, 0)
    _, central = mapping_cone(ChainMap(A, B, Fraction(0), ent), 0)
    one = F.one
    inc = lambda X, Y, pairs: ChainMap(X, Y, Fraction(0), {(y, x): one for x, y in pairs})
    pA = [(x, "1:" + x) for x in u.src.names]
    pB = [(y, "1:" + y) for y in u.tgt.names]
    pC = [("<%s>" % x, "<1:%s>" % x) for x in u.src.names] + pB
    sec = (inc(top.A, central.A, pA), inc(top.B, central.B, pB), inc(top.C, central.C, pC))
    flip = lambda ps: [(b, a) for a, b in ps]
    ret = (inc(central.A, top.A, flip(pA)), inc(central.B, top.B, flip(pB)), inc(central.C, top.C, flip(pC)))
    return top, central, sec, ret


def eta_naturality(f: ChainMap, r) -> bool:
    """The η_r triangles of X and Y are linked by (f, S^{-r}f, cone map, Tf)."""
    if f.level != 0:
        raise ValueError("naturality is checked for level-0 maps")
    r = level(r)
    TX, TY = eta_triangle(f.src, r), eta_triangle(f.tgt, r)
    fB = ChainMap(TX.B, TY.B, Fraction(0), f.entries)
    ent = {("<%s>" % y, "<%s>" % x): c for (y, x), c in f.entries.items()}
    ent.update(f.entries)
    fC = ChainMap(TX.C, TY.C, Fraction(0), ent)
    fT = ChainMap(TX.w.tgt, TY.w.tgt, Fraction(0), f.entries)
    if not chain_map_check(fC):
        return False
    return (homotopic(compose(TY.u, f), compose(fB, TX.u), 0)
            and homotopic(compose(TY.v, fB), compose(fC, TX.v), 0)
            and homotopic(compose(TY.w, fC), compose(fT, TX.w), r))


def hom_additivity_report(A, B, C, levels=None) -> Report:
    """dim Hom(A⊕B, C)(t) = dim Hom(A,C)(t) + dim Hom(B,C)(t), and the same in the second slot."""
    rep = Report("hom_additivity")
    S = direct_sum(A, B)
    h = lambda X, Y: hom_complex(X, Y).h0().module
    mods = [h(S, C), h(A, C), h(B, C), h(C, S), h(C, A), h(C, B)]
    pts = set()
    for m in mods:
        pts |= set(m.grid_with_midpoints())
    levels = levels or sorted(pts) or [Fraction(0)]
    bad = []
    for t in levels:
        d = [m.dim_at(t) for m in mods]
        if d[0] != d[1] + d[2] or d[3] != d[4] + d[5]:
            bad.append({"level": t, "dims": d})
    rep.add("additive", not bad, violations=bad[:10], levels=len(levels))
    return rep


# -- the homology category as a presentation ------------------------------------

class HFCh:
    """The persistence category H_0 Hom on a finite set of complexes."""

    def __init__(self, complexes: dict, rmax=None, name: str = "hfch"):
        self.complexes = dict(complexes)
        objs = list(self.complexes)
        F = next(iter(self.complexes.values())).field if objs else Field.rational()
        self.field = F
        self._sq = {}
        homs, idents, table = {}, {}, {}
        for X, Y in product(objs, repeat=2):
            sq = hom_complex(self.complexes[X], self.complexes[Y]).h0()
            self._sq[(X, Y)] = sq
            homs[(X, Y)] = sq.module
        for X in objs:
            CX = self.complexes[X]
            E = hom_complex(CX, CX)
            idents[X] = self._sq[(X, X)].coordinates(E.vec(identity_map(CX)), 0)
        reps = {}
        for key, sq in self._sq.items():
            X, Y = key
            E = hom_complex(self.complexes[X], self.complexes[Y])
            reps[key] = [E.to_map(v, b) for v, b in zip(sq.vectors, sq.module.births)]
        for X, Y, Z in product(objs, repeat=3):
            tab = {}
            EXZ = hom_complex(self.complexes[X], self.complexes[Z])
            sq = self._sq[(X, Z)]
            for (i, f), (j, g) in product(enumerate(reps[(X, Y)]), enumerate(reps[(Y, Z)])):
                c = compose(g, f)
                if c.entries:
                    v = sq.coordinates(EXZ.vec(c), f.level + g.level)
                    if any(v):
                        tab[(i, j)] = v
            if tab:
                table[(X, Y, Z)] = tab
        self.P = PCatPresentation(F, objs, homs, table, idents, rmax=rmax, name=name)
        self._reps = reps

    def object_of(self, C: FilteredComplex) -> str:
        for k, v in self.complexes.items():
            if v is C:
                return k
        raise KeyError("complex %s is not an object of this category" % C.name)

    def element(self, f: ChainMap) -> WMorphism:
        """Level-form morphism of P represented by the chain map f."""
        X, Y = self.object_of(f.src), self.object_of(f.tgt)
        E = hom_complex(f.src, f.tgt)
        vec = self._sq[(X, Y)].coordinates(E.vec(f), f.level)
        return WMorphism(ShiftedObject(X), ShiftedObject(Y), f.level, vec)

    def chain_map(self, m: WMorphism) -> ChainMap:
        """A chain-level representative of a level-form morphism."""
        X, Y = m.src.base, m.tgt.base
        sq = self._sq[(X, Y)]
        E = hom_complex(self.complexes[X], self.complexes[Y])
        acc = sq.ambient.zero()
        for c, v in zip(m.vec, sq.vectors):
            if c:
                acc = linalg.add(acc, linalg.scale(c, v))
        return E.to_map(acc, m.level)


# -- the cone idempotent ----------------------------------------------------------

def complete_ladder(u: ChainMap, v: ChainMap, w: ChainMap, eA: ChainMap, eB: ChainMap, TeA: ChainMap) -> ChainMap:
    """k: C -> C at level r with k∘v ≃ v∘e_B and w∘k ≃ T(e_A)∘w.

    Solved as one linear system over chain maps C -> C and homotopies; free
    variables are set to zero."""
    r = eA.level
    B, C, TA = v.src, v.tgt, w.tgt
    F = C.field
    Ecc, Ebc, Ect = hom_complex(C, C), hom_complex(B, C), hom_complex(C, TA)
    Z = Ecc.cycles(r)
    zmaps = [Ecc.to_map(z, r) for z in Z]
    cols = []
    for zm in zmaps:
        cols.append(Ebc.vec(compose(zm, v)) + Ect.vec(compose(w, zm)))
    n1, n2 = len(Ebc.gens[0]), len(Ect.gens[0])
    zero1, zero2 = (F.zero,) * n1, (F.zero,) * n2
    for i in range(Ebc.prefix(1, r)):
        cols.append(tuple(-x for x in Ebc.D(1, i)) + zero2)
    for i in range(Ect.prefix(1, r)):
        cols.append(zero1 + tuple(-x for x in Ect.D(1, i)))
    rhs = Ebc.vec(compose(v, eB)) + Ect.vec(compose(TeA, w))
    if not cols:
        if any(rhs):
            raise ValueError("completion map not found")
        return zero_map(C, C, r)
    rows = [tuple(c[j] for c in cols) for j in range(n1 + n2)]
    sol = linalg.solve(rows, rhs, len(cols), F)
    if sol is None:
        raise ValueError("completion map not found")
    k = zero_map(C, C, r)
    for c, zm in zip(sol[:len(zmaps)], zmaps):
        if c:
            k = add_maps(k, scale_map(c, zm))
    return k


def cone_idempotent_extension(ctx, u, v, w, eA, eB, TeA, k):
    """e_C = η_{2r}∘k + η_r∘z - 2 k∘z with z = k∘k - η_r∘k, verified.

    All maps are in level form for ``ctx``: u, v, w of weight 0 and e_A,
    e_B, T(e_A), k of weight r.  Returns (WIdem of weight 3r, Report)."""
    r = eA.weight
    if eB.weight != r or TeA.weight != r or k.weight != r:
        raise ValueError("e_A, e_B, T(e_A) and k must share the weight r")
    A, B, C = u.src, v.src, w.src
    TA = w.tgt
    rep = Report("cone_idempotent")
    hyp = (idem.is_weighted_idempotent(ctx, eA, r) and idem.is_weighted_idempotent(ctx, eB, r)
           and idem.is_weighted_idempotent(ctx, TeA, r)
           and ctx.equal(ctx.compose(eB, u), ctx.compose(u, eA)))
    rep.add("hypothesis_ladder", hyp)
    if not hyp:
        raise ValueError("hypothesis ladder fails")
    rep.add("k_v_square", ctx.equal(ctx.compose(k, v), ctx.compose(v, eB)))
    rep.add("k_w_square", ctx.equal(ctx.compose(w, k), ctx.compose(TeA, w)))
    if not rep.ok:
        raise ValueError("k does not complete the ladder")
    eta = lambda X, t: ctx.unit(X, t)
    z = ctx.sub(ctx.compose(k, k), ctx.compose(eta(C, r), k))
    eC = ctx.sub(ctx.add(ctx.compose(eta(C, 2 * r), k), ctx.compose(eta(C, r), z)),
                 ctx.scale(2, ctx.compose(k, z)))
    rep.add("idempotent_3r", idem.is_weighted_idempotent(ctx, eC, 3 * r))
    eB2 = ctx.compose(eta(B, 2 * r), eB)
    eA2 = ctx.compose(eta(TA, 2 * r), TeA)
    rep.add("v_square", ctx.equal(ctx.compose(eC, v), ctx.compose(v, eB2)))
    rep.add("w_square", ctx.equal(ctx.compose(w, eC), ctx.compose(eA2, w)))
    rep.info = {"r": r}
    return WIdem(C, eC, 3 * r), rep


def block_ladder_map(K: FilteredComplex, eA: ChainMap, eB: ChainMap) -> ChainMap:
    """<a> -> <e_A a>, b -> e_B b on a cone; a chain map when e_B∘u = u∘e_A on the nose."""
    ent = {("<%s>" % y, "<%s>" % x): c for (y, x), c in eA.entries.items()}
    ent.update(eB.entries)
    return ChainMap(K, K, max(eA.level, eB.level), ent)


def cone_extension(tri: Triangle, eA: ChainMap, eB: ChainMap, k: ChainMap | None = None):
    """Solve for k if needed and apply :func:`cone_idempotent_extension` on a weight-0 triangle."""
    if tri.weight != 0:
        raise ValueError("the cone idempotent is built on exact weight-0 triangles")
    ctx = HoCtx(tri.A.field)
    TeA = ChainMap(tri.w.tgt, tri.w.tgt, eA.level, eA.entries)
    if k is None:
        k = complete_ladder(tri.u, tri.v, tri.w, eA, eB, TeA)
    eC, rep = cone_idempotent_extension(ctx, tri.u, tri.v, tri.w, eA, eB, TeA, k)
    return eC, k, rep


# -- (r,s)-triangles -----------------------------------------------------------------

@dataclass(eq=False)
class RSTriangle:
    """A triangle of split presheaves with a retraction ladder onto a
    representable strict exact triangle of weight ``a``; verticals compose to η_b."""
    objects: tuple       # (F, G, H, TF)
    maps: tuple          # (u, ṽ, w̃)
    middle: tuple        # (Y(A), Y(B), Y(C), Y(TA))
    middle_maps: tuple
    down: tuple          # s-side verticals
    up: tuple            # r-side verticals
    r: Fraction
    s: Fraction
    a: Fraction
    b: Fraction
    report: Report
    base: Triangle | None = None

    def to_json(self):
        return {"r": fmt_level(self.r), "s": fmt_level(self.s), "a": fmt_level(self.a), "b": fmt_level(self.b),
                "objects": [str(o) for o in self.objects], "ok": self.report.ok,
                "weights": [fmt_level(m.weight) for m in self.maps]}


def _ladder_checks(cat, rep, top, mid, down, up, b):
    """Squares of both halves of the ladder and the vertical composites."""
    for i in range(3):
        rep.add("down_square_%d" % i, cat.equal(cat.compose(down[i + 1], top[i]), cat.compose(mid[i], down[i])))
        rep.add("up_square_%d" % i, cat.equal(cat.compose(up[i + 1], mid[i]), cat.compose(top[i], up[i])))
    for i in range(4):
        rep.add("vertical_%d" % i, cat.equal(cat.compose(up[i], down[i]), cat.unit(down[i].src, b)))


def complete_morphism_to_rs_triangle(A: FilteredComplex, B: FilteredComplex, eF: ChainMap, eG: ChainMap,
                                     y: ChainMap) -> RSTriangle:
    """Complete u = r_G∘Y(y)∘s_F : F -> G (weight 0) to an exact (6(r+s), 3(r+s))-triangle.

    F and G are the kernel splittings of the r-idempotent e_F on A and the
    s-idempotent e_G on B; y: A -> B has level -s."""
    from .presheaf import PresheafCat, split_by_kernel

    ho = HoCtx(A.field)
    r, s = eF.level, eG.level
    R = r + s
    if y.level != -s:
        raise ValueError("y must have level -s so that u has weight 0")
    for e, X in ((eF, A), (eG, B)):
        if e.src is not X or not idem.is_weighted_idempotent(ho, e):
            raise ValueError("split data must be weighted idempotents")
    xh = compose(eG, compose(y, eF))                    # level r
    Bm = B.shift(-r)
    u_flat = ChainMap(A, Bm, Fraction(0), xh.entries)
    Cp, vc, wc = cone(u_flat, name="C")
    TA = A.T()
    v_lvl = ChainMap(B, Cp, -r, vc.entries)              # S^{-r}B -> C' as a level -r map B -> C'
    # ladder idempotents on the cone, padded to weight R
    eA_R = push_map(eF, s)
    TeA_R = ChainMap(TA, TA, R, eF.entries)
    eBm = ChainMap(Bm, Bm, R, eG.entries)
    k = complete_ladder(u_flat, vc, wc, eA_R, eBm, TeA_R)
    eC, ext = cone_idempotent_extension(ho, u_flat, vc, wc, eA_R, eBm, TeA_R, k)
    Z = zero_complex(A.field, "Z")
    H = HFCh({"A": A, "B": B, "C": Cp, "TA": TA}, name="hfch_rs")
    P = H.P
    cat = PresheafCat(P)
    Ym = {X: cat.yoneda(X) for X in P.objects}
    Yf = lambda f: cat.yoneda_morphism(H.element(f))
    rep = Report("rs_triangle")
    rep.extend(ext, "cone_idempotent.")
    TF_idem = ChainMap(TA, TA, r, eF.entries)
    SF = split_by_kernel(cat, WIdem(Ym["A"], Yf(eF), r), "F")
    SG = split_by_kernel(cat, WIdem(Ym["B"], Yf(eG), s), "G")
    SH = split_by_kernel(cat, WIdem(Ym["C"], Yf(eC.e), 3 * R), "H")
    STF = split_by_kernel(cat, WIdem(Ym["TA"], Yf(TF_idem), r), "TF")
    F_, G_, H_, TF_ = SF.B, SG.B, SH.B, STF.B
    eta = cat.unit
    comp = lambda *ms: _chain(cat, ms)
    u = comp(SG.rho, Yf(y), SF.s)
    ut = Yf(xh)
    rep.add("u_weight_zero", u.weight == 0)
    rep.add("u_tilde", cat.equal(comp(SG.s, u, SF.rho), ut))
    Yv, Yw = Yf(v_lvl), Yf(wc)
    vt = comp(SH.rho, Yv, SG.s, eta(G_, r))
    wt = comp(eta(TF_, 2 * R), STF.rho, eta(Ym["TA"], s), Yw, SH.s)
    top = (u, vt, wt)
    mid = (ut, comp(eta(Ym["C"], 3 * R), Yv), comp(eta(Ym["TA"], 3 * R), Yw))
    down = (SF.s, comp(eta(Ym["B"], r), SG.s), SH.s, STF.s)
    up = (comp(eta(F_, 2 * R), SF.rho, eta(Ym["A"], s)), comp(eta(G_, 2 * R), SG.rho), SH.rho,
          comp(eta(TF_, 2 * R), STF.rho, eta(Ym["TA"], s)))
    _ladder_checks(cat, rep, top, mid, down, up, 3 * R)
    rep.add("corner", cat.equal(cat.compose(STF.s, STF.rho), Yf(TF_idem)))
    # the middle row comes from a strict exact triangle of weight 6R
    Cm = Cp.shift(-3 * R)
    mid_tri = Triangle(A, Bm, Cm, u_flat, ChainMap(Bm, Cm, Fraction(0), vc.entries),
                       ChainMap(Cm, TA, 6 * R, wc.entries), 6 * R,
                       StrictWitness(Cp, vc, wc, ChainMap(Cm, Cp, 6 * R, identity_map(Cp).entries),
                                     ChainMap(Cp, Cm, Fraction(0), identity_map(Cp).entries)))
    rep.add("middle_strict_exact", is_strict_exact(mid_tri))
    rep.info = {"r": r, "s": s, "k_level": k.level}
    return RSTriangle((F_, G_, H_, TF_), top, (Ym["A"], Ym["B"], Ym["C"], Ym["TA"]), mid, down, up,
                      r, s, 6 * R, 3 * R, rep, mid_tri)


def _chain(cat, ms):
    out = ms[-1]
    for m in reversed(ms[:-1]):
        out = cat.compose(m, out)
    return out


def eta_rs_triangle(A: FilteredComplex, eF: ChainMap, t=0) -> RSTriangle:
    """F -η_t-> F -> 0 -> TF for the kernel splitting F of an r-idempotent: a (t, r)-triangle.

    t = 0 is the identity case, a (0, r)-triangle."""
    from .presheaf import PresheafCat, split_by_kernel

    t = level(t)
    r = eF.level
    TA = A.T()
    Z = zero_complex(A.field, "Z")
    H = HFCh({"A": A, "TA": TA, "Z": Z}, name="hfch_eta")
    cat = PresheafCat(H.P)
    Yf = lambda f: cat.yoneda_morphism(H.element(f))
    YA, YT, YZ = cat.yoneda("A"), cat.yoneda("TA"), cat.yoneda("Z")
    SF = split_by_kernel(cat, WIdem(YA, Yf(eF), r), "F")
    TF_idem = ChainMap(TA, TA, r, eF.entries)
    STF = split_by_kernel(cat, WIdem(YT, Yf(TF_idem), r), "TF")
    F_, TF_ = SF.B, STF.B
    rep = Report("rs_eta_triangle")
    top = (cat.unit(F_, t), cat.zero(F_, YZ, 0), cat.zero(YZ, TF_, 0))
    mid = (cat.unit(YA, t), cat.zero(YA, YZ, 0), cat.zero(YZ, YT, 0))
    down = (SF.s, SF.s, cat.unit(YZ, 0), STF.s)
    up = (SF.rho, SF.rho, cat.unit(YZ, r), STF.rho)
    _ladder_checks(cat, rep, top, mid, down, up, r)
    rep.add("corner", cat.equal(cat.compose(STF.s, STF.rho), Yf(TF_idem)))
    tri = eta_zero_triangle(A, t)
    rep.add("middle_strict_exact", is_strict_exact(tri))
    return RSTriangle((F_, F_, YZ, TF_), top, (YA, YA, YZ, YT), mid, down, up,
                      Fraction(0), r, t, r, rep, tri)


# -- random instances ------------------------------------------------------------------

BIRTHS = tuple(Fraction(x, 2) for x in range(0, 7))


def random_complex(field: Field, rng: random.Random, pieces: int = 3, degrees=(0, 1), births=BIRTHS,
                   name: str = "C", scramble: bool = True) -> FilteredComplex:
    """A sum of interval pieces (single generators or pairs y -> x with dy = x)
    followed by a random unitriangular filtered change of basis."""
    gens, diff = [], {}
    for i in range(pieces):
        n = rng.choice(degrees)
        b = rng.choice(births)
        x = "%s%d" % (name.lower()[:1] or "c", 2 * i)
        gens.append((x, n, b))
        if rng.random() < 0.5:
            y = "%s%d" % (name.lower()[:1] or "c", 2 * i + 1)
            b2 = b + rng.choice([Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)])
            gens.append((y, n + 1, b2))
            diff[y] = {x: 1}
    C = FilteredComplex(field, gens, diff, name)
    if scramble:
        C = _scramble(C, rng)
    return require_valid(C)


def _scramble(C: FilteredComplex, rng) -> FilteredComplex:
    """Conjugate d by g = 1 + N, N strictly below in (birth, name) order within each degree."""
    F = C.field
    order = {n: sorted(C.in_degree(n), key=lambda x: (C.birth(x), x)) for n in C.degrees()}
    g, ginv = {}, {}
    for n, names in order.items():
        m = len(names)
        mat = [[F.one if i == j else F.zero for j in range(m)] for i in range(m)]
        for j in range(m):
            for i in range(j):
                if rng.random() < 0.4:
                    mat[i][j] = F(rng.choice([-1, 1, 2]))
        inv = _inverse(mat, F)
        for j, x in enumerate(names):
            g[x] = {names[i]: mat[i][j] for i in range(m) if mat[i][j]}
            ginv[x] = {names[i]: inv[i][j] for i in range(m) if inv[i][j]}
    # new basis x' = g(x): d'(x') expressed in the x' basis is g^{-1} d g
    diff = {}
    for x in C.names:
        v = _apply_d(C, g[x])
        out = {}
        for k, c in v.items():
            for k2, c2 in ginv[k].items():
                out[k2] = out.get(k2, F.zero) + c * c2
        diff[x] = {k: c for k, c in out.items() if c}
    return FilteredComplex(F, C.gens, diff, C.name)


def _inverse(mat, F):
    m = len(mat)
    aug = [list(mat[i]) + [F.one if i == j else F.zero for j in range(m)] for i in range(m)]
    red, piv = linalg.rref(aug, 2 * m, F)
    return [list(row[m:]) for row in red]


def random_chain_map(X, Y, lev, rng, coeffs=(-1, 1, 2)) -> ChainMap:
    lev = level(lev)
    basis = chain_maps_at(X, Y, lev)
    F = Y.field
    f = zero_map(X, Y, lev)
    for b in basis:
        if rng.random() < 0.6:
            f = add_maps(f, scale_map(F(rng.choice(coeffs)), b))
    return f


def random_split_idempotent(field, rng, r, name="A", pieces=(2, 2)):
    """(A, e) with A = A1 ⊕ A2 scrambled and e = [[1, h], [0, 0]] a chain-level
    idempotent filtered at level r (h: A2 -> A1 a random chain map of level <= r)."""
    r = level(r)
    A1 = random_complex(field, rng, pieces[0], name=name + "p", scramble=False)
    A2 = random_complex(field, rng, pieces[1], name=name + "q", scramble=False)
    S = direct_sum(A1, A2, name=name)
    h = random_chain_map(A2, A1, r, rng)
    ent = {("1:" + n, "1:" + n): field.one for n in A1.names}
    for (yy, xx), c in h.entries.items():
        ent[("1:" + yy, "2:" + xx)] = c
    e = ChainMap(S, S, r, ent)
    if not chain_map_check(e):
        raise AssertionError("random idempotent is not a chain map")
    return S, e
