"""Finitely presented persistence modules over an exact field.

A module is given by generators with births and relations with weights.  At
level ``r`` its value is the span of generators born at or before ``r``
modulo the relations of weight at most ``r``.  Vectors are always written in
the *free* coordinates (one entry per generator); ``normal_form`` turns them
into coordinates in the canonical level basis.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg
from .field import INF, Field, fmt_level, level


@dataclass(frozen=True)
class _LevelData:
    n: int
    rows: tuple
    pivots: tuple
    free: tuple


class FPModule:
    """Generators ``(name, birth)`` and relations ``(weight, coefficients)``.

    Generators are stored sorted by ``(birth, name)``.  Relation coefficients
    may be given as a sequence aligned with the generators *as passed in*, or
    as a ``{name: scalar}`` mapping.
    """

    def __init__(self, field: Field, gens=(), rels=()):
        self.field = field
        raw = [(str(n), level(b)) for n, b in gens]
        names = [n for n, _ in raw]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        order = sorted(range(len(raw)), key=lambda i: (raw[i][1], raw[i][0]))
        self.gens = tuple(raw[i] for i in order)
        self.names = tuple(n for n, _ in self.gens)
        self.births = tuple(b for _, b in self.gens)
        self._index = {n: i for i, n in enumerate(self.names)}
        n = len(self.gens)
        out = []
        for w, coeffs in rels:
            w = level(w)
            if isinstance(coeffs, dict):
                vec = [field.zero] * n
                for name, c in coeffs.items():
                    vec[self._index[name]] = vec[self._index[name]] + field(c)
            else:
                if len(coeffs) != n:
                    raise ValueError("relation length %d != %d generators" % (len(coeffs), n))
                vec = [field.zero] * n
                for old, c in enumerate(coeffs):
                    vec[order.index(old)] = field(c)
            if not any(vec):
                continue
            for i, c in enumerate(vec):
                if c and self.births[i] > w:
                    raise ValueError(
                        "relation of weight %s touches %s born at %s"
                        % (fmt_level(w), self.names[i], fmt_level(self.births[i])))
            out.append((w, tuple(vec)))
        out.sort(key=lambda t: t[0])
        self.rels = tuple(out)
        self._weights = tuple(w for w, _ in self.rels)
        self.crit = tuple(sorted(set(self.births) | set(self._weights)))
        self._cache = {}

    # -- basics -----------------------------------------------------------
    def __len__(self):
        return len(self.gens)

    def index(self, name: str) -> int:
        return self._index[name]

    def zero(self) -> tuple:
        return self.field.zeros(len(self.gens))

    def basis_vector(self, i: int) -> tuple:
        v = [self.field.zero] * len(self.gens)
        v[i] = self.field.one
        return tuple(v)

    def vector(self, coeffs: dict) -> tuple:
        v = [self.field.zero] * len(self.gens)
        for name, c in coeffs.items():
            v[self._index[name]] += self.field(c)
        return tuple(v)

    def critical_values(self) -> tuple:
        return self.crit

    @property
    def r_stab(self) -> Fraction:
        return self.crit[-1] if self.crit else Fraction(0)

    def birth_of(self, vec) -> Fraction | None:
        """Least level at which the free vector is defined (None for 0)."""
        b = None
        for i, c in enumerate(vec):
            if c:
                b = self.births[i] if b is None else max(b, self.births[i])
        return b

    # -- level data -------------------------------------------------------
    def _key(self, r):
        k = bisect_right(self.crit, r)
        return self.crit[k - 1] if k else None

    def level_data(self, r) -> _LevelData:
        key = self._key(r)
        data = self._cache.get(key)
        if data is not None:
            return data
        if key is None:
            data = _LevelData(0, (), (), ())
        else:
            n = bisect_right(self.births, key)
            m = bisect_right(self._weights, key)
            rows = [vec[:n] for _, vec in self.rels[:m]]
            red, piv = linalg.rref(rows, n, self.field)
            pset = set(piv)
            data = _LevelData(n, tuple(red), tuple(piv), tuple(j for j in range(n) if j not in pset))
        self._cache[key] = data
        return data

    def dim_at(self, r) -> int:
        return len(self.level_data(level(r)).free)

    def defined_at(self, vec, r) -> bool:
        n = self.level_data(r).n if r is not INF else len(self.gens)
        return not any(vec[n:])

    def reduce(self, vec, r) -> tuple:
        """Free vector reduced modulo the level-r relations (pivot entries cleared)."""
        d = self.level_data(r)
        if any(vec[d.n:]):
            raise ValueError("vector not defined at level %s" % fmt_level(r))
        v = list(vec[:d.n])
        for row, p in zip(d.rows, d.pivots):
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
        return tuple(v) + tuple(vec[d.n:])

    def normal_form(self, vec, r) -> tuple:
        d = self.level_data(r)
        v = self.reduce(vec, r)
        return tuple(v[j] for j in d.free)

    def lift(self, coords, r) -> tuple:
        d = self.level_data(r)
        v = [self.field.zero] * len(self.gens)
        for j, c in zip(d.free, coords):
            v[j] = c
        return tuple(v)

    def is_zero(self, vec, r) -> bool:
        return not any(self.normal_form(vec, r))

    def equal_at(self, u, v, r) -> bool:
        return self.is_zero(linalg.sub(u, v), r)

    def structure_map(self, r, s) -> list:
        """Matrix of i_{r,s} (rows: level-s basis, columns: level-r basis)."""
        r, s = level(r), level(s)
        if r > s:
            raise ValueError("structure_map needs r <= s")
        src = self.level_data(r)
        cols = [self.normal_form(self.basis_vector(j), s) for j in src.free]
        ds = len(self.level_data(s).free)
        return [tuple(c[i] for c in cols) for i in range(ds)]

    def eval_stable(self):
        """Basis (generator names) of the colimit space and the level r_stab."""
        rs = self.r_stab
        return tuple(self.names[j] for j in self.level_data(rs).free), rs

    @property
    def stable_dim(self) -> int:
        return len(self.level_data(self.r_stab).free) if self.crit else 0

    def stable_form(self, vec) -> tuple:
        return self.normal_form(vec, self.r_stab) if self.crit else ()

    def grid_with_midpoints(self) -> list:
        """Critical values, midpoints between them, and one point on each side."""
        c = list(self.crit)
        if not c:
            return [Fraction(0)]
        pts = [c[0] - 1] + c + [c[-1] + 1]
        pts += [(a + b) / 2 for a, b in zip(c, c[1:])]
        return sorted(set(pts))

    # -- structure --------------------------------------------------------
    def shift(self, a) -> "FPModule":
        """S^a M with (S^a M)(r) = M(r - a): births and weights move by +a."""
        a = level(a)
        return FPModule(self.field, [(n, b + a) for n, b in self.gens],
                        [(w + a, v) for w, v in self.rels])

    def rename(self, mapping: Callable[[str], str]) -> "FPModule":
        gens = [(mapping(n), b) for n, b in self.gens]
        return FPModule(self.field, gens, [(w, v) for w, v in self.rels])

    def signature(self):
        """Canonical data for structural comparison."""
        sig = []
        for c in self.crit:
            d = self.level_data(c)
            sig.append((c, d.n, d.rows))
        return (self.field, self.gens, tuple(sig))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FPModule) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return "FPModule(%d gens, %d rels)" % (len(self.gens), len(self.rels))

    def barcode(self) -> "Barcode":
        return barcode(self)


def zero_module(field: Field) -> FPModule:
    return FPModule(field)


def free_module(field: Field, gens) -> FPModule:
    return FPModule(field, gens)


def interval(field: Field, b, d=INF, name: str = "x") -> FPModule:
    """The interval module [b, d)."""
    if d is INF:
        return FPModule(field, [(name, b)])
    return FPModule(field, [(name, b)], [(d, {name: 1})])


def direct_sum(m: FPModule, n: FPModule, tags=("1", "2")) -> FPModule:
    """M ⊕ N; generators are renamed only on name collisions."""
    if m.field != n.field:
        raise ValueError("field mismatch")
    clash = set(m.names) & set(n.names)
    mn = (lambda x: x + "." + tags[0]) if clash else (lambda x: x)
    nn = (lambda x: x + "." + tags[1]) if clash else (lambda x: x)
    gens = [(mn(x), b) for x, b in m.gens] + [(nn(x), b) for x, b in n.gens]
    k = len(m.gens)
    z = m.field.zero
    rels = [(w, tuple(v) + (z,) * len(n.gens)) for w, v in m.rels]
    rels += [(w, (z,) * k + tuple(v)) for w, v in n.rels]
    return FPModule(m.field, gens, rels)


def shift_module(m: FPModule, a) -> FPModule:
    return m.shift(a)


def dim_at(m: FPModule, r) -> int:
    return m.dim_at(r)


def structure_map(m: FPModule, r, s):
    return m.structure_map(r, s)


def eval_stable(m: FPModule):
    return m.eval_stable()


# -- barcodes ---------------------------------------------------------------

@dataclass(frozen=True)
class Barcode:
    bars: tuple  # sorted (birth, death) pairs, death may be INF

    def count_at(self, r) -> int:
        return sum(1 for b, d in self.bars if b <= r < d)

    def __len__(self):
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def max_finite_length(self):
        """Longest bar length; INF if some bar is infinite; 0 if empty."""
        best = Fraction(0)
        for b, d in self.bars:
            if d is INF:
                return INF
            best = max(best, d - b)
        return best

    def __str__(self):
        return "{" + ", ".join("[%s,%s)" % (fmt_level(b), fmt_level(d)) for b, d in self.bars) + "}"


def _bar_key(bar):
    b, d = bar
    return (b, 1, 0) if d is INF else (b, 0, d)


def barcode(m: FPModule) -> Barcode:
    c = m.crit
    k = len(c)
    if k == 0:
        return Barcode(())
    ranks = {}

    def rk(i, j):
        if i < 0:
            return 0
        key = (i, j)
        if key not in ranks:
            if i == j:
                ranks[key] = m.dim_at(c[i])
            else:
                ranks[key] = linalg.rank(m.structure_map(c[i], c[j]), m.dim_at(c[i]), m.field)
        return ranks[key]

    bars = []
    for i in range(k):
        for j in range(i + 1, k):
            mult = rk(i, j - 1) - rk(i - 1, j - 1) - rk(i, j) + rk(i - 1, j)
            bars += [(c[i], c[j])] * mult
        mult = rk(i, k - 1) - rk(i - 1, k - 1)
        bars += [(c[i], INF)] * mult
    return Barcode(tuple(sorted(bars, key=_bar_key)))


# -- morphisms --------------------------------------------------------------

class PModMorphism:
    """A morphism M -> N raising levels by ``shift``.

    ``images[i]`` is the free N-vector of the image of generator ``i`` of M;
    it must be defined at level ``birth_i + shift``.
    """

    def __init__(self, source: FPModule, target: FPModule, shift, images, check=True):
        self.source = source
        self.target = target
        self.shift = level(shift)
        f = target.field
        if len(images) != len(source.gens):
            raise ValueError("need one image per source generator")
        self.images = tuple(tuple(f(x) for x in im) if not isinstance(im, tuple) else im for im in images)
        if check:
            self.validate()

    def validate(self):
        for i, (name, b) in enumerate(self.source.gens):
            if not self.target.defined_at(self.images[i], b + self.shift):
                raise ValueError("image of %s not defined at level %s" % (name, fmt_level(b + self.shift)))
        for w, vec in self.source.rels:
            if not self.target.is_zero(self.apply(vec), w + self.shift):
                raise ValueError("relation of weight %s not sent to zero" % fmt_level(w))

    def apply(self, vec) -> tuple:
        out = list(self.target.zero())
        for c, im in zip(vec, self.images):
            if c:
                out = [a + c * b for a, b in zip(out, im)]
        return tuple(out)

    def matrix_at(self, t) -> list:
        """Matrix from the level-t basis of the source to the level-(t+shift) basis of the target."""
        t = level(t)
        src = self.source.level_data(t)
        cols = [self.target.normal_form(self.images[j], t + self.shift) for j in src.free]
        dt = self.target.dim_at(t + self.shift)
        return [tuple(col[i] for col in cols) for i in range(dt)]

    def compose(self, other: "PModMorphism") -> "PModMorphism":
        """self ∘ other."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition endpoints do not match")
        ims = [self.apply(im) for im in other.images]
        return PModMorphism(other.source, self.target, self.shift + other.shift, ims, check=False)

    def __add__(self, other):
        self._parallel(other)
        return PModMorphism(self.source, self.target, self.shift,
                            [linalg.add(a, b) for a, b in zip(self.images, other.images)], check=False)

    def __sub__(self, other):
        self._parallel(other)
        return PModMorphism(self.source, self.target, self.shift,
                            [linalg.sub(a, b) for a, b in zip(self.images, other.images)], check=False)

    def scale(self, c):
        c = self.target.field(c)
        return PModMorphism(self.source, self.target, self.shift,
                            [linalg.scale(c, a) for a in self.images], check=False)

    def push(self, ds):
        """Compose with the structure maps: same images, shift raised by ``ds``."""
        return PModMorphism(self.source, self.target, self.shift + level(ds), self.images, check=False)

    def _parallel(self, other):
        if other.shift != self.shift or other.source != self.source or other.target != self.target:
            raise ValueError("morphisms are not parallel")

    def is_zero(self) -> bool:
        return all(self.target.is_zero(im, b + self.shift)
                   for im, b in zip(self.images, self.source.births))

    def equals(self, other) -> bool:
        self._parallel(other)
        return (self - other).is_zero()

    def __repr__(self):
        return "PModMorphism(shift=%s)" % fmt_level(self.shift)


def compose_morphisms(g: PModMorphism, f: PModMorphism) -> PModMorphism:
    return g.compose(f)


def identity_morphism(m: FPModule) -> PModMorphism:
    return PModMorphism(m, m, 0, [m.basis_vector(i) for i in range(len(m.gens))], check=False)


def zero_morphism(m: FPModule, n: FPModule, shift=0) -> PModMorphism:
    return PModMorphism(m, n, shift, [n.zero() for _ in m.gens], check=False)


# -- subquotients -----------------------------------------------------------

class Subquotient:
    """A presented subquotient sub(t)/kill(t) of an ambient module.

    ``module`` is the presentation; ``vectors[i]`` is the ambient free vector
    of its i-th generator.  Built by :func:`present_subquotient`.
    """

    def __init__(self, ambient, module, vectors, kill, grid):
        self.ambient = ambient
        self.module = module
        self.vectors = tuple(vectors)
        self._kill = kill
        self.grid = tuple(grid)
        self._solvers = {}

    def _solver(self, t):
        key = self.module._key(t)
        akey = self.ambient._key(t)
        gkey = (key, akey, self._grid_key(t))
        s = self._solvers.get(gkey)
        if s is None:
            n = self.module.level_data(t).n if key is not None else 0
            cols = [self.ambient.normal_form(self.vectors[i], t) for i in range(n)]
            kills = list(self._kill(t)) if self._kill else []
            span = linalg.Span(self.ambient.dim_at(t), self.ambient.field)
            for c in cols + kills:
                span.add(c)
            s = (n, span)
            self._solvers[gkey] = s
        return s

    def _grid_key(self, t):
        k = bisect_right(self.grid, t)
        return self.grid[k - 1] if k else None

    def coordinates(self, vec, t) -> tuple:
        """Free coordinates over ``module`` of an ambient vector lying in sub(t)."""
        t = level(t)
        n, span = self._solver(t)
        c = span.coordinates(self.ambient.normal_form(vec, t))
        if c is None:
            raise ValueError("vector does not lie in the subquotient at level %s" % fmt_level(t))
        out = list(self.module.zero())
        for i in range(n):
            out[i] = c[i]
        return tuple(out)

    def contains(self, vec, t) -> bool:
        n, span = self._solver(level(t))
        return span.contains(self.ambient.normal_form(vec, t))

    def inclusion(self) -> PModMorphism:
        return PModMorphism(self.module, self.ambient, 0, list(self.vectors), check=False)


def present_subquotient(ambient: FPModule, grid: Sequence, sub: Callable, kill: Callable | None = None,
                        prefix: str = "g") -> Subquotient:
    """Present t -> sub(t)/kill(t) inside ``ambient``.

    ``sub(t)`` and ``kill(t)`` return spanning lists of coordinate vectors in
    the canonical level-t basis of the ambient module; kill(t) must lie in
    sub(t) and both must be monotone along structure maps.  ``grid`` must
    contain every level where either can change.
    """
    f = ambient.field
    grid = sorted(set(level(g) for g in grid))
    gens, vecs, rels = [], [], []
    relspan_rows = []
    counter = 0
    for t in grid:
        dim = ambient.dim_at(t)
        cols = [ambient.normal_form(v, t) for v in vecs]
        kills = list(kill(t)) if kill else []
        ng = len(cols)
        # relations among existing generators modulo kill(t)
        if ng:
            mat = [tuple(c[i] for c in cols) + tuple(k[i] for k in kills) for i in range(dim)]
            relspan = linalg.Span(ng, f)
            for r in relspan_rows:
                relspan.add(tuple(r) + (f.zero,) * (ng - len(r)))
            for v in linalg.nullspace(mat, ng + len(kills), f):
                rv = v[:ng]
                if any(rv) and relspan.add(rv):
                    rels.append((t, rv))
                    relspan_rows.append(rv)
        span = linalg.Span(dim, f)
        for c in cols + kills:
            span.add(c)
        for s in sub(t):
            if span.add(s):
                name = "%s%04d" % (prefix, counter)
                counter += 1
                gens.append((name, t))
                vecs.append(ambient.lift(s, t))
    n = len(gens)
    full = [(w, tuple(v) + (f.zero,) * (n - len(v))) for w, v in rels]
    module = FPModule(f, gens, full)
    return Subquotient(ambient, module, vecs, kill, grid)


def kernel(f: PModMorphism):
    """Kernel of ``f`` with its shift-0 inclusion."""
    sq = kernel_subquotient(f)
    return sq.module, sq.inclusion()


def kernel_subquotient(f: PModMorphism, prefix: str = "k") -> Subquotient:
    grid = set(f.source.crit) | {c - f.shift for c in f.target.crit}
    field = f.source.field

    def sub(t):
        m = f.matrix_at(t)
        return linalg.nullspace(m, f.source.dim_at(t), field)

    return present_subquotient(f.source, grid, sub, None, prefix)


def image_subquotient(f: PModMorphism, prefix: str = "m") -> Subquotient:
    """Image of ``f`` inside its target (levels of the target)."""
    grid = set(f.target.crit) | {c + f.shift for c in f.source.crit}
    field = f.source.field

    def sub(t):
        m = f.matrix_at(t - f.shift)
        ncols = f.source.dim_at(t - f.shift)
        return [tuple(row[j] for row in m) for j in range(ncols)]

    return present_subquotient(f.target, grid, sub, None, prefix)


def factor_through(sq: Subquotient, g: PModMorphism) -> PModMorphism:
    """The unique-up-to-relations h with inclusion ∘ h = g (g lands in sub)."""
    ims = []
    for im, b in zip(g.images, g.source.births):
        ims.append(sq.coordinates(im, b + g.shift))
    return PModMorphism(g.source, sq.module, g.shift, ims)
