"""Finitely presented persistence categories and semi-categories.

Hom(A, B) is an :class:`FPModule`; composition is bilinear and given on
generators by a table.  Morphisms of the flattened category are
:class:`WMorphism` values between formally shifted objects, so that
Hom(S^a A, S^b B) at weight w is Hom(A, B) at level w + a - b.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import linalg
from .field import INF, Field, fmt_level, level
from .pmod import FPModule
from .reports import Report


@dataclass(frozen=True, order=True)
class ShiftedObject:
    base: str
    shift: Fraction = Fraction(0)

    def S(self, a) -> "ShiftedObject":
        return ShiftedObject(self.base, self.shift + level(a))

    def __str__(self):
        return self.base if self.shift == 0 else "S^%s %s" % (fmt_level(self.shift), self.base)

    def to_json(self):
        return {"base": self.base, "shift": fmt_level(self.shift)}


def as_object(x) -> ShiftedObject:
    if isinstance(x, ShiftedObject):
        return x
    return ShiftedObject(str(x), Fraction(0))


@dataclass(frozen=True)
class WMorphism:
    src: ShiftedObject
    tgt: ShiftedObject
    weight: Fraction
    vec: tuple

    @property
    def level(self) -> Fraction:
        """Level of the underlying element of Hom(base src, base tgt)."""
        return self.weight + self.src.shift - self.tgt.shift

    def to_json(self):
        return {"src": str(self.src), "tgt": str(self.tgt), "weight": fmt_level(self.weight),
                "vec": [str(x) if not hasattr(x, "numerator") else "%d/%d" % (x.numerator, x.denominator)
                        for x in self.vec]}


class PCatPresentation:
    """A finite persistence (semi-)category.

    ``table[(A, B, C)][(i, j)]`` is the free Hom(A, C) vector of
    ``g_j ∘ f_i`` for generators f_i of Hom(A, B) and g_j of Hom(B, C); it is
    read at level birth(f_i) + birth(g_j).  Missing entries are zero.
    """

    def __init__(self, field: Field, objects, homs, table=None, identities=None,
                 rmax=None, name: str = ""):
        self.field = field
        self.objects = tuple(objects)
        self._objset = frozenset(self.objects)
        self.name = name
        self.homs = {}
        for (a, b), m in homs.items():
            if a not in self.objects or b not in self.objects:
                raise ValueError("hom between unknown objects %r, %r" % (a, b))
            self.homs[(a, b)] = m
        self._zero = FPModule(field)
        self.table = {k: dict(v) for k, v in (table or {}).items()}
        self.identities = {a: tuple(v) for a, v in (identities or {}).items()}
        self.unital = all(a in self.identities for a in self.objects)
        crit = set()
        for m in self.homs.values():
            crit |= set(m.crit)
        self.base_crit = tuple(sorted(crit))
        top = max([c for c in crit] + [Fraction(0)])
        self.rmax = level(rmax) if rmax is not None else 4 * top
        self._floors = {}
        self._grid = None

    # -- homs -------------------------------------------------------------
    def hom(self, a, b) -> FPModule:
        """Hom(a, b); shifted objects use their base, undeclared pairs are zero."""
        a, b = as_object(a).base, as_object(b).base
        for x in (a, b):
            if x not in self._objset:
                raise KeyError("unknown object %r" % x)
        return self.homs.get((a, b), self._zero)

    def grid(self) -> tuple:
        """Hom critical values closed under nonnegative sums up to R_max."""
        if self._grid is None:
            base = set(self.base_crit) | {Fraction(0)}
            pos = sorted(c for c in base if 0 <= c <= self.rmax)
            out = set(pos)
            frontier = set(pos)
            while frontier:
                new = set()
                for x in frontier:
                    for y in pos:
                        s = x + y
                        if s <= self.rmax and s not in out:
                            new.add(s)
                out |= new
                frontier = new
                if len(out) > 4000:
                    break
            self._grid = tuple(sorted(out | {c for c in base if c < 0}))
        return self._grid

    def compose_vec(self, a, b, c, gvec, fvec) -> tuple:
        """Free vector of g∘f for f ∈ Hom(a,b), g ∈ Hom(b,c)."""
        tgt = self.hom(a, c)
        out = [self.field.zero] * len(tgt.gens)
        tab = self.table.get((a, b, c))
        if not tab:
            return tuple(out)
        fnz = [(i, x) for i, x in enumerate(fvec) if x]
        gnz = [(j, y) for j, y in enumerate(gvec) if y]
        for i, x in fnz:
            for j, y in gnz:
                v = tab.get((i, j))
                if v is not None:
                    c0 = x * y
                    for k, z in enumerate(v):
                        if z:
                            out[k] = out[k] + c0 * z
        return tuple(out)

    # -- morphisms --------------------------------------------------------
    def morphism(self, src, tgt, weight, vec) -> WMorphism:
        src, tgt = as_object(src), as_object(tgt)
        weight = level(weight)
        m = self.hom(src.base, tgt.base)
        vec = tuple(self.field(x) for x in vec)
        if len(vec) != len(m.gens):
            raise ValueError("vector length mismatch for Hom(%s,%s)" % (src.base, tgt.base))
        f = WMorphism(src, tgt, weight, vec)
        if not m.defined_at(vec, f.level):
            raise ValueError("element not defined at level %s" % fmt_level(f.level))
        return f

    def gen(self, a, b, name: str, weight=None) -> WMorphism:
        """Generator ``name`` of Hom(a, b) as a morphism a → b at its birth (or ``weight``)."""
        m = self.hom(a, b)
        i = m.index(name)
        w = m.births[i] if weight is None else level(weight)
        return self.morphism(a, b, w, m.basis_vector(i))

    def element(self, a, b, weight, coeffs: dict) -> WMorphism:
        return self.morphism(a, b, weight, self.hom(as_object(a).base, as_object(b).base).vector(coeffs))

    def zero(self, src, tgt, weight=0) -> WMorphism:
        src, tgt = as_object(src), as_object(tgt)
        return WMorphism(src, tgt, level(weight), self.hom(src.base, tgt.base).zero())

    def compose(self, g: WMorphism, f: WMorphism) -> WMorphism:
        if f.tgt != g.src:
            raise ValueError("cannot compose: target %s != source %s" % (f.tgt, g.src))
        vec = self.compose_vec(f.src.base, f.tgt.base, g.tgt.base, g.vec, f.vec)
        return WMorphism(f.src, g.tgt, f.weight + g.weight, vec)

    def chain(self, *maps) -> WMorphism:
        """chain(h, g, f) = h∘g∘f."""
        out = maps[-1]
        for g in reversed(maps[:-1]):
            out = self.compose(g, out)
        return out

    def _check_parallel(self, f, g):
        if f.src != g.src or f.tgt != g.tgt or f.weight != g.weight:
            raise ValueError("morphisms not parallel: %s->%s@%s vs %s->%s@%s" % (
                f.src, f.tgt, fmt_level(f.weight), g.src, g.tgt, fmt_level(g.weight)))

    def add(self, f, g) -> WMorphism:
        self._check_parallel(f, g)
        return WMorphism(f.src, f.tgt, f.weight, linalg.add(f.vec, g.vec))

    def sub(self, f, g) -> WMorphism:
        self._check_parallel(f, g)
        return WMorphism(f.src, f.tgt, f.weight, linalg.sub(f.vec, g.vec))

    def scale(self, c, f) -> WMorphism:
        return WMorphism(f.src, f.tgt, f.weight, linalg.scale(self.field(c), f.vec))

    def neg(self, f) -> WMorphism:
        return self.scale(-1, f)

    def normal_form(self, f) -> tuple:
        return self.hom(f.src.base, f.tgt.base).normal_form(f.vec, f.level)

    def is_zero(self, f) -> bool:
        return not any(self.normal_form(f))

    def equal(self, f, g) -> bool:
        self._check_parallel(f, g)
        return self.hom(f.src.base, f.tgt.base).is_zero(linalg.sub(f.vec, g.vec), f.level)

    def push(self, f, dr) -> WMorphism:
        """i_{w, w+dr}(f)."""
        dr = level(dr)
        if dr < 0:
            raise ValueError("structure maps only go up")
        return WMorphism(f.src, f.tgt, f.weight + dr, f.vec)

    def shift_morphism(self, f, a) -> WMorphism:
        """S^a f."""
        return WMorphism(f.src.S(a), f.tgt.S(a), f.weight, f.vec)

    def flatten(self, f) -> WMorphism:
        """The same morphism seen as a weight-0 map into a shifted target."""
        return WMorphism(f.src, f.tgt.S(-f.weight), Fraction(0), f.vec)

    def level_form(self, f) -> WMorphism:
        """Unshifted endpoints with weight equal to the level."""
        return WMorphism(ShiftedObject(f.src.base), ShiftedObject(f.tgt.base), f.level, f.vec)

    # -- identities, η and ζ ----------------------------------------------
    def identity_vec(self, a):
        if a in self.identities:
            return self.identities[a]
        return None

    def identity(self, x) -> WMorphism:
        x = as_object(x)
        v = self.identity_vec(x.base)
        if v is None:
            raise ValueError("object %s has no identity" % x.base)
        return WMorphism(x, x, Fraction(0), v)

    def eta(self, x, r) -> WMorphism:
        """η_r^X : X → S^{-r}X (weight 0); for semi-categories this is ζ_r."""
        x = as_object(x)
        r = level(r)
        if r < 0:
            raise ValueError("eta needs r >= 0")
        return WMorphism(x, x.S(-r), Fraction(0), self.unit_vec(x.base, r))

    zeta = eta

    def unit(self, x, r) -> WMorphism:
        """Level form of η_r (or ζ_r): an endomorphism of weight r."""
        x = as_object(x)
        r = level(r)
        if r < 0:
            raise ValueError("unit needs r >= 0")
        return WMorphism(x, x, r, self.unit_vec(x.base, r))

    def unit_vec(self, a, r) -> tuple:
        v = self.identity_vec(a)
        if v is not None:
            return v
        fl, zv = self.floor(a)
        if fl is INF or r < fl:
            raise ValueError("no %s-identity known on %s (floor %s)" % (fmt_level(r), a, fl))
        return zv

    def floor(self, a):
        """(⌊A⌋, ζ vector at the floor) found on the grid up to R_max; (INF, None) if none."""
        if a in self._floors:
            return self._floors[a]
        v = self.identity_vec(a)
        if v is not None:
            out = (Fraction(0), v)
        else:
            out = (INF, None)
            for r in self.grid():
                if r < 0:
                    continue
                z = self.r_identity(a, r)
                if z is not None:
                    out = (r, z)
                    break
        self._floors[a] = out
        return out

    def r_identity(self, a, r):
        """An element z ∈ Hom(a,a)(r) with f∘z = i(f), z∘g = i(g) for all generators, or None."""
        r = level(r)
        end = self.hom(a, a)
        n = end.level_data(r).n if r >= 0 else 0
        eqs_cols = [[] for _ in range(n)]
        rhs = []
        for x in self.objects:
            out_m = self.hom(a, x)
            for gi, (gname, b) in enumerate(out_m.gens):
                gv = out_m.basis_vector(gi)
                t = b + r
                rhs.extend(out_m.normal_form(gv, t))
                for k in range(n):
                    eqs_cols[k].extend(out_m.normal_form(self.compose_vec(a, a, x, gv, end.basis_vector(k)), t))
            in_m = self.hom(x, a)
            for gi, (gname, b) in enumerate(in_m.gens):
                gv = in_m.basis_vector(gi)
                t = b + r
                rhs.extend(in_m.normal_form(gv, t))
                for k in range(n):
                    eqs_cols[k].extend(in_m.normal_form(self.compose_vec(x, a, a, end.basis_vector(k), gv), t))
        if n == 0:
            return end.zero() if not any(rhs) else None
        rows = [tuple(col[i] for col in eqs_cols) for i in range(len(rhs))]
        sol = linalg.solve(rows, rhs, n, self.field)
        if sol is None:
            return None
        return tuple(sol) + (self.field.zero,) * (len(end.gens) - n)

    # -- C_0 and C_∞ --------------------------------------------------------
    def hom_zero(self, a, b) -> list:
        """Basis of Hom_{C_0}(a, b) as weight-0 morphisms."""
        m = self.hom(a, b)
        return [self.morphism(a, b, 0, m.lift(e, 0)) for e in _unit_vectors(m.dim_at(0), self.field)]

    def hom_limit(self, a, b):
        """(basis generator names, r_stab) of the stable hom space."""
        return self.hom(a, b).eval_stable()

    def stable_level(self, a, b) -> Fraction:
        return self.hom(a, b).r_stab

    def projection(self, f) -> tuple:
        """Coordinates of [f]_∞ in the stable basis of Hom(base src, base tgt)."""
        m = self.hom(f.src.base, f.tgt.base)
        if not m.crit:
            return ()
        return m.normal_form(f.vec, max(f.level, m.r_stab))

    def stable_lift(self, a, b, coords) -> WMorphism:
        """A representative of a stable class at weight r_stab (a → b, unshifted)."""
        m = self.hom(a, b)
        rs = m.r_stab
        return WMorphism(ShiftedObject(a), ShiftedObject(b), rs, m.lift(coords, rs))

    def stable_compose(self, a, b, c, y, x) -> tuple:
        """Stable class of y∘x for stable classes x ∈ Hom(a,b), y ∈ Hom(b,c)."""
        fx = self.stable_lift(a, b, x)
        gy = self.stable_lift(b, c, y)
        return self.projection(self.compose(WMorphism(gy.src, gy.tgt, gy.weight, gy.vec), fx))

    def stable_identity(self, a) -> tuple:
        m = self.hom(a, a)
        fl, v = self.floor(a)
        if fl is INF:
            raise ValueError("no r-identity on %s within R_max" % a)
        return m.normal_form(v, max(fl, m.r_stab)) if m.crit else ()

    def is_r_acyclic(self, a, r) -> bool:
        u = self.unit(a, r)
        return self.is_zero(u)

    def r_equivalent(self, f, g, r) -> bool:
        self._check_parallel(f, g)
        r = level(r)
        d = self.sub(f, g)
        return self.is_zero(self.push(d, r))

    # -- validation --------------------------------------------------------
    def validate(self) -> Report:
        return validate(self)

    def __repr__(self):
        return "PCatPresentation(%s, %d objects)" % (self.name or "?", len(self.objects))


def _unit_vectors(n, field):
    out = []
    for i in range(n):
        v = [field.zero] * n
        v[i] = field.one
        out.append(tuple(v))
    return out


def validate(P: PCatPresentation) -> Report:
    """Table well-formedness, compatibility with relations, associativity and unit laws."""
    rep = Report("validate")
    F = P.field
    objs = P.objects
    bad = []
    for (a, b, c), tab in sorted(P.table.items()):
        mab, mbc, mac = P.hom(a, b), P.hom(b, c), P.hom(a, c)
        for (i, j), v in sorted(tab.items()):
            if i >= len(mab.gens) or j >= len(mbc.gens) or len(v) != len(mac.gens):
                bad.append({"triple": [a, b, c], "entry": [i, j], "why": "index"})
            elif not mac.defined_at(v, mab.births[i] + mbc.births[j]):
                bad.append({"triple": [a, b, c], "entry": [mab.names[i], mbc.names[j]], "why": "level"})
    rep.add("table_levels", not bad, violations=bad[:10])
    if bad:
        return rep

    # relations are sent to zero by composing with any generator on either side
    bad = []
    for a, b, c in product(objs, repeat=3):
        mab, mbc, mac = P.hom(a, b), P.hom(b, c), P.hom(a, c)
        for w, rv in mab.rels:
            for j, (gname, bg) in enumerate(mbc.gens):
                out = P.compose_vec(a, b, c, mbc.basis_vector(j), rv)
                if not mac.is_zero(out, w + bg):
                    bad.append({"objects": [a, b, c], "relation_weight": w, "side": "post", "gen": gname})
        for w, rv in mbc.rels:
            for i, (fname, bf) in enumerate(mab.gens):
                out = P.compose_vec(a, b, c, rv, mab.basis_vector(i))
                if not mac.is_zero(out, w + bf):
                    bad.append({"objects": [a, b, c], "relation_weight": w, "side": "pre", "gen": fname})
    rep.add("relations_compatible", not bad, violations=bad[:10])

    bad = []
    for a, b, c, d in product(objs, repeat=4):
        mab, mbc, mcd, mad = P.hom(a, b), P.hom(b, c), P.hom(c, d), P.hom(a, d)
        if not (mab.gens and mbc.gens and mcd.gens):
            continue
        for i, j, k in product(range(len(mab.gens)), range(len(mbc.gens)), range(len(mcd.gens))):
            f, g, h = mab.basis_vector(i), mbc.basis_vector(j), mcd.basis_vector(k)
            left = P.compose_vec(a, c, d, h, P.compose_vec(a, b, c, g, f))
            right = P.compose_vec(a, b, d, P.compose_vec(b, c, d, h, g), f)
            t = mab.births[i] + mbc.births[j] + mcd.births[k]
            if not mad.equal_at(left, right, t):
                bad.append({"objects": [a, b, c, d],
                            "generators": [mab.names[i], mbc.names[j], mcd.names[k]], "level": t})
    rep.add("associative", not bad, violations=bad[:10])

    bad = []
    for a in objs:
        if a not in P.identities:
            continue
        iv = P.identities[a]
        if not P.hom(a, a).defined_at(iv, Fraction(0)):
            bad.append({"object": a, "why": "identity not at level 0"})
            continue
        for x in objs:
            m = P.hom(a, x)
            for i, (name, b) in enumerate(m.gens):
                gv = m.basis_vector(i)
                if not m.equal_at(P.compose_vec(a, a, x, gv, iv), gv, b):
                    bad.append({"object": a, "generator": name, "side": "right"})
            m = P.hom(x, a)
            for i, (name, b) in enumerate(m.gens):
                gv = m.basis_vector(i)
                if not m.equal_at(P.compose_vec(x, a, a, iv, gv), gv, b):
                    bad.append({"object": a, "generator": name, "side": "left"})
    rep.add("unit_laws", not bad, violations=bad[:10])
    rep.add("bilinear", True, note="composition is defined by a bilinear table")
    rep.info = {"objects": len(objs), "unital": P.unital}
    return rep
