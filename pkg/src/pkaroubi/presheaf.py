"""Persistent presheaves, the persistent Yoneda embedding and kernel splittings.

A presheaf assigns an :class:`FPModule` to every object of a presentation
and, to every hom generator f: X → Y born at u, a module map F(Y) → F(X)
raising levels by u.  Natural transformations of weight w have one
component per object, each raising levels by w.  :class:`PresheafCat` is a
level-form ctx for :mod:`pkaroubi.idem`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import idem, linalg
from .field import INF, fmt_level, level
from .idem import RetractTriple, WIdem
from .pcat import PCatPresentation, ShiftedObject, WMorphism
from .pmod import (FPModule, PModMorphism, factor_through, identity_morphism, image_subquotient,
                   kernel_subquotient, present_subquotient, zero_morphism)
from .reports import Report


class PPresheaf:
    """Values per object and actions per hom generator (compared by identity)."""

    def __init__(self, P: PCatPresentation, values: dict, actions: dict, name: str = "F"):
        self.P = P
        self.values = dict(values)
        self.actions = dict(actions)    # (X, Y, i) -> PModMorphism F(Y) -> F(X)
        self.name = name
        self.sub = None     # per-object subquotients when carved out of another presheaf

    def __call__(self, X) -> FPModule:
        return self.values[X]

    def act(self, X, Y, vec, lev) -> PModMorphism:
        """F(f) for the element ``vec`` of Hom(X, Y) at level ``lev``."""
        P = self.P
        FX, FY = self.values[X], self.values[Y]
        lev = level(lev)
        ims = [FX.zero() for _ in FY.gens]
        for i, c in enumerate(vec):
            if not c:
                continue
            a = self.actions[(X, Y, i)]
            ims = [linalg.add(im, linalg.scale(c, ai)) for im, ai in zip(ims, a.images)]
        return PModMorphism(FY, FX, lev, ims, check=False)

    def validate(self) -> Report:
        """Generator actions respect relations and composition at every level."""
        P = self.P
        rep = Report("presheaf[%s]" % self.name)
        bad = []
        for (X, Y), m in sorted(P.homs.items()):
            for w, rv in m.rels:
                if not self.act(X, Y, rv, w).is_zero():
                    bad.append({"hom": [X, Y], "relation_weight": w})
        rep.add("relations", not bad, violations=bad[:10])
        bad = []
        for X, Y, Z in product(P.objects, repeat=3):
            mxy, myz = P.hom(X, Y), P.hom(Y, Z)
            for i, j in product(range(len(mxy.gens)), range(len(myz.gens))):
                u = mxy.births[i] + myz.births[j]
                comp = P.compose_vec(X, Y, Z, myz.basis_vector(j), mxy.basis_vector(i))
                left = self.act(X, Z, comp, u)
                right = self.act(X, Y, mxy.basis_vector(i), mxy.births[i]).compose(
                    self.act(Y, Z, myz.basis_vector(j), myz.births[j]))
                if not left.equals(right):
                    bad.append({"objects": [X, Y, Z], "generators": [mxy.names[i], myz.names[j]]})
        rep.add("functorial", not bad, violations=bad[:10])
        bad = []
        for X in P.objects:
            if X in P.identities:
                if not self.act(X, X, P.identities[X], 0).equals(identity_morphism(self.values[X])):
                    bad.append(X)
        rep.add("identities", not bad, violations=bad)
        return rep

    def __str__(self):
        return self.name

    def __repr__(self):
        return "PPresheaf(%s)" % self.name


@dataclass(frozen=True, eq=False)
class NatTrans:
    src: PPresheaf
    tgt: PPresheaf
    weight: Fraction
    comps: dict

    def to_json(self):
        return {"src": str(self.src), "tgt": str(self.tgt), "weight": fmt_level(self.weight),
                "components": {str(X): [list(map(str, im)) for im in c.images] for X, c in sorted(self.comps.items())}}


class PresheafCat:
    """Presheaves on ``P`` with natural transformations in level form."""

    def __init__(self, P: PCatPresentation):
        self.P = P
        self.field = P.field
        self._yoneda = {}
        self._nat = {}

    # -- level-form ctx ---------------------------------------------------
    def compose(self, g: NatTrans, f: NatTrans) -> NatTrans:
        if f.tgt is not g.src:
            raise ValueError("cannot compose natural transformations %s -> %s, %s -> %s"
                             % (f.src, f.tgt, g.src, g.tgt))
        comps = {X: g.comps[X].compose(f.comps[X]) for X in self.P.objects}
        return NatTrans(f.src, g.tgt, f.weight + g.weight, comps)

    def unit(self, F: PPresheaf, r) -> NatTrans:
        r = level(r)
        return NatTrans(F, F, r, {X: identity_morphism(F(X)).push(r) for X in self.P.objects})

    def zero(self, F, G, w=0) -> NatTrans:
        w = level(w)
        return NatTrans(F, G, w, {X: zero_morphism(F(X), G(X), w) for X in self.P.objects})

    def _parallel(self, f, g):
        if f.src is not g.src or f.tgt is not g.tgt or f.weight != g.weight:
            raise ValueError("natural transformations are not parallel")

    def add(self, f, g) -> NatTrans:
        self._parallel(f, g)
        return NatTrans(f.src, f.tgt, f.weight, {X: f.comps[X] + g.comps[X] for X in self.P.objects})

    def sub(self, f, g) -> NatTrans:
        self._parallel(f, g)
        return NatTrans(f.src, f.tgt, f.weight, {X: f.comps[X] - g.comps[X] for X in self.P.objects})

    def scale(self, c, f) -> NatTrans:
        return NatTrans(f.src, f.tgt, f.weight, {X: f.comps[X].scale(c) for X in self.P.objects})

    def push(self, f, dr) -> NatTrans:
        return NatTrans(f.src, f.tgt, f.weight + level(dr), {X: c.push(dr) for X, c in f.comps.items()})

    def is_zero(self, f) -> bool:
        return all(c.is_zero() for c in f.comps.values())

    def equal(self, f, g) -> bool:
        return self.is_zero(self.sub(f, g))

    def biproduct(self, F: PPresheaf, G: PPresheaf):
        """F ⊕ G with weight-0 inclusions and projections."""
        P = self.P
        vals, incF, incG, prF, prG = {}, {}, {}, {}, {}
        for X in P.objects:
            S, iF, iG, pF, pG = _sum_module(F(X), G(X))
            vals[X] = S
            incF[X], incG[X], prF[X], prG[X] = iF, iG, pF, pG
        acts = {}
        for (X, Y, i), a in F.actions.items():
            b = G.actions[(X, Y, i)]
            SX, SY = vals[X], vals[Y]
            ims = [None] * len(SY.gens)
            for k, im in enumerate(a.images):
                ims[SY.index("1:" + F(Y).names[k])] = incF[X].apply(im)
            for k, im in enumerate(b.images):
                ims[SY.index("2:" + G(Y).names[k])] = incG[X].apply(im)
            acts[(X, Y, i)] = PModMorphism(SY, SX, a.shift, ims, check=False)
        S = PPresheaf(P, vals, acts, "(%s+%s)" % (F.name, G.name))
        z = Fraction(0)
        return (S, NatTrans(F, S, z, incF), NatTrans(G, S, z, incG),
                NatTrans(S, F, z, prF), NatTrans(S, G, z, prG))

    # -- Yoneda ---------------------------------------------------------------
    def yoneda(self, A) -> PPresheaf:
        """Y(A) = Hom(-, A); cached so that Y(A) is a single object."""
        if A not in self._yoneda:
            self._yoneda[A] = yoneda(self.P, A)
        return self._yoneda[A]

    def yoneda_morphism(self, f: WMorphism) -> NatTrans:
        """Y(f) = f∘(-) for a level-form morphism f: A → B."""
        P = self.P
        A, B = f.src.base, f.tgt.base
        lev = f.level
        comps = {}
        for X in P.objects:
            mxa = P.hom(X, A)
            ims = [P.compose_vec(X, A, B, f.vec, mxa.basis_vector(k)) for k in range(len(mxa.gens))]
            comps[X] = PModMorphism(mxa, P.hom(X, B), lev, ims, check=False)
        return NatTrans(self.yoneda(A), self.yoneda(B), lev, comps)

    # -- Nat modules ------------------------------------------------------------
    def nat(self, F: PPresheaf, G: PPresheaf) -> "NatModule":
        key = (id(F), id(G))
        if key not in self._nat:
            self._nat[key] = NatModule(self, F, G)
        return self._nat[key]

    def stable_class(self, N: NatTrans) -> tuple:
        nm = self.nat(N.src, N.tgt)
        return nm.stable_class(N)


def _sum_module(M: FPModule, N: FPModule):
    f = M.field
    gens = [("1:" + n, b) for n, b in M.gens] + [("2:" + n, b) for n, b in N.gens]
    rels = []
    for w, v in M.rels:
        rels.append((w, {"1:" + M.names[k]: c for k, c in enumerate(v) if c}))
    for w, v in N.rels:
        rels.append((w, {"2:" + N.names[k]: c for k, c in enumerate(v) if c}))
    S = FPModule(f, gens, rels)
    iM = PModMorphism(M, S, 0, [S.vector({"1:" + n: 1}) for n in M.names], check=False)
    iN = PModMorphism(N, S, 0, [S.vector({"2:" + n: 1}) for n in N.names], check=False)
    pM, pN = [], []
    for n in S.names:
        tag, base = n[:2], n[2:]
        pM.append(M.vector({base: 1}) if tag == "1:" else M.zero())
        pN.append(N.vector({base: 1}) if tag == "2:" else N.zero())
    return S, iM, iN, PModMorphism(S, M, 0, pM, check=False), PModMorphism(S, N, 0, pN, check=False)


def yoneda(P: PCatPresentation, A) -> PPresheaf:
    vals = {X: P.hom(X, A) for X in P.objects}
    acts = {}
    for (X, Y), m in P.homs.items():
        mya = P.hom(Y, A)
        for i, (name, b) in enumerate(m.gens):
            ims = [P.compose_vec(X, Y, A, mya.basis_vector(k), m.basis_vector(i)) for k in range(len(mya.gens))]
            acts[(X, Y, i)] = PModMorphism(mya, vals[X], b, ims, check=False)
    return PPresheaf(P, vals, acts, "Y(%s)" % A)


class NatModule:
    """Nat(F, G) as a presented subquotient of ⊕_{X, i} S^{-b_i} G(X).

    Component (X, i) holds the image of the i-th generator of F(X).
    """

    def __init__(self, cat: PresheafCat, F: PPresheaf, G: PPresheaf):
        self.cat, self.F, self.G = cat, F, G
        P = cat.P
        fld = P.field
        self.blocks = []
        gens, rels = [], []
        for X in P.objects:
            FX, GX = F(X), G(X)
            for i, (fname, b) in enumerate(FX.gens):
                tag = "%s#%d#" % (X, i)
                self.blocks.append((X, i, tag))
                gens += [(tag + gn, gb - b) for gn, gb in GX.gens]
                for w, v in GX.rels:
                    rels.append((w - b, {tag + GX.names[k]: c for k, c in enumerate(v) if c}))
        self.ambient = FPModule(fld, gens, rels)
        amb = self.ambient
        self._block_index = {}
        for X, i, tag in self.blocks:
            GX = G(X)
            self._block_index[(X, i)] = [amb.index(tag + gn) for gn in GX.names]
        grid = set(amb.crit)
        for X in P.objects:
            cg = G(X).crit
            for w, _ in F(X).rels:
                grid |= {c - w for c in cg}
        for (X, Y), m in P.homs.items():
            cg = G(X).crit
            for u in m.births:
                for bj in F(Y).births:
                    grid |= {c - bj - u for c in cg}
        self.sq = present_subquotient(amb, sorted(grid), self._sub, None, prefix="n")
        self.module = self.sq.module

    def _component(self, vec, X, i):
        return tuple(vec[k] for k in self._block_index[(X, i)])

    def _sub(self, t):
        P = self.cat.P
        F, G, amb = self.F, self.G, self.ambient
        fld = P.field
        cols = [amb.lift(tuple(fld.one if j == k else fld.zero for j in range(amb.dim_at(t))), t)
                for k in range(amb.dim_at(t))]
        rows = []
        for X in P.objects:
            FX, GX = F(X), G(X)
            for w, v in FX.rels:
                lev = w + t
                col_vals = []
                for c in cols:
                    acc = GX.zero()
                    for i, vi in enumerate(v):
                        if vi:
                            acc = linalg.add(acc, linalg.scale(vi, self._component(c, X, i)))
                    col_vals.append(GX.normal_form(acc, lev))
                rows += [tuple(cv[k] for cv in col_vals) for k in range(GX.dim_at(lev))]
        for (X, Y), m in sorted(P.homs.items()):
            FX, FY, GX = F(X), F(Y), G(X)
            for gi, u in enumerate(m.births):
                Ff, Gf = F.actions[(X, Y, gi)], G.actions[(X, Y, gi)]
                for j, bj in enumerate(FY.births):
                    lev = bj + u + t
                    fv = Ff.images[j]
                    col_vals = []
                    for c in cols:
                        acc = GX.zero()
                        for i, vi in enumerate(fv):
                            if vi:
                                acc = linalg.add(acc, linalg.scale(vi, self._component(c, X, i)))
                        acc = linalg.sub(acc, Gf.apply(self._component(c, Y, j)))
                        col_vals.append(GX.normal_form(acc, lev))
                    rows += [tuple(cv[k] for cv in col_vals) for k in range(GX.dim_at(lev))]
        n = len(cols)
        if not rows:
            return [tuple(fld.one if j == k else fld.zero for j in range(n)) for k in range(n)]
        return linalg.nullspace(rows, n, fld)

    def to_nat(self, vec, t) -> NatTrans:
        """The natural transformation of an element of the module at level t."""
        P = self.cat.P
        t = level(t)
        amb_vec = self.ambient.zero()
        for c, v in zip(vec, self.sq.vectors):
            if c:
                amb_vec = linalg.add(amb_vec, linalg.scale(c, v))
        comps = {}
        for X in P.objects:
            FX = self.F(X)
            ims = [self._component(amb_vec, X, i) for i in range(len(FX.gens))]
            comps[X] = PModMorphism(FX, self.G(X), t, ims, check=False)
        return NatTrans(self.F, self.G, t, comps)

    def coords(self, N: NatTrans) -> tuple:
        """Free module vector of N (which must be natural)."""
        amb = self.ambient
        v = list(amb.zero())
        for X, i, tag in self.blocks:
            im = N.comps[X].images[i]
            for k, idx in enumerate(self._block_index[(X, i)]):
                v[idx] = im[k]
        return self.sq.coordinates(tuple(v), N.weight)

    def stable_class(self, N: NatTrans) -> tuple:
        m = self.module
        if not m.crit:
            return ()
        return m.normal_form(self.coords(N), max(N.weight, m.r_stab))

    @property
    def stable_dim(self) -> int:
        return self.module.stable_dim


# -- splittings --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplitObject:
    base: object
    idem: WIdem          # weighted idempotent in the presentation (level form)
    F: PPresheaf
    T: RetractTriple     # s: F → Y(A), rho: Y(A) → F

    @property
    def weight(self) -> Fraction:
        return self.T.weight

    def to_json(self):
        return {"base": str(self.base), "idempotent": self.idem.to_json(), "weight": fmt_level(self.weight)}


def split_by_kernel(cat: PresheafCat, e: WIdem, name: str = "K") -> RetractTriple:
    """Splitting of a weighted idempotent e on a presheaf through Ker(e − η_r)."""
    if not idem.is_weighted_idempotent(cat, e.e, e.r):
        raise ValueError("split_by_kernel needs a weighted idempotent")
    P = cat.P
    F = e.obj
    k = cat.sub(e.e, cat.unit(F, e.r))
    sqs = {X: kernel_subquotient(k.comps[X], prefix="k") for X in P.objects}
    K = _sub_presheaf(P, F, sqs, name)
    K.sub = sqs
    s = NatTrans(K, F, Fraction(0), {X: sqs[X].inclusion() for X in P.objects})
    rho = NatTrans(F, K, e.r, {X: factor_through(sqs[X], e.e.comps[X]) for X in P.objects})
    T = RetractTriple(K, s, rho, e.r)
    if not idem.check_splitting(cat, e, T):
        raise AssertionError("kernel splitting failed verification")
    return T


def split_by_image(cat: PresheafCat, e: WIdem, name: str = "I") -> RetractTriple:
    """Splitting through Im(e): inclusion and corestriction."""
    if not idem.is_weighted_idempotent(cat, e.e, e.r):
        raise ValueError("split_by_image needs a weighted idempotent")
    P = cat.P
    F = e.obj
    sqs = {X: image_subquotient(e.e.comps[X], prefix="m") for X in P.objects}
    I = _sub_presheaf(P, F, sqs, name)
    I.sub = sqs
    s = NatTrans(I, F, Fraction(0), {X: sqs[X].inclusion() for X in P.objects})
    rho = NatTrans(F, I, e.r, {X: factor_through(sqs[X], e.e.comps[X]) for X in P.objects})
    T = RetractTriple(I, s, rho, e.r)
    if not idem.check_splitting(cat, e, T):
        raise AssertionError("image splitting failed verification")
    return T


def factor_through_sub(cat: PresheafCat, T: RetractTriple, alpha: NatTrans) -> NatTrans:
    """β with T.s∘β = α, for a splitting built by split_by_kernel or split_by_image."""
    sqs = getattr(T.B, "sub", None)
    if sqs is None or alpha.tgt is not T.A:
        raise ValueError("splitting object is not a sub-presheaf of the target of alpha")
    beta = NatTrans(alpha.src, T.B, alpha.weight,
                    {X: factor_through(sqs[X], alpha.comps[X]) for X in cat.P.objects})
    if not cat.equal(cat.compose(T.s, beta), alpha):
        raise ValueError("alpha does not factor through the sub-presheaf")
    return beta


def _sub_presheaf(P, F, sqs, name):
    acts = {}
    for (X, Y, i), a in F.actions.items():
        g = a.compose(sqs[Y].inclusion())
        acts[(X, Y, i)] = factor_through(sqs[X], g)
    return PPresheaf(P, {X: sqs[X].module for X in P.objects}, acts, name)


def split_object(cat: PresheafCat, A, e: WMorphism, name=None) -> SplitObject:
    """Kernel splitting of a weighted idempotent e ∈ Hom(A, A)(r) of the presentation."""
    w = idem.weighted_idempotent(cat.P, e)
    Ye = cat.yoneda_morphism(e)
    T = split_by_kernel(cat, WIdem(cat.yoneda(A), Ye, w.r), name or "K(%s)" % A)
    return SplitObject(A, w, T.B, T)


def hom_split_objects(cat: PresheafCat, F: SplitObject, G: SplitObject) -> FPModule:
    return cat.nat(F.F, G.F).module


def transport(cat: PresheafCat, F: SplitObject, G: SplitObject, x: WMorphism) -> NatTrans:
    """r_G ∘ Y(x) ∘ s_F for x ∈ Hom(A, B)."""
    return cat.compose(G.T.rho, cat.compose(cat.yoneda_morphism(x), F.T.s))


def constant_structure(F: PPresheaf) -> bool:
    """Every structure map i_{r,s} of every F(X) is an isomorphism on [0, ∞)."""
    for X in F.P.objects:
        M = F(X)
        pts = sorted({Fraction(0)} | {t for t in M.grid_with_midpoints() if t >= 0})
        d0 = M.dim_at(0)
        for r, t in zip(pts, pts[1:]):
            if M.dim_at(t) != d0 or linalg.rank(M.structure_map(r, t), d0, F.P.field) != d0:
                return False
    return True


def is_weight_zero_split(F: SplitObject) -> bool:
    return F.weight == 0


# -- reports ----------------------------------------------------------------

def yoneda_report(P: PCatPresentation, cat: PresheafCat | None = None) -> Report:
    """Y is a presheaf, preserves η and structure maps, and is fully faithful."""
    cat = cat or PresheafCat(P)
    rep = Report("yoneda")
    F = P.field
    for A in P.objects:
        Y = cat.yoneda(A)
        sub = Y.validate()
        rep.add("presheaf[%s]" % A, sub.ok, failures=[c.name for c in sub.failures()])
        if A in P.identities:
            ok = cat.equal(cat.yoneda_morphism(P.identity(A)), cat.unit(Y, 0))
            rep.add("identity[%s]" % A, ok)
            for r in (Fraction(1), Fraction(5, 2)):
                ok = cat.equal(cat.yoneda_morphism(P.unit(A, r)), cat.unit(Y, r))
                rep.add("eta[%s,%s]" % (A, fmt_level(r)), ok)
    for A, B in product(P.objects, repeat=2):
        m = P.hom(A, B)
        for i, (name, b) in enumerate(m.gens):
            f = WMorphism(ShiftedObject(A), ShiftedObject(B), b, m.basis_vector(i))
            ok = cat.equal(cat.yoneda_morphism(P.push(f, 1)), cat.push(cat.yoneda_morphism(f), 1))
            rep.add("push[%s]" % name, ok)
        if not (A in P.identities):
            continue
        nm = cat.nat(cat.yoneda(A), cat.yoneda(B))
        bad = []
        pts = sorted(set(m.grid_with_midpoints()) | set(nm.module.grid_with_midpoints()))
        for t in pts:
            d = m.dim_at(t)
            if d != nm.module.dim_at(t):
                bad.append({"level": t, "hom": d, "nat": nm.module.dim_at(t)})
                continue
            rows = []
            for k in range(d):
                coords = tuple(F.one if j == k else F.zero for j in range(d))
                f = WMorphism(ShiftedObject(A), ShiftedObject(B), t, m.lift(coords, t))
                N = cat.yoneda_morphism(f)
                rows.append(nm.module.normal_form(nm.coords(N), t))
            if d and linalg.rank(rows, d, F) != d:
                bad.append({"level": t, "rank_deficient": True})
        rep.add("fully_faithful[%s,%s]" % (A, B), not bad, failures=bad[:5])
    return rep


def split_objects_for(P: PCatPresentation, cat: PresheafCat, bound=None, only_weight_zero=False):
    """Kernel-split objects for every stable idempotent of every object.

    Returns (objects, failures); objects are (A, ē, SplitObject).
    """
    objs, failures = [], []
    for A in P.objects:
        if P.floor(A)[0] is INF:
            continue
        ids, _ = idem.stable_idempotents(P, A)
        for k, eb in enumerate(ids):
            res = idem.min_representation_weight(P, A, eb, bound)
            if res.rep is None:
                failures.append({"object": A, "class": list(eb), "why": "no representative within bound"})
                continue
            if only_weight_zero and res.upper != 0:
                continue
            S = split_object(cat, A, res.rep.e, "K(%s,%d)" % (A, k))
            objs.append((A, tuple(eb), S))
    return objs, failures


def verify_ztilde(P: PCatPresentation, bound=None, cat: PresheafCat | None = None,
                  only_weight_zero=False, title="ztilde") -> Report:
    """Z̃ : Split(C_∞) → Split_P(C)_∞ is fully faithful and essentially surjective."""
    cat = cat or PresheafCat(P)
    rep = Report(title)
    val = P.validate()
    rep.add("presentation_valid", val.ok, failures=[dict(c.detail, check=c.name) for c in val.failures()])
    objs, failures = split_objects_for(P, cat, bound, only_weight_zero)
    rep.add("representations_found", not failures, failures=failures)
    for A, eb, S in objs:
        ok = P.projection(S.idem.e) == eb and idem.check_splitting(cat, WIdem(cat.yoneda(A), cat.yoneda_morphism(S.idem.e), S.idem.r), S.T)
        rep.add("essential_surjectivity[%s,%s]" % (A, _fmt(eb)), ok, weight=S.weight)
    for (A, ea, SA), (B, eb, SB) in product(objs, repeat=2):
        basis = idem.intertwiner_basis(P, A, B, ea, eb)
        nm = cat.nat(SA.F, SB.F)
        rows = []
        for x in basis:
            xr = P.stable_lift(A, B, x)
            rows.append(nm.stable_class(transport(cat, SA, SB, xr)))
        dn = nm.stable_dim
        rk = linalg.rank(rows, dn, P.field) if rows and dn else 0
        key = "[%s%s,%s%s]" % (A, _fmt(ea), B, _fmt(eb))
        rep.add("faithful" + key, rk == len(basis), split_dim=len(basis), rank=rk)
        rep.add("full" + key, rk == dn, split_dim=len(basis), nat_dim=dn)
    # functoriality on composable basis pairs
    bad = []
    for (A, ea, SA), (B, eb, SB), (C, ec, SC) in product(objs, repeat=3):
        if len(bad) > 5:
            break
        bx = idem.intertwiner_basis(P, A, B, ea, eb)[:1]
        by = idem.intertwiner_basis(P, B, C, eb, ec)[:1]
        for x, y in product(bx, by):
            xr, yr = P.stable_lift(A, B, x), P.stable_lift(B, C, y)
            zc = P.stable_compose(A, B, C, y, x)
            lhs = cat.compose(transport(cat, SB, SC, yr), transport(cat, SA, SB, xr))
            rhs = transport(cat, SA, SC, P.stable_lift(A, C, zc))
            if cat.stable_class(lhs) != cat.stable_class(rhs):
                bad.append([A, B, C])
    rep.add("functorial", not bad, failures=bad)
    rep.info = {"objects": len(objs)}
    return rep


def verify_weight_zero_theorem(P: PCatPresentation, bound=None) -> Report:
    """If every limit idempotent has a weight-0 representative, Z̃ restricts to Split^0."""
    rep = Report("weight_zero_theorem")
    witness = None
    for A in P.objects:
        if P.floor(A)[0] is INF:
            continue
        ids, _ = idem.stable_idempotents(P, A)
        for eb in ids:
            res = idem.min_representation_weight(P, A, eb, bound)
            if res.lower > 0 or res.upper != 0:
                witness = {"object": A, "class": list(eb), "min_weight": res.to_json()}
                break
        if witness:
            break
    rep.add("hypothesis", witness is None, witness=witness)
    if witness is not None:
        rep.info = {"status": "hypothesis_failure"}
        return rep
    cat = PresheafCat(P)
    sub = verify_ztilde(P, bound, cat, only_weight_zero=True, title="ztilde0")
    rep.extend(sub, "restricted.")
    objs, _ = split_objects_for(P, cat, bound, only_weight_zero=True)
    for (A, ea, SA), (B, eb, SB) in product(objs, repeat=2):
        d0 = _split_c0_dim(P, SA.idem.e, SB.idem.e)
        dn = cat.nat(SA.F, SB.F).module.dim_at(0)
        rep.add("zero_level[%s%s,%s%s]" % (A, _fmt(ea), B, _fmt(eb)), d0 == dn, split_c0=d0, nat0=dn)
    rep.info = {"status": "checked"}
    return rep


def _split_c0_dim(P, ea: WMorphism, eb: WMorphism) -> int:
    """dim eb·Hom_0(A,B)·ea for weight-0 idempotents."""
    A, B = ea.src.base, eb.src.base
    m = P.hom(A, B)
    d = m.dim_at(0)
    F = P.field
    rows = []
    for k in range(d):
        x = WMorphism(ShiftedObject(A), ShiftedObject(B), Fraction(0),
                      m.lift(tuple(F.one if j == k else F.zero for j in range(d)), 0))
        y = P.compose(eb, P.compose(x, ea))
        rows.append(m.normal_form(y.vec, 0))
    return linalg.rank(rows, d, F) if d else 0


def _fmt(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def split_uniqueness(cat: PresheafCat, A, e: WMorphism, name=None):
    """Kernel splitting, the pairs-style splitting (image of Y(e), s = inclusion,
    rho = corestriction) and the strong 2r-isomorphism comparing them."""
    w = idem.weighted_idempotent(cat.P, e)
    Ye = WIdem(cat.yoneda(A), cat.yoneda_morphism(e), w.r)
    label = name or str(A)
    T1 = split_by_kernel(cat, Ye, "K(%s)" % label)
    T2 = split_by_image(cat, Ye, "I(%s)" % label)
    return T1, T2, idem.splitting_comparison(cat, Ye, T1, T2)
