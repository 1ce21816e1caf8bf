"""The semi-category of pairs (A, e_A) and its comparison Γ with Split(W^{-1}C^S).

A pair carries a weighted idempotent e_A of weight r in semi-category form
(e∘e = ζ_r∘e, level form).  Its r-identity is e_A itself, and its
t-identity for t ≥ r is ζ_{t-r}∘e_A.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import idem, linalg
from .field import INF, fmt_level, level
from .idem import RetractTriple, WIdem
from .pcat import PCatPresentation, ShiftedObject, WMorphism
from .pmod import Subquotient, present_subquotient
from .reports import Report


@dataclass(frozen=True)
class PairObject:
    base: str
    e: WMorphism
    r: Fraction

    def __str__(self):
        return "(%s,%s)" % (self.base, ",".join(str(x) for x in self.e.vec) + "@" + fmt_level(self.r))

    def to_json(self):
        return {"base": self.base, "r": fmt_level(self.r), "e": self.e.to_json()}


@dataclass(frozen=True)
class PairMorphism:
    src: PairObject
    tgt: PairObject
    f: WMorphism

    @property
    def weight(self) -> Fraction:
        return self.f.weight

    def to_json(self):
        return {"src": str(self.src), "tgt": str(self.tgt), "f": self.f.to_json()}


def _level_form(P, e):
    return e if e.src.shift == 0 and e.tgt.shift == 0 else P.level_form(e)


def pair_object(P: PCatPresentation, A, e: WMorphism) -> PairObject:
    e = _level_form(P, e)
    if e.src.base != A or e.tgt.base != A:
        raise ValueError("idempotent must be an endomorphism of %s" % A)
    if not idem.is_weighted_idempotent(P, e):
        raise ValueError("not a weighted idempotent")
    fl = P.floor(A)[0]
    if fl is INF or fl > e.weight:
        raise ValueError("ζ_%s is not available on %s" % (fmt_level(e.weight), A))
    return PairObject(A, e, e.weight)


def yhat(P: PCatPresentation, A) -> PairObject:
    """Ŷ(A) = (A, ζ_⌊A⌋)."""
    fl = P.floor(A)[0]
    if fl is INF:
        raise ValueError("%s has no r-identity within R_max" % A)
    return pair_object(P, A, P.unit(A, fl))


def pair_floor(P: PCatPresentation, X: PairObject):
    """⌊(A, e_A)⌋ on the grid, with the r-identity found there.

    A weight-t pair endomorphism z is a t-identity when z∘e_A and e_A∘z both
    equal e_A pushed to level t + r; every morphism into or out of the pair
    factors through e_A up to ζ, so this is enough.  e_A itself qualifies at
    t = r, hence the result is at most r.
    """
    A = X.base
    m = P.hom(A, A)
    F = P.field
    e = X.e.vec
    for t in sorted({c for c in P.grid() if 0 <= c < X.r} | {X.r}):
        n = m.level_data(t).n
        lev = t + X.r
        zr = P.unit_vec(A, X.r)
        cols = []
        for k in range(n):
            z = m.basis_vector(k)
            c = (list(m.normal_form(linalg.sub(P.compose_vec(A, A, A, z, e), P.compose_vec(A, A, A, z, zr)), lev))
                 + list(m.normal_form(linalg.sub(P.compose_vec(A, A, A, e, z), P.compose_vec(A, A, A, zr, z)), lev))
                 + list(m.normal_form(P.compose_vec(A, A, A, z, e), lev))
                 + list(m.normal_form(P.compose_vec(A, A, A, e, z), lev)))
            cols.append(c)
        target = m.normal_form(e, lev)
        zeros = (F.zero,) * (2 * len(target))
        rhs = list(zeros) + list(target) + list(target)
        if n == 0:
            continue
        rows = [tuple(c[i] for c in cols) for i in range(len(rhs))]
        sol = linalg.solve(rows, rhs, n, F)
        if sol is not None:
            vec = tuple(sol) + (F.zero,) * (len(m.gens) - n)
            return t, WMorphism(ShiftedObject(A), ShiftedObject(A), t, vec)
    return INF, None


def is_pair_morphism(P: PCatPresentation, X: PairObject, Y: PairObject, f: WMorphism) -> bool:
    """f∘e_X = f∘ζ_r and e_Y∘f = ζ_s∘f."""
    f = _level_form(P, f)
    if f.src.base != X.base or f.tgt.base != Y.base:
        return False
    if not P.equal(P.compose(f, X.e), P.compose(f, P.unit(X.base, X.r))):
        return False
    return P.equal(P.compose(Y.e, f), P.compose(P.unit(Y.base, Y.r), f))


def pair_morphism(P, X, Y, f) -> PairMorphism:
    f = _level_form(P, f)
    if not is_pair_morphism(P, X, Y, f):
        raise ValueError("f does not intertwine the idempotents")
    return PairMorphism(X, Y, f)


class PairsCat:
    """Level-form ctx on pairs; t-identities ζ_{t-r}∘e for t ≥ r."""

    def __init__(self, P: PCatPresentation):
        self.P = P
        self.field = P.field

    def compose(self, g: PairMorphism, f: PairMorphism) -> PairMorphism:
        if f.tgt != g.src:
            raise ValueError("pair morphisms not composable")
        return PairMorphism(f.src, g.tgt, self.P.compose(g.f, f.f))

    def unit(self, X: PairObject, t) -> PairMorphism:
        t = level(t)
        if t < X.r:
            raise ValueError("pair %s has no %s-identity" % (X, fmt_level(t)))
        u = self.P.compose(self.P.unit(X.base, t - X.r), X.e)
        return PairMorphism(X, X, u)

    def zero(self, X, Y, w=0) -> PairMorphism:
        return PairMorphism(X, Y, WMorphism(ShiftedObject(X.base), ShiftedObject(Y.base), level(w),
                                            self.P.hom(X.base, Y.base).zero()))

    def add(self, f, g):
        return PairMorphism(f.src, f.tgt, self.P.add(f.f, g.f))

    def sub(self, f, g):
        return PairMorphism(f.src, f.tgt, self.P.sub(f.f, g.f))

    def scale(self, c, f):
        return PairMorphism(f.src, f.tgt, self.P.scale(c, f.f))

    def equal(self, f, g) -> bool:
        if f.src != g.src or f.tgt != g.tgt:
            raise ValueError("pair morphisms not parallel")
        return self.P.equal(f.f, g.f)


def pair_hom(P: PCatPresentation, X: PairObject, Y: PairObject) -> Subquotient:
    """Intertwiners X → Y modulo the identification by ζ on either side."""
    A, B = X.base, Y.base
    m = P.hom(A, B)
    F = P.field
    zx, zy = P.unit_vec(A, X.r), P.unit_vec(B, Y.r)

    def constraints(t, kill):
        n = m.dim_at(t)
        cols = []
        for k in range(n):
            x = m.lift(tuple(F.one if j == k else F.zero for j in range(n)), t)
            xz = P.compose_vec(A, A, B, x, zx)
            zx_ = P.compose_vec(A, B, B, zy, x)
            xe = P.compose_vec(A, A, B, x, X.e.vec)
            ex = P.compose_vec(A, B, B, Y.e.vec, x)
            c = (list(m.normal_form(linalg.sub(xe, xz), t + X.r))
                 + list(m.normal_form(linalg.sub(ex, zx_), t + Y.r)))
            if kill:
                c += list(m.normal_form(xz, t + X.r)) + list(m.normal_form(zx_, t + Y.r))
            cols.append(c)
        rows = [tuple(c[i] for c in cols) for i in range(len(cols[0]))] if cols else []
        return n, rows

    def solve(t, kill):
        n, rows = constraints(t, kill)
        if n == 0:
            return []
        if not rows:
            return [tuple(F.one if j == k else F.zero for j in range(n)) for k in range(n)]
        return linalg.nullspace(rows, n, F)

    def sub(t):
        return solve(t, False)

    def kill(t):
        return solve(t, True)

    grid = set(m.crit) | {c - X.r for c in m.crit} | {c - Y.r for c in m.crit}
    return present_subquotient(m, sorted(grid), sub, kill, prefix="p")


def canonical_weak_splitting(P: PCatPresentation, X: PairObject):
    """((A, ζ), s = e_A, rho = e_A): a splitting of the 2r-idempotent ζ_r∘e_A on Ŷ(A).

    Returns (ctx, idempotent on Ŷ(A), RetractTriple); raises if it does not verify.
    """
    ctx = PairsCat(P)
    Y = yhat(P, X.base)
    e_on_y = PairMorphism(Y, Y, X.e)
    s = pair_morphism(P, X, Y, X.e)
    rho = pair_morphism(P, Y, X, X.e)
    T = RetractTriple(X, s, rho, 2 * X.r)
    w = WIdem(Y, e_on_y, X.r)
    if Y.r > X.r or not idem.check_weak_splitting(ctx, w, T):
        raise ValueError("canonical weak splitting failed verification")
    return ctx, w, T


def gamma_object(P: PCatPresentation, X: PairObject):
    """Γ(A, e_A) = (A, [e_A]_∞)."""
    return X.base, P.projection(X.e)


@dataclass(frozen=True)
class PairRoof:
    """A ζ-form roof X <-ζ_t- S^t X -f-> Y; f is an element of Hom(A, B) at level t."""
    src: PairObject
    tgt: PairObject
    f: WMorphism


def gamma_hom(P: PCatPresentation, R: PairRoof) -> tuple:
    """Γ of a ζ-form roof: [f]_∞, verified to intertwine the limit idempotents."""
    A, B = R.src.base, R.tgt.base
    x = P.projection(R.f)
    ea, eb = P.projection(R.src.e), P.projection(R.tgt.e)
    y = P.stable_compose(A, B, B, eb, P.stable_compose(A, A, B, x, ea))
    if tuple(y) != tuple(x):
        raise ValueError("roof image does not intertwine the idempotents")
    return x


def compose_pair_roofs(P: PCatPresentation, R2: PairRoof, R1: PairRoof) -> PairRoof:
    return PairRoof(R1.src, R2.tgt, P.compose(R2.f, R1.f))


def discovered_pairs(P: PCatPresentation, bound=None):
    """Pairs for every stable idempotent of every object, plus search failures."""
    out, failures = [], []
    for A in P.objects:
        if P.floor(A)[0] is INF:
            continue
        ids, _ = idem.stable_idempotents(P, A)
        for eb in ids:
            res = idem.min_representation_weight(P, A, eb, bound)
            if res.rep is None:
                failures.append({"object": A, "class": list(eb)})
                continue
            e = res.rep.e
            fl = P.floor(A)[0]
            if e.weight < fl:
                e = P.compose(P.unit(A, fl), e)
            out.append((tuple(eb), pair_object(P, A, e)))
    return out, failures


def verify_gamma_equivalence(P: PCatPresentation, bound=None) -> Report:
    """Γ is well defined, essentially surjective, full and faithful on the discovered pairs."""
    rep = Report("gamma")
    F = P.field
    _validity(P, rep)
    pairs, failures = discovered_pairs(P, bound)
    rep.add("essential_surjectivity", not failures, failures=failures, objects=len(pairs))
    for eb, X in pairs:
        A, g = gamma_object(P, X)
        rep.add("well_defined[%s]" % X, tuple(g) == eb and idem.is_stable_idempotent(P, A, g))
    homs = {}
    for (ea, X), (eb, Y) in product(pairs, repeat=2):
        key = "[%s,%s]" % (X, Y)
        sq = pair_hom(P, X, Y)
        homs[(X, Y)] = sq
        mod = sq.module
        d1 = mod.stable_dim
        target = idem.intertwiner_basis(P, X.base, Y.base, ea, eb)
        d2 = len(target)
        m = P.hom(X.base, Y.base)
        rows, bad = [], []
        rs = max(mod.r_stab, Fraction(0))
        for k in range(d1):
            coords = tuple(F.one if j == k else F.zero for j in range(d1))
            vec = mod.lift(coords, rs)
            amb = m.zero()
            for c, v in zip(vec, sq.vectors):
                if c:
                    amb = linalg.add(amb, linalg.scale(c, v))
            f = WMorphism(ShiftedObject(X.base), ShiftedObject(Y.base), rs, amb)
            try:
                rows.append(gamma_hom(P, PairRoof(X, Y, f)))
            except ValueError:
                bad.append(k)
        dstab = m.stable_dim
        rk = linalg.rank(rows, dstab, F) if rows and dstab else 0
        rep.add("intertwines" + key, not bad, failures=bad)
        rep.add("faithful" + key, rk == d1, pair_dim=d1, rank=rk)
        rep.add("full" + key, rk == d2, intertwiner_dim=d2, rank=rk)
    # composition on generator-level roofs
    bad = []
    for (_, X), (_, Y), (_, Z) in product(pairs, repeat=3):
        if len(bad) > 5:
            break
        fx = _first_generator(P, homs[(X, Y)], X, Y)
        gy = _first_generator(P, homs[(Y, Z)], Y, Z)
        if fx is None or gy is None:
            continue
        R1, R2 = PairRoof(X, Y, fx), PairRoof(Y, Z, gy)
        lhs = gamma_hom(P, compose_pair_roofs(P, R2, R1))
        rhs = P.stable_compose(X.base, Y.base, Z.base, gamma_hom(P, R2), gamma_hom(P, R1))
        if tuple(lhs) != tuple(rhs):
            bad.append([str(X), str(Y), str(Z)])
    rep.add("functorial", not bad, failures=bad)
    rep.info = {"pairs": len(pairs)}
    return rep


def _validity(P: PCatPresentation, rep: Report):
    """The equivalence is only meaningful for a valid presentation; record its violations."""
    val = P.validate()
    rep.add("presentation_valid", val.ok, failures=[dict(c.detail, check=c.name) for c in val.failures()])


def _first_generator(P, sq, X, Y):
    mod = sq.module
    if not mod.gens:
        return None
    b = mod.births[0]
    return WMorphism(ShiftedObject(X.base), ShiftedObject(Y.base), b, sq.vectors[0])
