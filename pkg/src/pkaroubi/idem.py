"""Weighted idempotents, retracts, splittings and strong weighted isomorphisms.

Everything here works in *level form*: a morphism is an element of
Hom(A, B) at some level, carried as an object with ``src``, ``tgt`` and
``weight`` attributes.  The ambient ``ctx`` supplies ``compose``, ``unit``
(η_r or ζ_r as a weight-r endomorphism), ``add``, ``sub``, ``scale``,
``zero`` and ``equal``.  A :class:`~pkaroubi.pcat.PCatPresentation` is such a
ctx, as are the presheaf and chain-homotopy categories.

In level form e: A → S^{-r}A is a weight-r endomorphism and the idempotent
equation reads e∘e = η_r∘e.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from . import linalg
from .field import INF, ModP, fmt_level, level
from .pcat import PCatPresentation, ShiftedObject, WMorphism


@dataclass(frozen=True)
class WIdem:
    obj: object
    e: object
    r: Fraction

    def to_json(self):
        return {"object": str(self.obj), "r": fmt_level(self.r), "e": _json(self.e)}


@dataclass(frozen=True)
class RetractTriple:
    """B with s: B → A and rho: A → B; rho∘s = η on B at ``weight``."""
    B: object
    s: object
    rho: object
    weight: Fraction

    @property
    def A(self):
        return self.s.tgt

    def to_json(self):
        return {"B": str(self.B), "weight": fmt_level(self.weight), "s": _json(self.s), "r": _json(self.rho)}


@dataclass(frozen=True)
class StrongIsoWitness:
    """g∘f = η_r on the source and f∘g = η_r on the target, r = weight(f) + weight(g)."""
    f: object
    g: object
    r: Fraction

    def to_json(self):
        return {"f": _json(self.f), "g": _json(self.g), "r": fmt_level(self.r)}


def _json(m):
    return m.to_json() if hasattr(m, "to_json") else str(m)


def _is_endo(m) -> bool:
    return m.src == m.tgt


# -- idempotents ---------------------------------------------------------------

def is_weighted_idempotent(ctx, e, r=None) -> bool:
    r = e.weight if r is None else level(r)
    if not _is_endo(e) or e.weight != r:
        raise ValueError("an r-idempotent is an endomorphism of weight r")
    return ctx.equal(ctx.compose(e, e), ctx.compose(ctx.unit(e.src, r), e))


def weighted_idempotent(ctx, e, r=None) -> WIdem:
    if not is_weighted_idempotent(ctx, e, r):
        raise ValueError("not a weighted idempotent")
    return WIdem(e.src, e, e.weight)


def complement(ctx, idem: WIdem) -> WIdem:
    """η_r − e, verified."""
    if not is_weighted_idempotent(ctx, idem.e, idem.r):
        raise ValueError("complement needs a weighted idempotent")
    c = ctx.sub(ctx.unit(idem.obj, idem.r), idem.e)
    return weighted_idempotent(ctx, c, idem.r)


def pad(ctx, idem: WIdem, t) -> WIdem:
    """η_t∘e, an (r+t)-idempotent."""
    t = level(t)
    return weighted_idempotent(ctx, ctx.compose(ctx.unit(idem.obj, t), idem.e))


# -- retracts and splittings ---------------------------------------------------

def is_retract(ctx, T: RetractTriple) -> bool:
    if T.s.src != T.B or T.rho.tgt != T.B or T.rho.src != T.s.tgt:
        raise ValueError("retract triple endpoints do not match")
    if T.s.weight + T.rho.weight != T.weight:
        return False
    return ctx.equal(ctx.compose(T.rho, T.s), ctx.unit(T.B, T.weight))


def check_splitting(ctx, idem: WIdem, T: RetractTriple) -> bool:
    """rho∘s = η_r on B and s∘rho = e."""
    if T.weight != idem.r or T.A != idem.obj:
        return False
    if not is_retract(ctx, T):
        return False
    return ctx.equal(ctx.compose(T.s, T.rho), idem.e)


def check_weak_splitting(ctx, idem: WIdem, T: RetractTriple) -> bool:
    """T splits the 2r-idempotent η_r∘e."""
    target = ctx.compose(ctx.unit(idem.obj, idem.r), idem.e)
    return check_splitting(ctx, WIdem(idem.obj, target, 2 * idem.r), T)


def induced_idempotent(ctx, T: RetractTriple) -> WIdem:
    """s∘rho of a weighted retract, verified idempotent."""
    if not is_retract(ctx, T):
        raise ValueError("not a weighted retract")
    return weighted_idempotent(ctx, ctx.compose(T.s, T.rho))


def trivial_retract(ctx, A, r=0) -> RetractTriple:
    """A as an r-retract of itself: s = identity, rho = η_r."""
    r = level(r)
    return RetractTriple(A, ctx.unit(A, 0), ctx.unit(A, r), r)


def retract_compose(ctx, outer: RetractTriple, inner: RetractTriple) -> RetractTriple:
    """From B <_r A and C <_s B, the retract C <_{r+s} A."""
    if inner.s.tgt != outer.B:
        raise ValueError("inner retract is not onto the outer retract object")
    T = RetractTriple(inner.B, ctx.compose(outer.s, inner.s), ctx.compose(inner.rho, outer.rho),
                      outer.weight + inner.weight)
    if not is_retract(ctx, T):
        raise ValueError("composite retract failed verification")
    return T


# -- strong weighted isomorphisms ----------------------------------------------

def verify_strong_iso(ctx, w: StrongIsoWitness) -> bool:
    f, g = w.f, w.g
    if g.src != f.tgt or g.tgt != f.src or f.weight + g.weight != w.r:
        return False
    return (ctx.equal(ctx.compose(g, f), ctx.unit(f.src, w.r))
            and ctx.equal(ctx.compose(f, g), ctx.unit(f.tgt, w.r)))


def compose_strong_iso(ctx, w2: StrongIsoWitness, w1: StrongIsoWitness) -> StrongIsoWitness:
    out = StrongIsoWitness(ctx.compose(w2.f, w1.f), ctx.compose(w1.g, w2.g), w1.r + w2.r)
    if not verify_strong_iso(ctx, out):
        raise ValueError("composite strong isomorphism failed verification")
    return out


def retract_strong_iso(ctx, T: RetractTriple) -> StrongIsoWitness | None:
    """When s∘rho = η as well, (s, rho) is a strong isomorphism B ≃ A."""
    if not is_retract(ctx, T):
        return None
    if not ctx.equal(ctx.compose(T.s, T.rho), ctx.unit(T.A, T.weight)):
        return None
    return StrongIsoWitness(T.s, T.rho, T.weight)


def splitting_comparison(ctx, idem: WIdem, T1: RetractTriple, T2: RetractTriple) -> StrongIsoWitness:
    """α = rho2∘s1 : B1 → B2 and β = rho1∘s2, a strong 2r-isomorphism."""
    for T in (T1, T2):
        if not check_splitting(ctx, idem, T):
            raise ValueError("comparison needs two verified splittings of the same idempotent")
    alpha = ctx.compose(T2.rho, T1.s)
    beta = ctx.compose(T1.rho, T2.s)
    w = StrongIsoWitness(alpha, beta, 2 * idem.r)
    if not verify_strong_iso(ctx, w):
        raise ValueError("splitting comparison failed verification")
    return w


def sum_split_witness(ctx, idem: WIdem, TB: RetractTriple, TC: RetractTriple):
    """g = (s_B, s_C): B⊕C → A is a strong 2r-isomorphism with inverse η_r∘f, f = (r_B; r_C).

    Needs ``ctx.biproduct(B, C)`` returning (S, inB, inC, prB, prC).  Returns
    the witness and f.
    """
    comp = complement(ctx, idem)
    if not check_splitting(ctx, idem, TB) or not check_splitting(ctx, comp, TC):
        raise ValueError("both e and η_r − e must be split")
    S, inB, inC, prB, prC = ctx.biproduct(TB.B, TC.B)
    f = ctx.add(ctx.compose(inB, TB.rho), ctx.compose(inC, TC.rho))
    g = ctx.add(ctx.compose(TB.s, prB), ctx.compose(TC.s, prC))
    if not ctx.equal(ctx.compose(g, f), ctx.unit(idem.obj, idem.r)):
        raise ValueError("S^{-r}g∘f != η_r")
    inv = ctx.compose(ctx.unit(S, idem.r), f)
    w = StrongIsoWitness(g, inv, 2 * idem.r)
    if not verify_strong_iso(ctx, w):
        raise ValueError("sum splitting witness failed verification")
    return w, f


def r_equivalent(ctx, f, g, r) -> bool:
    """(f − g)∘η_r = 0."""
    u = ctx.unit(f.src, level(r))
    return ctx.equal(ctx.compose(f, u), ctx.compose(g, u))


def retraction_cancels(ctx, T: RetractTriple, f, g):
    """(f∘rho = g∘rho, f ≃_r g) for f, g out of B; the first implies the second."""
    same = ctx.equal(ctx.compose(f, T.rho), ctx.compose(g, T.rho))
    return same, r_equivalent(ctx, f, g, T.weight)


def section_cancels(ctx, T: RetractTriple, f, g):
    """(s∘f = s∘g, f ≃_r g) for f, g into B."""
    same = ctx.equal(ctx.compose(T.s, f), ctx.compose(T.s, g))
    u = ctx.unit(T.B, T.weight)
    return same, ctx.equal(ctx.compose(u, f), ctx.compose(u, g))


# -- (co)equalizers ------------------------------------------------------------

def split_from_equalizer(ctx, idem: WIdem, s, factor) -> RetractTriple:
    """Split e from an equalizer s: B → A of e and η_r.

    ``factor(alpha)`` must return the unique β with s∘β = α for every α
    equalized by e and η_r; the retraction is factor(e).
    """
    u = ctx.unit(idem.obj, idem.r)
    if not ctx.equal(ctx.compose(idem.e, s), ctx.compose(u, s)):
        raise ValueError("s does not equalize e and η_r")
    i = factor(idem.e)
    if not ctx.equal(ctx.compose(s, i), idem.e):
        raise ValueError("factor(e) is not a factorization of e through s")
    T = RetractTriple(s.src, s, i, idem.r)
    if not check_splitting(ctx, idem, T):
        raise ValueError("equalizer construction did not split e")
    return T


def split_from_coequalizer(ctx, idem: WIdem, t, factor) -> RetractTriple:
    """Split e from a coequalizer t: A → C of e and η_r.

    ``factor(alpha)`` must return the unique u with u∘t = α for every α
    coequalized by e and η_r; the section is factor(e).
    """
    u = ctx.unit(idem.obj, idem.r)
    if not ctx.equal(ctx.compose(t, idem.e), ctx.compose(t, u)):
        raise ValueError("t does not coequalize e and η_r")
    sec = factor(idem.e)
    if not ctx.equal(ctx.compose(sec, t), idem.e):
        raise ValueError("factor(e) is not a factorization of e through t")
    T = RetractTriple(t.tgt, sec, t, idem.r)
    if not check_splitting(ctx, idem, T):
        raise ValueError("coequalizer construction did not split e")
    return T


# -- stable idempotents of a presentation --------------------------------------

def stable_mul(P: PCatPresentation, a, y, x) -> tuple:
    """y·x = y∘x in End(a)_∞ (stable coordinates)."""
    return P.stable_compose(a, a, a, y, x)


def is_stable_idempotent(P: PCatPresentation, a, x) -> bool:
    return tuple(stable_mul(P, a, x, x)) == tuple(x)


def intertwiner_basis(P: PCatPresentation, a, b, ea, eb) -> list:
    """Basis of {x ∈ Hom(a,b)_∞ : eb·x·ea = x} in stable coordinates."""
    m = P.hom(a, b)
    d = m.stable_dim
    F = P.field
    span = linalg.Span(d, F)
    out = []
    # x -> eb x ea is idempotent, so its image is the fixed subspace
    for k in range(d):
        x = tuple(F.one if j == k else F.zero for j in range(d))
        y = P.stable_compose(a, b, b, eb, P.stable_compose(a, a, b, x, ea))
        if span.add(y):
            out.append(tuple(y))
    return out


def stable_idempotents(P: PCatPresentation, a, cap: int = 4096):
    """Idempotents of End(a)_∞ and a completeness flag.

    Over F_p the algebra is enumerated when it has at most ``cap`` elements.
    Otherwise idempotents come from factoring minimal polynomials of basis
    elements and pairwise sums, then splitting with the Chinese remainder
    theorem; that route may miss idempotents.
    """
    m = P.hom(a, a)
    d = m.stable_dim
    F = P.field
    zero = tuple(F.zero for _ in range(d))
    if d == 0:
        return [zero], True
    if F.is_prime and F.p ** d <= cap:
        out = []
        for coords in product(F.elements(), repeat=d):
            if is_stable_idempotent(P, a, coords):
                out.append(tuple(coords))
        return sorted(out, key=_coord_key), True
    found = {zero}
    one = P.stable_identity(a)
    found.add(tuple(one))
    basis = [tuple(F.one if i == j else F.zero for j in range(d)) for i in range(d)]
    probes = basis + [linalg.add(x, y) for x, y in combinations(basis, 2)]
    for x in probes:
        for e in _crt_idempotents(P, a, x, one):
            found.add(e)
    # close under complement
    more = True
    while more and len(found) < 64:
        more = False
        for e in list(found):
            c = linalg.sub(one, e)
            if c not in found:
                found.add(c)
                more = True
    return sorted(found, key=_coord_key), False


def _coord_key(v):
    return tuple(x.v if isinstance(x, ModP) else x for x in v)


def _powers(P, a, x, one, n):
    out = [tuple(one)]
    for _ in range(n):
        out.append(tuple(stable_mul(P, a, x, out[-1])))
    return out


def _minpoly(P, a, x, one):
    """Coefficients c_0..c_k (monic) of the minimal polynomial of x."""
    F = P.field
    d = len(one)
    pw = _powers(P, a, x, one, d + 1)
    span = linalg.Span(d, F)
    for k, v in enumerate(pw):
        if not span.add(v):
            c = span.coordinates(v)
            return [-ci for ci in c] + [F.one], pw[:k]
    raise AssertionError("powers of a finite-dimensional element must become dependent")


def _crt_idempotents(P, a, x, one):
    import sympy

    F = P.field
    coeffs, pw = _minpoly(P, a, x, one)
    X = sympy.Symbol("X")
    if F.is_prime:
        poly = sympy.Poly([int(c) for c in reversed(coeffs)], X, modulus=F.p)
        _, factors = sympy.factor_list(poly.as_expr(), X, modulus=F.p)
        dom = {"modulus": F.p}
    else:
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], X)
        _, factors = sympy.factor_list(poly.as_expr(), X)
        dom = {"domain": "QQ"}
    parts = [sympy.Poly(f ** k, X, **dom) for f, k in factors]
    if len(parts) < 2:
        return []
    out = []
    total = sympy.Poly(1, X, **dom)
    for p_ in parts:
        total = total * p_
    for mask in range(1, 2 ** len(parts) - 1):
        ps = sympy.Poly(1, X, **dom)
        for i, p_ in enumerate(parts):
            if mask >> i & 1:
                ps = ps * p_
        rest = sympy.Poly(sympy.div(total, ps)[0], X, **dom)
        s_, t_, h = sympy.gcdex(ps, rest)
        # t·rest ≡ 1 mod ps and ≡ 0 mod rest
        q = sympy.Poly(t_ * rest, X, **dom).rem(total)
        e = _eval_poly(P, a, q, pw, x, one)
        if is_stable_idempotent(P, a, e):
            out.append(e)
    return out


def _eval_poly(P, a, q, pw, x, one):
    import sympy

    F = P.field
    d = len(one)
    cs = list(reversed(q.all_coeffs()))
    powers = _powers(P, a, x, one, max(len(cs) - 1, 0))
    acc = tuple(F.zero for _ in range(d))
    for c, v in zip(cs, powers):
        c = sympy.Rational(c)
        cf = F(int(c.p) % F.p) if F.is_prime else F(Fraction(int(c.p), int(c.q)))
        acc = linalg.add(acc, linalg.scale(cf, v))
    return acc


# -- minimal representation weight ---------------------------------------------

@dataclass(frozen=True)
class MinWeightResult:
    lower: Fraction
    upper: object           # Fraction or INF
    rep: WIdem | None
    exact: bool
    note: str = ""

    def to_json(self):
        return {"lower": fmt_level(self.lower), "upper": fmt_level(self.upper),
                "exact": self.exact, "note": self.note,
                "rep": self.rep.to_json() if self.rep is not None else None}


def refined_grid(P: PCatPresentation, a, bound) -> list:
    """Critical values of End(a) and their halves, from 0 up to ``bound``."""
    m = P.hom(a, a)
    pts = {Fraction(0)}
    for c in m.crit:
        pts.add(c)
        pts.add(c / 2)
    fl = P.floor(a)[0]
    if fl is INF:
        return []
    pts.add(fl)
    # below ⌊a⌋ there is no ζ_t to state the idempotent equation
    return sorted(t for t in pts if fl <= t <= bound)


def _preimage(P, a, t, ebar):
    """Affine preimage {x ∈ End(a)(t) : [x]_∞ = ebar} as (particular, directions) or None."""
    m = P.hom(a, a)
    F = P.field
    n = m.dim_at(t)
    rs = max(m.r_stab, t)
    cols = [m.normal_form(m.lift(tuple(F.one if i == j else F.zero for j in range(n)), t), rs)
            for i in range(n)]
    d = len(ebar)
    rows = [tuple(c[k] for c in cols) for k in range(d)]
    if n == 0:
        return ((), []) if not any(ebar) else None
    sol = linalg.solve(rows, list(ebar), n, F)
    if sol is None:
        return None
    return tuple(sol), linalg.nullspace(rows, n, F)


def _as_idem(P, a, t, coords):
    m = P.hom(a, a)
    e = WMorphism(ShiftedObject(a), ShiftedObject(a), t, m.lift(coords, t))
    return e if is_weighted_idempotent(P, e, t) else None


def min_representation_weight(P: PCatPresentation, a, ebar, bound=None, cap: int = 4096) -> MinWeightResult:
    """Least weight of a weighted idempotent in C_0 whose limit class is ``ebar``.

    The search runs over the refined grid (critical values and their halves),
    on which both the preimage and the idempotent condition are constant
    between consecutive points.
    """
    ebar = tuple(P.field(x) for x in ebar)
    if not is_stable_idempotent(P, a, ebar):
        raise ValueError("class is not idempotent in the limit category")
    F = P.field
    m = P.hom(a, a)
    bound = P.rmax if bound is None else level(bound)
    rho = max(m.r_stab, Fraction(0))
    grid = refined_grid(P, a, max(bound, rho))
    lower = None
    exact = True
    notes = []
    for t in grid:
        pre = _preimage(P, a, t, ebar)
        if pre is None:
            continue
        part, dirs = pre
        found = None
        if F.is_prime and F.p ** len(dirs) <= cap:
            for cs in product(F.elements(), repeat=len(dirs)):
                x = part
                for c, v in zip(cs, dirs):
                    if c:
                        x = linalg.add(x, linalg.scale(c, v))
                found = _as_idem(P, a, t, x)
                if found is not None:
                    break
            if found is None:
                continue
        else:
            for x in _candidates(P, a, t, part, dirs, ebar, rho):
                found = _as_idem(P, a, t, x)
                if found is not None:
                    break
            if found is None:
                if dirs:
                    if lower is None:
                        lower = t
                    exact = False
                    notes.append("unresolved preimage at %s" % fmt_level(t))
                continue
        if lower is None:
            lower = t
        return MinWeightResult(lower, t, WIdem(found.src, found, t), exact and lower == t, "; ".join(notes))
    if lower is None:
        lower = grid[-1] if grid else Fraction(0)
    return MinWeightResult(lower, INF, None, False, "no representative up to %s" % fmt_level(bound))


def _candidates(P, a, t, part, dirs, ebar, rho):
    m = P.hom(a, a)
    F = P.field
    yield part
    if t >= rho:
        lift = m.lift(ebar, rho)
        yield m.normal_form(lift, t)
    fl, zv = P.floor(a)
    if fl is not INF and fl <= t:
        yield m.normal_form(zv, t)
    small = [F(-1), F(0), F(1)]
    if len(dirs) <= 5:
        for cs in product(small, repeat=len(dirs)):
            x = part
            for c, v in zip(cs, dirs):
                if c:
                    x = linalg.add(x, linalg.scale(c, v))
            yield x
