"""ζ r-identities, weighted isomorphisms and the roof localization.

All morphisms handled here live in the flattened category: weight-0
:class:`~pkaroubi.pcat.WMorphism` values between shifted objects.  A roof
``A <-w- X -f-> B`` carries a :class:`WIsoWitness` for its left leg.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import linalg
from .field import INF, fmt_level, level
from .pcat import PCatPresentation, ShiftedObject, WMorphism, as_object
from .reports import Report


def floor_weight(P: PCatPresentation, a):
    """⌊A⌋: least grid weight carrying an r-identity (INF if none up to R_max)."""
    return P.floor(as_object(a).base)[0]


def zeta(P: PCatPresentation, x, r) -> WMorphism:
    """ζ_r : X → S^{-r}X."""
    return P.zeta(as_object(x), r)


def _flat(P, f):
    return f if f.weight == 0 else P.flatten(f)


@dataclass(frozen=True)
class WIsoWitness:
    f: WMorphism
    g: WMorphism
    r: Fraction

    def to_json(self):
        return {"f": self.f.to_json(), "g": self.g.to_json(), "r": fmt_level(self.r)}


def is_weighted_iso(P: PCatPresentation, f: WMorphism, r) -> WIsoWitness | None:
    """Solve g∘f = ζ_r and f∘S^r g = ζ_r for g; None when infeasible."""
    f = _flat(P, f)
    r = level(r)
    A, B = f.src, f.tgt
    fa, fb = P.floor(A.base)[0], P.floor(B.base)[0]
    if fa is INF or fb is INF or r < fa or r < fb:
        raise ValueError("ζ_%s not available on both endpoints" % fmt_level(r))
    hba = P.hom(B.base, A.base)
    haa, hbb = P.hom(A.base, A.base), P.hom(B.base, B.base)
    mu = B.shift - A.shift + r          # level of g
    n = hba.level_data(mu).n
    za, zb = P.unit_vec(A.base, r), P.unit_vec(B.base, r)
    rhs = list(haa.normal_form(za, r)) + list(hbb.normal_form(zb, r))
    cols = []
    for k in range(n):
        gk = hba.basis_vector(k)
        c1 = haa.normal_form(P.compose_vec(A.base, B.base, A.base, gk, f.vec), r)
        c2 = hbb.normal_form(P.compose_vec(B.base, A.base, B.base, f.vec, gk), r)
        cols.append(tuple(c1) + tuple(c2))
    if n == 0:
        if any(rhs):
            return None
        sol = ()
    else:
        rows = [tuple(c[i] for c in cols) for i in range(len(rhs))]
        sol = linalg.solve(rows, rhs, n, P.field)
        if sol is None:
            return None
    gvec = tuple(sol) + (P.field.zero,) * (len(hba.gens) - n)
    g = WMorphism(B, A.S(-r), Fraction(0), gvec)
    return WIsoWitness(f, g, r)


def find_weighted_iso(P: PCatPresentation, f: WMorphism, bound=None) -> WIsoWitness | None:
    """Least grid weight r ≤ bound at which f is a weighted isomorphism."""
    f = _flat(P, f)
    lo = max(P.floor(f.src.base)[0], P.floor(f.tgt.base)[0])
    if lo is INF:
        return None
    bound = P.rmax if bound is None else level(bound)
    for r in P.grid():
        if r < lo or r > bound:
            continue
        w = is_weighted_iso(P, f, r)
        if w is not None:
            return w
    return None


def verify_witness(P: PCatPresentation, w: WIsoWitness) -> bool:
    f, g, r = w.f, w.g, w.r
    if g.src != f.tgt or g.tgt != f.src.S(-r):
        return False
    left = P.compose(g, f)
    if not P.equal(left, P.zeta(f.src, r)):
        return False
    right = P.compose(f, P.shift_morphism(g, r))
    return P.equal(right, P.zeta(f.tgt.S(r), r))


def zeta_witness(P: PCatPresentation, x, t) -> WIsoWitness:
    """ζ_t : X → S^{-t}X is a weighted isomorphism of weight t + ⌊X⌋ with inverse ζ_⌊X⌋."""
    x = as_object(x)
    t = level(t)
    fl = P.floor(x.base)[0]
    f = P.zeta(x, t)
    g = P.zeta(x.S(-t), fl)
    return WIsoWitness(f, g, t + fl)


def identity_witness(P: PCatPresentation, x) -> WIsoWitness:
    x = as_object(x)
    i = P.identity(x)
    return WIsoWitness(i, i, Fraction(0))


def compose_witness(P: PCatPresentation, w2: WIsoWitness, w1: WIsoWitness) -> WIsoWitness:
    """Witness for w2.f ∘ w1.f with inverse S^{-r2} g1 ∘ g2 and weight r1 + r2."""
    f = P.compose(w2.f, w1.f)
    g = P.compose(P.shift_morphism(w1.g, -w2.r), w2.g)
    return WIsoWitness(f, g, w1.r + w2.r)


def shift_witness(P: PCatPresentation, w: WIsoWitness, a) -> WIsoWitness:
    return WIsoWitness(P.shift_morphism(w.f, a), P.shift_morphism(w.g, a), w.r)


# -- roofs --------------------------------------------------------------------

@dataclass(frozen=True)
class Roof:
    left: WMorphism
    right: WMorphism
    witness: WIsoWitness

    @property
    def apex(self) -> ShiftedObject:
        return self.left.src

    @property
    def source(self) -> ShiftedObject:
        return self.left.tgt

    @property
    def target(self) -> ShiftedObject:
        return self.right.tgt

    def to_json(self):
        return {"apex": str(self.apex), "left": self.left.to_json(), "right": self.right.to_json(),
                "witness_weight": fmt_level(self.witness.r)}


def make_roof(P: PCatPresentation, left: WMorphism, right: WMorphism, witness: WIsoWitness | None = None) -> Roof:
    left, right = _flat(P, left), _flat(P, right)
    if left.src != right.src:
        raise ValueError("roof legs must share the apex")
    if witness is None:
        witness = find_weighted_iso(P, left)
        if witness is None:
            raise ValueError("left leg is not a weighted isomorphism within R_max")
    elif witness.f != left or not verify_witness(P, witness):
        raise ValueError("witness does not certify the left leg")
    return Roof(left, right, witness)


def identity_roof(P: PCatPresentation, a, t=None) -> Roof:
    """A <-ζ_t- S^t A -ζ_t-> A, t defaulting to ⌊A⌋."""
    a = as_object(a)
    t = P.floor(a.base)[0] if t is None else level(t)
    z = P.zeta(a.S(t), t)
    return Roof(z, z, zeta_witness(P, a.S(t), t))


def roof_from_morphism(P: PCatPresentation, f: WMorphism) -> Roof:
    """The roof A <-ζ- S^{⌊A⌋}A -f∘ζ-> B of a flattened morphism f: A → B."""
    f = _flat(P, f)
    a = f.src
    fl = P.floor(a.base)[0]
    z = P.zeta(a.S(fl), fl)
    return Roof(z, P.compose(f, z), zeta_witness(P, a.S(fl), fl))


def normalize(P: PCatPresentation, R: Roof) -> Roof:
    """Replace the roof by A <-ζ_s- S^s A -f∘S^s g-> B using the witness inverse g."""
    s, g = R.witness.r, R.witness.g
    a = R.source
    left = P.zeta(a.S(s), s)
    right = P.compose(R.right, P.shift_morphism(g, s))
    return Roof(left, right, zeta_witness(P, a.S(s), s))


@dataclass(frozen=True)
class RoofEquivalence:
    apex: ShiftedObject
    w: WMorphism
    f: WMorphism
    phi: WMorphism
    psi: WMorphism

    def to_json(self):
        return {"apex": str(self.apex), "w": self.w.to_json(), "f": self.f.to_json()}


def _phi(P, R: Roof, t):
    """S^s g ∘ ζ_{t-s} : S^t A → X for the roof's witness (s, g)."""
    s, g = R.witness.r, R.witness.g
    a = R.source
    return P.compose(P.shift_morphism(g, s), P.zeta(a.S(t), t - s))


def roof_equivalent(P: PCatPresentation, R1: Roof, R2: Roof):
    """Decide R1 ~ R2; returns (bool, certificate or None)."""
    if R1.source != R2.source or R1.target != R2.target:
        raise ValueError("roofs have different endpoints")
    n1, n2 = normalize(P, R1), normalize(P, R2)
    if P.projection(n1.right) != P.projection(n2.right):
        return False, None
    a, b = R1.source, R1.target
    fl = P.floor(a.base)[0]
    rho = P.stable_level(a.base, b.base)
    s1, s2 = R1.witness.r, R2.witness.r
    t = max(s1 + fl, s2 + fl, rho - a.shift + b.shift)
    phi, psi = _phi(P, R1, t), _phi(P, R2, t)
    w = P.zeta(a.S(t), t)
    cert = RoofEquivalence(a.S(t), w, P.compose(R1.right, phi), phi, psi)
    if not verify_equivalence(P, R1, R2, cert):
        raise AssertionError("constructed equivalence certificate failed to verify")
    return True, cert


def verify_equivalence(P: PCatPresentation, R1: Roof, R2: Roof, c: RoofEquivalence) -> bool:
    return (P.equal(P.compose(R1.left, c.phi), c.w) and P.equal(P.compose(R2.left, c.psi), c.w)
            and P.equal(P.compose(R1.right, c.phi), c.f) and P.equal(P.compose(R2.right, c.psi), c.f))


@dataclass(frozen=True)
class OreSquare:
    apex: ShiftedObject
    top: WMorphism      # ζ_{r+s}: apex → X, in W
    left: WMorphism     # apex → Y
    top_witness: WIsoWitness


def ore_square(P: PCatPresentation, v_w: WIsoWitness, x: WMorphism) -> OreSquare:
    """Complete Y -v-> B <-x- X (v in W) to a commuting square v∘left = x∘top."""
    r, g = v_w.r, v_w.g
    X = x.src
    s = P.floor(X.base)[0]
    apex = X.S(r + s)
    top = P.zeta(apex, r + s)
    left = P.chain(P.shift_morphism(g, r), P.shift_morphism(x, r), P.zeta(apex, s))
    return OreSquare(apex, top, left, zeta_witness(P, apex, r + s))


def roof_compose(P: PCatPresentation, R2: Roof, R1: Roof) -> Roof:
    """R2 ∘ R1 via the explicit square of the calculus-of-fractions proof."""
    if R1.target != R2.source:
        raise ValueError("roofs are not composable")
    sq = ore_square(P, R2.witness, R1.right)
    left = P.compose(R1.left, sq.top)
    w = compose_witness(P, R1.witness, sq.top_witness)
    right = P.compose(R2.right, sq.left)
    return Roof(left, right, w)


def compose_roofs(P: PCatPresentation, *roofs) -> Roof:
    """compose_roofs(R3, R2, R1) = R3∘R2∘R1."""
    out = roofs[-1]
    for R in reversed(roofs[:-1]):
        out = roof_compose(P, R, out)
    return out


# -- comparison with the limit category ------------------------------------

def xi(P: PCatPresentation, a, b, coords) -> Roof:
    """Ξ of a stable class in Hom(a, b)_∞."""
    A, B = as_object(a), as_object(b)
    m = P.hom(A.base, B.base)
    rho = max(m.r_stab, Fraction(0))
    fl = P.floor(A.base)[0]
    f = WMorphism(A.S(rho), B, Fraction(0), m.lift(coords, rho) if m.crit else m.zero())
    apex = A.S(fl + rho)
    left = P.zeta(apex, fl + rho)
    right = P.compose(f, P.zeta(apex, fl))
    return Roof(left, right, zeta_witness(P, apex, fl + rho))


def xi_inverse(P: PCatPresentation, R: Roof) -> tuple:
    return P.projection(normalize(P, R).right)


def localized_hom(P: PCatPresentation, a, b):
    """(dimension, basis roofs) of the localized hom space."""
    m = P.hom(as_object(a).base, as_object(b).base)
    d = m.stable_dim
    basis = []
    for i in range(d):
        e = [P.field.zero] * d
        e[i] = P.field.one
        basis.append(xi(P, a, b, tuple(e)))
    return d, basis


def dense_roofs(P: PCatPresentation, a, shift, extra=None):
    """The mutually inverse roofs S^c A <-> A of the density step (c = ``shift``)."""
    A = as_object(a)
    c = level(shift)
    fl = P.floor(A.base)[0]
    ap = fl if extra is None else level(extra)
    ap = max(ap, fl, fl - c)
    # A <-ζ_{a'+c}- S^{a'+c}A -ζ_{a'}-> S^c A
    apex = A.S(ap + c)
    to_shift = Roof(P.zeta(apex, ap + c), P.zeta(apex, ap), zeta_witness(P, apex, ap + c))
    # S^c A <-ζ_{a'}- S^{c+a'}A -ζ_{a'+c}-> A
    back = Roof(P.zeta(apex, ap), P.zeta(apex, ap + c), zeta_witness(P, apex, ap))
    return to_shift, back


def xi_report(P: PCatPresentation) -> Report:
    """Ξ is bijective on every hom pair and respects composition."""
    rep = Report("xi")
    F = P.field
    objs = [a for a in P.objects if P.floor(a)[0] is not INF]
    for a, b in product(objs, repeat=2):
        d, basis = localized_hom(P, a, b)
        back = [xi_inverse(P, R) for R in basis]
        ident = all(back[i] == tuple(F.one if j == i else F.zero for j in range(d)) for i in range(d))
        rk = linalg.rank(back, d, F) if d else 0
        rep.add("xi_roundtrip[%s,%s]" % (a, b), ident and rk == d, dim=d, rank=rk)
        # every generator roof is equivalent to Ξ of its class
        m = P.hom(a, b)
        bad = []
        for i, (name, birth) in enumerate(m.gens):
            R = generator_roof(P, a, b, m.basis_vector(i), birth)
            ok, _ = roof_equivalent(P, R, xi(P, a, b, xi_inverse(P, R)))
            if not ok:
                bad.append(name)
        rep.add("xi_surjective[%s,%s]" % (a, b), not bad, failures=bad)
    for a in objs:
        R = identity_roof(P, a)
        ok, _ = roof_equivalent(P, xi(P, a, a, P.stable_identity(a)), R)
        rep.add("xi_identity[%s]" % a, ok)
    return rep


def generator_roof(P: PCatPresentation, a, b, vec, lev, extra=0) -> Roof:
    """Roof a <-ζ_t- S^t a -f∘ζ-> b for an element ``vec`` of Hom(a,b) at level ``lev``."""
    lev = level(lev)
    A, B = as_object(a), as_object(b)
    fl = P.floor(A.base)[0]
    t = fl + max(lev, Fraction(0)) + level(extra)
    f = WMorphism(A.S(lev), B, Fraction(0), tuple(vec))
    apex = A.S(t)
    return Roof(P.zeta(apex, t), P.compose(f, P.zeta(apex, t - lev)), zeta_witness(P, apex, t))


# -- calculus-of-fractions axioms ------------------------------------------

def w_instances(P: PCatPresentation, truncation=None, w_class: str = "weighted") -> list:
    """Finite list of WIsoWitness instances of the class W up to the truncation weight."""
    bound = P.rmax if truncation is None else level(truncation)
    out = []
    for a in P.objects:
        if a in P.identities:
            out.append(identity_witness(P, a))
    if w_class == "identities":
        return out
    for a in P.objects:
        fl = P.floor(a)[0]
        if fl is INF:
            continue
        for t in P.grid():
            if fl <= t <= bound and t >= 0:
                out.append(zeta_witness(P, ShiftedObject(a, t), t))
    for (a, b), m in sorted(P.homs.items()):
        for i, (name, birth) in enumerate(m.gens):
            f = WMorphism(ShiftedObject(a, birth), ShiftedObject(b), Fraction(0), m.basis_vector(i))
            w = find_weighted_iso(P, f, bound)
            if w is not None:
                out.append(w)
    return out


def _in_class(P, f, w_class, bound):
    if w_class == "identities":
        return f.src == f.tgt and f.src.base in P.identities and P.equal(f, P.identity(f.src))
    return find_weighted_iso(P, f, bound) is not None


def verify_cf_axioms(P: PCatPresentation, truncation=None, w_class: str = "weighted") -> Report:
    """Check the five calculus-of-fractions axioms on generator-level instances."""
    rep = Report("cf_axioms[%s]" % w_class)
    bound = P.rmax if truncation is None else level(truncation)
    W = w_instances(P, bound, w_class)
    F = P.field

    # 1: identities lie in W
    bad = []
    for a in sorted(P.identities):
        i = P.identity(a)
        ok = (w_class == "identities") or (is_weighted_iso(P, i, 0) is not None)
        if not ok:
            bad.append(a)
    rep.add("axiom1", not bad, failures=bad, checked=len(P.identities),
            note="vacuous on identity-free objects")

    # 2: closure under composition
    bad, n = [], 0
    for w1, w2 in product(W, repeat=2):
        if w1.f.tgt.base != w2.f.src.base:
            continue
        sh = w1.f.tgt.shift - w2.f.src.shift
        w2s = shift_witness(P, w2, sh)
        c = compose_witness(P, w2s, w1)
        n += 1
        ok = verify_witness(P, c)
        if w_class == "identities":
            ok = ok and _in_class(P, c.f, w_class, bound)
        if not ok:
            bad.append([str(w1.f.src), str(w1.f.tgt), str(w2s.f.tgt)])
    rep.add("axiom2", not bad, failures=bad[:10], checked=n)

    # 3: Ore squares against every generator into the target of w
    bad, n = [], 0
    for w in W:
        B = w.f.tgt
        for c in P.objects:
            m = P.hom(c, B.base)
            for i, (name, birth) in enumerate(m.gens):
                x = WMorphism(ShiftedObject(c, B.shift + birth), B, Fraction(0), m.basis_vector(i))
                n += 1
                if w_class == "identities":
                    ok = c in P.identities
                    if not ok:
                        bad.append({"w": str(w.f.src), "x": name, "why": "no identity on %s" % c})
                    continue
                if P.floor(c)[0] is INF:
                    bad.append({"w": str(w.f.src), "x": name, "why": "no r-identity on %s" % c})
                    continue
                sq = ore_square(P, w, x)
                ok = P.equal(P.compose(w.f, sq.left), P.compose(x, sq.top)) and verify_witness(P, sq.top_witness)
                if not ok:
                    bad.append({"w": str(w.f.src), "x": name})
    rep.add("axiom3", not bad, failures=bad[:10], checked=n)

    # 4: t∘f = t∘g implies f∘s = g∘s for some s in W
    bad, n = [], 0
    for w in W:
        Bo, Do = w.f.src, w.f.tgt
        for a in P.objects:
            m = P.hom(a, Bo.base)
            for i, (name, birth) in enumerate(m.gens):
                A = ShiftedObject(a, Bo.shift + birth)
                f = WMorphism(A, Bo, Fraction(0), m.basis_vector(i))
                lam = f.level
                nlev = m.level_data(lam).n
                # k with t∘k = 0 at this level
                tgt = P.hom(a, Do.base)
                lev = lam + w.f.level
                cols = [tgt.normal_form(P.compose_vec(a, Bo.base, Do.base, w.f.vec, m.basis_vector(k)), lev)
                        for k in range(nlev)]
                rows = [tuple(cc[j] for cc in cols) for j in range(tgt.dim_at(lev))]
                kers = linalg.nullspace(rows, nlev, F) if nlev else []
                for kv in kers[:2] or [None]:
                    gvec = f.vec if kv is None else linalg.add(f.vec, tuple(kv) + (F.zero,) * (len(m.gens) - nlev))
                    g = WMorphism(A, Bo, Fraction(0), gvec)
                    n += 1
                    if w_class == "identities":
                        ok = a in P.identities and P.equal(f, g)
                        if not ok:
                            bad.append({"t": str(Bo), "f": name, "why": "needs identity on %s" % a})
                        continue
                    fa = P.floor(a)[0]
                    if fa is INF:
                        bad.append({"t": str(Bo), "f": name, "why": "no r-identity"})
                        continue
                    mm = max(w.r, fa)
                    s = P.zeta(A.S(mm), mm)
                    if not P.equal(P.compose(f, s), P.compose(g, s)):
                        bad.append({"t": str(Bo), "f": name})
    rep.add("axiom4", not bad, failures=bad[:10], checked=n)

    # 5: every object receives a morphism of W
    bad = []
    for a in P.objects:
        if w_class == "identities":
            ok = a in P.identities
        else:
            ok = P.floor(a)[0] is not INF
        if not ok:
            bad.append(a)
    rep.add("axiom5", not bad, failures=bad)
    rep.info = {"w_class": w_class, "truncation": bound, "instances": len(W)}
    return rep
