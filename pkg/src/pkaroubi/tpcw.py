"""Triangle weights and fragmentation pseudo-metrics on filtered complexes.

Everything here is an upper bound backed by a certificate.  A limit triangle
X -> Y -> Z -> TX is given by chain maps at arbitrary levels; a realization
is a strict exact triangle X -> S^{-r1}Y -> S^{-r2}Z -> S^{-r}TX whose maps
represent u, v, w in the limit category.

Realizations are generated from a fixed, finite family: declared ones, and
mapping cones of level-λ representatives of u compared against Z up to a
renaming of the cone generators and a uniform shift.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

from . import fchain as fc, linalg
from .field import INF, fmt_level, level
from .fchain import ChainMap, FilteredComplex, StrictWitness, Triangle
from .reports import Report

ZERO = Fraction(0)
B_STEP = "j:T^-1 B"     # label of the one step whose X is T^{-1}B


@dataclass(eq=False)
class LimitTriangle:
    """u: X -> Y, v: Y -> Z, w: Z -> TX as chain maps at any levels."""
    X: FilteredComplex
    Y: FilteredComplex
    Z: FilteredComplex
    u: ChainMap
    v: ChainMap
    w: ChainMap
    declared: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.u.src is not self.X or self.u.tgt is not self.Y or self.v.src is not self.Y \
                or self.v.tgt is not self.Z or self.w.src is not self.Z:
            raise ValueError("limit triangle maps do not chain")
        TX = self.X.T()
        if self.w.tgt is not TX:
            if not self.w.tgt.same_as(TX):
                raise ValueError("third map must land in T X")
            self.w = fc.relabel(self.w, tgt=TX)

    @property
    def TX(self):
        return self.X.T()

    def to_json(self):
        return {"X": self.X.name, "Y": self.Y.name, "Z": self.Z.name,
                "u": self.u.to_json(), "v": self.v.to_json(), "w": self.w.to_json()}


@dataclass(eq=False)
class WeightCertificate:
    triangle: LimitTriangle
    realization: Triangle
    r1: Fraction
    r2: Fraction
    r: Fraction
    source: str = ""

    def to_json(self):
        R = self.realization
        return {"r1": fmt_level(self.r1), "r2": fmt_level(self.r2), "r": fmt_level(self.r),
                "source": self.source, "u": R.u.to_json(), "v": R.v.to_json(), "w": R.w.to_json(),
                "witness_cone": R.witness.Cp.name if R.witness else None}


def cone_triangle(u: ChainMap, name=None):
    """(K, LimitTriangle X -> Y -> K -> TX) for the cone of u viewed as weight 0 into S^{-λ}Y."""
    ml = u.min_level()
    lam = max(ZERO, ml if ml is not None else ZERO)
    Ys = u.tgt.shift(-lam)
    u0 = ChainMap(u.src, Ys, ZERO, u.entries)
    K, v, w = fc.cone(u0, name=name)
    v_lvl = ChainMap(u.tgt, K, -lam, v.entries)
    return K, LimitTriangle(u.src, u.tgt, K, u, v_lvl, w)


def _big_level(*cs, extra=ZERO):
    """A level past every birth, with room for maps of total level ``extra``."""
    top = [b for C in cs for b in C.births()] or [ZERO]
    return max(top) + abs(extra) + 1


def limit_exact_report(D: LimitTriangle) -> Report:
    """Exactness in the limit category by homology dimension counts far up the filtration."""
    rep = Report("limit_exact")
    TX, TY = D.TX, D.Y.T()
    Tu = ChainMap(TX, TY, D.u.level, D.u.entries)
    spread = abs(D.u.level) + abs(D.v.level) + abs(D.w.level)
    t = _big_level(D.X, D.Y, D.Z, extra=spread)
    degs = sorted(set(D.X.degrees()) | set(D.Y.degrees()) | set(D.Z.degrees()) | set(TX.degrees()))
    degs = list(range(degs[0] - 1, degs[-1] + 2)) if degs else []
    bad = []
    for f, g, M in ((D.u, D.v, D.Y), (D.v, D.w, D.Z), (D.w, Tu, TX)):
        for n in degs:
            hm = fc.homology_at(M, t + f.level, n)
            ok = (fc._induced_rank(fc.compose(g, f), t, n) == 0
                  and hm - fc._induced_rank(g, t + f.level, n) == fc._induced_rank(f, t, n))
            if not ok:
                bad.append({"at": M.name, "degree": n})
    rep.add("limit_long_exact", not bad, violations=bad[:10])
    return rep


def verify_weight_certificate(c: WeightCertificate) -> Report:
    D, R = c.triangle, c.realization
    rep = Report("weight_certificate")
    rep.add("ordered", ZERO <= c.r1 <= c.r2 <= c.r, r1=c.r1, r2=c.r2, r=c.r)
    rep.add("objects", R.A is D.X and R.B.same_as(D.Y.shift(-c.r1)) and R.C.same_as(D.Z.shift(-c.r2)))
    if not rep.ok:
        return rep
    rep.add("weight", R.weight == c.r)
    rep.extend(fc.strict_exact_report(R), "strict.")
    try:
        u1 = fc.relabel(R.u, tgt=D.Y, lev=c.r1)
        v1 = fc.relabel(R.v, src=D.Y, tgt=D.Z, lev=c.r2 - c.r1)
        w1 = fc.relabel(R.w, src=D.Z, tgt=D.TX, lev=c.r - c.r2)
    except ValueError as exc:
        rep.add("representatives", False, why=str(exc))
        return rep
    rep.add("bracket_u", fc.limit_equal(u1, _at_level(D.u, u1.level)))
    rep.add("bracket_v", fc.limit_equal(v1, _at_level(D.v, v1.level)))
    rep.add("bracket_w", fc.limit_equal(w1, _at_level(D.w, w1.level)))
    return rep


def _at_level(f, lev):
    """f relabelled at lev when its entries allow it, else at the larger level of the two."""
    ml = f.min_level()
    return ChainMap(f.src, f.tgt, lev if ml is None or ml <= lev else max(lev, f.level), f.entries)


def _representative(u: ChainMap, lam):
    """A chain map filtered at lam in the limit class of u, or None."""
    ml = u.min_level()
    if ml is None or ml <= lam:
        return ChainMap(u.src, u.tgt, lam, u.entries)
    E = fc.hom_complex(u.src, u.tgt)
    vec = E.vec(u)
    k = E.prefix(0, lam)
    n1 = len(E.gens[1])
    if not n1:
        return None
    rows = [tuple(E.D(1, i)[j] for i in range(n1)) for j in range(k, len(vec))]
    rhs = [-vec[j] for j in range(k, len(vec))]
    h = linalg.solve(rows, rhs, n1, E.field)
    if h is None:
        return None
    out = list(vec)
    for i, c in enumerate(h):
        if c:
            out = list(linalg.add(out, linalg.scale(c, E.D(1, i))))
    return E.to_map(out, lam)


def _strip(name):
    return name[1:-1] if name.startswith("<") and name.endswith(">") else None


def _matchings(K: FilteredComplex, Z: FilteredComplex, tagged):
    """Name maps K -> Z (identity, or unwrapping the cone tags) under which Z is a uniform shift of K."""
    out = []
    for strip in (False, True):
        if strip and not tagged:
            continue
        m = {}
        for n in K.names:
            m[n] = (_strip(n) if strip and n in tagged else n)
        if len(set(m.values())) != len(m) or set(m.values()) != set(Z.names):
            continue
        shifts = {Z.birth(m[n]) - K.birth(n) for n in K.names}
        if len(shifts) > 1:
            continue
        if any(Z.degree(m[n]) != K.degree(n) for n in K.names):
            continue
        dK = {m[s]: {m[t]: c for t, c in row.items()} for s, row in K.d.items()}
        if dK != Z.d:
            continue
        out.append((m, shifts.pop() if shifts else ZERO))
    return out


def _cone_candidate(D: LimitTriangle, lam, bound):
    """Realizations whose witness is the cone of a level-lam representative of u."""
    u = _representative(D.u, lam)
    if u is None:
        return []
    Ys = D.Y.shift(-lam)
    u0 = ChainMap(D.X, Ys, ZERO, u.entries)
    K, vK, wK = fc.cone(u0)
    tagged = {n for n in K.names if n not in set(Ys.names)}
    out = []
    TX = D.TX
    F = D.X.field
    if not D.Z.gens:
        # zero third object: f: K -> 0, φ = 0, cost is the acyclicity of K
        if all(bc.max_finite_length() is not INF for bc in fc.homology_barcodes(K).values()):
            r = max([lam] + [bc.max_finite_length() for bc in fc.homology_barcodes(K).values()])
            if r <= bound:
                C3 = D.Z.shift(-r) if r else D.Z
                W = StrictWitness(K, vK, wK, fc.zero_map(C3, K, r), fc.zero_map(K, C3, 0))
                T = Triangle(D.X, Ys, C3, u0, fc.zero_map(Ys, C3, 0), fc.zero_map(C3, TX, r), r, W)
                out.append((T, lam, r, r, "cone_to_zero"))
        return out
    for m, c in _matchings(K, D.Z, tagged):
        r2 = max(lam, c)
        e = r2 - c
        r = max(r2, e)
        if r > bound:
            continue
        C3 = D.Z.shift(-r2)
        f = ChainMap(K, C3, ZERO, {(m[n], n): F.one for n in K.names})
        phi = ChainMap(C3, K, r, {(n, m[n]): F.one for n in K.names})
        vp = ChainMap(Ys, C3, ZERO, {(m[y], x): c_ for (y, x), c_ in vK.entries.items()})
        wp = ChainMap(C3, TX, r, {(x, m[y]): c_ for (x, y), c_ in wK.entries.items()})
        W = StrictWitness(K, vK, wK, phi, f)
        out.append((Triangle(D.X, Ys, C3, u0, vp, wp, r, W), lam, r2, r, "cone"))
    return out


def _lambda_grid(D: LimitTriangle, bound):
    pts = {ZERO}
    ml = D.u.min_level()
    if ml is not None and ml > 0:
        pts.add(ml)
    sq = fc.hom_complex(D.X, D.Y).h0()
    pts |= {b for b in sq.module.crit if b > 0}
    bz = {b for b in D.Z.births()}
    by = {b for b in D.Y.births()}
    pts |= {y - z for y in by for z in bz if y - z > 0}
    return sorted(p for p in pts if p <= bound)


def realizations(D: LimitTriangle, bound):
    """The finite candidate family, in a fixed order."""
    bound = level(bound)
    out = []
    for R in D.declared:
        out.append(R)
    for lam in _lambda_grid(D, bound):
        for T, r1, r2, r, src in _cone_candidate(D, lam, bound):
            out.append(WeightCertificate(D, T, r1, r2, r, src))
    return out


def unstable_weight_ub(D: LimitTriangle, bound=4, verify=True):
    """(ub, certificate) from the least verified realization, or (None, None).

    With ``verify=False`` the least candidate is returned unchecked; callers
    must verify it before reporting it."""
    best = None
    for c in realizations(D, bound):
        if c.r > level(bound):
            continue
        if best is not None and c.r >= best.r:
            continue
        if not verify or verify_weight_certificate(c).ok:
            best = c
    return (best.r, best) if best else (None, None)


def shifted(D: LimitTriangle, s) -> LimitTriangle:
    """S^{s,0,0,s}Δ: X moved by s, u and w re-levelled."""
    s = level(s)
    if s == 0:
        return D
    Xs = D.X.shift(s)
    u = ChainMap(Xs, D.Y, D.u.level - s, D.u.entries)
    w = ChainMap(D.Z, Xs.T(), D.w.level + s, D.w.entries)
    return LimitTriangle(Xs, D.Y, D.Z, u, D.v, w)


def stable_weight_ub(D: LimitTriangle, shifts=(0,), bound=4):
    """min over the shift grid (0 always included) of the unstable bound."""
    best = (None, None, None)
    for s in sorted({ZERO} | {level(x) for x in shifts}):
        ub, cert = unstable_weight_ub(shifted(D, s), bound)
        if ub is not None and (best[0] is None or ub < best[0]):
            best = (ub, cert, s)
    return best


# -- fragmentation ----------------------------------------------------------------

@dataclass(eq=False)
class Step:
    X: FilteredComplex
    label: str
    u: ChainMap
    triangle: LimitTriangle
    cost: Fraction
    certificate: WeightCertificate | None = None

    def to_json(self):
        return {"X": self.label, "level": fmt_level(self.u.level), "cost": fmt_level(self.cost),
                "Y": self.triangle.Z.name,
                "certificate": self.certificate.to_json() if self.certificate else None}


@dataclass(eq=False)
class DecompositionCertificate:
    A: FilteredComplex
    B: FilteredComplex
    family: dict
    steps: list
    total: Fraction

    def to_json(self):
        return {"A": self.A.name, "B": self.B.name, "total": fmt_level(self.total),
                "steps": [s.to_json() for s in self.steps]}


def family_closure(family: dict) -> dict:
    """F ∪ T F ∪ T^{-1} F, keyed by label."""
    out = {}
    for name in sorted(family):
        C = family[name]
        out[name] = C
        out["T(%s)" % name] = C.T()
        out["T^-1(%s)" % name] = fc.suspend(C, -1, name="T^-1 %s" % C.name)
    return out


def _u_candidates(X, Y, cap):
    """0 and the first ``cap`` 0/1-combinations of H_0 Hom generators, each at its least level (clamped at 0).

    The list does not depend on the budget, so raising the budget only adds feasible steps."""
    zero = fc.zero_map(X, Y, ZERO)
    out = [((), ZERO, zero)]
    if not X.gens or not Y.gens:
        return out
    E = fc.hom_complex(X, Y)
    sq = E.h0()
    gens = list(zip(sq.vectors, sq.module.births))
    for k in range(1, len(gens) + 1):
        for combo in combinations(range(len(gens)), k):
            if len(out) > cap:
                return out
            vec = tuple(E.field.zero for _ in E.gens[0])
            for i in combo:
                vec = linalg.add(vec, gens[i][0])
            f = E.to_map(vec, ZERO)
            ml = f.min_level()
            lam = max(ZERO, ml if ml is not None else ZERO)
            out.append((combo, lam, ChainMap(X, Y, lam, f.entries)))
    return out


class _Search:
    """Depth-first branch and bound; a step costs its certified weight bound."""

    def __init__(self, A, B, family, depth, budget, cap):
        self.A, self.B = A, B
        self.target = fc.barcode_signature(A)
        self.depth = depth
        self.budget = level(budget)
        self.cap = cap
        self.closure = family_closure(family)
        self.TinvB = fc.suspend(B, -1, name="T^-1 %s" % B.name)
        self.verified = {}      # step key -> verified ub, filled when a candidate fails

    def step_cost(self, lab, combo, Y, D):
        """Weight of the least candidate realization of a step, or a verified override."""
        key = _step_key((lab, combo, None), Y)
        if key in self.verified:
            return self.verified[key]
        return unstable_weight_ub(D, self.budget, verify=False)[0]

    def choices(self, used_b):
        out = [(lab, self.closure[lab], False) for lab in sorted(self.closure)]
        if not used_b:
            out.append((B_STEP, self.TinvB, True))
        return out

    def expand(self, Y, used_b):
        """Child states of Y in a fixed order, with the certified cost of each step."""
        for lab, X, is_b in self.choices(used_b):
            for combo, lam, u in _u_candidates(X, Y, self.cap):
                K, D = cone_triangle(u, name="Y")
                cost = self.step_cost(lab, combo, Y, D)
                if cost is None:
                    continue
                yield (lab, combo, lam), X, u, K, D, cost, used_b or is_b

    def run(self, Y, used_b, cost, path, n, best):
        if n >= self.depth:
            return best
        for key, X, u, K, D, step_cost, ub in self.expand(Y, used_b):
            c = cost + step_cost
            if c > self.budget or (best is not None and c > best[0]):
                continue
            newpath = path + [(key, X, u, D, step_cost, Y)]
            if ub and fc.barcode_signature(K) == self.target:
                cand = (c, len(newpath), tuple(_key(s[0]) for s in newpath), newpath)
                if best is None or cand[:3] < best[:3]:
                    best = cand
            best = self.run(K, ub, c, newpath, n + 1, best)
        return best


def _key(k):
    lab, combo, lam = k
    return (lab, combo, lam)


def fragmentation_delta_ub(A: FilteredComplex, B: FilteredComplex, family: dict, depth=3, budget=2,
                           threads: int = 1, cap: int = 15):
    """(ub, DecompositionCertificate) or (None, None) when nothing fits in depth/budget.

    The search ranks paths by unverified candidate weights; the winning path
    is then verified step by step, and any step whose candidate fails gets
    its verified weight recorded before the search is repeated."""
    S = _Search(A, B, family, int(depth), budget, cap)
    while True:
        found = _search_once(S, threads)
        if found is None:
            return None, None
        cost, path = found
        steps, stale = [], False
        for key, X, u, D, c, Y in path:
            ub, cert = unstable_weight_ub(D, S.budget)
            if ub != c:
                S.verified[_step_key(key, Y)] = ub
                stale = True
            steps.append(Step(X, key[0], u, D, ub, cert))
        if not stale:
            return cost, DecompositionCertificate(A, B, family, steps, cost)


def _step_key(key, Y):
    lab, combo, _ = key
    return (lab, combo, Y.gens, tuple(sorted((k, tuple(sorted(r.items()))) for k, r in Y.d.items())))


def _search_once(S: _Search, threads: int):
    Y0 = fc.zero_complex(S.A.field, "0")
    roots = list(S.expand(Y0, False))

    def branch(item):
        key, X, u, K, D, c, ub = item
        if c > S.budget:
            return None
        path = [(key, X, u, D, c, Y0)]
        best = None
        if ub and fc.barcode_signature(K) == S.target:
            best = (c, 1, (_key(key),), path)
        return S.run(K, ub, c, path, 1, best)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(branch, roots))
    else:
        results = [branch(x) for x in roots]
    results = [r for r in results if r is not None]
    if not results:
        return None
    cost, _, _, path = min(results, key=lambda r: r[:3])
    return cost, path


def verify_decomposition(c: DecompositionCertificate) -> Report:
    rep = Report("decomposition")
    closure = family_closure(c.family)
    prev = None
    b_steps = 0
    total = ZERO
    for i, s in enumerate(c.steps):
        D = s.triangle
        if i == 0:
            rep.add("start_zero[0]", not D.Y.gens)
        else:
            rep.add("linked[%d]" % i, D.Y is prev)
        if s.label == B_STEP:
            b_steps += 1
            rep.add("is_TinvB[%d]" % i, D.X.same_as(fc.suspend(c.B, -1)))
        else:
            rep.add("in_family[%d]" % i, s.label in closure and D.X.same_as(closure[s.label]))
        rep.add("limit_exact[%d]" % i, limit_exact_report(D).ok)
        ok = s.certificate is not None and verify_weight_certificate(s.certificate).ok
        rep.add("certificate[%d]" % i, ok and s.certificate.r == s.cost)
        total += s.cost
        prev = D.Z
    rep.add("uses_B_once", b_steps == 1)
    rep.add("ends_at_A", prev is not None and fc.barcode_signature(prev) == fc.barcode_signature(c.A))
    rep.add("total", total == c.total, total=total)
    return rep


def fragmentation_d_ub(A, B, family, depth=3, budget=2, threads=1, cap=15):
    """max of both deltas; (None, certs) if either direction has no certificate."""
    d1, c1 = fragmentation_delta_ub(A, B, family, depth, budget, threads, cap)
    d2, c2 = fragmentation_delta_ub(B, A, family, depth, budget, threads, cap)
    if d1 is None or d2 is None:
        return None, (c1, c2)
    return max(d1, d2), (c1, c2)
