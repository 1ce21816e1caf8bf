import math
from fractions import Fraction
from itertools import product

import pytest

from conftest import ALL_FIELDS, F2, F3, FIXTURES, random_hfch
from pkaroubi import catalog, idem, pairs
from pkaroubi.fileformat import parse
from pkaroubi.pcat import ShiftedObject, WMorphism

STAR = "*"


@pytest.fixture(params=ALL_FIELDS, ids=lambda f: f.name)
def ae(request):
    return catalog.one_object_ae(request.param)


def brute_pair_hom_dim(P, X, Y, t):
    """dim of intertwiners at level t modulo those killed by ζ, by enumerating Hom(A, B)(t) over F_p."""
    m = P.hom(X.base, Y.base)
    F = P.field
    n = m.dim_at(t)
    src, tgt = ShiftedObject(X.base), ShiftedObject(Y.base)
    good = killed = 0
    for cs in product(F.elements(), repeat=n):
        f = WMorphism(src, tgt, t, m.lift(tuple(cs), t))
        zx, zy = P.unit(X.base, X.r), P.unit(Y.base, Y.r)
        if not (P.equal(P.compose(f, X.e), P.compose(f, zx)) and P.equal(P.compose(Y.e, f), P.compose(zy, f))):
            continue
        good += 1
        if P.is_zero(P.compose(f, zx)) and P.is_zero(P.compose(zy, f)):
            killed += 1
    return round(math.log(good, F.p)) - round(math.log(killed, F.p))


def test_pair_objects(ae):
    X = pairs.pair_object(ae, STAR, ae.gen(STAR, STAR, "e"))
    assert X.r == 1
    Y = pairs.yhat(ae, STAR)
    assert Y.r == 0 and ae.equal(Y.e, ae.identity(STAR))
    if ae.field.p != 2:
        with pytest.raises(ValueError):
            pairs.pair_object(ae, STAR, ae.element(STAR, STAR, 1, {"a": 2, "e": 0}))


def test_pair_hom_from_identity_pair_to_e(ae):
    X = pairs.yhat(ae, STAR)
    Y = pairs.pair_object(ae, STAR, ae.gen(STAR, STAR, "e"))
    mod = pairs.pair_hom(ae, X, Y).module
    assert [mod.dim_at(t) for t in (0, Fraction(1, 2), 1, 3)] == [0, 0, 1, 1]
    back = pairs.pair_hom(ae, Y, X).module
    assert back.dim_at(1) == 1
    # the complement pair is orthogonal to (*, e)
    C = pairs.pair_object(ae, STAR, ae.element(STAR, STAR, 1, {"a": 1, "e": -1}))
    if ae.field.p != 2:
        assert pairs.pair_hom(ae, Y, C).module.stable_dim == 0


def test_zero_pair(ae):
    Z = pairs.pair_object(ae, STAR, ae.zero(STAR, STAR, 1))
    for Y in (Z, pairs.yhat(ae, STAR)):
        assert pairs.pair_hom(ae, Z, Y).module.stable_dim == 0
        assert pairs.pair_hom(ae, Y, Z).module.stable_dim == 0


def test_pair_floor(ae):
    cases = {
        pairs.pair_object(ae, STAR, ae.gen(STAR, STAR, "e")): 1,
        pairs.pair_object(ae, STAR, ae.unit(STAR, 2)): 0,
        pairs.yhat(ae, STAR): 0,
    }
    for X, want in cases.items():
        t, z = pairs.pair_floor(ae, X)
        assert t == want and z.weight == want


@pytest.mark.parametrize("field", [F2, F3], ids=["fp:2", "fp:3"])
def test_pair_hom_dims_against_enumeration(field):
    P = catalog.one_object_ae(field)
    objs = [pairs.yhat(P, STAR), pairs.pair_object(P, STAR, P.gen(STAR, STAR, "e")),
            pairs.pair_object(P, STAR, P.zero(STAR, STAR, 1))]
    for X, Y in product(objs, repeat=2):
        mod = pairs.pair_hom(P, X, Y).module
        for t in (0, Fraction(1, 2), 1, 2):
            assert mod.dim_at(t) == brute_pair_hom_dim(P, X, Y, t), (X, Y, t)


@pytest.mark.parametrize("seed", range(3))
def test_pair_hom_dims_random(seed):
    H, e = random_hfch(F2, seed)
    P = H.P
    found, _ = pairs.discovered_pairs(P)
    objs = [X for _, X in found][:4]
    for X, Y in product(objs, repeat=2):
        if P.hom(X.base, Y.base).dim_at(2) > 8:
            continue
        mod = pairs.pair_hom(P, X, Y).module
        for t in (0, 1, 2):
            assert mod.dim_at(t) == brute_pair_hom_dim(P, X, Y, t)


def test_canonical_weak_splitting(ae):
    for e in (ae.gen(STAR, STAR, "e"), ae.unit(STAR, 1), ae.zero(STAR, STAR, 1)):
        X = pairs.pair_object(ae, STAR, e)
        ctx, w, T = pairs.canonical_weak_splitting(ae, X)
        assert T.weight == 2 * X.r
        assert idem.check_weak_splitting(ctx, w, T)


def test_gamma(ae):
    X = pairs.pair_object(ae, STAR, ae.gen(STAR, STAR, "e"))
    A, g = pairs.gamma_object(ae, X)
    F = ae.field
    assert A == STAR and tuple(g) == (F(0), F(1))
    Y = pairs.yhat(ae, STAR)
    f = ae.gen(STAR, STAR, "e")
    assert tuple(pairs.gamma_hom(ae, pairs.PairRoof(Y, X, f))) == (F(0), F(1))
    # a does not intertwine (*, e) with itself in the limit
    if F.p != 2:
        C = pairs.pair_object(ae, STAR, ae.element(STAR, STAR, 1, {"a": 1, "e": -1}))
        with pytest.raises(ValueError):
            pairs.gamma_hom(ae, pairs.PairRoof(X, C, ae.identity(STAR)))


def test_gamma_equivalence_fixtures(field):
    P = catalog.one_object_ae(field)
    rep = pairs.verify_gamma_equivalence(P)
    assert rep.ok, rep.summary()
    assert rep.info["pairs"] == 4


@pytest.mark.parametrize("seed", range(5))
def test_gamma_equivalence_random(seed):
    for field in (F2, F3):
        H, _ = random_hfch(field, seed)
        rep = pairs.verify_gamma_equivalence(H.P)
        assert rep.ok, rep.summary()


def test_gamma_equivalence_rejects_broken_associativity(field):
    P = catalog.broken_associativity(field)
    rep = pairs.verify_gamma_equivalence(P)
    assert not rep.ok
    fail = {c.name: c for c in rep.failures()}
    assert "presentation_valid" in fail
    assert fail["presentation_valid"].detail["failures"]


def test_gamma_equivalence_from_file():
    pf = parse(FIXTURES / "one_object_f2.pk")
    P = pf.presentation(pf.get_field(None), pf.rmax)
    assert pairs.verify_gamma_equivalence(P).ok
