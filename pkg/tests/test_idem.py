import random
from fractions import Fraction
from itertools import product

import pytest

from conftest import ALL_FIELDS, random_hfch, sample_idempotents
from pkaroubi import catalog, idem, pairs, presheaf
from pkaroubi.field import INF, Field
from pkaroubi.idem import RetractTriple, WIdem
from pkaroubi.pcat import ShiftedObject, WMorphism

STAR = "*"


@pytest.fixture(params=ALL_FIELDS, ids=lambda f: f.name)
def ae(request):
    return catalog.one_object_ae(request.param)


def elem(P, r, a, e):
    return P.element(STAR, STAR, r, {"a": a, "e": e})


def split(cat, P, e, name="K"):
    return presheaf.split_by_kernel(cat, WIdem(cat.yoneda(STAR), cat.yoneda_morphism(e), e.weight), name)


def test_examples_of_weighted_idempotents(ae):
    for r in (0, Fraction(1, 2), 2):
        assert idem.is_weighted_idempotent(ae, ae.unit(STAR, r))
    assert idem.is_weighted_idempotent(ae, ae.gen(STAR, STAR, "e"))
    # at weight 0 the condition is e∘e = e
    for a in ae.field.elements() if ae.field.p else (0, 1, 2, -1):
        x = elem(ae, 0, a, 0)
        assert idem.is_weighted_idempotent(ae, x) == ae.equal(ae.compose(x, x), x)
    # over F_2 every element of span{a, e} squares to itself
    if ae.field.p != 2:
        assert not idem.is_weighted_idempotent(ae, elem(ae, 1, 1, 1))
    with pytest.raises(ValueError):
        idem.is_weighted_idempotent(ae, ae.eta(STAR, 1))


def test_complement(ae):
    e1 = ae.gen(STAR, STAR, "e")
    assert ae.is_zero(idem.complement(ae, WIdem(ShiftedObject(STAR), ae.unit(STAR, 1), 1)).e)
    z = idem.complement(ae, WIdem(ShiftedObject(STAR), ae.zero(STAR, STAR, 1), 1))
    assert ae.equal(z.e, ae.unit(STAR, 1))
    c = idem.complement(ae, WIdem(ShiftedObject(STAR), e1, 1))
    assert ae.equal(c.e, elem(ae, 1, 1, -1))
    if ae.field.p != 2:
        with pytest.raises(ValueError):
            idem.complement(ae, WIdem(ShiftedObject(STAR), elem(ae, 1, 1, 1), 1))


def test_splitting_checks(ae):
    cat = presheaf.PresheafCat(ae)
    Y = cat.yoneda(STAR)
    for r in (0, 1):
        eta = WIdem(Y, cat.unit(Y, r), r)
        T = idem.trivial_retract(cat, Y, r)
        assert idem.check_splitting(cat, eta, T)
        assert not idem.check_splitting(cat, WIdem(Y, cat.unit(Y, r + 1), r + 1), T)
    X = pairs.pair_object(ae, STAR, ae.gen(STAR, STAR, "e"))
    ctx, w, T = pairs.canonical_weak_splitting(ae, X)
    assert idem.check_weak_splitting(ctx, w, T)
    assert T.weight == 2


def test_splitting_comparison(ae):
    cat = presheaf.PresheafCat(ae)
    Y = cat.yoneda(STAR)
    e1 = ae.gen(STAR, STAR, "e")
    Ye = WIdem(Y, cat.yoneda_morphism(e1), 1)
    T = presheaf.split_by_kernel(cat, Ye)
    w = idem.splitting_comparison(cat, Ye, T, T)
    assert cat.equal(w.f, cat.unit(T.B, 1)) and cat.equal(w.g, cat.unit(T.B, 1))
    T1, T2, w = presheaf.split_uniqueness(cat, STAR, e1)
    assert w.r == 2 and idem.verify_strong_iso(cat, w)
    # weight 0: a genuine isomorphism
    a0 = ae.identity(STAR)
    T1, T2, w = presheaf.split_uniqueness(cat, STAR, a0)
    assert w.r == 0 and idem.verify_strong_iso(cat, w)


def test_retract_compose(ae):
    cat = presheaf.PresheafCat(ae)
    e1 = ae.gen(STAR, STAR, "e")
    T1, T2, _ = presheaf.split_uniqueness(cat, STAR, e1)
    self_r = idem.trivial_retract(cat, T1.A, Fraction(1, 2))
    C = idem.retract_compose(cat, self_r, T1)
    assert C.weight == Fraction(3, 2) and idem.is_retract(cat, C)
    # the image splitting is a retract of Y(*); the kernel object retracts onto it through the comparison
    alpha = cat.compose(T2.rho, T1.s)
    beta = cat.compose(T1.rho, T2.s)
    inner = RetractTriple(T2.B, beta, alpha, 2)
    both = idem.retract_compose(cat, T1, inner)
    assert both.weight == 3 and idem.is_retract(cat, both)
    with pytest.raises(ValueError):
        idem.retract_compose(cat, T1, T1)


def test_retract_compose_weight_zero():
    P = catalog.one_object_ae(Field.prime(3))
    cat = presheaf.PresheafCat(P)
    a0 = P.identity(STAR)
    T1, _, _ = presheaf.split_uniqueness(cat, STAR, a0)
    C = idem.retract_compose(cat, T1, idem.trivial_retract(cat, T1.B, 0))
    assert C.weight == 0 and idem.is_retract(cat, C)


def test_sum_split_witness(ae):
    cat = presheaf.PresheafCat(ae)
    Y = cat.yoneda(STAR)
    for e in (ae.gen(STAR, STAR, "e"), ae.unit(STAR, 1), ae.zero(STAR, STAR, 1)):
        Ye = WIdem(Y, cat.yoneda_morphism(e), 1)
        comp = idem.complement(cat, Ye)
        TB = presheaf.split_by_kernel(cat, Ye, "B")
        TC = presheaf.split_by_kernel(cat, comp, "C")
        w, f = idem.sum_split_witness(cat, Ye, TB, TC)
        assert w.r == 2 and idem.verify_strong_iso(cat, w)


def test_splitting_induces_retract_and_back(ae):
    cat = presheaf.PresheafCat(ae)
    rng = random.Random(0)
    for e in sample_idempotents(ae, STAR, rng, tries=10):
        T = split(cat, ae, e)
        induced = idem.induced_idempotent(cat, T)
        assert cat.equal(induced.e, cat.yoneda_morphism(e))


def test_strong_iso_composition_and_retract_of_eta(ae):
    cat = presheaf.PresheafCat(ae)
    Y = cat.yoneda(STAR)
    T = presheaf.split_by_kernel(cat, WIdem(Y, cat.unit(Y, 1), 1))
    w = idem.retract_strong_iso(cat, T)
    assert w is not None and w.r == 1
    w2 = idem.compose_strong_iso(cat, idem.StrongIsoWitness(w.g, w.f, 1), w)
    assert w2.r == 2 and idem.verify_strong_iso(cat, w2)
    Te = split(cat, ae, ae.gen(STAR, STAR, "e"))
    assert idem.retract_strong_iso(cat, Te) is None


def test_retraction_cancels(ae):
    cat = presheaf.PresheafCat(ae)
    T = split(cat, ae, ae.gen(STAR, STAR, "e"))
    Y = cat.yoneda(STAR)
    f = cat.compose(T.rho, T.s)
    g = cat.unit(T.B, 1)
    same, equiv = idem.retraction_cancels(cat, T, f, g)
    assert same and equiv
    same, equiv = idem.section_cancels(cat, T, f, g)
    assert same and equiv


def test_equalizer_splits(ae):
    cat = presheaf.PresheafCat(ae)
    Y = cat.yoneda(STAR)
    e1 = WIdem(Y, cat.yoneda_morphism(ae.gen(STAR, STAR, "e")), 1)
    K = presheaf.split_by_kernel(cat, e1)
    T = idem.split_from_equalizer(cat, e1, K.s, lambda al: presheaf.factor_through_sub(cat, K, al))
    assert idem.check_splitting(cat, e1, T)
    assert cat.equal(T.rho, K.rho)
    # η_r does not equalize e1 with itself: the kernel inclusion of 0 is not an equalizer of e1
    Z = presheaf.split_by_kernel(cat, WIdem(Y, cat.zero(Y, Y, 1), 1))
    with pytest.raises(ValueError):
        idem.split_from_equalizer(cat, e1, Z.s, lambda al: presheaf.factor_through_sub(cat, Z, al))


def test_coequalizer_splits_at_weight_zero():
    P = catalog.one_object_ae(Field.prime(3))
    cat = presheaf.PresheafCat(P)
    Y = cat.yoneda(STAR)
    # with r = 0 the image corestriction coequalizes e and the identity
    for x in (P.identity(STAR), P.zero(STAR, STAR, 0)):
        e = WIdem(Y, cat.yoneda_morphism(x), 0)
        I = presheaf.split_by_image(cat, e)
        T = idem.split_from_coequalizer(cat, e, I.rho, lambda al: cat.compose(al, I.s))
        assert idem.check_splitting(cat, e, T)


# minimal representation weight

def brute_idempotent_weights(P, a, ebar, grid):
    """Least grid weight carrying an idempotent in the class, by enumeration of all of End(a)(t)."""
    m = P.hom(a, a)
    F = P.field
    for t in grid:
        n = m.level_data(t).n
        for cs in product(F.elements(), repeat=n):
            v = tuple(cs) + (F.zero,) * (len(m.gens) - n)
            x = WMorphism(ShiftedObject(a), ShiftedObject(a), t, v)
            if P.projection(x) != tuple(ebar):
                continue
            xx = P.compose(x, x)
            if P.equal(xx, P.compose(P.unit(a, t), x)):
                return t
    return INF


@pytest.mark.parametrize("p", [2, 3, 5])
def test_min_weight_of_e_infinity_over_fp(p):
    P = catalog.one_object_ae(Field.prime(p))
    res = idem.min_representation_weight(P, STAR, (0, 1))
    assert res.lower == res.upper == 1 and res.exact
    assert brute_idempotent_weights(P, STAR, (0, 1), [0, Fraction(1, 2), 1]) == 1


def test_min_weight_over_q():
    P = catalog.one_object_ae(Field.rational())
    res = idem.min_representation_weight(P, STAR, (0, 1))
    assert res.upper == 1
    assert idem.is_weighted_idempotent(P, res.rep.e)


def test_min_weight_trivial_cases(ae):
    one = ae.stable_identity(STAR)
    assert idem.min_representation_weight(ae, STAR, one).upper == 0
    assert idem.min_representation_weight(ae, STAR, (0, 0)).upper == 0
    if ae.field.p != 2:
        with pytest.raises(ValueError):
            idem.min_representation_weight(ae, STAR, (1, 1))


@pytest.mark.parametrize("seed", range(4))
def test_min_weight_against_enumeration(seed):
    field = Field.prime(2)
    H, _ = random_hfch(field, seed)
    P = H.P
    for a in P.objects:
        m = P.hom(a, a)
        if len(m.gens) > 7:
            continue
        ids, complete = idem.stable_idempotents(P, a)
        assert complete
        for eb in ids:
            res = idem.min_representation_weight(P, a, eb)
            grid = idem.refined_grid(P, a, max(P.rmax, m.r_stab))
            assert res.upper == brute_idempotent_weights(P, a, eb, grid)
            assert res.exact


def test_stable_idempotents_of_one_object(ae):
    ids, complete = idem.stable_idempotents(ae, STAR)
    F = ae.field
    want = {(F(0), F(0)), (F(1), F(0)), (F(0), F(1)), (F(1), F(-1))}
    assert set(map(tuple, ids)) == want
    assert complete == F.is_prime
