import random
from dataclasses import replace
from fractions import Fraction

import pytest

import oracle
from conftest import ALL_FIELDS, F2, F3, QQ
from pkaroubi import fchain, idem
from pkaroubi.fchain import ChainMap, FilteredComplex
from pkaroubi.field import INF


def interval_complex(field, r, name="I"):
    return FilteredComplex(field, [("x", 0, 0), ("y", 1, r)], {"y": {"x": 1}}, name)


def block_sum(f, g, S, lev):
    """f ⊕ g on a direct sum S of their sources (tags 1:/2:)."""
    ent = {("1:" + y, "1:" + x): c for (y, x), c in f.entries.items()}
    ent.update({("2:" + y, "2:" + x): c for (y, x), c in g.entries.items()})
    return ChainMap(S, S, lev, ent)


def oracle_bars_agree(C):
    """Barcode-derived homology ranks match the sympy oracle on the whole grid."""
    pts = sorted(set(oracle.levels(C)) | {Fraction(-1)})
    pts = pts + [pts[-1] + 1]
    bcs = fchain.homology_barcodes(C)
    for n in sorted(set(C.degrees())):
        bars = bcs[n].bars if n in bcs else ()
        for i, t in enumerate(pts):
            for s in pts[i:]:
                want = oracle.homology_rank(C, t, s, n)
                got = sum(1 for b, d in bars if b <= t and (d is INF or s < d))
                if want != got:
                    return False
    return True


def test_interval_homology(field):
    for r in (Fraction(1, 2), 2):
        C = interval_complex(field, r)
        assert fchain.homology_barcodes(C)[0].bars == ((0, r),)
        assert oracle.homology_dim(C, 0, 0) == 1 and oracle.homology_dim(C, r, 0) == 0
        assert oracle_bars_agree(C)


@pytest.mark.parametrize("seed", range(8))
def test_random_homology_against_oracle(seed):
    rng = random.Random(seed)
    for field in (F2, F3, QQ):
        C = fchain.random_complex(field, rng, pieces=3, degrees=(0, 1, 2))
        assert oracle_bars_agree(C)
        for t in oracle.levels(C):
            for n in C.degrees():
                assert fchain.homology_at(C, t, n) == oracle.homology_dim(C, t, n)


def test_validation_rejects_bad_differentials(field):
    late = FilteredComplex(field, [("x", 0, 2), ("y", 1, 1)], {"y": {"x": 1}}, "late")
    rep = fchain.validate_fcc(late)
    assert [c.name for c in rep.failures()] == ["filtered"]
    sq = FilteredComplex(field, [("x", 0, 0), ("y", 1, 0), ("z", 2, 0)],
                         {"y": {"x": 1}, "z": {"y": 1}}, "dd")
    assert "d_squared_zero" in [c.name for c in fchain.validate_fcc(sq).failures()]
    with pytest.raises(ValueError):
        fchain.require_valid(late)


def test_cones(field):
    rng = random.Random(1)
    A = fchain.random_complex(field, rng, pieces=3)
    B = fchain.random_complex(field, rng, pieces=2, name="B")
    K, _, _ = fchain.cone(fchain.identity_map(A))
    assert fchain.barcode_signature(K) == ()
    assert all(oracle.homology_dim(K, t, n) == 0 for t in oracle.levels(K) for n in K.degrees())
    K0, _, _ = fchain.cone(fchain.zero_map(A, B))
    want = fchain.barcode_signature(fchain.direct_sum(A.T(), B))
    assert fchain.barcode_signature(K0) == want


@pytest.mark.parametrize("seed", range(20))
def test_eta_cone_is_r_acyclic(seed):
    rng = random.Random(100 + seed)
    field = [F2, F3, QQ][seed % 3]
    A = fchain.random_complex(field, rng, pieces=rng.choice([1, 2, 3]))
    r = rng.choice([Fraction(1, 2), Fraction(1), Fraction(3, 2)])
    tri = fchain.eta_triangle(A, r)
    assert fchain.is_r_acyclic(tri.C, r) and fchain.is_r_acyclic_hom(tri.C, r)
    assert oracle.is_r_acyclic(tri.C, r)
    assert fchain.is_strict_exact(tri)


def test_eta_cone_is_not_acyclic_below_r(field):
    A = FilteredComplex(field, [("x", 0, 0)], {}, "A")
    tri = fchain.eta_triangle(A, 2)
    assert fchain.is_r_acyclic(tri.C, 2)
    assert not fchain.is_r_acyclic(tri.C, 1) and not oracle.is_r_acyclic(tri.C, 1)


def test_corrupted_witness_fails(field):
    # an η-cone is r-acyclic, so φ = 0 would pass there; use a cone with an infinite bar
    A = interval_complex(field, 3, "A")
    B = FilteredComplex(field, [("b", 0, 0)], {}, "B")
    _, tri = fchain.mapping_cone(fchain.zero_map(A, B, 1), 1)
    assert fchain.is_strict_exact(tri)
    bad = replace(tri.witness, phi=fchain.zero_map(tri.C, tri.witness.Cp, 1))
    rep = fchain.strict_exact_report(tri, witness=bad)
    assert not rep.ok
    assert "f_phi_is_eta" in [c.name for c in rep.failures()]


def test_eta_zero_triangle(field):
    A = interval_complex(field, 2, "A")
    assert fchain.is_strict_exact(fchain.eta_zero_triangle(A, 1))


@pytest.mark.parametrize("seed", range(6))
def test_les_and_naturality(seed):
    rng = random.Random(seed)
    field = [F2, F3][seed % 2]
    A = fchain.random_complex(field, rng, pieces=2)
    B = fchain.random_complex(field, rng, pieces=2, name="B")
    f = fchain.random_chain_map(A, B, 0, rng)
    _, tri = fchain.mapping_cone(f, 0)
    assert fchain.les_report(tri).ok
    assert fchain.is_strict_exact(tri)
    assert fchain.eta_naturality(f, Fraction(1))


def test_hom_additivity(field):
    rng = random.Random(7)
    A, B, C = [fchain.random_complex(field, rng, pieces=2, name=n) for n in "ABC"]
    rep = fchain.hom_additivity_report(A, B, C)
    assert rep.ok and rep.checks[0].detail["levels"] > 3


# the cone idempotent

def test_cone_extension_weight_zero(field):
    rng = random.Random(3)
    S, e = fchain.random_split_idempotent(field, rng, 0, pieces=(1, 1))
    Bp, eB2 = fchain.random_split_idempotent(field, rng, 0, name="Q", pieces=(1, 1))
    B = fchain.direct_sum(S, Bp, name="B")
    eB = block_sum(e, eB2, B, 0)
    u = ChainMap(S, B, Fraction(0), {("1:" + n, n): field.one for n in S.names})
    _, tri = fchain.mapping_cone(u, 0)
    eC, k, rep = fchain.cone_extension(tri, e, eB)
    assert rep.ok and eC.r == 0
    ctx = fchain.HoCtx(field)
    assert ctx.equal(eC.e, k)


def random_ladder(field, rng, r):
    S, eA = fchain.random_split_idempotent(field, rng, r, pieces=(rng.choice([1, 2]), 1))
    Q, eQ = fchain.random_split_idempotent(field, rng, r, name="Q", pieces=(1, 1))
    B = fchain.direct_sum(S, Q, name="B")
    eB = block_sum(eA, eQ, B, r)
    u = ChainMap(S, B, Fraction(0), {("1:" + n, n): field.one for n in S.names})
    return S, B, u, eA, eB


@pytest.mark.parametrize("seed", range(20))
def test_cone_extension_random(seed):
    rng = random.Random(seed)
    field = [F2, F3, QQ][seed % 3]
    r = rng.choice([Fraction(1, 2), Fraction(1)])
    S, B, u, eA, eB = random_ladder(field, rng, r)
    _, tri = fchain.mapping_cone(u, 0)
    eC, k, rep = fchain.cone_extension(tri, eA, eB)
    assert rep.ok, rep.summary()
    assert eC.r == 3 * r
    assert idem.is_weighted_idempotent(fchain.HoCtx(field), eC.e, 3 * r)


def test_cone_extension_rejects_bad_ladder(field):
    A = FilteredComplex(field, [("x", 0, 0)], {}, "A")
    B = fchain.direct_sum(A, FilteredComplex(field, [("q", 0, 0)], {}, "Q"), name="B")
    u = ChainMap(A, B, Fraction(0), {("1:x", "x"): field.one})
    _, tri = fchain.mapping_cone(u, 0)
    eA, eB = fchain.identity_map(A, 1), fchain.identity_map(B, 1)
    with pytest.raises(ValueError):
        fchain.cone_extension(tri, eA, fchain.zero_map(B, B, 1))
    with pytest.raises(ValueError):
        fchain.cone_extension(tri, eA, eB, k=fchain.zero_map(tri.C, tri.C, 1))
    eC, k, rep = fchain.cone_extension(tri, eA, eB)
    assert rep.ok


@pytest.mark.parametrize("seed", range(5))
def test_rs_triangle(seed):
    rng = random.Random(seed)
    field = [F2, F3][seed % 2]
    r = rng.choice([Fraction(0), Fraction(1, 2)])
    s = rng.choice([Fraction(1, 2), Fraction(1)])
    A, eF = fchain.random_split_idempotent(field, rng, r, pieces=(1, 1))
    B, eG = fchain.random_split_idempotent(field, rng, s, name="B", pieces=(1, 1))
    y = fchain.random_chain_map(A, B, -s, rng)
    rs = fchain.complete_morphism_to_rs_triangle(A, B, eF, eG, y)
    assert rs.report.ok, rs.report.summary()
    assert (rs.a, rs.b) == (6 * (r + s), 3 * (r + s))


def test_rs_triangle_rejects_wrong_level(field):
    rng = random.Random(0)
    A, eF = fchain.random_split_idempotent(field, rng, 0, pieces=(1, 1))
    B, eG = fchain.random_split_idempotent(field, rng, 1, name="B", pieces=(1, 1))
    with pytest.raises(ValueError):
        fchain.complete_morphism_to_rs_triangle(A, B, eF, eG, fchain.zero_map(A, B, 0))


@pytest.mark.parametrize("t", [0, 1])
def test_eta_rs_triangle(field, t):
    rng = random.Random(2)
    A, eF = fchain.random_split_idempotent(field, rng, Fraction(1, 2), pieces=(1, 1))
    rs = fchain.eta_rs_triangle(A, eF, t)
    assert rs.report.ok, rs.report.summary()
    assert (rs.r, rs.s) == (0, Fraction(1, 2))


def test_hfch_presentation_is_valid():
    rng = random.Random(4)
    A = fchain.random_complex(F3, rng, pieces=2, name="A")
    B = fchain.random_complex(F3, rng, pieces=2, name="B")
    H = fchain.HFCh({"A": A, "B": B})
    assert H.P.validate().ok
    f = fchain.random_chain_map(A, B, 1, rng)
    assert fchain.homotopic(H.chain_map(H.element(f)), f, 1)


@pytest.mark.parametrize("seed", range(6))
def test_retract_of_exact_triangle(seed):
    rng = random.Random(40 + seed)
    field = [F2, F3, QQ][seed % 3]
    A, B, A2, B2 = [fchain.random_complex(field, rng, pieces=2, name=n) for n in ("A", "B", "A2", "B2")]
    u, u2 = fchain.random_chain_map(A, B, 0, rng), fchain.random_chain_map(A2, B2, 0, rng)
    top, central, sec, ret = fchain.sum_retract_ladder(u, u2)
    rep = fchain.retract_triangle_report(top, central, sec, ret)
    assert rep.ok, rep.summary()
    assert oracle_bars_agree(top.C)


def test_retract_ladder_detects_broken_top(field):
    rng = random.Random(9)
    A, B = [fchain.random_complex(field, rng, pieces=2, name=n) for n in "AB"]
    u = fchain.random_chain_map(A, B, 0, rng)
    top, central, sec, ret = fchain.sum_retract_ladder(u, u)
    bad = replace(top, w=fchain.zero_map(top.C, top.w.tgt, 0))
    rep = fchain.retract_triangle_report(bad, central, sec, ret)
    assert {"section_ladder", "top_exact"} <= {c.name for c in rep.failures()}
