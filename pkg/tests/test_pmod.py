import random
from fractions import Fraction

import pytest

import oracle
from pkaroubi.field import INF, Field
from pkaroubi.pmod import (FPModule, PModMorphism, barcode, compose_morphisms, direct_sum, eval_stable,
                           factor_through, identity_morphism, interval, kernel, kernel_subquotient,
                           shift_module, zero_module, zero_morphism)

Q = Field.rational()
half = Fraction(1, 2)


def two_gen(field=Q):
    return FPModule(field, [("x", 0), ("y", 1)], [(3, (1, 1))])


def random_module(field, rng):
    n = rng.randint(1, 4)
    gens = [("g%d" % i, Fraction(rng.randint(0, 6), 2)) for i in range(n)]
    rels = []
    for _ in range(rng.randint(0, 3)):
        w = Fraction(rng.randint(0, 8), 2)
        vec = [rng.choice([0, 1, -1, 2]) if b <= w else 0 for _, b in gens]
        rels.append((w, vec))
    return FPModule(field, gens, rels)


# dim_at

def test_dim_interval():
    m = interval(Q, 0, 2)
    assert m.dim_at(1) == 1
    assert m.dim_at(-1) == 0
    assert m.dim_at(2) == 0


def test_dim_two_generators_against_oracle():
    m = two_gen()
    assert m.dim_at(2) == oracle.module_dim(m, 2) == 2
    assert m.dim_at(4) == oracle.module_dim(m, 4) == 1


@pytest.mark.parametrize("p", [0, 2, 3, 5])
def test_dim_random_modules(p):
    field = Field.prime(p) if p else Q
    rng = random.Random(p)
    for _ in range(40):
        m = random_module(field, rng)
        for t in m.grid_with_midpoints():
            assert m.dim_at(t) == oracle.module_dim(m, t)


# structure maps

def test_structure_map_interval():
    m = interval(Q, 0, 2)
    assert m.structure_map(1, Fraction(3, 2)) == [(1,)]
    assert m.structure_map(1, 2) == []


def test_structure_map_rejects_decreasing_levels():
    with pytest.raises(ValueError):
        two_gen().structure_map(2, 1)


def test_structure_map_rank_two_generators():
    m = two_gen()
    mat = m.structure_map(2, 4)
    assert oracle.rank(mat, m.dim_at(2), Q) == 1 == oracle.module_rank(m, 2, 4)


def test_structure_maps_compose_on_grid():
    rng = random.Random(7)
    for _ in range(25):
        m = random_module(Q, rng)
        pts = m.grid_with_midpoints()
        for i, r in enumerate(pts):
            assert m.structure_map(r, r) == [tuple(Q.one if a == b else Q.zero for b in range(m.dim_at(r)))
                                             for a in range(m.dim_at(r))]
            for s in pts[i:]:
                for t in pts[pts.index(s):][:3]:
                    a, b = m.structure_map(r, s), m.structure_map(s, t)
                    prod = [tuple(sum((b[k][j] * a[j][c] for j in range(len(a))), Q.zero)
                                  for c in range(m.dim_at(r))) for k in range(len(b))]
                    assert prod == m.structure_map(r, t)
                assert oracle.rank(m.structure_map(r, s), m.dim_at(r), Q) == oracle.module_rank(m, r, s)


# kernels

def test_kernel_of_zero_map():
    m = interval(Q, 0, 2)
    K, inc = kernel(zero_morphism(m, m))
    assert barcode(K).bars == ((0, 2),)
    assert inc.shift == 0


def test_kernel_of_identity_is_zero():
    m = two_gen()
    K, _ = kernel(identity_morphism(m))
    assert all(K.dim_at(t) == 0 for t in m.grid_with_midpoints())


def test_kernel_of_interval_map():
    # x in [0,3) goes to y in [1,3) one step later; x_t survives in y_{t+1} only while t + 1 < 3
    src, tgt = interval(Q, 0, 3, "x"), interval(Q, 1, 3, "y")
    f = PModMorphism(src, tgt, 1, [(1,)])
    K, inc = kernel(f)
    assert barcode(K).bars == ((2, 3),)
    for t in src.grid_with_midpoints():
        nullity = src.dim_at(t) - oracle.rank(f.matrix_at(t), src.dim_at(t), Q)
        assert K.dim_at(t) == nullity
    assert compose_morphisms(f, inc).is_zero()


def test_kernel_universal_property():
    m = FPModule(Q, [("a", 0), ("b", 0), ("c", 1)], [(2, (1, -1, 0))])
    n = FPModule(Q, [("u", 0), ("v", 1)], [(3, (0, 1))])
    f = PModMorphism(m, n, 0, [(1, 0), (1, 0), (0, 1)])
    sq = kernel_subquotient(f)
    K, inc = sq.module, sq.inclusion()
    assert compose_morphisms(f, inc).is_zero()
    for t in sorted(set(m.grid_with_midpoints()) | set(n.grid_with_midpoints())):
        nullity = m.dim_at(t) - oracle.rank(f.matrix_at(t), m.dim_at(t), Q)
        assert K.dim_at(t) == nullity
    # g = (a - b) born at 0 satisfies f∘g = 0 and factors through the kernel
    g = PModMorphism(interval(Q, 0, name="z"), m, 0, [(1, -1, 0)])
    assert compose_morphisms(f, g).is_zero()
    h = factor_through(sq, g)
    assert compose_morphisms(inc, h).equals(g)


# barcodes

def test_barcode_examples():
    assert barcode(interval(Q, 0, 2)).bars == ((0, 2),)
    assert barcode(two_gen()).bars == ((0, INF), (1, 3))
    assert barcode(zero_module(Q)).bars == ()


@pytest.mark.parametrize("p", [0, 2, 3])
def test_barcode_counts_match_dimensions(p):
    field = Field.prime(p) if p else Q
    rng = random.Random(100 + p)
    for _ in range(40):
        m = random_module(field, rng)
        bc = barcode(m)
        for t in m.grid_with_midpoints():
            assert bc.count_at(t) == oracle.module_dim(m, t)


# shifts, sums, stable values

def test_shift_examples():
    m = two_gen()
    assert shift_module(m, 0) == m
    # births move by +a, so S^{-1}[0,2) is [-1,1)
    assert barcode(shift_module(interval(Q, 0, 2), -1)).bars == ((-1, 1),)
    assert shift_module(shift_module(m, half), Fraction(3, 2)) == shift_module(m, 2)
    for t in m.grid_with_midpoints():
        assert shift_module(m, half).dim_at(t) == m.dim_at(t - half)


def test_shift_is_invertible():
    rng = random.Random(3)
    for _ in range(20):
        m = random_module(Q, rng)
        a = Fraction(rng.randint(-4, 4), 2)
        assert shift_module(shift_module(m, a), -a) == m


def test_direct_sum_and_stable_values():
    m = two_gen()
    assert direct_sum(m, zero_module(Q)) == m
    assert eval_stable(interval(Q, 0, 2))[0] == ()
    assert len(eval_stable(interval(Q, 1))[0]) == 1
    names, rs = eval_stable(m)
    assert len(names) == 1 == oracle.module_dim(m, 3)
    assert rs == 3


def test_direct_sum_dimensions_add():
    rng = random.Random(11)
    for _ in range(20):
        m, n = random_module(Q, rng), random_module(Q, rng)
        s = direct_sum(m, n)
        for t in sorted(set(m.grid_with_midpoints()) | set(n.grid_with_midpoints())):
            assert s.dim_at(t) == oracle.module_dim(m, t) + oracle.module_dim(n, t)


def test_compose_rejects_mismatched_endpoints():
    m, n = interval(Q, 0, 2), interval(Q, 1, 3)
    with pytest.raises(ValueError):
        compose_morphisms(identity_morphism(m), identity_morphism(n))


def test_relation_touching_later_generator_rejected():
    with pytest.raises(ValueError):
        FPModule(Q, [("x", 2)], [(1, (1,))])
