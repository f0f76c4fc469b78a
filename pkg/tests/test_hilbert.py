import pytest

from toresolve.cones import ConeError, dual_cone, make_cone
from toresolve.hilbert import (
    embedding_dimension,
    floor_facets,
    hilbert_basis,
    toric_relations,
)
from toresolve.lattice import LatticeVector

from conftest import box_hilbert_oracle, random_pointed_cone


def V(*coords):
    return LatticeVector(tuple(coords))


def members(c):
    return [m.coords for m in hilbert_basis(c).members]


def test_first_orthant_units():
    for r in (2, 3, 4):
        c = make_cone([V(*(1 if i == j else 0 for j in range(r))) for i in range(r)])
        assert sorted(members(c)) == sorted(
            tuple(1 if i == j else 0 for j in range(r)) for i in range(r)
        )


def test_running_example_basis():
    # expected value frozen from the box-enumeration oracle
    c = make_cone([V(1, 0), V(4, 5)])
    assert box_hilbert_oracle(c) == [V(1, 0), V(1, 1), V(4, 5)]
    assert members(c) == [(1, 0), (1, 1), (4, 5)]


def test_dual_cone_basis_tridiagonal_family():
    # k_0=(0,1), k_5=(5,-4) with interior members k_i=(i,1-i) solving the
    # tridiagonal system whose diagonal is the continued fraction of 5/4
    c = make_cone([V(0, 1), V(5, -4)])
    expected = sorted([(0, 1), (1, 0), (2, -1), (3, -2), (4, -3), (5, -4)])
    assert members(c) == expected
    # the three-term relations k_{i-1} + k_{i+1} = 2 k_i hold
    chain = [(0, 1), (1, 0), (2, -1), (3, -2), (4, -3), (5, -4)]
    for i in range(1, 5):
        assert tuple(
            a + b for a, b in zip(chain[i - 1], chain[i + 1])
        ) == tuple(2 * x for x in chain[i])


def test_non_pointed_rejected():
    halfplane = dual_cone(make_cone([V(1, 0, 0)]))
    with pytest.raises(ConeError):
        hilbert_basis(halfplane)


def test_embedding_dimension_examples():
    assert embedding_dimension(make_cone([V(1, 0), V(4, 5)])) == 6
    fig = make_cone([V(-3, 3, 1), V(3, 1, 1), V(0, -3, 1)])
    assert embedding_dimension(fig) == 14
    for r in (2, 3):
        basic = make_cone([V(*(1 if i == j else 0 for j in range(r))) for i in range(r)])
        assert embedding_dimension(basic) == r


def test_embedding_dimension_requires_full_dimension():
    ray = make_cone([V(1, 0, 0)])
    with pytest.raises(ConeError):
        embedding_dimension(ray)


def test_toric_relations_smooth_empty():
    c = make_cone([V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)])
    assert toric_relations(c, 3) == []


def test_toric_relations_running_example_count():
    # the rank-one condition on the 2x5 matrix yields C(5,2) = 10 binomials
    c = make_cone([V(1, 0), V(4, 5)])
    rels = toric_relations(c, 2)
    assert len(rels) == 10
    basis = hilbert_basis(dual_cone(c)).members
    for r in rels:
        left = [0] * len(basis[0].coords)
        right = list(left)
        for e, b in zip(r.left, basis):
            left = [x + e * y for x, y in zip(left, b.coords)]
        for e, b in zip(r.right, basis):
            right = [x + e * y for x, y in zip(right, b.coords)]
        assert tuple(left) == tuple(right) == r.image


def test_toric_relations_cone_over_square():
    c = make_cone([V(0, 0, 1), V(1, 0, 1), V(0, 1, 1), V(1, 1, 1)])
    rels = toric_relations(c, 2)
    assert len(rels) == 1
    assert sum(rels[0].left) == sum(rels[0].right) == 2


def test_hilbert_oracle_equivalence(rng):
    checked = 0
    while checked < 40:
        c = random_pointed_cone(rng, rng.choice([2, 3]))
        if c is None or not c.is_full_dimensional:
            continue
        assert list(hilbert_basis(c).members) == box_hilbert_oracle(c)
        checked += 1


def test_minimality_of_basis(rng):
    checked = 0
    while checked < 10:
        c = random_pointed_cone(rng, rng.choice([2, 3]), coord_bound=4)
        if c is None or not c.is_full_dimensional:
            continue
        basis = list(hilbert_basis(c).members)
        for leave_out in basis:
            others = [b for b in basis if b != leave_out]
            assert not _generated_by(c, leave_out, others), (
                [g.coords for g in c.generators],
                leave_out,
            )
        checked += 1


def _generated_by(cone, target, generators):
    """Bounded search for a nonnegative integer combination reaching target."""
    seen = set()
    stack = [target]
    while stack:
        v = stack.pop()
        if v.is_zero:
            return True
        if v.coords in seen:
            continue
        seen.add(v.coords)
        for g in generators:
            w = v - g
            if cone.contains(w):
                stack.append(w)
    return False


def test_generators_are_members_and_ray_members_are_primitive(rng):
    from toresolve.lattice import primitive

    checked = 0
    while checked < 20:
        c = random_pointed_cone(rng, rng.choice([2, 3]))
        if c is None or not c.is_full_dimensional:
            continue
        checked += 1
        hb = hilbert_basis(c)
        gen_set = {g.coords for g in c.generators}
        assert gen_set <= {m.coords for m in hb.members}
        for m in hb.members:
            # a member on an extreme ray is the primitive generator itself
            if primitive(m).coords in gen_set:
                assert m.coords in gen_set


def test_edim_at_least_rank_with_equality_iff_basic(rng):
    from toresolve.cones import is_basic

    checked = 0
    while checked < 25:
        c = random_pointed_cone(rng, rng.choice([2, 3]), coord_bound=3)
        if c is None or not c.is_full_dimensional:
            continue
        checked += 1
        e = embedding_dimension(c)
        assert e >= c.lattice_rank
        assert (e == c.lattice_rank) == is_basic(c)


def test_floor_facets_running_example():
    c = make_cone([V(1, 0), V(4, 5)])
    fls = floor_facets(c)
    pts = sorted(p.coords for facet in fls for p in facet)
    assert pts == [(1, 0), (1, 1), (1, 1), (4, 5)]  # two segments sharing (1,1)


def test_floor_facet_of_canonical_cone_is_single():
    fig = make_cone([V(-3, 3, 1), V(3, 1, 1), V(0, -3, 1)])
    fls = floor_facets(fig)
    assert len(fls) == 1
    assert {p.coords for p in fls[0]} >= {(-3, 3, 1), (3, 1, 1), (0, -3, 1)}
