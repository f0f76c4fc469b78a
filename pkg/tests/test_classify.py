import itertools
from fractions import Fraction

import pytest

from toresolve.classify import (
    ClassifyError,
    LatticePolytope,
    classify,
    convex_hull_2d,
    gorenstein_data,
    height_one_polytope,
    index_one_cover,
    is_elementary,
    is_nakajima,
    lri_general_section,
)
from toresolve.cones import make_cone
from toresolve.lattice import Covector, IntMatrix, LatticeVector

from conftest import nakajima_construction_oracle, random_polygon


def V(*coords):
    return LatticeVector(tuple(coords))


FIG_CONE = [V(-3, 3, 1), V(3, 1, 1), V(0, -3, 1)]


def test_gorenstein_data_examples():
    m, index = gorenstein_data(make_cone(FIG_CONE))
    assert m == Covector((0, 0, 1)) and index == 1
    square = make_cone([V(0, 0, 1), V(1, 0, 1), V(0, 1, 1), V(1, 1, 1)])
    m, index = gorenstein_data(square)
    assert m == Covector((0, 0, 1)) and index == 1
    # grading of an index-two cone (the spec's (1,1/2) interpolant belongs
    # to pos{(1,0),(-1,4)}; for pos{(1,0),(1,2)} the interpolant is (1,0))
    m, index = gorenstein_data(make_cone([V(1, 0), V(-1, 4)]))
    assert m == Covector((1, Fraction(1, 2))) and index == 2
    m, index = gorenstein_data(make_cone([V(1, 0), V(1, 2)]))
    assert m == Covector((1, 0)) and index == 1


def test_gorenstein_data_absent():
    c = make_cone([V(1, 0, 0), V(0, 1, 0), V(0, 0, 1), V(2, 2, -1)])
    assert len(c.generators) == 4
    assert gorenstein_data(c) is None


def test_classify_running_example():
    r = classify(make_cone([V(1, 0), V(4, 5)]))
    assert not r.smooth
    assert r.q_factorial
    assert r.q_gorenstein == (Covector((1, Fraction(-3, 5))), 5)
    assert r.log_terminal and not r.canonical and not r.terminal
    assert r.embedding_dim == 6
    assert r.rational


def test_classify_fig_cone():
    r = classify(make_cone(FIG_CONE))
    assert r.gorenstein and r.q_gorenstein[1] == 1
    assert r.canonical and not r.terminal  # 19 lattice points at height one
    assert r.embedding_dim == 14
    assert r.lci is False


def test_classify_basic_cone_everything_true():
    r = classify(make_cone([V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)]))
    assert r.smooth and r.q_factorial and r.gorenstein
    assert r.terminal and r.canonical and r.log_terminal
    assert r.lci is True and r.embedding_dim == 3


def test_classify_implication_chain(rng):
    from conftest import random_pointed_cone

    checked = 0
    while checked < 30:
        c = random_pointed_cone(rng, rng.choice([2, 3]), coord_bound=3)
        if c is None or not c.is_full_dimensional:
            continue
        checked += 1
        r = classify(c)
        if r.smooth:
            assert r.terminal
        if r.terminal:
            assert r.canonical
        if r.canonical:
            assert r.log_terminal
        if r.gorenstein:
            assert r.q_gorenstein is not None and r.q_gorenstein[1] == 1
        assert r.log_terminal == (r.q_gorenstein is not None)
        assert r.rational


def test_classify_invariant_under_unimodular_maps(rng):
    from conftest import random_pointed_cone, unimodular_2x2

    mats = [m for m in unimodular_2x2(2)]
    checked = 0
    while checked < 10:
        c = random_pointed_cone(rng, 2, coord_bound=4)
        if c is None or not c.is_full_dimensional:
            continue
        checked += 1
        r = classify(c)
        (a, b), (d, e) = mats[rng.randrange(len(mats))]
        mapped = make_cone(
            [V(a * g.coords[0] + b * g.coords[1], d * g.coords[0] + e * g.coords[1]) for g in c.generators]
        )
        r2 = classify(mapped)
        assert (r.smooth, r.q_factorial, r.gorenstein, r.terminal, r.canonical,
                r.log_terminal, r.embedding_dim) == (
            r2.smooth, r2.q_factorial, r2.gorenstein, r2.terminal, r2.canonical,
            r2.log_terminal, r2.embedding_dim)
        if r.q_gorenstein:
            assert r.q_gorenstein[1] == r2.q_gorenstein[1]


def test_low_dimensional_cone_classified_through_span():
    # a 2-dimensional singular cone embedded in rank 3
    c = make_cone([V(1, 0, 0), V(4, 5, 0)])
    r = classify(c)
    assert not r.smooth and r.q_factorial and r.embedding_dim == 6


def test_is_elementary_examples():
    assert is_elementary(LatticePolytope.from_points([(0, 0), (1, 0), (0, 1)]))
    assert is_elementary(LatticePolytope.from_points([(0, 0), (1, 0), (0, 1), (1, 1)]))
    assert not is_elementary(LatticePolytope.from_points([(0, 0), (2, 0), (0, 2)]))


def test_nakajima_spot_checks_against_oracle():
    """The stacked-polytope decision agrees with the literal construction oracle.

    Note the doubled basic triangle: it maps to {0<=x<=2, 0<=y<=x} by the
    shear (x, y) -> (x + y, y), so it is stacked (the chart over it is the
    hypersurface z1 z2 z3 = z4^2); the spec's expected value for it
    contradicts the construction and is recorded in the decisions ledger.
    """
    basic = LatticePolytope.from_points([(0, 0), (1, 0), (0, 1)])
    square = LatticePolytope.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
    doubled = LatticePolytope.from_points([(0, 0), (2, 0), (0, 2)])
    for p in (basic, square, doubled):
        assert is_nakajima(p) == nakajima_construction_oracle(p)
    assert is_nakajima(basic)
    assert is_nakajima(square)
    assert is_nakajima(doubled)


def test_nakajima_negative_cases():
    # an elementary quadrilateral that is not a parallelogram-like stack
    p = LatticePolytope.from_points([(0, 0), (2, 0), (3, 1), (0, 2)])
    assert is_nakajima(p) == nakajima_construction_oracle(p)
    # polygons with five or more vertices are never stacked
    penta = LatticePolytope.from_points([(-2, 2), (-1, 2), (2, 1), (2, 0), (0, -2)])
    assert not is_nakajima(penta)


def test_nakajima_oracle_agreement_random(rng):
    checked = 0
    while checked < 25:
        p = random_polygon(rng, bound=2, max_pts=5)
        if p is None:
            continue
        checked += 1
        assert is_nakajima(p) == nakajima_construction_oracle(p), p.vertices


def test_nakajima_low_dimensions_and_out_of_scope():
    assert is_nakajima(LatticePolytope.from_points([(3, 4)]))
    assert is_nakajima(LatticePolytope.from_points([(0, 0), (3, 0)]))
    with pytest.raises(ClassifyError):
        is_nakajima(LatticePolytope(vertices=((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))))


def test_lri_general_section():
    assert lri_general_section(make_cone(FIG_CONE)) == 13
    c = make_cone([V(0, 0, 1), V(2, 0, 1), V(0, 2, 1)])
    # the doubled triangle has embedding dimension 4 < 5: analytic case rejected
    with pytest.raises(ClassifyError):
        lri_general_section(c)
    with pytest.raises(ClassifyError):
        lri_general_section(make_cone([V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)]))


def test_lri_derived_example():
    from toresolve.hilbert import embedding_dimension

    c = make_cone([V(0, 0, 1), V(3, 0, 1), V(0, 3, 1)])
    e = embedding_dimension(c)
    if e >= 5:
        assert lri_general_section(c) == e - 1


def test_index_one_cover_examples():
    c = make_cone([V(1, 0), V(4, 5)])
    cover, cert = index_one_cover(c)
    assert cert.index == 5
    assert abs(cert.sublattice_basis.det()) == 5
    assert gorenstein_data(cover)[1] == 1
    c2 = make_cone([V(1, 0), V(-1, 4)])
    cover2, cert2 = index_one_cover(c2)
    assert cert2.index == 2 and gorenstein_data(cover2)[1] == 1
    with pytest.raises(ClassifyError, match="already index one"):
        index_one_cover(make_cone([V(1, 0), V(1, 2)]))


def test_index_one_cover_preserves_real_cone():
    c = make_cone([V(1, 0), V(4, 5)])
    cover, cert = index_one_cover(c)
    b = cert.sublattice_basis
    mapped = make_cone([b.apply(g) for g in cover.generators])
    assert mapped == c


def test_terminal_gorenstein_iff_elementary_small_sample():
    pts = list(itertools.product(range(3), repeat=2))
    for comb in itertools.combinations(pts, 3):
        if len(convex_hull_2d(list(comb))) != 3:
            continue
        cone = make_cone([V(p[0], p[1], 1) for p in comb])
        r = classify(cone)
        assert r.terminal == is_elementary(LatticePolytope.from_points(comb))


def test_height_one_polytope_fig_cone_identity():
    c = make_cone(FIG_CONE)
    m, _ = gorenstein_data(c)
    p, basis = height_one_polytope(c, m)
    assert basis == IntMatrix.identity(3)
    assert set(p.vertices) == {(-3, 3), (3, 1), (0, -3)}
