"""Shared brute-force oracles and generators for the test suite.

The oracles are deliberately independent of the library's own algorithms:
lattice points are enumerated over bounding boxes and filtered, and the
stacked-polytope oracle tries explicit unimodular maps against the literal
construction.
"""

import itertools
import random

import pytest

from toresolve.cones import Cone, ConeError, make_cone
from toresolve.classify import LatticePolytope, convex_hull_2d
from toresolve.lattice import LatticeVector


def box_hilbert_oracle(c: Cone) -> list[LatticeVector]:
    """Hilbert basis by enumerating cone points in the generator zonotope box
    and filtering sums; independent of the triangulation route."""
    rank = c.lattice_rank
    corners = []
    for coeffs in itertools.product((0, 1), repeat=len(c.generators)):
        s = [0] * rank
        for t, g in zip(coeffs, c.generators):
            if t:
                s = [a + b for a, b in zip(s, g.coords)]
        corners.append(s)
    los = [min(cs[i] for cs in corners) for i in range(rank)]
    his = [max(cs[i] for cs in corners) for i in range(rank)]
    pts = []
    for p in itertools.product(*(range(lo, hi + 1) for lo, hi in zip(los, his))):
        v = LatticeVector(p)
        if not v.is_zero and c.contains(v):
            pts.append(v)
    xi = [0] * rank
    for m in c.inequalities:
        mp = m.primitive()
        for i in range(rank):
            xi[i] += int(mp.coords[i])
    weight = lambda v: sum(a * b for a, b in zip(xi, v.coords))
    pts.sort(key=weight)
    weights = [weight(v) for v in pts]
    basis = []
    for v, w in zip(pts, weights):
        # a reducible element has an irreducible summand of weight <= w/2,
        # and irreducible elements always lie inside the enumeration box
        reducible = False
        for a, wa in zip(pts, weights):
            if 2 * wa > w:
                break
            if c.contains(v - a) and not (v - a).is_zero:
                reducible = True
                break
        if not reducible:
            basis.append(v)
    return sorted(basis)


def random_pointed_cone(rng: random.Random, rank: int, coord_bound: int = 6, max_gens: int = 4):
    """A random pointed cone, or None when the draw contains a line."""
    k = rng.randint(2, max_gens)
    vs = [
        LatticeVector(tuple(rng.randint(-coord_bound, coord_bound) for _ in range(rank)))
        for _ in range(k)
    ]
    try:
        c = make_cone(vs)
    except (ConeError, ValueError):
        return None
    return c


def random_polygon(rng: random.Random, bound: int = 4, max_pts: int = 6):
    """A random 2D lattice polygon with vertices in [-bound, bound]^2, or None."""
    pts = [(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(rng.randint(3, max_pts))]
    hull = convex_hull_2d(pts)
    if len(hull) < 3:
        return None
    return LatticePolytope.from_points(hull)


def gorenstein_cone_over(polygon: LatticePolytope) -> Cone:
    return make_cone([LatticeVector((p[0], p[1], 1)) for p in polygon.vertices])


def unimodular_2x2(bound: int = 5):
    """All unimodular 2x2 integer matrices with entries in [-bound, bound]."""
    mats = []
    rng_range = range(-bound, bound + 1)
    for a, b, c, d in itertools.product(rng_range, repeat=4):
        if a * d - b * c in (1, -1):
            mats.append(((a, b), (c, d)))
    return mats


_UNIMODULAR_CACHE: dict[int, list] = {}


def nakajima_construction_oracle(p: LatticePolytope, bound: int = 5) -> bool:
    """Literal stacked-construction search composed with bounded unimodular maps.

    For each unimodular map with entries in [-bound, bound], the image of the
    polytope (suitably translated) is tested verbatim against the inductive
    construction 0 <= x <= c, 0 <= y <= slope*x + h with integer data.
    """
    if p.dimension < 2:
        return True
    if bound not in _UNIMODULAR_CACHE:
        _UNIMODULAR_CACHE[bound] = unimodular_2x2(bound)
    verts = list(p.vertices)
    for (a, b), (c, d) in _UNIMODULAR_CACHE[bound]:
        imgs = [(a * x + b * y, c * x + d * y) for x, y in verts]
        for corner in imgs:
            moved = sorted((x - corner[0], y - corner[1]) for x, y in imgs)
            if _is_literal_stacked(moved):
                return True
    return False


def _is_literal_stacked(verts) -> bool:
    if any(y < 0 for _, y in verts):
        return False
    bottom = sorted(v for v in verts if v[1] == 0)
    if len(bottom) != 2 or bottom[0] != (0, 0):
        return False
    c = bottom[1][0]
    if c <= 0:
        return False
    top = [v for v in verts if v[1] > 0]
    if len(top) + 2 != len(verts) or len(top) not in (1, 2):
        return False
    if len(top) == 1:
        (x, h) = top[0]
        return x in (0, c) and h % c == 0
    (x0, h0), (x1, h1) = sorted(top)
    return x0 == 0 and x1 == c and (h1 - h0) % c == 0


@pytest.fixture
def rng():
    return random.Random(987654321)
