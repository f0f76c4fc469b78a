"""Singularity classification: the recapitulation-table flags plus polytope predicates.

A cone is graded by the rational functional equal to one on its generators
(when it exists); terminal/canonical are decided by enumerating the finite
slab of lattice points at grading at most one, Gorenstein by integrality
of the functional, and local-complete-intersection via the stacked-polytope
normal form of the height-one cross-section.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .cones import Cone, is_basic, make_cone, multiplicity
from .hilbert import _to_sublattice, embedding_dimension
from .lattice import (
    Covector,
    IntMatrix,
    LatticeVector,
    extended_gcd_vector,
    hyperplane_basis,
    integer_kernel,
    rational_solve,
)


class ClassifyError(ValueError):
    """Domain error raised by classification operations."""


# ---------------------------------------------------------------------------
# lattice polytopes (dimension <= 2 is all the pipeline needs)
# ---------------------------------------------------------------------------


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Vertices of the convex hull in counterclockwise order (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all collinear
        return [min(pts), max(pts)]
    return hull


@dataclass(frozen=True)
class LatticePolytope:
    """Convex lattice polytope of dimension <= 2, vertices in canonical cyclic order.

    Two-dimensional polytopes store their vertices counterclockwise starting
    from the lexicographically smallest one; lower-dimensional ones store
    them sorted.
    """

    vertices: tuple[tuple[int, ...], ...]

    @classmethod
    def from_points(cls, points) -> "LatticePolytope":
        pts = [tuple(int(x) for x in p) for p in points]
        if not pts:
            raise ClassifyError("empty point set")
        if len(pts[0]) == 2:
            hull = convex_hull_2d(pts)
            if len(hull) >= 3:
                start = hull.index(min(hull))
                hull = hull[start:] + hull[:start]
            return cls(vertices=tuple(hull))
        # dimension 0/1 in arbitrary ambient rank, or higher-rank input kept sorted
        uniq = sorted(set(pts))
        if len(uniq) > 2 and len(pts[0]) != 2:
            raise ClassifyError("only polytopes of dimension <= 2 are supported")
        return cls(vertices=tuple(uniq))

    @property
    def ambient_rank(self) -> int:
        return len(self.vertices[0])

    @property
    def dimension(self) -> int:
        from .cones import _rank

        v0 = self.vertices[0]
        return _rank([tuple(x - y for x, y in zip(v, v0)) for v in self.vertices[1:]])

    def edges(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        if self.dimension < 2:
            return []
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def area2(self) -> int:
        """Twice the euclidean area (the normalized lattice area)."""
        if self.dimension < 2:
            return 0
        s = 0
        n = len(self.vertices)
        for i in range(n):
            x0, y0 = self.vertices[i]
            x1, y1 = self.vertices[(i + 1) % n]
            s += x0 * y1 - x1 * y0
        return abs(s)

    def contains(self, p: tuple[int, ...]) -> bool:
        if self.dimension == 0:
            return tuple(p) == self.vertices[0]
        if self.dimension == 1:
            a, b = self.vertices
            return _on_segment(a, b, tuple(p))
        n = len(self.vertices)
        return all(
            _cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0
            for i in range(n)
        )

    def lattice_points(self) -> list[tuple[int, ...]]:
        if self.dimension == 0:
            return [self.vertices[0]]
        if self.dimension == 1:
            a, b = self.vertices
            return _segment_points(a, b)
        los = [min(v[i] for v in self.vertices) for i in range(2)]
        his = [max(v[i] for v in self.vertices) for i in range(2)]
        return [
            p
            for p in itertools.product(*(range(lo, hi + 1) for lo, hi in zip(los, his)))
            if self.contains(p)
        ]

    def boundary_points(self) -> list[tuple[int, ...]]:
        if self.dimension < 2:
            return self.lattice_points()
        out = []
        for a, b in self.edges():
            out.extend(_segment_points(a, b)[:-1])
        return out

    def interior_points(self) -> list[tuple[int, ...]]:
        boundary = set(self.boundary_points())
        return [p for p in self.lattice_points() if p not in boundary]

    def edge_interior_points(self) -> list[tuple[int, ...]]:
        out = []
        for a, b in self.edges():
            out.extend(_segment_points(a, b)[1:-1])
        return out

    def __repr__(self):
        return f"LatticePolytope{self.vertices}"


def _on_segment(a, b, p) -> bool:
    if len(a) == 2 and _cross(a, b, p) != 0:
        return False
    d = tuple(y - x for x, y in zip(a, b))
    v = tuple(y - x for x, y in zip(a, p))
    if len(a) != 2:
        # collinearity in arbitrary rank
        if any(v[i] * d[j] != v[j] * d[i] for i in range(len(a)) for j in range(len(a))):
            return False
    t_num, t_den = None, None
    for di, vi in zip(d, v):
        if di != 0:
            t_num, t_den = vi, di
            break
    if t_num is None:
        return all(x == 0 for x in v)
    if t_den < 0:
        t_num, t_den = -t_num, -t_den
    return 0 <= t_num <= t_den and all(vi * t_den == t_num * di for di, vi in zip(d, v))


def _segment_points(a, b) -> list[tuple[int, ...]]:
    d = tuple(y - x for x, y in zip(a, b))
    g = math.gcd(*d)
    if g == 0:
        return [tuple(a)]
    step = tuple(x // g for x in d)
    return [tuple(x + k * s for x, s in zip(a, step)) for k in range(g + 1)]


def lattice_length(a, b) -> int:
    """Number of primitive steps along the segment from a to b."""
    return math.gcd(*(y - x for x, y in zip(a, b)))


# ---------------------------------------------------------------------------
# classification of cone singularities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularityReport:
    """Flags of the singularity type dictionary for one cone."""

    smooth: bool
    q_factorial: bool
    q_gorenstein: tuple[Covector, int] | None
    gorenstein: bool
    terminal: bool
    canonical: bool
    log_terminal: bool
    lci: bool | None
    embedding_dim: int | None
    rational: bool = True


def gorenstein_data(c: Cone) -> tuple[Covector, int] | None:
    """The grading functional and index of a Q-Gorenstein cone, if any.

    Solves <m, v> = 1 for all generators over the rationals.  Returns the
    unique solution together with its denominator (the index); ``None``
    when the generators do not lie on a common affine hyperplane off the
    origin.  For index one the functional is integral and primitive and the
    generators lie on the corresponding primitive affine hyperplane.
    """
    if not c.is_pointed:
        raise ClassifyError("grading data requires a pointed cone")
    if not c.is_full_dimensional:
        raise ClassifyError(
            "grading data requires a full-dimensional cone; classify() projects "
            "low-dimensional cones to their span lattice first"
        )
    sol = rational_solve(list(c.generators), [1] * len(c.generators))
    if sol is None:
        return None
    m, free = sol
    if free:
        raise ClassifyError("unexpected underdetermined grading system")
    index = m.denominator
    if index == 1:
        mi = m.integral_vector()
        if math.gcd(*mi.coords) != 1:
            raise ClassifyError("integral grading functional fails to be primitive")
    return m, index


def _grading_slab_points(c: Cone, m: Covector) -> list[LatticeVector]:
    """Nonzero lattice points of the cone with grading value at most one.

    The slab is contained in the convex hull of the origin and the
    generators, so a bounding-box scan is exact and finite.
    """
    rank = c.lattice_rank
    los = [min(0, min(g.coords[i] for g in c.generators)) for i in range(rank)]
    his = [max(0, max(g.coords[i] for g in c.generators)) for i in range(rank)]
    out = []
    for p in itertools.product(*(range(lo, hi + 1) for lo, hi in zip(los, his))):
        v = LatticeVector(p)
        if v.is_zero or not c.contains(v):
            continue
        if m.pair(v) <= 1:
            out.append(v)
    return out


def height_one_polytope(c: Cone, m: Covector) -> tuple[LatticePolytope, IntMatrix]:
    """Cross-section polytope of a Gorenstein cone on its grading hyperplane.

    Returns the polytope in coordinates of a unimodular basis adapted to m
    (so the last coordinate is the grading) together with the basis matrix.
    """
    basis = hyperplane_basis(m)
    inv = basis.inverse_unimodular()
    pts = []
    for g in c.generators:
        coords = inv.apply(g).coords
        if coords[-1] != 1:
            raise ClassifyError("generator not on the grading hyperplane")
        pts.append(coords[:-1])
    return LatticePolytope.from_points(pts), basis


def classify(c: Cone) -> SingularityReport:
    """Full singularity report for a pointed cone.

    Low-dimensional cones are classified through their span lattice (the
    chart splits off a torus factor there).  ``rational`` is constitutively
    true for this class of singularities.
    """
    if not c.is_pointed:
        raise ClassifyError("classification requires a pointed cone")
    if not c.is_full_dimensional:
        small, _ = _to_sublattice(c)
        return classify(small)
    simplicial = c.is_simplicial
    smooth = simplicial and multiplicity(c) == 1
    gd = gorenstein_data(c)
    gorenstein = gd is not None and gd[1] == 1
    canonical = terminal = False
    if gd is not None:
        m, _index = gd
        slab = _grading_slab_points(c, m)
        below = [v for v in slab if m.pair(v) < 1]
        at_one = {v.coords for v in slab if m.pair(v) == 1}
        canonical = not below
        terminal = canonical and at_one == {g.coords for g in c.generators}
    lci: bool | None = None
    if gorenstein and c.lattice_rank <= 3:
        polytope, _basis = height_one_polytope(c, gd[0])
        lci = is_nakajima(polytope)
    return SingularityReport(
        smooth=smooth,
        q_factorial=simplicial,
        q_gorenstein=gd,
        gorenstein=gorenstein,
        terminal=terminal,
        canonical=canonical,
        log_terminal=gd is not None,
        lci=lci,
        embedding_dim=embedding_dimension(c),
    )


def is_elementary(p: LatticePolytope) -> bool:
    """True when the polytope's only lattice points are its vertices."""
    return set(p.lattice_points()) == set(p.vertices)


# ---------------------------------------------------------------------------
# stacked ("Nakajima") polytopes in dimension <= 2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NakajimaWitness:
    """Normal form found for a stacked polytope: vertex images after the map."""

    base_length: int
    left_height: int
    right_height: int
    slope: int


def _nakajima_witness(p: LatticePolytope) -> NakajimaWitness | None:
    """Search all edges (as prospective base facets) for the stacked normal form.

    In the plane a stacked polytope is unimodularly a region
    0 <= x <= c, 0 <= y <= slope*x + h0 with integer slope; anchoring each
    edge in turn determines the lattice-height functional, and an integer
    shear must make the sides vertical.  The scan over all edges and both
    orientations is exhaustive.
    """
    if p.dimension < 2:
        return NakajimaWitness(0, 0, 0, 0)
    verts = list(p.vertices)
    n = len(verts)
    if n > 4:
        return None
    for i in range(n):
        for flip in (False, True):
            a, b = verts[i], verts[(i + 1) % n]
            before, after = verts[(i - 1) % n], verts[(i + 2) % n]
            if flip:
                a, b = b, a
                before, after = after, before
            d = (b[0] - a[0], b[1] - a[1])
            c_len = math.gcd(*d)
            dp = (d[0] // c_len, d[1] // c_len)
            # inward primitive normal: lattice height above the base line
            normal = (-dp[1], dp[0])
            if flip:
                normal = (dp[1], -dp[0])
            height = lambda w: normal[0] * (w[0] - a[0]) + normal[1] * (w[1] - a[1])
            _g, xi = extended_gcd_vector(dp)
            xcoord = lambda w: xi[0] * (w[0] - a[0]) + xi[1] * (w[1] - a[1])
            if n == 3:
                w = before if before != b else after
                yw, xw = height(w), xcoord(w)
                if yw <= 0 or yw % c_len != 0:
                    continue
                if xw % yw == 0 or (c_len - xw) % yw == 0:
                    return NakajimaWitness(c_len, yw, 0, -yw // c_len)
            else:
                wa, wb = before, after
                ya, xa = height(wa), xcoord(wa)
                yb, xb = height(wb), xcoord(wb)
                if ya <= 0 or yb <= 0:
                    continue
                if xa % ya != 0:
                    continue
                k = -xa // ya
                if xb + k * yb != c_len:
                    continue
                if (yb - ya) % c_len != 0:
                    continue
                return NakajimaWitness(c_len, ya, yb, (yb - ya) // c_len)
    return None


def is_nakajima(p: LatticePolytope) -> bool:
    """Equivalence to an inductively stacked polytope (dimension <= 2 only).

    Points and lattice segments are always stacked; planar polytopes are
    decided by the exhaustive base-edge scan of the normal form.
    """
    if p.dimension > 2:
        raise ClassifyError("out of scope: stacked-polytope test only below dimension 3")
    if p.dimension == 2 and p.ambient_rank != 2:
        raise ClassifyError("planar polytopes must be given in rank-2 coordinates")
    return _nakajima_witness(p) is not None


def lri_general_section(c: Cone) -> int:
    """Invariant of a general hyperplane section through the singular point.

    Defined here only for the non-smooth rank-3 Gorenstein case with
    embedding dimension at least five, where it equals edim - 1; the two
    low values correspond to analytic normal forms outside this toolkit.
    """
    if c.lattice_rank != 3 or not c.is_full_dimensional:
        raise ClassifyError("section invariant requires a full-dimensional rank-3 cone")
    gd = gorenstein_data(c)
    if gd is None or gd[1] != 1:
        raise ClassifyError("section invariant requires a Gorenstein cone")
    if is_basic(c):
        raise ClassifyError("section invariant undefined for a smooth cone")
    edim = embedding_dimension(c)
    if edim < 5:
        raise ClassifyError("embedding dimension below five: analytic cases out of scope")
    return edim - 1


@dataclass(frozen=True)
class CoverCertificate:
    """Sublattice data of an index-one cover: basis columns and the index."""

    sublattice_basis: IntMatrix
    index: int


def index_one_cover(c: Cone) -> tuple[Cone, CoverCertificate]:
    """Re-coordinatize the cone over the sublattice where the grading is integral.

    For a Q-Gorenstein cone of index ell > 1 the sublattice
    {n : <m, n> integral} has index ell; over it the same real cone is
    Gorenstein.  Index-one input is rejected.
    """
    gd = gorenstein_data(c)
    if gd is None:
        raise ClassifyError("index-one cover requires a Q-Gorenstein cone")
    m, index = gd
    if index == 1:
        raise ClassifyError("already index one")
    rank = c.lattice_rank
    cleared = [int(x * index) for x in m.coords]
    kernel = integer_kernel(IntMatrix(((*cleared, -index),)))
    basis_vecs = [LatticeVector(v.coords[:rank]) for v in kernel]
    b_cols = IntMatrix(tuple(zip(*(v.coords for v in basis_vecs))))
    if abs(b_cols.det()) != index:
        raise ClassifyError("sublattice index mismatch while building the cover")
    inv_rows = []
    det = b_cols.det()
    gens = []
    for g in c.generators:
        sol = rational_solve([LatticeVector(r) for r in b_cols.rows], list(g.coords))
        if sol is None or any(x.denominator != 1 for x in sol[0].coords):
            raise ClassifyError("generator not in the grading sublattice")
        gens.append(LatticeVector(tuple(int(x) for x in sol[0].coords)))
    cover = make_cone(gens)
    new_gd = gorenstein_data(cover)
    if new_gd is None or new_gd[1] != 1:
        raise ClassifyError("cover failed to be Gorenstein of index one")
    return cover, CoverCertificate(sublattice_basis=b_cols, index=index)
