"""Crepant, projective desingularization of rank-3 toric singularities.

The pipeline: refine over the hull floor until singularities are canonical,
pass to the grading sublattice where the index exceeds one, flatten each
Gorenstein canonical piece to a lattice polygon at height one, then blow up
fixed points (cells with interior lattice points) and singular curves (cell
edges with interior lattice points) until only ordinary double points are
left, and finally fill the remaining unit parallelograms with box diagonals.
Every ray produced after the canonical step lies at height one, so every
step is crepant by construction, and each completed triangulation ships with
an exact integral height function certifying projectivity.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .classify import (
    CoverCertificate,
    LatticePolytope,
    gorenstein_data,
    height_one_polytope,
    index_one_cover,
)
from .cones import Cone, Fan, dual_cone, extreme_rays, is_basic, make_cone, make_fan
from .divisors import DiscrepancyReport, SupportFunction, is_strictly_upper_convex
from .hilbert import floor_facets, hilbert_basis
from .lattice import Covector, IntMatrix, LatticeVector, rational_solve


class Resolve3dError(ValueError):
    """Domain error raised by the 3D resolution pipeline."""


Point = tuple[int, int]
HeightMap = tuple[tuple[Point, int], ...]


# ---------------------------------------------------------------------------
# the state object: a polygon with its current subdivision
# ---------------------------------------------------------------------------


def _cell_tag(cell: LatticePolytope) -> dict:
    interior = cell.interior_points()
    edge_interior = cell.edge_interior_points()
    area2 = cell.area2()
    is_parallelogram = (
        len(cell.vertices) == 4
        and tuple(a + c for a, c in zip(cell.vertices[0], cell.vertices[2]))
        == tuple(b + d for b, d in zip(cell.vertices[1], cell.vertices[3]))
    )
    return {
        "interior_points": len(interior),
        "edge_interior_points": len(edge_interior),
        "basic": area2 == 1,
        "unit_parallelogram": is_parallelogram and area2 == 2 and not interior and not edge_interior,
    }


@dataclass(frozen=True)
class PolygonComplex:
    """A lattice polygon at height one with its current polygonal subdivision.

    ``round_heights`` accumulates, per subdivision round, the 0/1 lattice
    heights whose regular subdivisions produced the rounds; they assemble
    into the projectivity certificates of the completions.
    """

    polygon: LatticePolytope
    cells: tuple[LatticePolytope, ...]
    round_heights: tuple[HeightMap, ...] = ()

    @classmethod
    def initial(cls, polygon: LatticePolytope) -> "PolygonComplex":
        return cls(polygon=polygon, cells=(polygon,))

    def replace_cells(self, cells, new_round: dict[Point, int] | None = None) -> "PolygonComplex":
        rounds = self.round_heights
        if new_round:
            rounds = rounds + (tuple(sorted(new_round.items())),)
        return PolygonComplex(
            polygon=self.polygon,
            cells=tuple(sorted(cells, key=lambda c: c.vertices)),
            round_heights=rounds,
        )

    def tags(self) -> list[dict]:
        return [_cell_tag(c) for c in self.cells]

    def census(self) -> dict:
        tags = self.tags()
        return {
            "cells": len(self.cells),
            "cells_with_interior_points": sum(1 for t in tags if t["interior_points"]),
            "interior_points": sum(t["interior_points"] for t in tags),
            "edge_interior_points": len(
                {p for c in self.cells for p in c.edge_interior_points()}
            ),
            "basic_cells": sum(1 for t in tags if t["basic"]),
            "unit_parallelograms": sum(1 for t in tags if t["unit_parallelogram"]),
        }

    def __eq__(self, other):
        return (
            isinstance(other, PolygonComplex)
            and self.polygon == other.polygon
            and self.cells == other.cells
        )

    def __hash__(self):
        return hash((self.polygon, self.cells))


# ---------------------------------------------------------------------------
# canonical modification and the polygon normal form
# ---------------------------------------------------------------------------


def canonical_modification(c: Cone) -> Fan:
    """Refinement over the compact hull-floor facets; canonical by construction.

    Returns the fan whose maximal cones sit over the bounded faces of
    conv((c ∩ N) - {0}) visible from the origin; it equals {c} exactly when
    the cone is already canonical.
    """
    if not (c.is_pointed and c.is_full_dimensional):
        raise Resolve3dError("canonical modification needs a pointed full-dimensional cone")
    if c.lattice_rank > 3:
        raise Resolve3dError("canonical modification implemented for rank <= 3")
    cones = [make_cone(facet) for facet in floor_facets(c)]
    return make_fan(cones)


def polygon_form(c: Cone) -> tuple[LatticePolytope, IntMatrix]:
    """Height-one polygon of a rank-3 Gorenstein cone plus the basis used.

    The returned unimodular matrix B has the adapted basis as columns, so it
    carries polygon coordinates (x, y, 1) back to the original lattice; the
    grading functional becomes the third coordinate.
    """
    if c.lattice_rank != 3:
        raise Resolve3dError("polygon form is a rank-3 operation")
    gd = gorenstein_data(c)
    if gd is None or gd[1] != 1:
        raise Resolve3dError("polygon form requires a Gorenstein cone of index one")
    polytope, basis = height_one_polytope(c, gd[0])
    if polytope.dimension != 2:
        raise Resolve3dError("degenerate height-one cross-section")
    return polytope, basis


def _lift(p: Point) -> LatticeVector:
    return LatticeVector((p[0], p[1], 1))


def _cell_cone(cell: LatticePolytope) -> Cone:
    return make_cone([_lift(v) for v in cell.vertices])


# ---------------------------------------------------------------------------
# phase: blow-ups of non-cDV fixed points
# ---------------------------------------------------------------------------


def _order_function_subdivision(cell: LatticePolytope):
    """Linearity domains on the cell of the order function of the maximal ideal.

    The order function is the minimum of the pairings against the nonzero
    dual Hilbert basis; its domains are computed exactly as subcones and
    must be crepant (all rays at height one), which is asserted.

    Returns (subcells, central_cell_points, new_rays).
    """
    cone = _cell_cone(cell)
    dual_members = hilbert_basis(dual_cone(cone)).members
    members = [h for h in dual_members if h.coords != (0, 0, 1)]
    if len(members) == len(dual_members):
        raise Resolve3dError("grading functional missing from dual Hilbert basis")
    base_constraints = [
        tuple(int(x) for x in m.primitive().coords) for m in cone.inequalities
    ]
    all_members = list(dual_members)
    subcells = []
    central: list[Point] = []
    for h in all_members:
        constraints = list(base_constraints)
        for other in all_members:
            if other != h:
                constraints.append((other - h).coords)
        rays, lin = extreme_rays(constraints, 3)
        if lin:
            raise Resolve3dError("unexpected lineality in order-function domain")
        pts = []
        for r in rays:
            if r[2] != 1:
                raise Resolve3dError(
                    f"crepancy violated: order-function domain ray {r} off height one"
                )
            pts.append((r[0], r[1]))
        if len(pts) >= 3:
            poly = LatticePolytope.from_points(pts)
            if poly.dimension == 2:
                subcells.append(poly)
        if h.coords == (0, 0, 1):
            central = pts
    old = set(cell.vertices)
    new_rays = sorted(
        {p for sc in subcells for p in sc.vertices if p not in old}
    )
    return subcells, central, new_rays


def blowup_fixed_point(pc: PolygonComplex, cell_index: int) -> PolygonComplex:
    """Blow up the distinguished point of one cell with interior lattice points.

    The cell is replaced by the linearity domains of the order function of
    its maximal ideal; all new rays stay at height one.  The central domain
    always turns out to be the hull of the cell's interior lattice points,
    which is checked here.
    """
    cell = pc.cells[cell_index]
    interior = cell.interior_points()
    if not interior:
        raise Resolve3dError("cell is already cDV: no interior lattice points")
    subcells, central, _new = _order_function_subdivision(cell)
    hull_of_interior = LatticePolytope.from_points(interior)
    if set(central) != set(hull_of_interior.vertices):
        raise Resolve3dError(
            "central cell differs from the hull of the interior points: "
            f"{sorted(central)} vs {sorted(hull_of_interior.vertices)}"
        )
    cells = [c for i, c in enumerate(pc.cells) if i != cell_index] + subcells
    heights = {p: 1 for p in interior}
    return pc.replace_cells(cells, new_round=heights)


@dataclass(frozen=True)
class PhaseRound:
    """One simultaneous round of a blow-up phase, for the trace."""

    phase: str
    centers: tuple[LatticePolytope, ...]
    new_rays: tuple[Point, ...]
    central_cells_match_interior_hull: bool | None
    census_after: dict


def crepant_fixed_point_phase(
    pc: PolygonComplex, shuffle: random.Random | None = None
) -> PolygonComplex:
    """Blow up all cells with interior lattice points, round by round, to exhaustion.

    With ``shuffle`` the eligible cells are processed one at a time in random
    order instead of simultaneously; the endpoint is the same either way
    (each blow-up is local to its cell), which the test-suite exercises.
    """
    result, _rounds = _fixed_point_phase(pc, shuffle=shuffle)
    return result


def _fixed_point_phase(pc: PolygonComplex, shuffle: random.Random | None = None):
    rounds: list[PhaseRound] = []
    while True:
        eligible = [i for i, c in enumerate(pc.cells) if c.interior_points()]
        if not eligible:
            return pc, rounds
        before = pc.census()["interior_points"]
        if shuffle is not None:
            idx = shuffle.choice(eligible)
            centers = (pc.cells[idx],)
            old_points = {p for c in pc.cells for p in c.vertices}
            pc = blowup_fixed_point(pc, idx)
        else:
            centers = tuple(pc.cells[i] for i in eligible)
            keep = [c for i, c in enumerate(pc.cells) if i not in set(eligible)]
            new_cells = list(keep)
            heights: dict[Point, int] = {}
            old_points = {p for c in pc.cells for p in c.vertices}
            for i in eligible:
                cell = pc.cells[i]
                subcells, central, _ = _order_function_subdivision(cell)
                hull = LatticePolytope.from_points(cell.interior_points())
                if set(central) != set(hull.vertices):
                    raise Resolve3dError("central cell mismatch during fixed-point phase")
                new_cells.extend(subcells)
                for p in cell.interior_points():
                    heights[p] = 1
            pc = pc.replace_cells(new_cells, new_round=heights)
        after = pc.census()["interior_points"]
        if after >= before:
            raise Resolve3dError("fixed-point phase failed to reduce interior points")
        new_rays = tuple(
            sorted({p for c in pc.cells for p in c.vertices} - old_points)
        )
        rounds.append(
            PhaseRound(
                phase="fixed-point-blow-up",
                centers=centers,
                new_rays=new_rays,
                central_cells_match_interior_hull=True,
                census_after=pc.census(),
            )
        )


# ---------------------------------------------------------------------------
# phase: blow-ups of the one-dimensional singular locus
# ---------------------------------------------------------------------------


def _envelope_subdivision(cell: LatticePolytope, heights: dict[Point, int]):
    """Cells of the regular subdivision induced by lifting lattice points.

    The linear pieces of the upper envelope are found as vertices of the
    polyhedron of affine functions dominating the lifted points, computed
    through a homogenized double-description pass.
    """
    points = [tuple(p) for p in cell.lattice_points()]
    constraints = [(p[0], p[1], 1, -heights[p]) for p in points]
    constraints.append((0, 0, 0, 1))
    rays, _lin = extreme_rays(constraints, 4)
    cells = []
    for r in rays:
        if r[3] <= 0:
            continue
        a1, a2, c0, t = r
        tight = [
            p
            for p in points
            if a1 * p[0] + a2 * p[1] + c0 == heights[p] * t
        ]
        if len(tight) >= 3:
            poly = LatticePolytope.from_points(tight)
            if poly.dimension == 2 and set(tight) == set(poly.lattice_points()):
                cells.append(poly)
    total = sum(c.area2() for c in cells)
    if total != cell.area2():
        raise Resolve3dError("envelope subdivision does not tile the cell")
    return cells


def blowup_curve_phase(pc: PolygonComplex) -> PolygonComplex:
    """Insert all edge-interior lattice points, splitting cells along the
    regular subdivision they induce, until no cell edge has interior points.

    Precondition: the fixed-point phase is finished (no cell has interior
    lattice points).  Afterwards every non-basic cell is a unit
    parallelogram.
    """
    result, _rounds = _curve_phase(pc)
    return result


def _curve_phase(pc: PolygonComplex):
    if any(c.interior_points() for c in pc.cells):
        raise Resolve3dError("run the fixed-point phase first: interior points remain")
    rounds: list[PhaseRound] = []
    while True:
        eligible = [i for i, c in enumerate(pc.cells) if c.edge_interior_points()]
        if not eligible:
            break
        before = pc.census()["edge_interior_points"]
        centers = tuple(pc.cells[i] for i in eligible)
        old_points = {p for c in pc.cells for p in c.vertices}
        new_cells = [c for i, c in enumerate(pc.cells) if i not in set(eligible)]
        heights: dict[Point, int] = {}
        for i in eligible:
            cell = pc.cells[i]
            lift = {tuple(p): 0 for p in cell.vertices}
            for p in cell.edge_interior_points():
                lift[tuple(p)] = 1
                heights[tuple(p)] = 1
            new_cells.extend(_envelope_subdivision(cell, lift))
        pc = pc.replace_cells(new_cells, new_round=heights)
        after = pc.census()["edge_interior_points"]
        if after >= before:
            raise Resolve3dError("curve phase failed to reduce edge-interior points")
        new_rays = tuple(sorted({p for c in pc.cells for p in c.vertices} - old_points))
        rounds.append(
            PhaseRound(
                phase="curve-blow-up",
                centers=centers,
                new_rays=new_rays,
                central_cells_match_interior_hull=None,
                census_after=pc.census(),
            )
        )
    for tag, cell in zip(pc.tags(), pc.cells):
        if not (tag["basic"] or tag["unit_parallelogram"]):
            raise Resolve3dError(
                f"cell {cell.vertices} is neither basic nor an ordinary double point"
            )
    return pc, rounds


# ---------------------------------------------------------------------------
# completions: box diagonals plus projectivity certificates
# ---------------------------------------------------------------------------


def _fourier_motzkin(ineqs: list[tuple[dict[int, int], int]], variables: list[int]):
    """Solve sum(coef_v * x_v) >= const systems exactly; None when infeasible.

    Desk-scale Fourier-Motzkin with rational back-substitution; fine for the
    handful of diagonal constraints this pipeline produces.
    """
    system = [({v: Fraction(c) for v, c in lhs.items() if c}, Fraction(rhs)) for lhs, rhs in ineqs]
    order = list(variables)
    assignments: list[tuple[int, list, list]] = []
    for var in order:
        with_var = [(l, r) for l, r in system if l.get(var)]
        rest = [(l, r) for l, r in system if not l.get(var)]
        lowers, uppers = [], []  # x >= expr, x <= expr as (coeffs, const)
        for l, r in with_var:
            c = l[var]
            others = {v: -cc / c for v, cc in l.items() if v != var and cc}
            bound = (others, r / c)
            (lowers if c > 0 else uppers).append(bound)
        for lo_c, lo_r in lowers:
            for up_c, up_r in uppers:
                comb = dict(up_c)
                for v, cc in lo_c.items():
                    comb[v] = comb.get(v, Fraction(0)) - cc
                comb = {v: cc for v, cc in comb.items() if cc}
                # upper bound must be >= lower bound: up - lo >= lo_r - up_r
                rest.append((comb, lo_r - up_r))
        assignments.append((var, lowers, uppers))
        system = rest
    for l, r in system:
        if not l and r > 0:
            return None
    values: dict[int, Fraction] = {}

    def ev(coeffs, const):
        return sum(c * values[v] for v, c in coeffs.items()) + const

    for var, lowers, uppers in reversed(assignments):
        lo = max((ev(c, r) for c, r in lowers), default=None)
        up = min((ev(c, r) for c, r in uppers), default=None)
        if lo is not None and up is not None:
            if lo > up:
                return None
            values[var] = (lo + up) / 2
        elif lo is not None:
            values[var] = lo
        elif up is not None:
            values[var] = up
        else:
            values[var] = Fraction(0)
    return values


def _parallelogram_diagonals(cell: LatticePolytope):
    v = cell.vertices
    d1 = tuple(sorted((v[0], v[2])))
    d2 = tuple(sorted((v[1], v[3])))
    return tuple(sorted((d1, d2)))


def _triangulation_cells(pc: PolygonComplex, choice: dict[LatticePolytope, tuple[Point, Point]]):
    tris = []
    for cell in pc.cells:
        if len(cell.vertices) == 3:
            tris.append(tuple(cell.vertices))
            continue
        diag = choice[cell]
        v = list(cell.vertices)
        i = v.index(diag[0])
        if v[(i + 2) % 4] != diag[1]:
            raise Resolve3dError("chosen diagonal does not join opposite vertices")
        tris.append((v[i], v[(i + 1) % 4], v[(i + 2) % 4]))
        tris.append((v[(i + 2) % 4], v[(i + 3) % 4], v[i]))
    return tris


def _interior_walls(tris):
    """(shared edge, opposite vertex in t1, opposite vertex in t2) per wall."""
    edge_map: dict[tuple[Point, Point], list[Point]] = {}
    for t in tris:
        for k in range(3):
            a, b = t[k], t[(k + 1) % 3]
            c = t[(k + 2) % 3]
            key = tuple(sorted((a, b)))
            edge_map.setdefault(key, []).append(c)
    return [
        (key, opp[0], opp[1]) for key, opp in edge_map.items() if len(opp) == 2
    ]


def _affine_value(tri, h: dict[Point, Fraction], q: Point) -> Fraction:
    """Value at q of the affine function interpolating h on the triangle."""
    (ax, ay), (bx, by), (cx, cy) = tri
    det = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay)
    l_b = Fraction((q[0] - ax) * (cy - ay) - (cx - ax) * (q[1] - ay), det)
    l_c = Fraction((bx - ax) * (q[1] - ay) - (q[0] - ax) * (by - ay), det)
    l_a = 1 - l_b - l_c
    return l_a * h[tri[0]] + l_b * h[tri[1]] + l_c * h[tri[2]]


def _composite_heights(pc: PolygonComplex, chi: dict[Point, Fraction], tris):
    """Exact integral heights whose folds are strictly positive on every wall.

    Sums the per-round 0/1 height maps and the diagonal-choice correction
    with decreasing weights eps^r, halving eps until exact verification of
    every fold succeeds, then clears denominators.
    """
    points = [tuple(p) for p in pc.polygon.lattice_points()]
    layers = [dict(r) for r in pc.round_heights] + [chi]
    walls = _interior_walls(tris)
    tri_of_edge: dict[tuple[Point, Point], list] = {}
    for t in tris:
        for k in range(3):
            key = tuple(sorted((t[k], t[(k + 1) % 3])))
            tri_of_edge.setdefault(key, []).append(t)
    eps = Fraction(1)
    for _ in range(64):
        h = {
            p: sum(
                (eps ** (i + 1)) * Fraction(layer.get(p, 0))
                for i, layer in enumerate(layers)
            )
            for p in points
        }
        ok = True
        for key, opp1, opp2 in walls:
            t1, t2 = tri_of_edge[key]
            if _affine_value(t1, h, opp2) - h[opp2] <= 0:
                ok = False
                break
        if ok:
            denom = math.lcm(*(v.denominator for v in h.values())) if h else 1
            return {p: int(v * denom) for p, v in h.items()}
        eps /= 2
    raise Resolve3dError("could not certify projectivity: fold margins kept failing")


def _double_point_cells(pc: PolygonComplex) -> list[LatticePolytope]:
    parallelograms = []
    for cell, tag in zip(pc.cells, pc.tags()):
        if tag["basic"]:
            continue
        if tag["unit_parallelogram"]:
            parallelograms.append(cell)
            continue
        raise Resolve3dError(
            f"cell {cell.vertices} violates the completion precondition"
        )
    return parallelograms


def _completion_for_bits(
    pc: PolygonComplex, parallelograms: list[LatticePolytope], bits: tuple[int, ...]
) -> tuple[Fan, SupportFunction]:
    choice = {}
    for cell, bit in zip(parallelograms, bits):
        choice[cell] = _parallelogram_diagonals(cell)[bit]
    tris = _triangulation_cells(pc, choice)
    var_index: dict[Point, int] = {}
    ineqs = []
    for cell in parallelograms:
        diag = choice[cell]
        others = tuple(v for v in cell.vertices if v not in diag)
        coeffs: dict[int, int] = {}
        for p, sign in [(diag[0], 1), (diag[1], 1), (others[0], -1), (others[1], -1)]:
            i = var_index.setdefault(p, len(var_index))
            coeffs[i] = coeffs.get(i, 0) + sign
        ineqs.append((coeffs, 1))
    chi: dict[Point, Fraction] = {}
    if ineqs:
        sol = _fourier_motzkin(ineqs, list(range(len(var_index))))
        if sol is None:
            raise Resolve3dError("diagonal-choice system unexpectedly infeasible")
        denom = math.lcm(*(v.denominator for v in sol.values()))
        for p, i in var_index.items():
            chi[p] = Fraction(int(sol[i] * denom))
    heights = _composite_heights(pc, chi, tris)
    cones = []
    for t in tris:
        cone = make_cone([_lift(p) for p in t])
        if not is_basic(cone):
            raise Resolve3dError(f"completion triangle {t} is not basic")
        cones.append(cone)
    fan = Fan(
        lattice_rank=3,
        maximal_cones=tuple(
            sorted(cones, key=lambda c: tuple(g.coords for g in c.generators))
        ),
    )
    reps = {}
    for i, cone in enumerate(fan.maximal_cones):
        rays = list(cone.generators)
        sol = rational_solve(rays, [heights[(r.coords[0], r.coords[1])] for r in rays])
        reps[i] = sol[0]
    psi = SupportFunction(
        fan=fan,
        ray_values={r.coords: heights[(r.coords[0], r.coords[1])] for r in fan.rays()},
        linear_reps=reps,
    )
    if not is_strictly_upper_convex(psi):
        raise Resolve3dError("projectivity certificate failed exact verification")
    return fan, psi


def completions(pc: PolygonComplex) -> list[tuple[Fan, SupportFunction]]:
    """All box-diagonal fillings of the remaining ordinary double points.

    Every non-basic cell must be a unit parallelogram; with k of them the
    result lists all 2^k full triangulations, each as a fan of basic cones
    at height one together with an integral-height support function that is
    strictly upper convex exactly on it (the projectivity certificate).
    Completions are ordered lexicographically by their diagonal choices.
    """
    parallelograms = _double_point_cells(pc)
    return [
        _completion_for_bits(pc, parallelograms, bits)
        for bits in itertools.product((0, 1), repeat=len(parallelograms))
    ]


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResolutionStep:
    """One recorded modification step of the pipeline."""

    phase: str  # canonical | fixed-point-blow-up | curve-blow-up | completion
    piece: int | None
    centers: tuple
    new_rays: tuple[LatticeVector, ...]
    discrepancy: DiscrepancyReport | None
    census_after: dict


@dataclass(frozen=True)
class ResolutionTrace:
    """Ordered record of the modification steps plus any index-one covers."""

    steps: tuple[ResolutionStep, ...]
    covers: tuple[tuple[int, CoverCertificate], ...] = ()

    @property
    def is_crepant_after_canonical(self) -> bool:
        return all(
            s.discrepancy is None or s.discrepancy.is_crepant
            for s in self.steps
            if s.phase != "canonical"
        )


def _report_for(base: Cone, m: Covector, rays) -> DiscrepancyReport:
    base_rays = {g.coords for g in base.generators}
    entries = tuple(
        (v, m.pair(v) - 1) for v in sorted(rays) if v.coords not in base_rays
    )
    return DiscrepancyReport(base_cone=base, m_sigma=m, entries=entries)


def resolve(c: Cone) -> tuple[Fan, ResolutionTrace]:
    """Canonical modification, index-one covers, crepant phases, first completion.

    Pieces of index greater than one are resolved inside their grading
    sublattice and the cover is recorded in the trace; the final fan is the
    union of the per-piece triangulation fans expressed in the original
    lattice (each cone basic w.r.t. its piece's working lattice).
    """
    if c.lattice_rank != 3 or not (c.is_pointed and c.is_full_dimensional):
        raise Resolve3dError("resolve expects a pointed full-dimensional rank-3 cone")
    if is_basic(c):
        return make_fan([c]), ResolutionTrace(steps=())
    steps: list[ResolutionStep] = []
    covers: list[tuple[int, CoverCertificate]] = []
    can_fan = canonical_modification(c)
    base_gd = gorenstein_data(c)
    base_rays = {g.coords for g in c.generators}
    can_new = [r for r in can_fan.rays() if r.coords not in base_rays]
    steps.append(
        ResolutionStep(
            phase="canonical",
            piece=None,
            centers=(),
            new_rays=tuple(can_new),
            discrepancy=(
                _report_for(c, base_gd[0], can_fan.rays()) if base_gd else None
            ),
            census_after={"pieces": len(can_fan.maximal_cones)},
        )
    )
    final_cones: list[Cone] = []
    for piece_index, piece in enumerate(can_fan.maximal_cones):
        gd = gorenstein_data(piece)
        if gd is None:
            raise Resolve3dError("canonical piece unexpectedly not Q-Gorenstein")
        m_piece, index = gd
        work = piece
        cover_basis: IntMatrix | None = None
        if index > 1:
            work, cert = index_one_cover(piece)
            covers.append((piece_index, cert))
            cover_basis = cert.sublattice_basis

        polygon, basis = polygon_form(work)

        def to_ambient(p: Point) -> LatticeVector:
            v = basis.apply(_lift(p))
            if cover_basis is not None:
                v = cover_basis.apply(v)
            return v

        pc = PolygonComplex.initial(polygon)
        pc, rounds_fp = _fixed_point_phase(pc)
        pc, rounds_cv = _curve_phase(pc)
        for rnd in rounds_fp + rounds_cv:
            mapped = tuple(sorted(to_ambient(p) for p in rnd.new_rays))
            steps.append(
                ResolutionStep(
                    phase=rnd.phase,
                    piece=piece_index,
                    centers=rnd.centers,
                    new_rays=mapped,
                    discrepancy=_report_for(
                        piece, m_piece, list(piece.generators) + list(mapped)
                    ),
                    census_after=rnd.census_after,
                )
            )
        parallelograms = _double_point_cells(pc)
        fan_local, _psi = _completion_for_bits(
            pc, parallelograms, (0,) * len(parallelograms)
        )
        comp_new = []
        for cone in fan_local.maximal_cones:
            mapped_gens = [to_ambient((g.coords[0], g.coords[1])) for g in cone.generators]
            final_cones.append(make_cone(mapped_gens))
        old_points = {p for cell in pc.cells for p in cell.vertices}
        for r in fan_local.rays():
            p = (r.coords[0], r.coords[1])
            if p not in old_points:
                comp_new.append(to_ambient(p))
        steps.append(
            ResolutionStep(
                phase="completion",
                piece=piece_index,
                centers=tuple(
                    cell for cell, tag in zip(pc.cells, pc.tags()) if tag["unit_parallelogram"]
                ),
                new_rays=tuple(sorted(comp_new)),
                discrepancy=_report_for(
                    piece,
                    m_piece,
                    list(piece.generators) + sorted(comp_new),
                ),
                census_after={
                    "completions": 2 ** len(parallelograms),
                    "maximal_cones": len(fan_local.maximal_cones),
                },
            )
        )
    key = lambda cone: tuple(g.coords for g in cone.generators)
    fan = Fan(lattice_rank=3, maximal_cones=tuple(sorted(final_cones, key=key)))
    return fan, ResolutionTrace(steps=tuple(steps), covers=tuple(covers))
