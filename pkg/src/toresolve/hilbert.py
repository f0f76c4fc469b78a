"""Hilbert bases of cone semigroups, embedding dimension, binomial relations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .cones import Cone, ConeError, dual_cone, make_cone
from .lattice import (
    IntMatrix,
    LatticeVector,
    integer_kernel,
    rational_solve,
    smith_normal_form,
)


@dataclass(frozen=True)
class HilbertBasis:
    """The unique irreducible generating system of the semigroup cone ∩ N."""

    cone: Cone
    members: tuple[LatticeVector, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _cyclic_generator_order(c: Cone) -> list[LatticeVector]:
    """Extreme rays of a pointed 3-dimensional cone in boundary-walk order.

    Each facet of such a cone contains exactly two extreme rays, so the
    facet/ray incidences form a cycle which we walk combinatorially.
    """
    gens = list(c.generators)
    if len(gens) <= 3:
        return gens
    facet_pairs = []
    for m in c.inequalities:
        tight = [g for g in gens if m.pair(g) == 0]
        if len(tight) != 2:
            raise ConeError("degenerate facet structure in cyclic ordering")
        facet_pairs.append((tight[0], tight[1]))
    order = [facet_pairs[0][0], facet_pairs[0][1]]
    used = {0}
    while len(order) < len(gens):
        for i, (a, b) in enumerate(facet_pairs):
            if i in used:
                continue
            if a == order[-1] and b not in order:
                order.append(b)
                used.add(i)
                break
            if b == order[-1] and a not in order:
                order.append(a)
                used.add(i)
                break
        else:
            raise ConeError("facet walk failed; cone is not 3-dimensional pointed")
    return order


def _triangulate(c: Cone) -> list[tuple[LatticeVector, ...]]:
    """Fan triangulation of a pointed full-dimensional cone into simplices."""
    gens = list(c.generators)
    d = c.dim
    if len(gens) == d:
        return [tuple(gens)]
    if d == 3:
        order = _cyclic_generator_order(c)
        return [
            (order[0], order[i], order[i + 1]) for i in range(1, len(order) - 1)
        ]
    raise ConeError(f"triangulation of a {d}-dimensional cone with {len(gens)} rays is unsupported")


def _parallelepiped_points(gens: tuple[LatticeVector, ...]) -> list[tuple[int, ...]]:
    """Lattice points of the half-open parallelepiped sum t_i g_i, t_i in [0,1).

    Enumerated via the Smith normal form: representatives of Z^d modulo the
    generator sublattice, shifted into the fundamental domain.  Exactly
    det-many points, including the origin.
    """
    d = len(gens)
    g_cols = IntMatrix(tuple(zip(*(g.coords for g in gens))))
    s, u, _v = smith_normal_form(g_cols)
    diag = [s.rows[i][i] for i in range(d)]
    if any(x == 0 for x in diag):
        raise ConeError("parallelepiped of dependent vectors")
    u_inv = u.inverse_unimodular()
    # exact inverse of the generator matrix, once
    det = g_cols.det()
    inv_rows = []
    for i in range(d):
        inv_rows.append(
            tuple(
                Fraction((-1) ** (i + j) * g_cols._minor(j, i).det(), det)
                for j in range(d)
            )
        )
    points = []
    for a in itertools.product(*(range(abs(x)) for x in diag)):
        x0 = tuple(
            sum(u_inv.rows[i][j] * a[j] for j in range(d)) for i in range(d)
        )
        t = [sum(inv_rows[i][j] * x0[j] for j in range(d)) for i in range(d)]
        frac = [ti - math.floor(ti) for ti in t]
        x = tuple(
            int(sum(Fraction(g.coords[i]) * f for g, f in zip(gens, frac)))
            for i in range(d)
        )
        points.append(x)
    return points


def _to_sublattice(c: Cone):
    """Coordinates of a low-dimensional pointed cone inside its span lattice.

    Returns (cone in Z^d, embedding matrix B with columns the basis of N_c).
    """
    ann = integer_kernel(IntMatrix.from_vectors(list(c.generators)))
    basis = integer_kernel(IntMatrix.from_vectors(ann))
    b_cols = IntMatrix(tuple(zip(*(v.coords for v in basis))))
    small_gens = [LatticeVector(_solve_columns(b_cols, g)) for g in c.generators]
    return make_cone(small_gens), b_cols


def _solve_columns(b_cols: IntMatrix, g: LatticeVector) -> tuple[int, ...]:
    # solve B * x = g: each row of B pairs with the coordinate vector x
    sol = rational_solve([LatticeVector(r) for r in b_cols.rows], list(g.coords))
    if sol is None:
        raise ConeError("generator outside sublattice span")
    return tuple(int(x) for x in sol[0].coords)


def hilbert_basis(c: Cone) -> HilbertBasis:
    """Minimal generating system of c ∩ N for a strongly convex cone.

    Strategy: triangulate into simplicial subcones, enumerate the lattice
    points of each fundamental half-open parallelepiped, add the ray
    generators, then keep exactly the elements that are not sums of two
    nonzero semigroup elements.  Uniqueness fails for non-pointed cones,
    which are rejected.
    """
    if not c.is_pointed:
        raise ConeError("Hilbert basis requires a strongly convex cone")
    if c.is_zero:
        return HilbertBasis(cone=c, members=())
    if c.dim < c.lattice_rank:
        small, b_cols = _to_sublattice(c)
        inner = hilbert_basis(small)
        members = tuple(
            sorted(
                LatticeVector(
                    tuple(
                        sum(b_cols.rows[i][j] * m.coords[j] for j in range(small.lattice_rank))
                        for i in range(c.lattice_rank)
                    )
                )
                for m in inner.members
            )
        )
        return HilbertBasis(cone=c, members=members)

    candidates: set[tuple[int, ...]] = {g.coords for g in c.generators}
    for simplex in _triangulate(c):
        for p in _parallelepiped_points(simplex):
            if any(x != 0 for x in p):
                candidates.add(p)

    # positive functional on the cone: sum of the primitive facet normals
    xi = [0] * c.lattice_rank
    for m in c.inequalities:
        mp = m.primitive()
        for i in range(c.lattice_rank):
            xi[i] += int(mp.coords[i])

    def weight(p):
        return sum(a * b for a, b in zip(xi, p))

    ordered = sorted(candidates, key=lambda p: (weight(p), p))
    accepted: list[LatticeVector] = []
    for p in ordered:
        v = LatticeVector(p)
        reducible = False
        for h in accepted:
            diff = v - h
            if not diff.is_zero and c.contains(diff):
                reducible = True
                break
        if not reducible:
            accepted.append(v)
    return HilbertBasis(cone=c, members=tuple(sorted(accepted)))


def embedding_dimension(c: Cone) -> int:
    """Cardinality of the Hilbert basis of the dual cone.

    This is the minimal number of generators of the maximal ideal at the
    distinguished point of the associated affine chart; requires the dual
    to be pointed, i.e. the cone to be full-dimensional.
    """
    if not c.is_pointed:
        raise ConeError("embedding dimension requires a pointed cone")
    if not c.is_full_dimensional:
        raise ConeError("embedding dimension requires a full-dimensional cone (dual not pointed)")
    return len(hilbert_basis(dual_cone(c)))


def floor_facets(c: Cone) -> list[list[LatticeVector]]:
    """Hilbert points on each compact facet of conv((c ∩ N) - {0}) facing the origin.

    The hull equals conv(Hilbert basis) + c, so its facets are computed from
    the homogenization; facets whose supporting value at the origin side is
    positive form the "floor" through which every ray of the cone exits.
    """
    if not (c.is_pointed and c.is_full_dimensional):
        raise ConeError("hull floor requires a pointed full-dimensional cone")
    hb = hilbert_basis(c)
    rank = c.lattice_rank
    homog = [(1, *h.coords) for h in hb.members] + [(0, *g.coords) for g in c.generators]
    from .cones import extreme_rays

    normals, lin = extreme_rays(homog, rank + 1)
    if lin:
        raise ConeError("unexpected lineality in hull homogenization")
    out = []
    for nm in normals:
        c0, m = nm[0], nm[1:]
        if c0 >= 0:
            continue
        tight = [
            h
            for h in hb.members
            if c0 + sum(a * b for a, b in zip(m, h.coords)) == 0
        ]
        if any(
            sum(a * b for a, b in zip(m, g.coords)) == 0 for g in c.generators
        ):
            raise ConeError("floor facet with recession direction; cone degenerate")
        if not tight:
            raise ConeError("empty floor facet")
        out.append(sorted(tight))
    return out


@dataclass(frozen=True)
class BinomialRelation:
    """A pair of exponent vectors over the dual Hilbert basis with equal image."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    image: tuple[int, ...]


def toric_relations(c: Cone, degree_bound: int) -> list[BinomialRelation]:
    """Binomial relations among the dual Hilbert basis up to a total degree.

    Monomials are grouped by their lattice image; each fiber of size n
    contributes the n-1 consecutive relations in lexicographic order, so
    the emitted set connects every pair of equal-image monomials of total
    degree <= degree_bound.
    """
    if not (c.is_pointed and c.is_full_dimensional):
        raise ConeError("toric relations require a full-dimensional pointed cone")
    basis = hilbert_basis(dual_cone(c)).members
    k = len(basis)
    fibers: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for deg in range(1, degree_bound + 1):
        for combo in itertools.combinations_with_replacement(range(k), deg):
            expo = [0] * k
            img = [0] * c.lattice_rank
            for i in combo:
                expo[i] += 1
                for j in range(c.lattice_rank):
                    img[j] += basis[i].coords[j]
            fibers.setdefault(tuple(img), []).append(tuple(expo))
    relations = []
    for img in sorted(fibers):
        monos = sorted(set(fibers[img]))
        for a, b in zip(monos, monos[1:]):
            relations.append(BinomialRelation(left=a, right=b, image=img))
    return relations
