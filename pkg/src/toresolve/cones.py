"""Strongly convex rational polyhedral cones, dual descriptions, and fans.

Cones are stored with both a generator (extreme ray) and an inequality
(facet normal) description, computed once by an exact double-description
pass.  Duals of low-dimensional cones are not pointed; they carry an
explicit lineality basis instead of being rejected, so that taking the
dual is an involution on everything this package produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .lattice import (
    Covector,
    IntMatrix,
    LatticeVector,
    lattice_determinant,
    primitive,
)


class ConeError(ValueError):
    """Domain error raised by cone and fan operations."""


def _gcd_normalize(vec: tuple[int, ...]) -> tuple[int, ...]:
    g = math.gcd(*vec)
    return tuple(c // g for c in vec) if g > 1 else vec


def _rank(rows: list[tuple[int, ...]]) -> int:
    if not rows:
        return 0
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a[0])
    rank = 0
    for c in range(n):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        a[rank] = [x / a[rank][c] for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def extreme_rays(
    constraints: list[tuple[int, ...]], dim: int
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Extreme rays and lineality basis of {x : <a, x> >= 0 for all a}.

    Exact double-description over the integers: start from the full space,
    insert one halfspace at a time, and combine only adjacent ray pairs
    (Fukuda's combinatorial adjacency test).  Rays are primitive integer
    vectors; a final minimal-face rank test guarantees extremality.
    """
    lineality = [tuple(IntMatrix.identity(dim).rows[i]) for i in range(dim)]
    rays: list[tuple[int, ...]] = []
    processed: list[tuple[int, ...]] = []

    def dotv(a, x):
        return sum(p * q for p, q in zip(a, x))

    for a in constraints:
        if all(c == 0 for c in a):
            continue
        lvals = [dotv(a, l) for l in lineality]
        if any(v != 0 for v in lvals):
            # reduce lineality: keep the kernel part, one generator becomes a ray
            i0 = next(i for i, v in enumerate(lvals) if v != 0)
            l0, v0 = lineality[i0], lvals[i0]
            if v0 < 0:
                l0 = tuple(-c for c in l0)
                v0 = -v0
            new_lin = []
            for i, (l, v) in enumerate(zip(lineality, lvals)):
                if i == i0:
                    continue
                new_lin.append(
                    _gcd_normalize(tuple(v0 * c - v * d for c, d in zip(l, l0)))
                )
            rays = [
                _gcd_normalize(tuple(v0 * c - dotv(a, r) * d for c, d in zip(r, l0)))
                for r in rays
            ]
            rays = [r for r in rays if any(c != 0 for c in r)]
            rays.append(l0)
            lineality = new_lin
            processed.append(a)
            continue
        vals = [dotv(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            processed.append(a)
            continue
        keep = [r for r, v in zip(rays, vals) if v >= 0]
        active = {
            r: frozenset(i for i, c in enumerate(processed) if dotv(c, r) == 0)
            for r in rays
        }
        new_rays = list(keep)
        pos = [(r, v) for r, v in zip(rays, vals) if v > 0]
        neg = [(r, v) for r, v in zip(rays, vals) if v < 0]
        for rp, vp in pos:
            for rn, vn in neg:
                common = active[rp] & active[rn]
                adjacent = not any(
                    r3 is not rp and r3 is not rn and common <= active[r3]
                    for r3 in rays
                )
                if len(rays) <= 2:
                    adjacent = True
                if adjacent:
                    comb = tuple(vp * c - vn * d for c, d in zip(rn, rp))
                    if any(c != 0 for c in comb):
                        new_rays.append(_gcd_normalize(comb))
        processed.append(a)
        seen = set()
        rays = []
        for r in new_rays:
            if r not in seen:
                seen.add(r)
                rays.append(r)

    # final extremality filter: the minimal face of an extreme ray has dim 1 + dim L
    lin_dim = len(lineality)
    final = []
    for r in rays:
        act = [c for c in processed if dotv(c, r) == 0]
        # solution space of the active constraints within the lineality-extended space
        if _rank(act) == dim - lin_dim - 1:
            final.append(r)
    seen = set()
    rays = []
    for r in sorted(final):
        if r not in seen and not any(
            r == l or r == tuple(-c for c in l) for l in lineality
        ):
            seen.add(r)
            rays.append(r)
    return rays, sorted(lineality)


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone with both descriptions materialized.

    ``make_cone`` only ever produces strongly convex (pointed) cones; duals
    of low-dimensional cones additionally carry a ``lineality`` basis.
    ``inequalities`` are the primitive facet normals, ``equations`` cut out
    the linear span.
    """

    lattice_rank: int
    generators: tuple[LatticeVector, ...]
    inequalities: tuple[Covector, ...]
    equations: tuple[Covector, ...] = ()
    lineality: tuple[LatticeVector, ...] = ()

    @property
    def dim(self) -> int:
        rows = [g.coords for g in self.generators] + [l.coords for l in self.lineality]
        return _rank(rows)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.lattice_rank

    @property
    def is_simplicial(self) -> bool:
        if not self.is_pointed:
            return False
        return len(self.generators) == self.dim

    @property
    def is_zero(self) -> bool:
        return not self.generators and not self.lineality

    def contains(self, v: LatticeVector) -> bool:
        return all(e.pair(v) == 0 for e in self.equations) and all(
            i.pair(v) >= 0 for i in self.inequalities
        )

    def contains_in_interior(self, v: LatticeVector) -> bool:
        """Membership in the relative interior."""
        return all(e.pair(v) == 0 for e in self.equations) and all(
            i.pair(v) > 0 for i in self.inequalities
        )

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators) and all(
            self.contains(l) and self.contains(-l) for l in other.lineality
        )

    def __repr__(self):
        gens = ", ".join(str(g.coords) for g in self.generators)
        extra = f" lineality={len(self.lineality)}" if self.lineality else ""
        return f"Cone[{gens}]{extra}"


def _build_cone(ray_tuples, lin_tuples, ineq_tuples, eq_tuples, rank) -> Cone:
    return Cone(
        lattice_rank=rank,
        generators=tuple(sorted(LatticeVector(r) for r in ray_tuples)),
        inequalities=tuple(
            sorted(Covector(tuple(Fraction(c) for c in m)) for m in ineq_tuples)
        ),
        equations=tuple(
            sorted(Covector(tuple(Fraction(c) for c in m)) for m in eq_tuples)
        ),
        lineality=tuple(sorted(LatticeVector(l) for l in lin_tuples)),
    )


def make_cone(vs: list[LatticeVector], require_pointed: bool = True) -> Cone:
    """Cone positively spanned by ``vs``.

    Redundant generators are discarded, the extreme rays primitivized and
    the facet inequalities computed by dualization.  Input containing a
    line is rejected ("not pointed").
    """
    if not vs:
        raise ConeError("empty generator list")
    rank = vs[0].rank
    gens = []
    seen = set()
    for v in vs:
        if v.rank != rank:
            raise ConeError("mixed ambient ranks in generator list")
        if v.is_zero:
            continue
        p = primitive(v).coords
        if p not in seen:
            seen.add(p)
            gens.append(p)
    if not gens:
        raise ConeError("cone generated by zero vectors only")
    dual_rays, dual_lin = extreme_rays(gens, rank)
    # pointedness: the dual must be full-dimensional
    if require_pointed and _rank(dual_rays + dual_lin) < rank:
        raise ConeError(f"not pointed: pos{sorted(gens)} contains a line")
    ineqs = dual_rays
    eqs = dual_lin
    extreme = []
    for g in gens:
        act = [m for m in ineqs if sum(a * b for a, b in zip(m, g)) == 0]
        if _rank(act + eqs) == rank - 1:
            extreme.append(g)
    return _build_cone(extreme, (), ineqs, eqs, rank)


def dual_cone(c: Cone) -> Cone:
    """The dual cone in the dual lattice.

    Both descriptions swap roles, so this is exact and involutive.  When
    ``c`` is not full-dimensional the dual is not pointed and records its
    lineality (the annihilator of lin(c)).
    """
    return _build_cone(
        [tuple(int(x) for x in m.primitive().coords) for m in c.inequalities],
        [tuple(int(x) for x in m.primitive().coords) for m in c.equations],
        [g.coords for g in c.generators],
        [l.coords for l in c.lineality],
        c.lattice_rank,
    )


def _face_generators(c: Cone, normals: tuple[Covector, ...]) -> tuple[LatticeVector, ...]:
    return tuple(g for g in c.generators if all(m.pair(g) == 0 for m in normals))


def faces(c: Cone) -> list[Cone]:
    """All faces of a pointed cone, from {0} up to the cone itself."""
    if not c.is_pointed:
        raise ConeError("face enumeration requires a pointed cone")
    face_sets = {c.generators}
    queue = [c.generators]
    while queue:
        gens = queue.pop()
        for m in c.inequalities:
            sub = tuple(g for g in gens if m.pair(g) == 0)
            if sub not in face_sets:
                face_sets.add(sub)
                queue.append(sub)
    face_sets.add(())
    result = []
    for gens in sorted(face_sets):
        if gens:
            result.append(make_cone(list(gens)))
        else:
            result.append(_build_cone((), (), (), [m.coords for m in _standard_basis(c.lattice_rank)], c.lattice_rank))
    return result


def _standard_basis(rank: int):
    return [Covector(tuple(Fraction(1 if i == j else 0) for j in range(rank))) for i in range(rank)]


def facets(c: Cone) -> list[Cone]:
    """Faces of codimension one (within the cone's own dimension)."""
    d = c.dim
    return [f for f in faces(c) if f.dim == d - 1]


def multiplicity(c: Cone) -> int:
    """mult(c; N): index of the generator sublattice in the induced lattice.

    Defined for simplicial cones only; equals 1 exactly for basic cones.
    """
    if not c.is_simplicial:
        raise ConeError("multiplicity undefined: cone is not simplicial")
    return lattice_determinant(list(c.generators))


def is_simplicial(c: Cone) -> bool:
    return c.is_simplicial


def is_basic(c: Cone) -> bool:
    """Smoothness test for the associated affine chart."""
    return c.is_simplicial and multiplicity(c) == 1


def intersect_cones(c1: Cone, c2: Cone) -> Cone:
    constraints = (
        [tuple(int(x) for x in m.primitive().coords) for m in c1.inequalities]
        + [tuple(int(x) for x in m.primitive().coords) for m in c2.inequalities]
    )
    for m in list(c1.equations) + list(c2.equations):
        mi = tuple(int(x) for x in m.primitive().coords)
        constraints.append(mi)
        constraints.append(tuple(-x for x in mi))
    rays, lin = extreme_rays(constraints, c1.lattice_rank)
    if lin:
        return _build_cone(rays, lin, (), (), c1.lattice_rank)
    if not rays:
        return _build_cone((), (), (), [m.coords for m in _standard_basis(c1.lattice_rank)], c1.lattice_rank)
    return make_cone([LatticeVector(r) for r in rays])


def _smallest_face(c: Cone, rays: tuple[LatticeVector, ...]) -> tuple[LatticeVector, ...]:
    """Generators of the smallest face of ``c`` containing all of ``rays``."""
    tight = [m for m in c.inequalities if all(m.pair(r) == 0 for r in rays)]
    return tuple(g for g in c.generators if all(m.pair(g) == 0 for m in tight))


def is_face_of(k: Cone, c: Cone) -> bool:
    if k.lineality:
        return False
    if not c.contains_cone(k):
        return False
    return frozenset(k.generators) == frozenset(_smallest_face(c, k.generators))


@dataclass(frozen=True)
class Fan:
    """Finite face-closed, intersection-compatible collection of pointed cones.

    Only the maximal cones are stored; equality is equality of that set.
    """

    lattice_rank: int
    maximal_cones: tuple[Cone, ...]

    def rays(self) -> tuple[LatticeVector, ...]:
        seen = set()
        out = []
        for c in self.maximal_cones:
            for g in c.generators:
                if g.coords not in seen:
                    seen.add(g.coords)
                    out.append(g)
        return tuple(sorted(out))

    def supports(self, v: LatticeVector) -> bool:
        return any(c.contains(v) for c in self.maximal_cones)

    def cone_containing(self, v: LatticeVector) -> Cone | None:
        for c in self.maximal_cones:
            if c.contains(v):
                return c
        return None

    def __repr__(self):
        return f"Fan({len(self.maximal_cones)} maximal cones, rank {self.lattice_rank})"


def make_fan(cones: list[Cone], validate: bool = True) -> Fan:
    """Validated fan from a list of cones.

    Cones that are faces of other cones are dropped; any pair whose
    intersection is not a common face is reported as an error.
    """
    if not cones:
        raise ConeError("empty fan")
    rank = cones[0].lattice_rank
    if any(c.lattice_rank != rank for c in cones):
        raise ConeError("cones live in different lattices")
    if any(not c.is_pointed for c in cones):
        raise ConeError("fans consist of pointed cones")
    unique = []
    for c in cones:
        if c not in unique:
            unique.append(c)
    maximal = []
    for c in unique:
        redundant = False
        for d in unique:
            if c is d or c == d:
                continue
            if d.contains_cone(c):
                if is_face_of(c, d) or frozenset(c.generators) == frozenset(d.generators):
                    redundant = True
                    break
                raise ConeError(f"cone {c} is contained in {d} but is not a face of it")
        if not redundant:
            maximal.append(c)
    if validate:
        for i in range(len(maximal)):
            for j in range(i + 1, len(maximal)):
                k = intersect_cones(maximal[i], maximal[j])
                if not (is_face_of(k, maximal[i]) and is_face_of(k, maximal[j])):
                    raise ConeError(
                        "incompatible cone pair: intersection of "
                        f"{maximal[i]} and {maximal[j]} is not a common face"
                    )
    key = lambda c: tuple(g.coords for g in c.generators)
    return Fan(lattice_rank=rank, maximal_cones=tuple(sorted(maximal, key=key)))


def star_subdivision(f: Fan, v: LatticeVector) -> Fan:
    """Stellar subdivision of the fan at the primitive lattice point ``v``.

    Every cone containing ``v`` is replaced by the joins of ``v`` with its
    facets not containing ``v``; the result refines ``f`` and has ray set
    Gen(f) united with {v}.
    """
    if v.is_zero:
        raise ConeError("cannot subdivide at the origin")
    if primitive(v) != v:
        raise ConeError(f"subdivision point {v.coords} is not primitive")
    if not f.supports(v):
        raise ConeError(f"subdivision point {v.coords} lies outside the fan support")
    new_cones: list[Cone] = []
    for c in f.maximal_cones:
        if not c.contains(v):
            new_cones.append(c)
            continue
        if any(g == v for g in c.generators) and not c.contains_in_interior(v):
            # v is an existing ray and subdividing changes nothing for this cone
            new_cones.append(c)
            continue
        for g in facets(c):
            if not g.contains(v):
                new_cones.append(make_cone(list(g.generators) + [v]))
    return make_fan(new_cones)
