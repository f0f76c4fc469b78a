"""Exact integer-lattice linear algebra: vectors, pairings, normal forms.

Everything here is bit-exact: lattice vectors carry Python integers,
functionals carry ``fractions.Fraction`` entries, and the normal-form
routines (Hermite, Smith) track unimodular transforms so that callers can
change bases, compute sublattice indices and solve integral systems
without ever touching floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class LatticeError(ValueError):
    """Domain error raised by lattice-level operations."""


@dataclass(frozen=True)
class LatticeVector:
    """Integer point of the lattice N (coordinates w.r.t. a fixed basis)."""

    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "LatticeVector":
        return LatticeVector(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __lt__(self, other: "LatticeVector") -> bool:
        return self.coords < other.coords

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return f"LatticeVector{self.coords}"


@dataclass(frozen=True)
class Covector:
    """Rational functional on N, i.e. an element of M_Q.

    The pairing against lattice vectors is exact; ``denominator`` is the
    least kappa >= 1 making kappa times the covector integral.
    """

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coords", tuple(Fraction(c) for c in self.coords)
        )

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    @property
    def denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coords)) if self.coords else 1

    @property
    def is_integral(self) -> bool:
        return self.denominator == 1

    def pair(self, v: LatticeVector) -> Fraction:
        return sum(
            (c * x for c, x in zip(self.coords, v.coords)), start=Fraction(0)
        )

    def __add__(self, other: "Covector") -> "Covector":
        return Covector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Covector") -> "Covector":
        return Covector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, k) -> "Covector":
        return Covector(tuple(Fraction(k) * a for a in self.coords))

    __rmul__ = __mul__

    def __lt__(self, other: "Covector") -> bool:
        return self.coords < other.coords

    def __iter__(self):
        return iter(self.coords)

    def integral_vector(self) -> LatticeVector:
        """The covector as a lattice vector of the dual lattice (must be integral)."""
        if not self.is_integral:
            raise LatticeError(f"covector {self.coords} is not integral")
        return LatticeVector(tuple(int(c) for c in self.coords))

    def primitive(self) -> "Covector":
        """Primitive integral covector on the same ray."""
        cleared = [int(c * self.denominator) for c in self.coords]
        g = math.gcd(*cleared)
        if g == 0:
            raise LatticeError("cannot primitivize the zero covector")
        return Covector(tuple(Fraction(c, g) for c in cleared))

    def __repr__(self):
        entries = ", ".join(str(c) for c in self.coords)
        return f"Covector({entries})"


def pair(m: Covector, n: LatticeVector) -> Fraction:
    """Exact natural pairing <m, n>."""
    return m.pair(n)


def primitive(v: LatticeVector) -> LatticeVector:
    """Divide v by the gcd of its coordinates.

    The result is the unique primitive lattice vector positively
    proportional to v.
    """
    if v.is_zero:
        raise LatticeError("the zero vector has no primitive representative")
    g = math.gcd(*v.coords)
    return LatticeVector(tuple(c // g for c in v.coords))


def dot(u: LatticeVector, v: LatticeVector) -> int:
    return sum(a * b for a, b in zip(u.coords, v.coords))


# ---------------------------------------------------------------------------
# integer matrices and normal forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix (tuple of row tuples)."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "rows", tuple(tuple(int(x) for x in r) for r in self.rows)
        )
        if self.rows and len({len(r) for r in self.rows}) != 1:
            raise LatticeError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_vectors(cls, vs) -> "IntMatrix":
        return cls(tuple(tuple(v.coords) for v in vs))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows))) if self.rows else IntMatrix(())

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        bt = list(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in bt)
                for row in self.rows
            )
        )

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        n = self.nrows
        if n != self.ncols:
            raise LatticeError("determinant of a non-square matrix")
        if n == 0:
            return 1
        a = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[-1][-1]

    def is_unimodular(self) -> bool:
        return self.nrows == self.ncols and abs(self.det()) == 1

    def inverse_unimodular(self) -> "IntMatrix":
        """Exact inverse of a unimodular matrix (integer entries)."""
        d = self.det()
        if abs(d) != 1:
            raise LatticeError("matrix is not unimodular")
        n = self.nrows
        adj = []
        for i in range(n):
            adj.append(
                tuple(
                    (-1) ** (i + j) * self._minor(j, i).det() * d
                    for j in range(n)
                )
            )
        return IntMatrix(tuple(adj))

    def _minor(self, i: int, j: int) -> "IntMatrix":
        return IntMatrix(
            tuple(
                tuple(x for jj, x in enumerate(r) if jj != j)
                for ii, r in enumerate(self.rows)
                if ii != i
            )
        )

    def apply(self, v: LatticeVector) -> LatticeVector:
        return LatticeVector(tuple(sum(a * x for a, x in zip(r, v.coords)) for r in self.rows))


def hermite_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form: returns (H, U) with H = U*A, |det U| = 1.

    Pivots are positive, entries below a pivot vanish and entries above are
    reduced into [0, pivot).  Classical gcd-based row reduction; fine at
    desk scale.
    """
    h = [list(r) for r in a.rows]
    m = a.nrows
    u = [list(r) for r in IntMatrix.identity(m).rows]
    row = 0
    for col in range(a.ncols):
        while True:
            nz = [i for i in range(row, m) if h[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i][col]))
            if piv != row:
                h[row], h[piv] = h[piv], h[row]
                u[row], u[piv] = u[piv], u[row]
            done = True
            for i in range(row + 1, m):
                if h[i][col] != 0:
                    q = h[i][col] // h[row][col]
                    h[i] = [x - q * y for x, y in zip(h[i], h[row])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[row])]
                    if h[i][col] != 0:
                        done = False
            if done:
                break
        if row < m and h[row][col] != 0:
            if h[row][col] < 0:
                h[row] = [-x for x in h[row]]
                u[row] = [-x for x in u[row]]
            for i in range(row):
                q = h[i][col] // h[row][col]
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[row])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[row])]
            row += 1
    return IntMatrix(tuple(tuple(r) for r in h)), IntMatrix(tuple(tuple(r) for r in u))


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns (S, U, V) with S = U*A*V diagonal, d1 | d2 | ...

    U and V are unimodular.
    """
    s = [list(r) for r in a.rows]
    m, n = a.nrows, a.ncols
    u = [list(r) for r in IntMatrix.identity(m).rows]
    v = [list(r) for r in IntMatrix.identity(n).rows]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_op(i, j, q):  # row_i -= q * row_j
        s[i] = [x - q * y for x, y in zip(s[i], s[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in s:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    t = 0
    while t < min(m, n):
        pivots = [
            (abs(s[i][j]), i, j)
            for i in range(t, m)
            for j in range(t, n)
            if s[i][j] != 0
        ]
        if not pivots:
            break
        _, pi, pj = min(pivots)
        swap_rows(t, pi)
        swap_cols(t, pj)
        dirty = False
        for i in range(t + 1, m):
            if s[i][t] != 0:
                q = s[i][t] // s[t][t]
                row_op(i, t, q)
                dirty = dirty or s[i][t] != 0
        for j in range(t + 1, n):
            if s[t][j] != 0:
                q = s[t][j] // s[t][t]
                col_op(j, t, q)
                dirty = dirty or s[t][j] != 0
        if dirty:
            continue
        # enforce divisibility: fold any non-multiple entry into the pivot block
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if s[i][j] % s[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            s[t] = [x + y for x, y in zip(s[t], s[offender])]
            u[t] = [x + y for x, y in zip(u[t], u[offender])]
            continue
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return (
        IntMatrix(tuple(tuple(r) for r in s)),
        IntMatrix(tuple(tuple(r) for r in u)),
        IntMatrix(tuple(tuple(r) for r in v)),
    )


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Nonzero diagonal entries d1 | d2 | ... of the Smith normal form."""
    s, _, _ = smith_normal_form(a)
    return tuple(
        s.rows[i][i] for i in range(min(s.nrows, s.ncols)) if s.rows[i][i] != 0
    )


def lattice_determinant(vs: list[LatticeVector]) -> int:
    """Index of the subgroup sum(Z*v_i) inside the lattice on its linear span.

    Computed as the product of the Smith invariant factors of the matrix
    with rows v_i; requires the v_i to be linearly independent.
    """
    if not vs:
        raise LatticeError("empty generating set")
    facs = invariant_factors(IntMatrix.from_vectors(vs))
    if len(facs) != len(vs):
        raise LatticeError("vectors are linearly dependent")
    return math.prod(facs)


def integer_kernel(a: IntMatrix) -> list[LatticeVector]:
    """Basis of the saturated integer kernel {x in Z^n : A x = 0}."""
    at = a.transpose()
    h, u = hermite_normal_form(at)
    basis = []
    for i in range(at.nrows):
        if all(x == 0 for x in h.rows[i]):
            basis.append(LatticeVector(u.rows[i]))
    return basis


def rational_solve(rows: list[LatticeVector], rhs: list[Fraction]):
    """Solve <x, row_i> = rhs_i over Q.

    Returns (solution as Covector, n_free) or None when inconsistent.  When
    the system is underdetermined, free variables are set to zero.
    """
    if not rows:
        raise LatticeError("empty system")
    n = rows[0].rank
    aug = [[Fraction(c) for c in r.coords] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        aug[r] = [x / aug[r][c] for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return Covector(tuple(x)), n - len(pivots)


def minimal_integral_scale(rows: list[LatticeVector], rhs: list[int]):
    """Least k >= 1 such that <x, row_i> = k * rhs_i has an integer solution x.

    Returns (k, witness Covector with integer entries) or None when no
    positive multiple admits a solution.
    """
    a = IntMatrix.from_vectors(rows)
    # solve A x = k b; transpose to act on column vector x: rows of A pair with x
    s, u, v = smith_normal_form(a)
    ub = [sum(q * b for q, b in zip(urow, rhs)) for urow in u.rows]
    m, n = a.nrows, a.ncols
    k = 1
    for i in range(m):
        d = s.rows[i][i] if i < min(m, n) else 0
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            k = math.lcm(k, d // math.gcd(d, ub[i])) if ub[i] != 0 else k
    y = []
    for j in range(n):
        d = s.rows[j][j] if j < min(m, n) else 0
        if d == 0:
            y.append(0)
        else:
            y.append(k * ub[j] // d if j < m else 0)
    # x = V y
    x = [sum(v.rows[i][j] * y[j] for j in range(n)) for i in range(n)]
    witness = Covector(tuple(Fraction(c) for c in x))
    for row, b in zip(rows, rhs):
        if witness.pair(row) != k * b:
            return None
    return k, witness


def extended_gcd_vector(coords: tuple[int, ...]) -> tuple[int, list[int]]:
    """g = gcd(coords) together with integers w such that sum w_i coords_i = g."""
    g, w = 0, [0] * len(coords)
    for i, c in enumerate(coords):
        if c == 0:
            continue
        if g == 0:
            g, w = abs(c), [0] * len(coords)
            w[i] = 1 if c > 0 else -1
            continue
        x, y, gg = _xgcd(g, c)
        w = [x * t for t in w]
        w[i] += y
        g = gg
    if g == 0:
        raise LatticeError("extended gcd of the zero vector")
    return g, w


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def hyperplane_basis(m: Covector) -> IntMatrix:
    """Unimodular basis matrix B = [k1 ... k_{r-1} w] adapted to a primitive m.

    The first r-1 columns span ker(m) as a saturated sublattice and the last
    column w satisfies <m, w> = 1, so expressing a vector in this basis puts
    <m, .> into the final coordinate.
    """
    mi = m.primitive().integral_vector()
    kernel = integer_kernel(IntMatrix((mi.coords,)))
    # canonicalize the kernel basis so that standard covectors yield the identity
    kh, _ = hermite_normal_form(IntMatrix.from_vectors(kernel))
    kernel = [LatticeVector(r) for r in kh.rows if any(x != 0 for x in r)]
    g, w = extended_gcd_vector(mi.coords)
    if g != 1:
        raise LatticeError("covector is not primitive")
    cols = [list(k.coords) for k in kernel] + [w]
    b = IntMatrix(tuple(zip(*cols)))
    if not b.is_unimodular():
        raise LatticeError("failed to complete covector to a unimodular basis")
    return b
