"""Exact linear algebra over the rationals.

Scalars are ``gmpy2.mpq`` rationals (exact, and much faster than
:class:`fractions.Fraction`); vectors are tuples of scalars and matrices are
tuples of rows.  Every routine is deterministic: row reduction always picks the
leftmost available pivot column and the topmost usable row, so identical
inputs give identical bases and solutions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import gmpy2

Q = gmpy2.mpq
_MPQ = type(Q(0))
ZERO = Q(0)
ONE = Q(1)

Vector = tuple
Matrix = tuple


class LinAlgError(ValueError):
    """Raised when a linear-algebra precondition fails."""


# ---------------------------------------------------------------------------
# scalars and serialization


def q(x):
    """Coerce ints, strings like ``"3/4"``, Fractions and mpq values to a scalar."""
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        raise TypeError("refusing to coerce a bool to a rational")
    if isinstance(x, (int, Fraction)):
        return Q(x)
    if isinstance(x, str):
        text = x.strip()
        if not text or any(ch not in "0123456789-+/" for ch in text):
            raise ValueError(f"not a rational literal: {x!r}")
        return Q(Fraction(text))
    if type(x).__name__ == "mpz":
        return Q(x)
    raise TypeError(f"refusing to coerce {type(x).__name__} to an exact rational")


def q_to_str(x) -> str:
    x = q(x)
    num, den = int(x.numerator), int(x.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def matrix_to_json(m: Matrix) -> list:
    return [[q_to_str(x) for x in row] for row in m]


def matrix_from_json(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(q(x) for x in row) for row in rows)


# ---------------------------------------------------------------------------
# vectors


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Vector) -> Vector:
    if c == 0:
        return zeros(len(u))
    return tuple(c * a for a in u)


def vsum(vectors: Iterable[Vector], n: int) -> Vector:
    acc = [ZERO] * n
    for v in vectors:
        for i, a in enumerate(v):
            if a:
                acc[i] += a
    return tuple(acc)


def is_zero(v: Vector) -> bool:
    return not any(v)


# ---------------------------------------------------------------------------
# matrices


def mat_zero(rows: int, cols: int) -> Matrix:
    return tuple((ZERO,) * cols for _ in range(rows))


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def shape(m: Matrix, cols: Optional[int] = None) -> tuple[int, int]:
    if not m:
        return 0, (cols or 0)
    return len(m), len(m[0])


def transpose(m: Matrix, cols: int = 0) -> Matrix:
    if not m:
        return tuple(() for _ in range(cols))
    return tuple(zip(*m))


def mat_vec(m: Matrix, v: Vector) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in m)


def mat_mul(a: Matrix, b: Matrix, cols: Optional[int] = None) -> Matrix:
    """Product ``a @ b``.  ``cols`` (columns of ``b``) is needed when ``b`` has no rows."""
    if not a:
        return ()
    if not b:
        return mat_zero(len(a), cols or 0)
    bt = transpose(b)
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in bt)
        for row in a
    )


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(vadd(r, s) for r, s in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(vsub(r, s) for r, s in zip(a, b))


def mat_scale(c, a: Matrix) -> Matrix:
    return tuple(vscale(c, r) for r in a)


def from_columns(cols: Sequence[Vector], rows: int) -> Matrix:
    if not cols:
        return tuple(() for _ in range(rows))
    return tuple(zip(*cols))


def columns(m: Matrix, cols: int) -> list[Vector]:
    if not m:
        return [() for _ in range(cols)]
    return list(zip(*m))


def block_diag(blocks: Sequence[tuple[Matrix, int, int]]) -> Matrix:
    """Block-diagonal matrix from ``(matrix, rows, cols)`` triples."""
    total_cols = sum(c for _, _, c in blocks)
    out = []
    offset = 0
    for m, r, c in blocks:
        for i in range(r):
            row = [ZERO] * total_cols
            row[offset:offset + c] = m[i]
            out.append(tuple(row))
        offset += c
    return tuple(out)


# ---------------------------------------------------------------------------
# row reduction


def rref(m: Matrix, cols: Optional[int] = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns (leftmost pivots first)."""
    rows = [list(r) for r in m]
    ncols = len(rows[0]) if rows else (cols or 0)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = [x / lead if x else x for x in rows[r]]
        prow = rows[r]
        # entries left of the pivot column vanish in the pivot row
        support = [j for j in range(c, ncols) if prow[j]]
        for i in range(len(rows)):
            row = rows[i]
            if i != r and row[c]:
                f = row[c]
                for j in support:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel(m: Matrix, cols: Optional[int] = None) -> list[Vector]:
    """Basis of the null space, one vector per free column, in free-variable form."""
    ncols = len(m[0]) if m else (cols or 0)
    if cols is not None and m and len(m[0]) != cols:
        raise LinAlgError("column count mismatch")
    reduced, pivots = rref(m, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for row, p in zip(reduced, pivots):
            v[p] = -row[free]
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, b: Vector, cols: Optional[int] = None) -> Optional[Vector]:
    """Canonical solution of ``m x = b`` with all free variables zero, or None."""
    ncols = len(m[0]) if m else (cols or 0)
    if len(m) != len(b):
        raise LinAlgError("right-hand side has the wrong length")
    augmented = tuple(tuple(row) + (bi,) for row, bi in zip(m, b))
    reduced, pivots = rref(augmented, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [ZERO] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return tuple(x)


def solve_many(m: Matrix, rhs: Sequence[Vector], cols: int) -> Optional[list[Vector]]:
    """Solve ``m x = b`` for several right-hand sides with one reduction."""
    if not rhs:
        return []
    nrows = len(m)
    if nrows == 0:
        return [zeros(cols) for _ in rhs]
    k = len(rhs)
    augmented = tuple(tuple(m[i]) + tuple(b[i] for b in rhs) for i in range(nrows))
    reduced, pivots = rref(augmented, cols + k)
    if any(p >= cols for p in pivots):
        return None
    out = []
    for j in range(k):
        x = [ZERO] * cols
        for row, p in zip(reduced, pivots):
            x[p] = row[cols + j]
        out.append(tuple(x))
    return out


def inverse(m: Matrix) -> Optional[Matrix]:
    """Inverse of a square matrix, or None when singular."""
    n = len(m)
    if n == 0:
        return ()
    if any(len(r) != n for r in m):
        raise LinAlgError("inverse needs a square matrix")
    augmented = tuple(tuple(r) + unit(n, i) for i, r in enumerate(m))
    reduced, pivots = rref(augmented, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return tuple(tuple(row[n:]) for row in reduced[:n])


def independent_columns(vectors: Sequence[Vector], dim: int) -> list[int]:
    """Indices of a maximal independent subfamily, chosen greedily left to right."""
    if not vectors:
        return []
    _, pivots = rref(from_columns(vectors, dim), len(vectors))
    return pivots


def column_space(vectors: Sequence[Vector], dim: int) -> list[Vector]:
    return [vectors[i] for i in independent_columns(vectors, dim)]


def left_inverse(cols: Sequence[Vector], dim: int) -> Matrix:
    """A matrix ``L`` with ``L @ [cols] = id`` for linearly independent columns.

    ``L`` is chosen canonically: it is supported on the pivot rows of the
    column matrix, so it only depends on the columns themselves.
    """
    k = len(cols)
    if k == 0:
        return ()
    m = from_columns(cols, dim)
    rows_used = independent_columns([tuple(r) for r in m], k)
    if len(rows_used) != k:
        raise LinAlgError("columns are not linearly independent")
    square = tuple(m[r] for r in rows_used)
    inv = inverse(square)
    out = []
    for i in range(k):
        row = [ZERO] * dim
        for j, r in enumerate(rows_used):
            row[r] = inv[i][j]
        out.append(tuple(row))
    return tuple(out)


# ---------------------------------------------------------------------------
# sections


def random_vector(rng: random.Random, n: int, spread: int = 3) -> Vector:
    return tuple(Q(rng.randint(-spread, spread)) for _ in range(n))


def section_of(
    f: Matrix,
    domain_dim: int,
    constraint: Sequence[Vector] = (),
    rng: Optional[random.Random] = None,
    max_tries: int = 200,
) -> Matrix:
    """A right inverse of ``f`` on its image whose image contains ``constraint``.

    ``f`` maps a ``domain_dim``-dimensional space into an ambient space; the
    section is returned as a matrix on the ambient space and is a right inverse
    of ``f`` on ``im f``.  When ``f`` is onto the ambient space this is an
    honest section.  The constraint vectors (in the domain) must meet
    ``ker f`` trivially.  Without an ``rng`` the remaining preimages are the
    canonical solutions; with one they are random integer vectors.
    """
    codim = len(f)
    fcols = columns(f, domain_dim)
    constraint = column_space(list(constraint), domain_dim)
    images = [mat_vec(f, c) for c in constraint]
    if len(independent_columns(images, codim)) != len(images):
        raise LinAlgError("constraint meets the kernel of the map")
    image_rank = len(independent_columns(fcols, codim))
    chosen = list(constraint)
    hs = list(images)
    if rng is None:
        for i, col in enumerate(fcols):
            if len(hs) == image_rank:
                break
            if len(independent_columns(hs + [col], codim)) > len(hs):
                hs.append(col)
                chosen.append(unit(domain_dim, i))
    else:
        tries = 0
        while len(hs) < image_rank:
            tries += 1
            if tries > max_tries:
                raise LinAlgError("failed to complete a random basis of the image")
            x = random_vector(rng, domain_dim)
            fx = mat_vec(f, x)
            if len(independent_columns(hs + [fx], codim)) > len(hs):
                hs.append(fx)
                chosen.append(x)
    if not hs:
        return mat_zero(domain_dim, codim)
    left = left_inverse(hs, codim)
    return mat_mul(from_columns(chosen, domain_dim), left)


def is_surjective(f: Matrix, codim: int) -> bool:
    return rank(f) == codim


@dataclass(frozen=True)
class VectorSpaceQ:
    """A finite-dimensional rational vector space with optional basis labels."""

    dimension: int
    labels: tuple = ()

    def __post_init__(self):
        if self.dimension < 0:
            raise LinAlgError("dimension must be nonnegative")
        if self.labels and len(self.labels) != self.dimension:
            raise LinAlgError("one label per basis vector")


@dataclass(frozen=True)
class LinMap:
    """A linear map between rational vector spaces, stored as a matrix."""

    domain: VectorSpaceQ
    codomain: VectorSpaceQ
    matrix: Matrix

    def __post_init__(self):
        rows = len(self.matrix)
        if rows != self.codomain.dimension:
            raise LinAlgError("matrix rows must match the codomain dimension")
        if any(len(r) != self.domain.dimension for r in self.matrix):
            raise LinAlgError("matrix columns must match the domain dimension")

    @classmethod
    def of(cls, matrix: Sequence[Sequence], domain_dim: Optional[int] = None) -> "LinMap":
        m = tuple(tuple(q(x) for x in row) for row in matrix)
        cols = len(m[0]) if m else (domain_dim or 0)
        return cls(VectorSpaceQ(cols), VectorSpaceQ(len(m)), m)

    def __call__(self, v: Vector) -> Vector:
        return mat_vec(self.matrix, v)

    def compose(self, other: "LinMap") -> "LinMap":
        """``self ∘ other``."""
        if other.codomain.dimension != self.domain.dimension:
            raise LinAlgError("dimension mismatch in composition")
        m = mat_mul(self.matrix, other.matrix, other.domain.dimension)
        return LinMap(other.domain, self.codomain, m)

    def kernel(self) -> list[Vector]:
        return kernel(self.matrix, self.domain.dimension)

    def rank(self) -> int:
        return rank(self.matrix)

    def solve(self, b: Vector) -> Optional[Vector]:
        return solve(self.matrix, b, self.domain.dimension)

    def section(self, constraint: Sequence[Vector] = (), seed: Optional[int] = None) -> "LinMap":
        if self.rank() != self.codomain.dimension:
            raise LinAlgError("map is not surjective")
        rng = None if seed is None else random.Random(seed)
        m = section_of(self.matrix, self.domain.dimension, constraint, rng)
        return LinMap(self.codomain, self.domain, m)
