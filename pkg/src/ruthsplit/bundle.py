"""Simplicial vector bundles over a base simplicial set.

A bundle assigns a fiber ``V|g`` (a coordinate space ``Q^d``) to every base
simplex ``g`` and a matrix ``V_theta: V|g -> V|g theta`` to every poset map.
Subclasses provide either the whole action or just faces and degeneracies;
the general action is assembled from the epi-mono factorization and cached.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import combinatorics as cb
from .combinatorics import PosetMap, delta, upsilon
from .linalg import (
    ONE, Q, ZERO, LinAlgError, Matrix, Vector, columns, from_columns, identity, independent_columns,
    inverse, kernel, left_inverse, mat_add, mat_mul, mat_scale, mat_sub, mat_vec, mat_zero,
    matrix_from_json, matrix_to_json, rank, unit,
)


class BundleError(ValueError):
    """Raised for malformed bundle data or requests beyond a bundle's reach."""


def seeded_rng(*parts) -> random.Random:
    """A ``random.Random`` whose state depends only on ``parts`` (stable across runs)."""
    digest = hashlib.sha256(repr(parts).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def unit_simplex(base, x, n: int):
    """The totally degenerate ``n``-simplex ``1_n x`` at a vertex ``x``."""
    return base.act(x, PosetMap((0,) * (n + 1), 0))


def vertex_at(base, g, i: int):
    return base.act(g, cb.vertex_map(i, base.dim_of(g)))


def source_of(base, g):
    return vertex_at(base, g, 0)


def target_of(base, g):
    return vertex_at(base, g, base.dim_of(g))


class VectorFibration:
    """Base class.  Subclasses implement ``_dim`` and either ``_act`` or both
    ``_face`` and ``_degen``."""

    kind = "bundle"
    #: least ``s`` such that horn fillers are unique in dimensions ``>= s``
    strictness: Optional[int] = None

    def __init__(self, base, name: str = "V"):
        self.base = base
        self.name = name
        self._dim_cache: dict = {}
        self._act_cache: dict = {}

    # to be provided --------------------------------------------------------
    def _dim(self, g) -> int:
        raise NotImplementedError

    def _face(self, g, i: int) -> Matrix:
        raise NotImplementedError

    def _degen(self, g, j: int) -> Matrix:
        raise NotImplementedError

    def _act(self, g, theta: PosetMap) -> Matrix:
        epi, mono = cb.epi_mono_factor(theta)
        mat = identity(self.dim(g))
        cur = g
        for i in cb.mono_as_faces(mono):
            f = self._face(cur, i)
            mat = mat_mul(f, mat, self.dim(g))
            cur = self.base.face(cur, i)
        for j in cb.epi_as_degeneracies(epi):
            d = self._degen(cur, j)
            mat = mat_mul(d, mat, self.dim(g))
            cur = self.base.degeneracy(cur, j)
        return mat

    # public ------------------------------------------------------------------
    def dim(self, g) -> int:
        d = self._dim_cache.get(g)
        if d is None:
            d = self._dim(g)
            self._dim_cache[g] = d
        return d

    def act(self, g, theta: PosetMap) -> Matrix:
        """Matrix of ``V_theta: V|g -> V|(g theta)``."""
        key = (g, theta.values)
        hit = self._act_cache.get(key)
        if hit is None:
            if theta.is_identity():
                hit = identity(self.dim(g))
            else:
                hit = self._act(g, theta)
            self._act_cache[key] = hit
        return hit

    def face(self, g, i: int) -> Matrix:
        return self.act(g, delta(i, self.base.dim_of(g)))

    def degeneracy(self, g, j: int) -> Matrix:
        return self.act(g, upsilon(j, self.base.dim_of(g)))

    def apply(self, g, theta: PosetMap, v: Vector) -> Vector:
        return mat_vec(self.act(g, theta), v)

    # horns ---------------------------------------------------------------
    def horn_layout(self, g, k: int) -> list[tuple[int, int, int]]:
        """``(i, offset, dim)`` for the blocks ``V|d_i g``, ``i != k``, of the ambient horn space."""
        n = self.base.dim_of(g)
        out, off = [], 0
        for i in range(n + 1):
            if i == k:
                continue
            d = self.dim(self.base.face(g, i))
            out.append((i, off, d))
            off += d
        return out

    def rho(self, g, k: int) -> Matrix:
        """Horn restriction ``V|g -> ⊕_{i != k} V|d_i g``."""
        rows: list = []
        n = self.base.dim_of(g)
        for i in range(n + 1):
            if i != k:
                rows.extend(self.face(g, i))
        return tuple(rows)

    def horn_constraints(self, g, k: int) -> tuple[Matrix, int]:
        """Matrix whose kernel is the space of matching horn tuples."""
        layout = self.horn_layout(g, k)
        total = sum(d for _, _, d in layout)
        pos = {i: (off, d) for i, off, d in layout}
        rows = []
        keys = [i for i, _, _ in layout]
        for a, i in enumerate(keys):
            for j in keys[a + 1:]:
                # d_i x_j - d_{j-1} x_i = 0
                fj = self.face(self.base.face(g, j), i)
                fi = self.face(self.base.face(g, i), j - 1)
                oj, dj = pos[j]
                oi, di = pos[i]
                for r in range(len(fj)):
                    row = [ZERO] * total
                    for c in range(dj):
                        row[oj + c] += fj[r][c]
                    for c in range(di):
                        row[oi + c] -= fi[r][c]
                    rows.append(tuple(row))
        return tuple(rows), total

    def horn_space(self, g, k: int) -> list[Vector]:
        cons, total = self.horn_constraints(g, k)
        if not cons:
            return [unit(total, i) for i in range(total)]
        return kernel(cons, total)

    def degenerate_vectors(self, g) -> list[Vector]:
        """Spanning vectors of the degenerate part ``Σ_j u_j(V|d_j g)`` for ``g = u_j d_j g``."""
        n = self.base.dim_of(g)
        out = []
        for j in range(n):
            lower = self.base.face(g, j)
            if self.base.degeneracy(lower, j) == g:
                out.extend(columns(self.degeneracy(lower, j), self.dim(lower)))
        return out

    def unit(self, x, n: int):
        return unit_simplex(self.base, x, n)

    def vertices(self) -> list:
        return list(self.base.simplices(0))


# ---------------------------------------------------------------------------
# fibration check


@dataclass
class FibrationReport:
    up_to: int
    surjective: bool = True
    strictness: Optional[int] = None
    failures: list = field(default_factory=list)   # (n, k, g, rank, horn dim)
    non_injective: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.surjective


def check_fibration(bundle: VectorFibration, up_to: int) -> FibrationReport:
    """Compare the rank of every horn restriction with the dimension of its horn space."""
    rep = FibrationReport(up_to)
    worst = -1
    for n in range(1, up_to + 1):
        for g in bundle.base.simplices(n):
            for k in range(n + 1):
                r = rank(bundle.rho(g, k)) if bundle.dim(g) else 0
                h = len(bundle.horn_space(g, k))
                if r != h:
                    rep.surjective = False
                    rep.failures.append((n, k, g, r, h))
                if r != bundle.dim(g):
                    rep.non_injective.append((n, k, g))
                    worst = max(worst, n)
    rep.strictness = worst + 1 if rep.surjective else None
    return rep


def simplicial_identity_defects(bundle: VectorFibration, cap: int) -> list:
    """Every simplicial identity among face and degeneracy matrices over simplices of
    dimension ``<= cap``; returns ``(identity, g, i, j)`` for each violation."""
    base = bundle.base
    F, S = bundle.face, bundle.degeneracy
    bad = []
    for n in range(0, cap + 1):
        for g in base.simplices(n):
            d = bundle.dim(g)
            for j in range(n + 1):
                for i in range(j):
                    if n >= 2:
                        lhs = mat_mul(F(base.face(g, j), i), F(g, j), d)
                        rhs = mat_mul(F(base.face(g, i), j - 1), F(g, i), d)
                        if lhs != rhs:
                            bad.append(("dd", g, i, j))
            if n == cap:
                continue
            for j in range(n + 1):
                up = base.degeneracy(g, j)
                s = S(g, j)
                for i in range(n + 2):
                    lhs = mat_mul(F(up, i), s, d)
                    if i in (j, j + 1):
                        rhs = identity(d)
                    elif i < j:
                        rhs = mat_mul(S(base.face(g, i), j - 1), F(g, i), d)
                    else:
                        rhs = mat_mul(S(base.face(g, i - 1), j), F(g, i - 1), d)
                    if lhs != rhs:
                        bad.append(("ds", g, i, j))
                if n + 1 < cap:
                    for i in range(j + 1):
                        lhs = mat_mul(S(up, i), s, d)
                        rhs = mat_mul(S(base.degeneracy(g, i), j + 1), S(g, i), d)
                        if lhs != rhs:
                            bad.append(("ss", g, i, j))
    return bad


# ---------------------------------------------------------------------------
# concrete bundles


class DirectSumBundle(VectorFibration):
    """The direct-sum generator: ``V_n|g = ⊕_{alpha: [k] >-> [n]} E_k`` with
    ``pr_alpha V_theta = pr_{theta alpha}`` when ``theta alpha`` is injective and 0
    otherwise.  ``E_k`` is the trivial bundle of rank ``dims[k]``."""

    kind = "direct-sum"

    def __init__(self, base, dims: Sequence[int], name: str = "V"):
        super().__init__(base, name)
        self.dims = tuple(dims)
        # ker rho_{n,k} contains the d_k summand E_{n-1}, so uniqueness starts at K + 2
        self.strictness = len(self.dims) + 1
        self._layout_cache: dict = {}

    def layout(self, n: int) -> list[tuple[tuple, int, int]]:
        """``(alpha values, offset, rank)`` for each summand of ``V_n``."""
        hit = self._layout_cache.get(n)
        if hit is None:
            hit, off = [], 0
            for k, e in enumerate(self.dims):
                if k > n or e == 0:
                    continue
                for alpha in cb.enumerate_injections(k, n):
                    hit.append((alpha.values, off, e))
                    off += e
            self._layout_cache[n] = hit
        return hit

    def _dim(self, g) -> int:
        lay = self.layout(self.base.dim_of(g))
        return sum(e for _, _, e in lay)

    def _act(self, g, theta: PosetMap) -> Matrix:
        n, m = theta.target_dim, theta.source_dim
        src = {a: (off, e) for a, off, e in self.layout(n)}
        rows = []
        for beta, off, e in self.layout(m):
            comp = tuple(theta.values[b] for b in beta)
            for r in range(e):
                row = [ZERO] * self.dim(g)
                if len(set(comp)) == len(comp):
                    soff, _ = src[comp]
                    row[soff + r] = ONE
                rows.append(tuple(row))
        return tuple(rows)

    def kernel_of_rho(self, g, k: int) -> list[Vector]:
        """The two-summand subspace spanned by the ``d_k``-summand and the identity summand."""
        n = self.base.dim_of(g)
        out = []
        targets = {tuple(i for i in range(n + 1) if i != k), tuple(range(n + 1))}
        for alpha, off, e in self.layout(n):
            if alpha in targets:
                out.extend(unit(self.dim(g), off + r) for r in range(e))
        return out


class GaugedBundle(VectorFibration):
    """``A(g theta) V_theta A(g)^{-1}`` for seeded random invertible ``A(g)``.

    Isomorphic to the inner bundle but with generic-looking matrices, which
    exercises every code path that a permutation-like action would not.
    """

    kind = "gauged"

    def __init__(self, inner: VectorFibration, seed: int, spread: int = 2, name: str = ""):
        super().__init__(inner.base, name or f"{inner.name}^gauge{seed}")
        self.inner = inner
        self.seed = seed
        self.spread = spread
        self.strictness = inner.strictness
        self._gauge: dict = {}

    def gauge(self, g) -> tuple[Matrix, Matrix]:
        hit = self._gauge.get(g)
        if hit is None:
            d = self.inner.dim(g)
            rng = seeded_rng("gauge", self.seed, g)
            while True:
                a = tuple(tuple(Q(rng.randint(-self.spread, self.spread)) for _ in range(d)) for _ in range(d))
                inv = inverse(a)
                if inv is not None:
                    break
            hit = (a, inv)
            self._gauge[g] = hit
        return hit

    def _dim(self, g) -> int:
        return self.inner.dim(g)

    def _act(self, g, theta: PosetMap) -> Matrix:
        target = self.base.act(g, theta)
        a_t, _ = self.gauge(target)
        _, a_inv = self.gauge(g)
        inner = self.inner.act(g, theta)
        d = self.dim(g)
        return mat_mul(a_t, mat_mul(inner, a_inv, d), d)


class TabulatedBundle(VectorFibration):
    """A bundle given by explicit face and degeneracy matrices up to ``level``.

    Above ``level`` the fiber over ``g`` is the space of matching boundary
    tuples ``(v_0, ..., v_n)`` with ``v_i`` in ``V|d_i g``; faces project and
    degeneracies follow the simplicial identities.  This is faithful when
    fillers are unique from dimension ``level`` on, i.e. ``strictness <= level``.
    """

    kind = "tabulated"

    def __init__(self, base, level: int, dims: dict, faces: dict, degens: dict,
                 strictness: Optional[int] = None, name: str = "V"):
        super().__init__(base, name)
        self.level = level
        self.table_dims = dict(dims)
        self.table_faces = dict(faces)
        self.table_degens = dict(degens)
        self.strictness = strictness
        self._match: dict = {}

    @classmethod
    def snapshot(cls, bundle: VectorFibration, level: int, name: str = "") -> "TabulatedBundle":
        dims, faces, degens = {}, {}, {}
        for n in range(level + 1):
            for g in bundle.base.simplices(n):
                dims[g] = bundle.dim(g)
                if n > 0:
                    for i in range(n + 1):
                        faces[(g, i)] = bundle.face(g, i)
                if n < level:
                    for j in range(n + 1):
                        degens[(g, j)] = bundle.degeneracy(g, j)
        return cls(bundle.base, level, dims, faces, degens, bundle.strictness, name or bundle.name)

    def _matching(self, g):
        """Basis (as columns of the ambient ``⊕_i V|d_i g``), its left inverse and block layout."""
        hit = self._match.get(g)
        if hit is None:
            n = self.base.dim_of(g)
            layout, off = [], 0
            for i in range(n + 1):
                d = self.dim(self.base.face(g, i))
                layout.append((off, d))
                off += d
            rows = []
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    fj = self.face(self.base.face(g, j), i)
                    fi = self.face(self.base.face(g, i), j - 1)
                    (oj, dj), (oi, di) = layout[j], layout[i]
                    for r in range(len(fj)):
                        row = [ZERO] * off
                        for c in range(dj):
                            row[oj + c] += fj[r][c]
                        for c in range(di):
                            row[oi + c] -= fi[r][c]
                        rows.append(tuple(row))
            basis = kernel(tuple(rows), off) if rows else [unit(off, i) for i in range(off)]
            left = left_inverse(basis, off) if basis else ()
            hit = (basis, left, layout, off)
            self._match[g] = hit
        return hit

    def _dim(self, g) -> int:
        n = self.base.dim_of(g)
        if n <= self.level:
            if g not in self.table_dims:
                raise BundleError(f"no fiber recorded over {g}")
            return self.table_dims[g]
        return len(self._matching(g)[0])

    def _face(self, g, i: int) -> Matrix:
        n = self.base.dim_of(g)
        if n <= self.level:
            return self.table_faces[(g, i)]
        basis, _, layout, _ = self._matching(g)
        off, d = layout[i]
        return tuple(tuple(b[off + r] for b in basis) for r in range(d))

    def _degen(self, g, j: int) -> Matrix:
        n = self.base.dim_of(g)
        if n < self.level:
            return self.table_degens[(g, j)]
        # u_j w lives above the table: assemble its faces and express in the matching basis
        big = self.base.degeneracy(g, j)
        basis, left, layout, total = self._matching(big)
        dim_g = self.dim(g)
        cols = []
        for c in range(dim_g):
            w = unit(dim_g, c)
            amb = [ZERO] * total
            for i in range(n + 2):
                if i < j:
                    lower = self.base.face(g, i)
                    part = mat_vec(self.degeneracy(lower, j - 1), mat_vec(self.face(g, i), w))
                elif i in (j, j + 1):
                    part = w
                else:
                    lower = self.base.face(g, i - 1)
                    part = mat_vec(self.degeneracy(lower, j), mat_vec(self.face(g, i - 1), w))
                off, _ = layout[i]
                for r, val in enumerate(part):
                    amb[off + r] = val
            cols.append(mat_vec(left, tuple(amb)))
        return from_columns(cols, len(basis))

    def validate(self) -> list:
        """Simplicial identities on the tabulated levels; returns violations."""
        bad = []
        for n in range(2, self.level + 1):
            for g in self.base.simplices(n):
                d = self.dim(g)
                for i in range(n + 1):
                    for j in range(i + 1, n + 1):
                        lhs = mat_mul(self.face(self.base.face(g, j), i), self.face(g, j), d)
                        rhs = mat_mul(self.face(self.base.face(g, i), j - 1), self.face(g, i), d)
                        if lhs != rhs:
                            bad.append(("dd", g, i, j))
        for n in range(0, self.level):
            for g in self.base.simplices(n):
                d = self.dim(g)
                for j in range(n + 1):
                    big = self.base.degeneracy(g, j)
                    s = self.degeneracy(g, j)
                    for i in (j, j + 1):
                        if mat_mul(self.face(big, i), s, d) != identity(d):
                            bad.append(("ds", g, i, j))
        return bad

    def to_json(self, encode: Callable) -> dict:
        levels = []
        for n in range(self.level + 1):
            entry = {"n": n, "simplices": []}
            for g in self.base.simplices(n):
                rec = {"simplex": encode(g), "dim": self.table_dims[g]}
                if n > 0:
                    rec["faces"] = [matrix_to_json(self.table_faces[(g, i)]) for i in range(n + 1)]
                if n < self.level:
                    rec["degeneracies"] = [matrix_to_json(self.table_degens[(g, j)]) for j in range(n + 1)]
                entry["simplices"].append(rec)
            levels.append(entry)
        return {"level": self.level, "strictness": self.strictness, "levels": levels}

    @classmethod
    def from_json(cls, base, data: dict, decode: Callable, name: str = "V") -> "TabulatedBundle":
        level = int(data["level"])
        dims, faces, degens = {}, {}, {}
        for entry in data["levels"]:
            n = int(entry["n"])
            for rec in entry["simplices"]:
                g = decode(rec["simplex"])
                dims[g] = int(rec["dim"])
                for i, mjs in enumerate(rec.get("faces", [])):
                    faces[(g, i)] = matrix_from_json(mjs)
                for j, mjs in enumerate(rec.get("degeneracies", [])):
                    degens[(g, j)] = matrix_from_json(mjs)
        out = cls(base, level, dims, faces, degens, data.get("strictness"), name)
        for n in range(level + 1):
            for g in base.simplices(n):
                if g not in dims:
                    raise BundleError(f"level {n}: missing fiber for simplex {g}")
                if n > 0 and any((g, i) not in faces for i in range(n + 1)):
                    raise BundleError(f"level {n}: missing face matrices for simplex {g}")
                if n < level and any((g, j) not in degens for j in range(n + 1)):
                    raise BundleError(f"level {n}: missing degeneracy matrices for simplex {g}")
        return out


class BrokenBundle(VectorFibration):
    """Wraps a bundle and replaces one face matrix by zero (for negative tests)."""

    kind = "broken"

    def __init__(self, inner: VectorFibration, simplex, face_index: int):
        super().__init__(inner.base, inner.name + "-broken")
        self.inner = inner
        self.where = (simplex, face_index)

    def _dim(self, g) -> int:
        return self.inner.dim(g)

    def _face(self, g, i: int) -> Matrix:
        m = self.inner.face(g, i)
        if (g, i) == self.where:
            return mat_zero(len(m), self.dim(g))
        return m

    def _degen(self, g, j: int) -> Matrix:
        return self.inner.degeneracy(g, j)


# ---------------------------------------------------------------------------
# Moore and Dold-Kan complexes


@dataclass
class VertexComplex:
    """A bounded-above cochain complex at one vertex: degree ``-n`` for ``0 <= n <= cap``."""

    dims: dict            # n -> dim of degree -n
    diff: dict            # n -> matrix degree -n -> degree -(n-1), n >= 1

    def squares_to_zero(self) -> bool:
        for n in range(2, max(self.dims) + 1):
            prod = mat_mul(self.diff[n - 1], self.diff[n], self.dims[n])
            if any(any(x for x in row) for row in prod):
                return False
        return True

    def homology_ranks(self) -> dict:
        """``dim H^{-n}`` for ``0 <= n < cap`` (the top degree lacks its incoming map)."""
        out = {}
        top = max(self.dims)
        for n in range(0, top):
            out_rank = rank(self.diff[n]) if n >= 1 and self.dims[n] else 0
            in_rank = rank(self.diff[n + 1]) if self.dims[n + 1] else 0
            out[n] = self.dims[n] - out_rank - in_rank
        return out


def moore_differential(bundle: VectorFibration, x, n: int) -> Matrix:
    """``d^{-n} = (-1)^{n-1} Σ_j (-1)^j d_j`` on ``V|1_n x``."""
    g = bundle.unit(x, n)
    total = mat_zero(bundle.dim(bundle.unit(x, n - 1)), bundle.dim(g))
    sign = 1 if (n - 1) % 2 == 0 else -1
    for j in range(n + 1):
        s = sign * (1 if j % 2 == 0 else -1)
        total = mat_add(total, mat_scale(s, bundle.face(g, j)))
    return total


def moore(bundle: VectorFibration, cap: int) -> dict:
    """Moore complex at every vertex, up to degree ``-cap``."""
    out = {}
    for x in bundle.vertices():
        dims = {n: bundle.dim(bundle.unit(x, n)) for n in range(cap + 1)}
        diff = {n: moore_differential(bundle, x, n) for n in range(1, cap + 1)}
        out[x] = VertexComplex(dims, diff)
    return out


class DoldKan:
    """The normalized complex ``V̂^{-n} = ∩_{i >= 1} ker d_i`` at each vertex.

    ``basis(x, n)`` lists vectors of ``V|1_n x``; coordinates relative to this
    basis are what the Dold-Kan representation acts on.
    """

    def __init__(self, bundle: VectorFibration):
        self.bundle = bundle
        self._basis: dict = {}
        self._nor: dict = {}

    def basis(self, x, n: int) -> list[Vector]:
        key = (x, n)
        hit = self._basis.get(key)
        if hit is None:
            g = self.bundle.unit(x, n)
            d = self.bundle.dim(g)
            if n == 0:
                hit = [unit(d, i) for i in range(d)]
            else:
                rows = []
                for i in range(1, n + 1):
                    rows.extend(self.bundle.face(g, i))
                hit = kernel(tuple(rows), d) if rows else [unit(d, i) for i in range(d)]
            left = left_inverse(hit, d) if hit else ()
            hit = (hit, left)
            self._basis[key] = hit
        return hit[0]

    def dim(self, x, n: int) -> int:
        return len(self.basis(x, n))

    def inclusion(self, x, n: int) -> Matrix:
        g = self.bundle.unit(x, n)
        return from_columns(self.basis(x, n), self.bundle.dim(g))

    def coordinates(self, x, n: int, v: Vector) -> Vector:
        """Coordinates of a vector of ``V̂^{-n}_x`` (raises if outside)."""
        self.basis(x, n)
        basis, left = self._basis[(x, n)]
        c = mat_vec(left, v) if basis else ()
        if basis and mat_vec(from_columns(basis, len(v)), c) != tuple(v):
            raise BundleError(f"vector is not normalized at degree -{n}")
        if not basis and any(v):
            raise BundleError(f"vector is not normalized at degree -{n}")
        return c

    def projection(self, x, n: int) -> Matrix:
        """Coordinates map ``V̂^{-n}_x -> Q^dim`` precomposed with ``nor``."""
        self.basis(x, n)
        basis, left = self._basis[(x, n)]
        d = self.bundle.dim(self.bundle.unit(x, n))
        if not basis:
            return ()
        return mat_mul(left, self.nor(x, n), d)

    def nor(self, x, n: int) -> Matrix:
        """``(id - u_0 d_1) ... (id - u_{n-1} d_n)`` on ``V|1_n x``."""
        key = (x, n)
        hit = self._nor.get(key)
        if hit is None:
            g = self.bundle.unit(x, n)
            d = self.bundle.dim(g)
            low = self.bundle.unit(x, n - 1) if n > 0 else None
            hit = identity(d)
            for j in range(n - 1, -1, -1):
                ud = mat_mul(self.bundle.degeneracy(low, j), self.bundle.face(g, j + 1), d)
                hit = mat_mul(mat_sub(identity(d), ud), hit, d)
            self._nor[key] = hit
        return hit

    def differential(self, x, n: int) -> Matrix:
        """``d̂^{-n} = (-1)^{n-1} d_0`` in normalized coordinates."""
        g = self.bundle.unit(x, n)
        sign = 1 if (n - 1) % 2 == 0 else -1
        cols = []
        for b in self.basis(x, n):
            cols.append(self.coordinates(x, n - 1, tuple(sign * c for c in mat_vec(self.bundle.face(g, 0), b))))
        return from_columns(cols, self.dim(x, n - 1))

    def complex(self, x, cap: int) -> VertexComplex:
        dims = {n: self.dim(x, n) for n in range(cap + 1)}
        diff = {n: self.differential(x, n) for n in range(1, cap + 1)}
        return VertexComplex(dims, diff)


def dold_kan(bundle: VectorFibration, cap: int) -> dict:
    dk = DoldKan(bundle)
    return {x: dk.complex(x, cap) for x in bundle.vertices()}


def normalization(bundle: VectorFibration, cap: int) -> dict:
    dk = DoldKan(bundle)
    return {(x, n): dk.nor(x, n) for x in bundle.vertices() for n in range(cap + 1)}


@dataclass
class DoldKanReport:
    moore_d2: bool = True
    normalized_d2: bool = True
    nor_chain_map: bool = True
    nor_retracts: bool = True
    nor_lands_normalized: bool = True
    homology_agrees: bool = True
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all((self.moore_d2, self.normalized_d2, self.nor_chain_map, self.nor_retracts,
                    self.nor_lands_normalized, self.homology_agrees))


def check_dold_kan(bundle: VectorFibration, cap: int) -> DoldKanReport:
    """All exact Dold-Kan layer checks at every vertex up to degree ``-cap``."""
    rep = DoldKanReport()
    dk = DoldKan(bundle)
    for x in bundle.vertices():
        mc = VertexComplex(
            {n: bundle.dim(bundle.unit(x, n)) for n in range(cap + 1)},
            {n: moore_differential(bundle, x, n) for n in range(1, cap + 1)})
        nc = dk.complex(x, cap)
        if not mc.squares_to_zero():
            rep.moore_d2 = False
            rep.details.append(("moore d^2", x))
        if not nc.squares_to_zero():
            rep.normalized_d2 = False
            rep.details.append(("normalized d^2", x))
        for n in range(cap + 1):
            nor = dk.nor(x, n)
            d = mc.dims[n]
            inc = dk.inclusion(x, n)
            if mat_mul(nor, inc, dk.dim(x, n)) != inc:
                rep.nor_retracts = False
                rep.details.append(("nor o incl", x, n))
            for i in range(1, n + 1):
                f = mat_mul(bundle.face(bundle.unit(x, n), i), nor, d)
                if any(any(v for v in row) for row in f):
                    rep.nor_lands_normalized = False
                    rep.details.append(("nor image", x, n, i))
            if n >= 1:
                lhs = mat_mul(mc.diff[n], nor, d)
                rhs = mat_mul(dk.nor(x, n - 1), mc.diff[n], d)
                if lhs != rhs:
                    rep.nor_chain_map = False
                    rep.details.append(("nor chain map", x, n))
        if mc.homology_ranks() != nc.homology_ranks():
            rep.homology_agrees = False
            rep.details.append(("homology", x, mc.homology_ranks(), nc.homology_ranks()))
    return rep
