"""Simplicial combinatorics: poset maps, finite simplicial sets, nerves,
groupoid nerves, cubes, interpolation complexes and shuffles.

Conventions used throughout the package:

* ``[n]`` is the ordinal ``{0, ..., n}``; a :class:`PosetMap` stores the images
  of ``0..m``.  ``delta(i, n)`` is the coface ``[n-1] -> [n]`` skipping ``i`` and
  ``upsilon(j, n)`` is the codegeneracy ``[n+1] -> [n]`` hitting ``j`` twice.
* A simplex ``x`` acted on by ``theta`` is written ``x theta``; faces are
  ``d_i x = x delta_i`` and degeneracies ``u_j x = x upsilon_j``.
* For an ``m``-simplex ``g`` with vertices ``x_0, ..., x_m``, ``front(g, k)``
  is spanned by ``x_0..x_k`` (its source end) and ``back(g, k)`` by
  ``x_{m-k}..x_m`` (its target end).
* Points of cube-like complexes are integer tuples.  Cube coordinates are
  stored 0-based, so the coordinate called ``i`` in the text (``1 <= i <= m``)
  lives at tuple index ``i - 1``.  Interpolation points carry the level
  ``r_+`` (and ``r_-``) as trailing entries.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Optional, Sequence


class CombinatoricsError(ValueError):
    """Raised for malformed maps, out-of-range indices or exceeded caps."""


# ---------------------------------------------------------------------------
# poset maps


@dataclass(frozen=True)
class PosetMap:
    """A monotone map ``[m] -> [n]`` given by its values on ``0..m``."""

    values: tuple
    target_dim: int

    def __post_init__(self):
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise CombinatoricsError("a poset map needs a nonempty source")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise CombinatoricsError(f"values {vals} are not monotone")
        if vals[0] < 0 or vals[-1] > self.target_dim:
            raise CombinatoricsError(f"values {vals} leave [0, {self.target_dim}]")

    @property
    def source_dim(self) -> int:
        return len(self.values) - 1

    def __call__(self, k: int) -> int:
        return self.values[k]

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.target_dim + 1))

    def is_identity(self) -> bool:
        return self.target_dim == self.source_dim and self.is_injective()

    def image(self) -> tuple:
        return tuple(sorted(set(self.values)))

    def __repr__(self) -> str:
        return f"PosetMap({list(self.values)} -> [{self.target_dim}])"


def identity_map(n: int) -> PosetMap:
    return PosetMap(tuple(range(n + 1)), n)


def delta(i: int, n: int) -> PosetMap:
    """The coface ``[n-1] -> [n]`` whose image misses ``i``."""
    if not 0 <= i <= n or n < 1:
        raise CombinatoricsError(f"delta_{i} needs 0 <= i <= n, n >= 1 (got n={n})")
    return PosetMap(tuple(k if k < i else k + 1 for k in range(n)), n)


def upsilon(j: int, n: int) -> PosetMap:
    """The codegeneracy ``[n+1] -> [n]`` with ``j`` and ``j+1`` both sent to ``j``."""
    if not 0 <= j <= n:
        raise CombinatoricsError(f"upsilon_{j} needs 0 <= j <= n (got n={n})")
    return PosetMap(tuple(k if k <= j else k - 1 for k in range(n + 2)), n)


def front_map(k: int, n: int) -> PosetMap:
    """Inclusion ``[k] -> [n]`` onto ``{0..k}``."""
    return PosetMap(tuple(range(k + 1)), n)


def back_map(k: int, n: int) -> PosetMap:
    """Inclusion ``[k] -> [n]`` onto ``{n-k..n}``."""
    return PosetMap(tuple(range(n - k, n + 1)), n)


def vertex_map(i: int, n: int) -> PosetMap:
    return PosetMap((i,), n)


def compose(theta: PosetMap, theta2: PosetMap) -> PosetMap:
    """``theta ∘ theta2`` (apply ``theta2`` first)."""
    if theta2.target_dim != theta.source_dim:
        raise CombinatoricsError(
            f"cannot compose {theta} after {theta2}: dimension mismatch"
        )
    return PosetMap(tuple(theta.values[v] for v in theta2.values), theta.target_dim)


def epi_mono_factor(theta: PosetMap) -> tuple[PosetMap, PosetMap]:
    """The unique factorization ``theta = mono ∘ epi``."""
    image = theta.image()
    index = {v: k for k, v in enumerate(image)}
    epi = PosetMap(tuple(index[v] for v in theta.values), len(image) - 1)
    mono = PosetMap(image, theta.target_dim)
    return epi, mono


def mono_as_faces(mono: PosetMap) -> list[int]:
    """Face indices ``[i_1, i_2, ...]`` with ``mono = delta_{i_1} delta_{i_2} ...``.

    Applying them to a simplex means taking ``d_{i_1}`` first.
    """
    missing = [v for v in range(mono.target_dim + 1) if v not in set(mono.values)]
    # d_{i_1} d_{i_2} ... applied to x: remove the largest missing vertex first
    return sorted(missing, reverse=True)


def epi_as_degeneracies(epi: PosetMap) -> list[int]:
    """Degeneracy indices ``[j_1, j_2, ...]``: ``x epi = u_{j_k} ... u_{j_1} x`` read left to right.

    The simplex ``x epi`` is obtained from ``x`` by applying ``u_{j_1}``
    first, then ``u_{j_2}``, and so on.
    """
    vals = epi.values
    repeats = [k for k in range(len(vals) - 1) if vals[k] == vals[k + 1]]
    # apply degeneracies in increasing index order: each u_j inserts a copy at j
    return repeats


def enumerate_poset_maps(m: int, n: int) -> list[PosetMap]:
    """All monotone maps ``[m] -> [n]``."""
    return [
        PosetMap(vals, n)
        for vals in itertools.combinations_with_replacement(range(n + 1), m + 1)
    ]


def enumerate_injections(k: int, n: int, zero_to_zero: bool = False) -> list[PosetMap]:
    """All poset injections ``[k] -> [n]`` in lexicographic order."""
    out = []
    for vals in itertools.combinations(range(n + 1), k + 1):
        if zero_to_zero and vals[0] != 0:
            continue
        out.append(PosetMap(vals, n))
    return out


# ---------------------------------------------------------------------------
# an abstract simplicial set interface


class SimplicialSet:
    """Anything with ``simplices(n)``, ``act(x, theta)`` and ``dim_of(x)``."""

    name = "simplicial set"

    def simplices(self, n: int) -> Iterable[Hashable]:
        raise NotImplementedError

    def act(self, x, theta: PosetMap):
        raise NotImplementedError

    def dim_of(self, x) -> int:
        raise NotImplementedError

    def face(self, x, i: int):
        return self.act(x, delta(i, self.dim_of(x)))

    def degeneracy(self, x, j: int):
        return self.act(x, upsilon(j, self.dim_of(x)))

    def vertex(self, x, i: int):
        return self.act(x, vertex_map(i, self.dim_of(x)))

    def front(self, x, k: int):
        return self.act(x, front_map(k, self.dim_of(x)))

    def back(self, x, k: int):
        return self.act(x, back_map(k, self.dim_of(x)))

    def is_degenerate(self, x) -> bool:
        n = self.dim_of(x)
        return any(self.degeneracy(self.face(x, j), j) == x for j in range(n))

    def nondegenerate(self, n: int) -> list:
        return [x for x in self.simplices(n) if not self.is_degenerate(x)]


# ---------------------------------------------------------------------------
# explicit finite simplicial sets


@dataclass(frozen=True)
class Simplex:
    """An element of a :class:`FinSSet` in Eilenberg-Zilber normal form.

    ``core`` is the id of a nondegenerate simplex and ``epi`` a surjection
    from ``[dim]`` onto its dimension; the simplex is ``core epi``.
    """

    core: int
    epi: PosetMap

    @property
    def dim(self) -> int:
        return self.epi.source_dim


class FinSSet(SimplicialSet):
    """A finite simplicial set presented by nondegenerate simplices and faces.

    ``dims[id]`` is the dimension of the nondegenerate simplex ``id`` and
    ``faces[id]`` lists the normal forms of its faces ``d_0 .. d_n``.  The
    ``cap`` bounds the dimension of simplices that may be requested.
    """

    def __init__(self, dims: Sequence[int], faces: Sequence[Sequence[Simplex]],
                 cap: int, name: str = "X", labels: Optional[Sequence] = None):
        self.dims = tuple(dims)
        self.faces = tuple(tuple(f) for f in faces)
        self.cap = cap
        self.name = name
        self.labels = tuple(labels) if labels is not None else tuple(range(len(dims)))
        for sid, (d, fs) in enumerate(zip(self.dims, self.faces)):
            if d > 0 and len(fs) != d + 1:
                raise CombinatoricsError(f"simplex {sid} of dim {d} needs {d + 1} faces")
            if d == 0 and fs:
                raise CombinatoricsError(f"vertex {sid} cannot have faces")
        self._face_cache: dict = {}

    def nondegenerate_ids(self, n: int) -> list[int]:
        return [i for i, d in enumerate(self.dims) if d == n]

    def nondegenerate(self, n: int) -> list[Simplex]:
        return [Simplex(i, identity_map(n)) for i in self.nondegenerate_ids(n)]

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.dims:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def dim_of(self, x: Simplex) -> int:
        return x.dim

    def _check_cap(self, n: int):
        if n > self.cap:
            raise CombinatoricsError(f"{self.name}: dimension {n} exceeds cap {self.cap}")

    def _mono_face(self, core: int, mono: PosetMap) -> Simplex:
        key = (core, mono.values)
        hit = self._face_cache.get(key)
        if hit is not None:
            return hit
        current = Simplex(core, identity_map(self.dims[core]))
        for i in mono_as_faces(mono):
            current = self._face_of(current, i)
        self._face_cache[key] = current
        return current

    def _face_of(self, x: Simplex, i: int) -> Simplex:
        # d_i (core epi) = core (epi delta_i); factor epi delta_i = mono' epi'
        epi2, mono2 = epi_mono_factor(compose(x.epi, delta(i, x.dim)))
        if mono2.is_identity():
            return Simplex(x.core, epi2)
        (face_index,) = [v for v in range(mono2.target_dim + 1) if v not in mono2.values]
        f = self.faces[x.core][face_index]
        return Simplex(f.core, compose(f.epi, epi2))

    def act(self, x: Simplex, theta: PosetMap) -> Simplex:
        if theta.target_dim != x.dim:
            raise CombinatoricsError("poset map does not match the simplex dimension")
        self._check_cap(theta.source_dim)
        epi2, mono2 = epi_mono_factor(compose(x.epi, theta))
        if mono2.is_identity():
            return Simplex(x.core, epi2)
        f = self._mono_face(x.core, mono2)
        return Simplex(f.core, compose(f.epi, epi2))

    def simplices(self, n: int) -> list[Simplex]:
        self._check_cap(n)
        out = []
        for core, d in enumerate(self.dims):
            if d > n:
                continue
            for vals in itertools.combinations_with_replacement(range(d + 1), n + 1):
                epi = PosetMap(vals, d)
                if epi.is_surjective():
                    out.append(Simplex(core, epi))
        return out

    def is_degenerate(self, x: Simplex) -> bool:
        return not x.epi.is_identity()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cap": self.cap,
            "dims": list(self.dims),
            "faces": [[[f.core, list(f.epi.values)] for f in fs] for fs in self.faces],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FinSSet":
        dims = data["dims"]
        faces = []
        for sid, fs in enumerate(data["faces"]):
            row = []
            for core, vals in fs:
                row.append(Simplex(core, PosetMap(tuple(vals), dims[core])))
            faces.append(row)
        return cls(dims, faces, data.get("cap", max(dims, default=0)), data.get("name", "X"))


def finsset_from_chains(chains_by_dim: dict[int, list[tuple]], cap: int, name: str) -> FinSSet:
    """Build a :class:`FinSSet` whose nondegenerate simplices are strict vertex chains.

    Faces of a strict chain are strict chains, so every face is nondegenerate.
    """
    ids: dict[tuple, int] = {}
    dims: list[int] = []
    labels: list[tuple] = []
    for n in sorted(chains_by_dim):
        for ch in chains_by_dim[n]:
            ids[ch] = len(dims)
            dims.append(n)
            labels.append(ch)
    faces = []
    for ch, n in zip(labels, dims):
        if n == 0:
            faces.append(())
            continue
        row = []
        for i in range(n + 1):
            f = ch[:i] + ch[i + 1:]
            row.append(Simplex(ids[f], identity_map(n - 1)))
        faces.append(tuple(row))
    return FinSSet(dims, faces, cap, name, labels)


# ---------------------------------------------------------------------------
# finite posets, unions of poset nerves and their products


@dataclass(frozen=True)
class FinitePoset:
    """A finite poset given by its elements and its (reflexive) order relation."""

    elements: tuple
    relation: frozenset

    @classmethod
    def from_predicate(cls, elements: Iterable, leq: Callable) -> "FinitePoset":
        els = tuple(sorted(set(elements)))
        rel = frozenset((x, y) for x in els for y in els if leq(x, y))
        return cls(els, rel)

    def leq(self, x, y) -> bool:
        return (x, y) in self.relation

    def check_partial_order(self) -> bool:
        els = self.elements
        if any((x, x) not in self.relation for x in els):
            return False
        for x, y in self.relation:
            if x != y and (y, x) in self.relation:
                return False
        for x, y in self.relation:
            for z in els:
                if (y, z) in self.relation and (x, z) not in self.relation:
                    return False
        return True

    @lru_cache(maxsize=None)
    def successors(self, x) -> tuple:
        return tuple(y for y in self.elements if y != x and (x, y) in self.relation)


class ChainComplex(SimplicialSet):
    """A union of poset nerves on a common vertex set, or a product of such.

    ``factors`` is a tuple of tuples of :class:`FinitePoset`; each factor is
    the union of the nerves of its posets.  With a single factor, points are
    the poset elements themselves; with several factors, points are tuples of
    factor points.  A chain of points is a simplex iff each factor projection
    is a chain in one of that factor's posets.
    """

    def __init__(self, factors: Sequence[Sequence[FinitePoset]], name: str = "",
                 kind: str = "", params: tuple = ()):
        self.factors = tuple(tuple(f) for f in factors)
        self.name = name
        self.kind = kind
        self.params = params
        self.single = len(self.factors) == 1
        self._nondeg: dict[int, list] = {}

    # points -------------------------------------------------------------
    def _proj(self, point, f: int):
        return point if self.single else point[f]

    def points(self) -> list:
        per = []
        for members in self.factors:
            pts = set()
            for poset in members:
                pts.update(poset.elements)
            per.append(sorted(pts))
        if self.single:
            return per[0]
        return [tuple(p) for p in itertools.product(*per)]

    # simplices ----------------------------------------------------------
    def _factor_ok(self, members, seq) -> bool:
        for poset in members:
            if all(p in poset.elements for p in seq) and all(
                poset.leq(a, b) for a, b in zip(seq, seq[1:])
            ):
                return True
        return False

    def is_simplex(self, chain: Sequence) -> bool:
        if not chain:
            return False
        for f, members in enumerate(self.factors):
            if not self._factor_ok(members, [self._proj(p, f) for p in chain]):
                return False
        return True

    def dim_of(self, x) -> int:
        return len(x) - 1

    def act(self, x, theta: PosetMap):
        if theta.target_dim != len(x) - 1:
            raise CombinatoricsError("poset map does not match the chain length")
        return tuple(x[v] for v in theta.values)

    def is_degenerate(self, x) -> bool:
        return any(a == b for a, b in zip(x, x[1:]))

    def _extend(self, chain, alive):
        """Depth-first extension of strict chains, tracking live posets per factor."""
        yield chain
        last = chain[-1]
        candidates = None
        for f, members in enumerate(self.factors):
            p = self._proj(last, f)
            opts = set()
            for idx in alive[f]:
                opts.update(members[idx].successors(p))
                opts.add(p)
            candidates = [opts] if candidates is None else candidates + [opts]
        if self.single:
            nexts = sorted(q for q in candidates[0] if q != last)
        else:
            nexts = sorted(q for q in itertools.product(*[sorted(c) for c in candidates]) if q != last)
        for q in nexts:
            new_alive = []
            ok = True
            for f, members in enumerate(self.factors):
                a, b = self._proj(last, f), self._proj(q, f)
                keep = tuple(i for i in alive[f] if b in members[i].elements and members[i].leq(a, b))
                if not keep:
                    ok = False
                    break
                new_alive.append(keep)
            if ok:
                yield from self._extend(chain + (q,), new_alive)

    def _all_strict_chains(self) -> dict[int, list]:
        if self._nondeg:
            return self._nondeg
        out: dict[int, list] = {}
        for p in self.points():
            alive = []
            ok = True
            for f, members in enumerate(self.factors):
                keep = tuple(i for i, poset in enumerate(members) if self._proj(p, f) in poset.elements)
                if not keep:
                    ok = False
                    break
                alive.append(keep)
            if not ok:
                continue
            for ch in self._extend((p,), alive):
                out.setdefault(len(ch) - 1, []).append(ch)
        for n in out:
            out[n] = sorted(set(out[n]))
        self._nondeg = out
        return out

    def nondegenerate(self, n: int) -> list:
        return list(self._all_strict_chains().get(n, []))

    def dimension(self) -> int:
        return max(self._all_strict_chains())

    def maximal_simplices(self) -> list:
        """Strict chains that are not faces of longer strict chains."""
        chains = self._all_strict_chains()
        faces = set()
        for n, lst in chains.items():
            if n == 0:
                continue
            for ch in lst:
                for i in range(len(ch)):
                    faces.add(ch[:i] + ch[i + 1:])
        return [ch for n in sorted(chains) for ch in chains[n] if ch not in faces]

    def simplices(self, n: int) -> list:
        out = []
        for k, lst in self._all_strict_chains().items():
            if k > n:
                continue
            for ch in lst:
                for vals in itertools.combinations_with_replacement(range(k + 1), n + 1):
                    if len(set(vals)) == k + 1:
                        out.append(tuple(ch[v] for v in vals))
        return out

    def counts(self) -> dict[int, int]:
        return {n: len(v) for n, v in sorted(self._all_strict_chains().items())}

    def to_finsset(self, cap: Optional[int] = None) -> FinSSet:
        chains = self._all_strict_chains()
        cap = self.dimension() if cap is None else cap
        return finsset_from_chains(chains, cap, self.name or self.kind)


def nerve(poset: FinitePoset, name: str = "N(P)", cap: Optional[int] = None) -> FinSSet:
    """Nerve of a finite poset as an explicit simplicial set."""
    cx = ChainComplex([[poset]], name=name, kind="nerve")
    return cx.to_finsset(cap)


def chain_poset(n: int) -> FinitePoset:
    return FinitePoset.from_predicate(range(n + 1), lambda a, b: a <= b)


def product_of(*complexes: ChainComplex, name: str = "") -> ChainComplex:
    factors = []
    for cx in complexes:
        factors.extend(cx.factors)
    return ChainComplex(factors, name=name or " x ".join(c.name for c in complexes), kind="product")


def simplex_complex(n: int) -> ChainComplex:
    """``Δ^n`` as the nerve of ``[n]``; points are integers."""
    return ChainComplex([[chain_poset(n)]], name=f"Delta^{n}", kind="simplex", params=(n,))


def product(x: FinSSet, y: FinSSet, name: Optional[str] = None) -> FinSSet:
    """Levelwise product of two explicit simplicial sets.

    Nondegenerate simplices are the pairs ``(x core epi, y core' epi')`` whose
    epis share no common collapsed step.
    """
    top = max(x.dims, default=0) + max(y.dims, default=0)
    chains: dict[int, list] = {}
    for n in range(top + 1):
        xs = [s for s in x.simplices(n)] if n <= x.cap else []
        ys = [s for s in y.simplices(n)] if n <= y.cap else []
        for a in xs:
            ra = {k for k in range(n) if a.epi.values[k] == a.epi.values[k + 1]}
            for b in ys:
                rb = {k for k in range(n) if b.epi.values[k] == b.epi.values[k + 1]}
                if ra & rb:
                    continue
                chains.setdefault(n, []).append((a, b))
    ids: dict = {}
    dims: list[int] = []
    labels: list = []
    for n in sorted(chains):
        for pair in chains[n]:
            ids[pair] = len(dims)
            dims.append(n)
            labels.append(pair)
    faces = []
    for (a, b), n in zip(labels, dims):
        if n == 0:
            faces.append(())
            continue
        row = []
        for i in range(n + 1):
            fa, fb = x.face(a, i), y.face(b, i)
            # normal form of the pair: strip common degeneracies
            k = fa.dim
            ra = [j for j in range(k) if fa.epi.values[j] == fa.epi.values[j + 1]]
            rb = set(j for j in range(k) if fb.epi.values[j] == fb.epi.values[j + 1])
            common = [j for j in ra if j in rb]
            keep = [j for j in range(k + 1) if (j - 1) not in common]
            # keep index j unless it duplicates j-1 in both factors
            sub = PosetMap(tuple(keep), k)
            core_a, core_b = x.act(fa, sub), y.act(fb, sub)
            collapse = []
            pos = -1
            for j in range(k + 1):
                if (j - 1) not in common:
                    pos += 1
                collapse.append(pos)
            epi = PosetMap(tuple(collapse), len(keep) - 1)
            row.append(Simplex(ids[(core_a, core_b)], epi))
        faces.append(tuple(row))
    return FinSSet(dims, faces, top, name or f"{x.name}x{y.name}", labels)


def standard_simplex(n: int, cap: Optional[int] = None) -> FinSSet:
    return nerve(chain_poset(n), name=f"Delta^{n}", cap=n + 3 if cap is None else cap)


# ---------------------------------------------------------------------------
# horns and the Kan condition


def horn_condition(x: SimplicialSet, faces: dict[int, Hashable]) -> bool:
    """Matching condition ``d_i x_j = d_{j-1} x_i`` for ``i < j`` among given faces."""
    keys = sorted(faces)
    for a, i in enumerate(keys):
        for j in keys[a + 1:]:
            if x.face(faces[j], i) != x.face(faces[i], j - 1):
                return False
    return True


def horn_of(x: SimplicialSet, simplex, k: int) -> dict[int, Hashable]:
    n = x.dim_of(simplex)
    return {i: x.face(simplex, i) for i in range(n + 1) if i != k}


def horns(x: SimplicialSet, n: int, k: int) -> list[dict[int, Hashable]]:
    """All ``n,k``-horns of ``x`` by backtracking over ``(n-1)``-simplices."""
    if not 0 <= k <= n:
        raise CombinatoricsError("horn index out of range")
    if n == 0:
        return [{}]
    lower = list(x.simplices(n - 1))
    idx = [i for i in range(n + 1) if i != k]
    out: list[dict] = []

    def rec(pos: int, chosen: dict):
        if pos == len(idx):
            out.append(dict(chosen))
            return
        j = idx[pos]
        for s in lower:
            ok = True
            for i in chosen:
                if x.face(s, i) != x.face(chosen[i], j - 1):
                    ok = False
                    break
            if ok:
                chosen[j] = s
                rec(pos + 1, chosen)
                del chosen[j]

    rec(0, {})
    return out


def horn(x: SimplicialSet, n: int, k: int) -> list[dict[int, Hashable]]:
    """Alias kept for readability at call sites: the set of ``n,k``-horns."""
    return horns(x, n, k)


def fillers(x: SimplicialSet, horn_faces: dict[int, Hashable], n: int) -> list:
    return [s for s in x.simplices(n) if all(x.face(s, i) == f for i, f in horn_faces.items())]


@dataclass
class KanReport:
    up_to: int
    fillable: dict = field(default_factory=dict)   # (n, k) -> bool
    unique: dict = field(default_factory=dict)     # (n, k) -> bool
    witnesses: list = field(default_factory=list)  # unfillable horns

    @property
    def is_kan(self) -> bool:
        return all(self.fillable.values())

    @property
    def strictness(self) -> Optional[int]:
        """The least ``k`` such that horns of dimension ``>= k`` fill uniquely.

        A groupoid nerve is 2-strict and ``Δ^0`` is 0-strict.
        """
        if not self.is_kan:
            return None
        bad = [n for (n, k), u in self.unique.items() if not u]
        return max(bad, default=-1) + 1 if bad else 0


def is_kan(x: SimplicialSet, up_to: int) -> KanReport:
    """Exhaustive Kan check for horns of dimension ``<= up_to``."""
    cap = getattr(x, "cap", None)
    if cap is not None and up_to > cap:
        raise CombinatoricsError(f"is_kan up to {up_to} exceeds cap {cap}")
    report = KanReport(up_to)
    for n in range(0, up_to + 1):
        candidates = list(x.simplices(n))
        for k in range(n + 1):
            ok_all, unique_all = True, True
            by_horn: dict = {}
            for s in candidates:
                key = tuple(sorted(horn_of(x, s, k).items()))
                by_horn[key] = by_horn.get(key, 0) + 1
            for h in horns(x, n, k):
                count = by_horn.get(tuple(sorted(h.items())), 0)
                if count == 0:
                    ok_all = False
                    report.witnesses.append((n, k, h))
                elif count > 1:
                    unique_all = False
            report.fillable[(n, k)] = ok_all
            report.unique[(n, k)] = unique_all
    return report


# ---------------------------------------------------------------------------
# groupoids and their nerves


class GroupoidError(CombinatoricsError):
    """Raised when composition tables fail the groupoid axioms."""


class Groupoid:
    """A finite groupoid with arrows ``0..N-1``.

    ``source[a]``/``target[a]`` are object indices, ``compose[(b, a)]`` is the
    composite ``b ∘ a`` (defined when ``source[b] == target[a]``) and
    ``identity[x]`` the unit arrow at ``x``.
    """

    def __init__(self, objects: Sequence, source: Sequence[int], target: Sequence[int],
                 composition: dict, identity: Sequence[int], arrow_names: Optional[Sequence] = None,
                 name: str = "G"):
        self.objects = tuple(objects)
        self.source = tuple(source)
        self.target = tuple(target)
        self.comp = dict(composition)
        self.identity = tuple(identity)
        self.arrow_names = tuple(arrow_names) if arrow_names is not None else tuple(
            str(a) for a in range(len(self.source)))
        self.name = name
        self.validate()
        self.inv = tuple(self._inverse(a) for a in range(self.n_arrows))

    @property
    def n_arrows(self) -> int:
        return len(self.source)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    def mul(self, b: int, a: int) -> int:
        """``b ∘ a``."""
        return self.comp[(b, a)]

    def _inverse(self, a: int) -> int:
        for b in range(self.n_arrows):
            if self.source[b] == self.target[a] and self.target[b] == self.source[a]:
                if self.comp[(b, a)] == self.identity[self.source[a]] and \
                        self.comp[(a, b)] == self.identity[self.target[a]]:
                    return b
        raise GroupoidError(f"arrow {self.arrow_names[a]} has no inverse")

    def validate(self):
        n = self.n_arrows
        if len(self.target) != n:
            raise GroupoidError("source and target tables differ in length")
        for x, e in enumerate(self.identity):
            if self.source[e] != x or self.target[e] != x:
                raise GroupoidError(f"identity at object {x} is not a loop at {x}")
        for b in range(n):
            for a in range(n):
                composable = self.source[b] == self.target[a]
                if composable and (b, a) not in self.comp:
                    raise GroupoidError(f"missing composite ({b}, {a})")
                if composable:
                    c = self.comp[(b, a)]
                    if self.source[c] != self.source[a] or self.target[c] != self.target[b]:
                        raise GroupoidError(f"composite ({b}, {a}) = {c} has wrong ends")
        for a in range(n):
            e_s, e_t = self.identity[self.source[a]], self.identity[self.target[a]]
            if self.comp[(a, e_s)] != a or self.comp[(e_t, a)] != a:
                raise GroupoidError(f"identity law fails at arrow {a}")
        for c in range(n):
            for b in range(n):
                if self.source[c] != self.target[b]:
                    continue
                for a in range(n):
                    if self.source[b] != self.target[a]:
                        continue
                    if self.comp[(self.comp[(c, b)], a)] != self.comp[(c, self.comp[(b, a)])]:
                        raise GroupoidError(
                            f"associativity fails at triple ({c}, {b}, {a})", (c, b, a))
        for a in range(n):
            self._inverse(a)

    # constructors -----------------------------------------------------------
    @classmethod
    def cyclic(cls, order: int) -> "Groupoid":
        comp = {(b, a): (a + b) % order for a in range(order) for b in range(order)}
        return cls(["*"], [0] * order, [0] * order, comp, [0],
                   [f"g{a}" for a in range(order)], name=f"Z/{order}")

    @classmethod
    def from_group_table(cls, table: Sequence[Sequence[int]], unit: int = 0, name: str = "G") -> "Groupoid":
        n = len(table)
        comp = {(b, a): table[b][a] for a in range(n) for b in range(n)}
        return cls(["*"], [0] * n, [0] * n, comp, [unit], name=name)

    @classmethod
    def pair(cls, k: int) -> "Groupoid":
        """The pair groupoid on ``k`` objects: one arrow ``x -> y`` for each pair."""
        arrows = [(x, y) for x in range(k) for y in range(k)]
        index = {a: i for i, a in enumerate(arrows)}
        comp = {}
        for b, (y1, z) in enumerate(arrows):
            for a, (x, y2) in enumerate(arrows):
                if y1 == y2:
                    comp[(b, a)] = index[(x, z)]
        return cls(list(range(k)), [a[0] for a in arrows], [a[1] for a in arrows], comp,
                   [index[(x, x)] for x in range(k)], [f"{x}->{y}" for x, y in arrows],
                   name=f"Pair({k})")

    @classmethod
    def discrete(cls, k: int) -> "Groupoid":
        """Only identity arrows: its nerve is the constant simplicial set on ``k`` points."""
        return cls(list(range(k)), list(range(k)), list(range(k)),
                   {(x, x): x for x in range(k)}, list(range(k)), [f"1_{x}" for x in range(k)],
                   name=f"Disc({k})")

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "arrows": [
                {"name": self.arrow_names[a], "source": self.source[a], "target": self.target[a]}
                for a in range(self.n_arrows)
            ],
            "identity": list(self.identity),
            "compose": [[b, a, c] for (b, a), c in sorted(self.comp.items())],
        }


class GroupoidNerve(SimplicialSet):
    """The nerve of a finite groupoid, generated lazily.

    An ``m``-simplex is a token ``(x0, (a_1, ..., a_m))``: a string of
    composable arrows ``x_m <-a_m- ... <-a_1- x_0`` starting at object
    ``x0``.  The action of ``theta: [k] -> [m]`` composes arrows.
    """

    def __init__(self, groupoid: Groupoid, cap: int = 8):
        self.g = groupoid
        self.cap = cap
        self.name = f"N({groupoid.name})"
        self._act_cache: dict = {}
        self._simplices: dict[int, list] = {}

    def dim_of(self, x) -> int:
        return len(x[1])

    def vertices_of(self, x) -> tuple:
        x0, arrows = x
        out = [x0]
        for a in arrows:
            out.append(self.g.target[a])
        return tuple(out)

    def path(self, x, p: int, q: int) -> int:
        """The composite arrow from vertex ``p`` to vertex ``q`` (``p <= q``)."""
        x0, arrows = x
        verts = self.vertices_of(x)
        arrow = self.g.identity[verts[p]]
        for k in range(p, q):
            arrow = self.g.mul(arrows[k], arrow)
        return arrow

    def act(self, x, theta: PosetMap):
        if theta.target_dim != len(x[1]):
            raise CombinatoricsError(f"{theta} does not act on a {len(x[1])}-simplex")
        if theta.source_dim > self.cap:
            raise CombinatoricsError(f"{self.name}: dimension {theta.source_dim} exceeds cap {self.cap}")
        key = (x, theta.values)
        hit = self._act_cache.get(key)
        if hit is not None:
            return hit
        verts = self.vertices_of(x)
        vals = theta.values
        new = (verts[vals[0]], tuple(self.path(x, vals[k], vals[k + 1]) for k in range(len(vals) - 1)))
        self._act_cache[key] = new
        return new

    def simplices(self, n: int) -> list:
        if n > self.cap:
            raise CombinatoricsError(f"{self.name}: dimension {n} exceeds cap {self.cap}")
        if n in self._simplices:
            return self._simplices[n]
        if n == 0:
            out = [(x, ()) for x in range(self.g.n_objects)]
        else:
            out = []
            for x0, arrows in self.simplices(n - 1):
                end = self.g.target[arrows[-1]] if arrows else x0
                for a in range(self.g.n_arrows):
                    if self.g.source[a] == end:
                        out.append((x0, arrows + (a,)))
        self._simplices[n] = out
        return out

    def is_degenerate(self, x) -> bool:
        return any(a == self.g.identity[self.g.source[a]] for a in x[1])

    def unit(self, obj: int, n: int):
        """The totally degenerate simplex ``1_n x``."""
        return (obj, (self.g.identity[obj],) * n)

    def source_vertex(self, x) -> int:
        return x[0]

    def target_vertex(self, x) -> int:
        return self.vertices_of(x)[-1]

    def fill(self, faces: dict[int, tuple], n: int) -> list:
        """All fillers of a horn given as ``{i: face}`` (groupoid nerves fill uniquely for n >= 2)."""
        return fillers(self, faces, n) if n <= 2 else self._fill_high(faces, n)

    def _fill_high(self, faces, n):
        # every pair of vertices lies in a known face when n >= 3
        verts = [None] * (n + 1)
        arrows = {}
        for i, f in faces.items():
            vf = self.vertices_of(f)
            pos = [v for v in range(n + 1) if v != i]
            for a, p in enumerate(pos):
                verts[p] = vf[a]
            for a in range(len(pos) - 1):
                arrows[(pos[a], pos[a + 1])] = self.path(f, a, a + 1)
        candidate = (verts[0], tuple(arrows[(k, k + 1)] for k in range(n)))
        return [candidate] if all(self.face(candidate, i) == f for i, f in faces.items()) else []


# ---------------------------------------------------------------------------
# cube-like complexes


def _cube_points(m: int) -> list[tuple]:
    return [tuple(p) for p in itertools.product((0, 1), repeat=m)]


def cube(m: int) -> ChainComplex:
    """The ``m``-cube ``I^m``: the nerve of ``[1]^m``; points are 0/1 tuples."""
    poset = FinitePoset.from_predicate(
        _cube_points(m), lambda r, s: all(a <= b for a, b in zip(r, s)))
    return ChainComplex([[poset]], name=f"I^{m}", kind="cube", params=(m,))


def in_sheet(point: tuple, a: int) -> bool:
    """Region of the sheet ``I^m_a``: ``sum_{i<a} r_i <= r_+ <= sum_{i<=a} r_i``."""
    r, level = point[:-1], point[-1]
    low = sum(r[: a - 1])
    return low <= level <= low + r[a - 1]


def leq_sheet(p: tuple, s: tuple, a: int) -> bool:
    """The order ``<=_a``: coordinatewise, and ``r_+ <= s_+ - sum_{i<a}(s_i - r_i)``."""
    r, rl = p[:-1], p[-1]
    t, tl = s[:-1], s[-1]
    if any(x > y for x, y in zip(r, t)):
        return False
    return rl <= tl - sum(t[i] - r[i] for i in range(a - 1))


def sheet_poset(m: int, a: int) -> FinitePoset:
    pts = [r + (lv,) for r in _cube_points(m) for lv in range(m + 1)]
    pts = [p for p in pts if in_sheet(p, a)]
    return FinitePoset.from_predicate(pts, lambda p, s: leq_sheet(p, s, a))


def interpolation_sheet(m: int, a: int) -> ChainComplex:
    """``I^m_a``; points are ``(r_1, ..., r_m, r_+)``."""
    if not 1 <= a <= m:
        raise CombinatoricsError(f"sheet index {a} outside 1..{m}")
    return ChainComplex([[sheet_poset(m, a)]], name=f"I^{m}_{a}", kind="sheet", params=(m, a))


def interpolation(m: int) -> ChainComplex:
    """``I^m_+``, the union of the sheets ``I^m_1, ..., I^m_m`` (a point when m = 0)."""
    if m == 0:
        poset = FinitePoset(((0,),), frozenset({((0,), (0,))}))
        return ChainComplex([[poset]], name="I^0_+", kind="interpolation", params=(0,))
    return ChainComplex([[sheet_poset(m, a) for a in range(1, m + 1)]],
                        name=f"I^{m}_+", kind="interpolation", params=(m,))


def double_sheet_poset(m: int, a: int, b: int) -> FinitePoset:
    pts = []
    for r in _cube_points(m):
        for up in range(m + 1):
            for lo in range(m + 1):
                p = r + (up, lo)
                if up >= lo and in_sheet(r + (up,), a) and in_sheet(r + (lo,), b):
                    pts.append(p)

    def leq(p, s):
        return leq_sheet(p[:-2] + (p[-2],), s[:-2] + (s[-2],), a) and \
            leq_sheet(p[:-2] + (p[-1],), s[:-2] + (s[-1],), b)

    return FinitePoset.from_predicate(pts, leq)


def double_sheet(m: int, a: int, b: int) -> ChainComplex:
    """``I^m_{a,b}`` for ``m >= a >= b >= 1``; points are ``(r_1..r_m, r_+, r_-)``."""
    if not m >= a >= b >= 1:
        raise CombinatoricsError("need m >= a >= b >= 1")
    return ChainComplex([[double_sheet_poset(m, a, b)]], name=f"I^{m}_{a},{b}",
                        kind="double-sheet", params=(m, a, b))


def double_interpolation(m: int) -> ChainComplex:
    """``I^m_{++}``, the union of all ``I^m_{a,b}``."""
    if m == 0:
        poset = FinitePoset(((0, 0),), frozenset({((0, 0), (0, 0))}))
        return ChainComplex([[poset]], name="I^0_++", kind="double-interpolation", params=(0,))
    posets = [double_sheet_poset(m, a, b) for a in range(1, m + 1) for b in range(1, a + 1)]
    return ChainComplex([posets], name=f"I^{m}_++", kind="double-interpolation", params=(m,))


def build_cube_family(m: int) -> dict:
    """All cube-like complexes attached to ``m``."""
    if m < 0:
        raise CombinatoricsError("m must be nonnegative")
    fam = {"cube": cube(m), "interpolation": interpolation(m),
           "double-interpolation": double_interpolation(m)}
    fam["sheets"] = {a: interpolation_sheet(m, a) for a in range(1, m + 1)}
    fam["double-sheets"] = {(a, b): double_sheet(m, a, b)
                            for a in range(1, m + 1) for b in range(1, a + 1)}
    return fam


# ---------------------------------------------------------------------------
# structure maps on vertices (all of them extend to simplicial maps)


def alpha(r: tuple) -> int:
    """Cubical blow-up ``(r_1..r_m) -> max{i : r_i = 1}`` with ``max ∅ = 0``."""
    for i in range(len(r), 0, -1):
        if r[i - 1] == 1:
            return i
    return 0


def alpha_plus(p: tuple) -> int:
    """``alpha`` on an interpolation point, ignoring the level."""
    return alpha(p[:-1])


def alpha_plus_plus(p: tuple) -> int:
    return alpha(p[:-2])


def cube_face(i: int, r_value: int) -> Callable[[tuple], tuple]:
    """``delta_{i|r}: I^{m-1} -> I^m`` inserting ``r`` as coordinate ``i`` (1-based)."""
    def f(p: tuple) -> tuple:
        return p[: i - 1] + (r_value,) + p[i - 1:]
    return f


def cube_degeneracy(i: int) -> Callable[[tuple], tuple]:
    """``epsilon_i: I^{m+1} -> I^m``; ``i = 0`` drops the first coordinate, else
    coordinates ``i-1`` and ``i`` (0-based) merge by ``max``."""
    def f(p: tuple) -> tuple:
        if i == 0:
            return p[1:]
        return p[: i - 1] + (max(p[i - 1], p[i]),) + p[i + 1:]
    return f


def upsilon_index(i: int, a: int) -> int:
    """``upsilon_i`` as a map on integers: ``a`` if ``a <= i`` else ``a - 1``."""
    return a if a <= i else a - 1


def sheet_face(a: int, i: int, r_value: int) -> Callable[[tuple], tuple]:
    """``delta_{a,i|r}: I^{m-1}_{upsilon_i(a)} -> I^m_a`` for ``i != a``."""
    shift = (a - upsilon_index(i, a)) * r_value

    def f(p: tuple) -> tuple:
        r, lv = p[:-1], p[-1]
        return r[: i - 1] + (r_value,) + r[i - 1:] + (lv + shift,)
    return f


def sheet_top_face_at(a: int) -> Callable[[tuple], tuple]:
    """``delta_{a,a|1}: I^m -> I^m_a``: set ``r_a = 1`` with level ``sum_{i<=a} r_i``.

    The level is computed from the incoming coordinates, so the old ``r_a``
    survives as the level offset and the map is injective.
    """
    def f(p: tuple) -> tuple:
        return p[: a - 1] + (1,) + p[a:] + (sum(p[:a]),)
    return f


def sheet_top(a: int) -> Callable[[tuple], tuple]:
    """``delta_{a,⊤}: I^m -> I^m_a``, level ``sum_{i<=a} r_i``."""
    def f(p: tuple) -> tuple:
        return p + (sum(p[:a]),)
    return f


def sheet_bottom(a: int) -> Callable[[tuple], tuple]:
    """``delta_{a,⊥}: I^m -> I^m_a``, level ``sum_{i<a} r_i``."""
    def f(p: tuple) -> tuple:
        return p + (sum(p[: a - 1]),)
    return f


def plus_face_zero(i: int) -> Callable[[tuple], tuple]:
    """``delta_{+,i|0}: I^{m-1}_+ -> I^m_+`` (insert 0, keep the level)."""
    def f(p: tuple) -> tuple:
        return p[: i - 1] + (0,) + p[i - 1:]
    return f


def plus_face_one(i: int, m: int) -> Callable[[tuple], tuple]:
    """``delta_{+,1|1}`` (for i = 1) or ``delta_{+,m|1}`` (for i = m) on ``I^{m-1}_+``.

    For ``i = 1`` every point of ``I^{m-1}_+`` lies in a sheet ``a - 1`` with
    ``a > 1`` and the level shifts by one; for ``i = m`` sheets keep their
    index and the level is unchanged.
    """
    if i == 1:
        def f(p: tuple) -> tuple:
            return (1,) + p[:-1] + (p[-1] + 1,)
        return f
    if i == m:
        def g(p: tuple) -> tuple:
            return p[:-1] + (1,) + (p[-1],)
        return g
    raise CombinatoricsError("delta_{+,i|1} is only glued for i = 1 or i = m")


def plus_top(m: int) -> Callable[[tuple], tuple]:
    """``delta_⊤ = delta_{m,⊤}: I^m -> I^m_+``."""
    return sheet_top(m)


def plus_bottom() -> Callable[[tuple], tuple]:
    """``delta_⊥ = delta_{1,⊥}: I^m -> I^m_+`` (level 0)."""
    return sheet_bottom(1)


def iota(a: int) -> Callable[[tuple], tuple]:
    """``iota_a: I^m_a -> I^{m+1}``, ``(r; r_+) -> (r, r_+ - sum_{i<a} r_i)``."""
    def f(p: tuple) -> tuple:
        r, lv = p[:-1], p[-1]
        return r + (lv - sum(r[: a - 1]),)
    return f


def iota_inverse(a: int) -> Callable[[tuple], tuple]:
    """Inverse of ``iota_a`` on its image ``{s_{m+1} <= s_a}``."""
    def f(s: tuple) -> tuple:
        r = s[:-1]
        return r + (s[-1] + sum(r[: a - 1]),)
    return f


def in_iota_image(s: tuple, a: int) -> bool:
    return s[-1] <= s[a - 1]


def eta(a: int) -> Callable[[tuple], tuple]:
    """``eta_a: I^{m+1} -> I^m_a``.

    On ``(s_1, ..., s_{m+1})`` (1-based): coordinate ``a`` becomes
    ``max(s_a, s_{m+1})``, the last coordinate is dropped and the level is
    ``s_{m+1} + sum_{i<a} s_i``.
    """
    def f(s: tuple) -> tuple:
        m = len(s) - 1
        last = s[m]
        r = s[: a - 1] + (max(s[a - 1], last),) + s[a:m]
        return r + (last + sum(s[: a - 1]),)
    return f


def plus_degeneracy(i: int) -> Callable[[tuple], tuple]:
    """``epsilon_{+,i}: I^{m+1}_+ -> I^m_+`` on ``(r_0, ..., r_m; r_+)`` (0-based)."""
    def f(p: tuple) -> tuple:
        r, lv = p[:-1], p[-1]
        if i == 0:
            return r[1:] + (lv - min(r[0], lv),)
        merged = r[: i - 1] + (max(r[i - 1], r[i]),) + r[i + 1:]
        if lv <= sum(r[:i]):
            return merged + (lv,)
        if lv >= sum(r[: i + 1]):
            return merged + (lv - min(r[i - 1], r[i]),)
        raise CombinatoricsError("point outside the interpolation region")
    return f


def chi_split(k: int) -> Callable[[tuple], tuple]:
    """``chi^{k,m}: I^m -> I^k x I^{m-k}``."""
    def f(p: tuple) -> tuple:
        return (p[:k], p[k:])
    return f


def chi_sheet(k: int, a: int) -> Callable[[tuple], tuple]:
    """``chi^{k,m}_a`` on ``I^m_a``.

    For ``a <= k`` the level stays with the first ``k`` coordinates; for
    ``a > k`` it moves to the last ``m - k`` coordinates, lowered by
    ``sum_{i<=k} r_i``.
    """
    def f(p: tuple) -> tuple:
        r, lv = p[:-1], p[-1]
        if a <= k:
            return (r[:k] + (lv,), r[k:])
        return (r[:k], r[k:] + (lv - sum(r[:k]),))
    return f


def chi_sheet_inverse(k: int, a: int) -> Callable[[tuple], tuple]:
    def f(pair: tuple) -> tuple:
        x, y = pair
        if a <= k:
            return x[:-1] + y + (x[-1],)
        return x + y[:-1] + (y[-1] + sum(x),)
    return f


def k_shuffle(subset: Sequence[int], m: int) -> tuple:
    """The ``K``-shuffle: increasing onto ``K`` on ``1..k``, increasing on the rest.

    Returned as the tuple ``(theta(1), ..., theta(m))``.
    """
    ks = sorted(subset)
    rest = [i for i in range(1, m + 1) if i not in ks]
    return tuple(ks + rest)


def permute_cube(theta: Sequence[int]) -> Callable[[tuple], tuple]:
    """``theta^*: (r_1..r_m) -> (r_theta(1), ..., r_theta(m))``."""
    def f(p: tuple) -> tuple:
        return tuple(p[t - 1] for t in theta)
    return f


def permutation_sign(perm: Sequence[int]) -> int:
    """Parity of a permutation given as a sequence of distinct comparable items."""
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    order = sorted(perm)
    pos = {v: i for i, v in enumerate(order)}
    p = [pos[v] for v in perm]
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# point maps between chain complexes


@dataclass
class PointMap:
    """A simplicial map between chain complexes determined by a vertex map."""

    source: ChainComplex
    target: SimplicialSet
    fn: Callable
    name: str = ""

    def __call__(self, chain: Sequence) -> tuple:
        return tuple(self.fn(p) for p in chain)

    def check(self) -> list:
        """Maximal simplices whose image is not a simplex (empty when simplicial)."""
        bad = []
        for ch in self.source.maximal_simplices():
            image = self(ch)
            ok = self.target.is_simplex(image) if isinstance(self.target, ChainComplex) else True
            if not ok:
                bad.append(ch)
        return bad


def product_map(*fns: Callable) -> Callable:
    """Componentwise map on tuples of factor points."""
    def f(p: tuple) -> tuple:
        return tuple(fn(x) for fn, x in zip(fns, p))
    return f


def ident(p):
    return p


# ---------------------------------------------------------------------------
# shuffles and maximal simplices of Δ^n × I^m


@dataclass(frozen=True)
class Shuffle:
    """A permutation of ``{1..n+m}`` whose inverse increases on ``{1..n}``.

    ``perm[j-1] = pi(j)``.  Step ``j`` of the associated maximal simplex of
    ``Δ^n × I^m`` moves the simplex coordinate when ``pi(j) <= n`` and sets
    cube coordinate ``pi(j) - n`` to 1 otherwise.
    """

    n: int
    m: int
    perm: tuple

    @property
    def sign(self) -> int:
        return permutation_sign(self.perm)

    def inverse_position(self, value: int) -> int:
        return self.perm.index(value) + 1

    def in_marked(self, a: int) -> bool:
        """Membership in the subfamily ``S^{n,m-1}_a`` (cube coordinate ``a`` before ``m``)."""
        return self.inverse_position(self.n + a) < self.inverse_position(self.n + self.m)

    def chain(self) -> tuple:
        """The maximal simplex ``sigma_pi`` as a chain of points ``(i, r)``."""
        i = 0
        r = [0] * self.m
        pts = [(0, tuple(r))]
        for v in self.perm:
            if v <= self.n:
                i += 1
            else:
                r[v - self.n - 1] = 1
            pts.append((i, tuple(r)))
        return tuple(pts)

    def marked_chain(self, a: int) -> tuple:
        """``sigma_{a,pi}``: the chain of ``Δ^n × I^{m-1}_a`` lying over ``sigma_pi`` via ``iota_a``."""
        if not self.in_marked(a):
            raise CombinatoricsError(f"{self.perm} is not in the marked family for a = {a}")
        inv = iota_inverse(a)
        return tuple((i, inv(r)) for i, r in self.chain())


@lru_cache(maxsize=None)
def shuffles(n: int, m: int) -> tuple:
    """All of ``S^{n,m}`` in a fixed order: by simplex-step positions, then cube order."""
    out = []
    total = n + m
    for pos in itertools.combinations(range(total), n):
        posset = set(pos)
        rest = [j for j in range(total) if j not in posset]
        for order in itertools.permutations(range(1, m + 1)):
            perm = [0] * total
            for k, j in enumerate(pos):
                perm[j] = k + 1
            for j, c in zip(rest, order):
                perm[j] = n + c
            out.append(Shuffle(n, m, tuple(perm)))
    return tuple(out)


@lru_cache(maxsize=None)
def shuffles_marked(n: int, m: int, a: int) -> tuple:
    """``S^{n,m}_a``: members of ``S^{n,m+1}`` with coordinate ``a`` before ``m+1``."""
    if not 1 <= a <= m:
        raise CombinatoricsError(f"marker {a} outside 1..{m}")
    return tuple(s for s in shuffles(n, m + 1) if s.in_marked(a))


def shuffle_of_chain(chain: Sequence, n: int, m: int) -> Shuffle:
    """Decode a maximal chain of ``Δ^n × I^m`` (points ``(i, r)``) into its shuffle."""
    perm = []
    for (i0, r0), (i1, r1) in zip(chain, chain[1:]):
        if i1 == i0 + 1 and r1 == r0:
            perm.append(i1)
        else:
            diff = [k for k in range(m) if r0[k] != r1[k]]
            if i1 != i0 or len(diff) != 1:
                raise CombinatoricsError("not a maximal chain")
            perm.append(n + diff[0] + 1)
    return Shuffle(n, m, tuple(perm))


def k_shuffle_product(mu: Shuffle, nu: Shuffle, subset: Sequence[int], m: int) -> Shuffle:
    """``mu^K nu``: the shuffle whose maximal simplex maps under ``Δ^n × chi^K``
    to ``(sigma_mu × I^{m-k}) ∘ sigma_nu``."""
    n, k = mu.n, mu.m
    if nu.n != n + k or nu.m != m - k:
        raise CombinatoricsError("shuffle sizes do not fit")
    theta = k_shuffle(subset, m)
    mu_chain = mu.chain()
    pts = []
    for j, s in nu.chain():
        i, r_first = mu_chain[j]
        permuted = r_first + s               # a point of I^m after theta^*
        original = [0] * m
        for pos, t in enumerate(theta):
            original[t - 1] = permuted[pos]
        pts.append((i, tuple(original)))
    return shuffle_of_chain(pts, n, m)


def max_simplex_count(n: int, m: int) -> int:
    return math.factorial(n + m) // math.factorial(n)


# ---------------------------------------------------------------------------
# faces and named subcomplexes on chains of Δ^n × (cube-like)


def simplex_face_indices(chain: Sequence, n: int) -> list[int]:
    """Indices ``j`` such that the chain lies in ``∂_j Δ^n × (...)``."""
    present = {p[0] for p in chain}
    return [j for j in range(n + 1) if j not in present]


def squeeze_simplex(chain: Sequence, j: int) -> tuple:
    """Rewrite a chain avoiding simplex vertex ``j`` in the coordinates of ``Δ^{n-1}``."""
    return tuple(((p[0] if p[0] < j else p[0] - 1),) + tuple(p[1:]) for p in chain)


def constant_coordinates(chain: Sequence, idx: int) -> Optional[int]:
    """Common value of cube coordinate ``idx`` (0-based) along a chain of ``(i, r)`` points."""
    vals = {p[1][idx] for p in chain}
    return vals.pop() if len(vals) == 1 else None


def in_pi(chain: Sequence, n: int, m: int) -> bool:
    """Membership of a chain of ``Δ^n × I^m`` in ``Π^{n,m}``."""
    if simplex_face_indices(chain, n):
        return True
    for i in range(m):
        v = constant_coordinates(chain, i)
        if v == 0 or (v == 1 and i < m - 1):
            return True
    return False


def in_pi_plus_cube(chain_r: Sequence[tuple], m: int) -> bool:
    """Membership of a chain of ``I^m_+`` points in ``Π^m_+`` (all but ``∂_{m|1}``)."""
    if m == 0:
        return True
    for i in range(m):
        vals = {p[i] for p in chain_r}
        if vals == {0} or (vals == {1} and i < m - 1):
            return True
    if all(p[-1] == sum(p[:m]) for p in chain_r):
        return True
    if all(p[-1] == 0 for p in chain_r):
        return True
    return False


# ---------------------------------------------------------------------------
# K-shuffles of sheets and the identities they satisfy


def _unshuffle(theta: Sequence[int], permuted: Sequence[int]) -> tuple:
    """Inverse of ``theta^*``: rebuild ``r`` from ``(r_theta(1), ..., r_theta(m))``."""
    original = [0] * len(theta)
    for pos, t in enumerate(theta):
        original[t - 1] = permuted[pos]
    return tuple(original)


def chi_k(subset: Sequence[int], m: int) -> Callable[[tuple], tuple]:
    """``chi^K: I^m -> I^k x I^{m-k}``, ``theta_K^*`` followed by the split."""
    k = len(list(subset))
    perm = permute_cube(k_shuffle(subset, m))

    def f(p: tuple) -> tuple:
        q = perm(p)
        return (q[:k], q[k:])
    return f


def chi_k_inverse(subset: Sequence[int], m: int) -> Callable[[tuple], tuple]:
    theta = k_shuffle(subset, m)

    def f(pair: tuple) -> tuple:
        return _unshuffle(theta, pair[0] + pair[1])
    return f


def chi_k_sheet(subset: Sequence[int], m: int, a: int) -> Callable[[tuple], tuple]:
    """``chi^K_a`` on ``I^m_{theta(a)}``, read off from its relation with ``iota``.

    For ``a <= k`` the level travels with the ``K`` coordinates and is shifted
    from the ``theta(a)`` sheet to the ``a`` sheet; for ``a > k`` it travels
    with the complement and lands on the ``a - k`` sheet there.
    """
    k = len(list(subset))
    theta = k_shuffle(subset, m)
    if not 1 <= a <= m:
        raise CombinatoricsError(f"sheet index {a} outside 1..{m}")
    ta = theta[a - 1]

    def f(p: tuple) -> tuple:
        r, lv = p[:-1], p[-1]
        q = permute_cube(theta)(r)
        first, rest = q[:k], q[k:]
        base = lv - sum(r[: ta - 1])
        if a <= k:
            return (first + (base + sum(first[: a - 1]),), rest)
        return (first, rest + (base + sum(rest[: a - k - 1]),))
    return f


def chi_k_sheet_inverse(subset: Sequence[int], m: int, a: int) -> Callable[[tuple], tuple]:
    k = len(list(subset))
    theta = k_shuffle(subset, m)
    ta = theta[a - 1]

    def f(pair: tuple) -> tuple:
        x, y = pair
        if a <= k:
            first, rest, lv = x[:-1], y, x[-1] - sum(x[: a - 1])
        else:
            first, rest, lv = x, y[:-1], y[-1] - sum(y[: a - k - 1])
        r = _unshuffle(theta, first + rest)
        return r + (lv + sum(r[: ta - 1]),)
    return f


def k_shuffle_marked_product(mu: Shuffle, nu: Shuffle, subset: Sequence[int], m: int,
                             a: int) -> Shuffle:
    """``mu^K_a nu`` in the marked family for ``theta(a)``.

    For ``a <= k``, ``mu`` is marked at ``a`` (a member of ``S^{n,k+1}``) and
    ``nu`` is unmarked; for ``a > k`` it is the other way round with marker
    ``a - k``.  The chain ``(sigma_{a,mu} x I) o sigma_nu`` (resp. its mirror)
    is pulled back along ``chi^K_a`` and pushed into ``Δ^n x I^{m+1}``.
    """
    k = len(list(subset))
    theta = k_shuffle(subset, m)
    ta = theta[a - 1]
    inv = chi_k_sheet_inverse(subset, m, a)
    up = iota(ta)
    n = mu.n
    if a <= k:
        outer = mu.marked_chain(a)
        inner = nu.chain()
    else:
        outer = mu.chain()
        inner = nu.marked_chain(a - k)
    pts = []
    for j, s in inner:
        i, x = outer[j]
        pts.append((i, up(inv((x, s)))))
    return shuffle_of_chain(pts, n, m + 1)


def alpha_face_defects(m: int) -> list:
    """Points where ``alpha`` fails to intertwine the cube faces with cofaces.

    Inserting 0 at coordinate ``i`` must act on ``alpha`` as the coface
    ``delta_i``; inserting 1 must act as ``v -> max(v, i-1) + 1``.
    """
    bad = []
    for i in range(1, m + 1):
        di = delta(i, m)
        for r in _cube_points(m - 1):
            v = alpha(r)
            if alpha(cube_face(i, 0)(r)) != di(v):
                bad.append(("face0", i, r))
            if alpha(cube_face(i, 1)(r)) != max(v, i - 1) + 1:
                bad.append(("face1", i, r))
    return bad


def alpha_degeneracy_defects(m: int) -> list:
    """Points of ``I^{m+1}`` where ``alpha epsilon_i != upsilon_i alpha``."""
    bad = []
    for i in range(0, m + 1):
        ui = upsilon(i, m)
        for s in _cube_points(m + 1):
            if alpha(cube_degeneracy(i)(s)) != ui(alpha(s)):
                bad.append(("degeneracy", i, s))
    return bad


def iota_eta_defects(m: int) -> list:
    """``eta_a iota_a = id``, and ``iota_a`` is an order embedding onto
    ``{s_{m+1} <= s_a}`` sending maximal simplices to simplices."""
    bad = []
    target = cube(m + 1)
    for a in range(1, m + 1):
        sheet = interpolation_sheet(m, a)
        up, down = iota(a), eta(a)
        pts = sheet.points()
        image = {up(p) for p in pts}
        expected = {s for s in _cube_points(m + 1) if in_iota_image(s, a)}
        if image != expected or len(image) != len(pts):
            bad.append(("iota-image", a))
        for p in pts:
            if down(up(p)) != p or iota_inverse(a)(up(p)) != p:
                bad.append(("eta-iota", a, p))
        if PointMap(sheet, target, up).check():
            bad.append(("iota-simplicial", a))
        if PointMap(target, sheet, down).check():
            bad.append(("eta-simplicial", a))
    return bad


def chi_defects(m: int) -> list:
    """Bijectivity, simplicity and the ``iota`` relations of ``chi^K`` and
    ``chi^K_a`` for every ``K`` inside ``{1..m}``."""
    bad = []
    for k in range(0, m + 1):
        for subset in itertools.combinations(range(1, m + 1), k):
            theta = k_shuffle(subset, m)
            split = chi_k(subset, m)
            back = chi_k_inverse(subset, m)
            for p in _cube_points(m):
                if back(split(p)) != p:
                    bad.append(("chi-inverse", subset, p))
            if PointMap(cube(m), product_of(cube(k), cube(m - k)), split).check():
                bad.append(("chi-simplicial", subset))
            plus = chi_k(tuple(subset) + (m + 1,), m + 1)
            for a in range(1, m + 1):
                ta = theta[a - 1]
                fn = chi_k_sheet(subset, m, a)
                inv = chi_k_sheet_inverse(subset, m, a)
                if a <= k:
                    target = product_of(interpolation_sheet(k, a), cube(m - k))
                else:
                    target = product_of(cube(k), interpolation_sheet(m - k, a - k))
                src = interpolation_sheet(m, ta)
                pts = src.points()
                images = [fn(p) for p in pts]
                if sorted(images) != sorted(target.points()):
                    bad.append(("chi-sheet-bijection", subset, a))
                for p, q in zip(pts, images):
                    if inv(q) != p:
                        bad.append(("chi-sheet-inverse", subset, a, p))
                    if a <= k:
                        lhs = (iota(a)(q[0]), q[1])
                        rhs = plus(iota(ta)(p))
                    else:
                        lhs = (q[0], iota(a - k)(q[1]))
                        rhs = chi_k(subset, m + 1)(iota(ta)(p))
                    if lhs != rhs:
                        bad.append(("chi-iota", subset, a, p))
                    standard = tuple(subset) == tuple(range(1, k + 1))
                    if standard and q != chi_sheet(k, a)(p):
                        bad.append(("chi-standard", subset, a, p))
                if PointMap(src, target, fn).check():
                    bad.append(("chi-sheet-simplicial", subset, a))
    return bad


def k_shuffle_defects(n: int, m: int) -> list:
    """The shuffle products ``mu^K nu`` and ``mu^K_a nu`` are bijections onto
    ``S^{n,m}`` and ``S^{n,m}_{theta(a)}`` with the expected signs.

    Signs: ``sgn(theta) sgn(mu) sgn(nu)`` in general, with an extra
    ``(-1)^{m-k}`` when the marker sits among the ``K`` coordinates; the sign
    of ``theta_{K u {m+1}}`` is ``(-1)^{m-k} sgn(theta_K)``.
    """
    bad = []
    for k in range(0, m + 1):
        for subset in itertools.combinations(range(1, m + 1), k):
            theta = k_shuffle(subset, m)
            st = permutation_sign(theta)
            if permutation_sign(k_shuffle(subset + (m + 1,), m + 1)) != (-1) ** (m - k) * st:
                bad.append(("theta-plus-sign", subset))
            seen = set()
            for mu in shuffles(n, k):
                for nu in shuffles(n + k, m - k):
                    pi = k_shuffle_product(mu, nu, subset, m)
                    seen.add(pi.perm)
                    if pi.sign != st * mu.sign * nu.sign:
                        bad.append(("sign", subset, mu.perm, nu.perm))
            if seen != {s.perm for s in shuffles(n, m)}:
                bad.append(("bijection", subset))
            for a in range(1, m + 1):
                ta = theta[a - 1]
                if a <= k:
                    pairs = [(mu, nu) for mu in shuffles_marked(n, k, a)
                             for nu in shuffles(n + k + 1, m - k)]
                    extra = (-1) ** (m - k)
                else:
                    pairs = [(mu, nu) for mu in shuffles(n, k)
                             for nu in shuffles_marked(n + k, m - k, a - k)]
                    extra = 1
                seen = set()
                for mu, nu in pairs:
                    pi = k_shuffle_marked_product(mu, nu, subset, m, a)
                    seen.add(pi.perm)
                    if not pi.in_marked(ta):
                        bad.append(("marked-family", subset, a, mu.perm, nu.perm))
                    if pi.sign != extra * st * mu.sign * nu.sign:
                        bad.append(("marked-sign", subset, a, mu.perm, nu.perm))
                if len(seen) != len(pairs) or seen != {s.perm for s in shuffles_marked(n, m, ta)}:
                    bad.append(("marked-bijection", subset, a))
    return bad


def max_simplex_defects(n: int, m: int) -> list:
    """Maximal simplices of ``Δ^n x I^m``: there are ``(n+m)!/n!`` of them and
    they are exactly the shuffle chains."""
    prism = product_of(simplex_complex(n), cube(m))
    chains = {tuple(c) for c in prism.maximal_simplices()}
    shuffle_chains = {s.chain() for s in shuffles(n, m)}
    bad = []
    if len(chains) != max_simplex_count(n, m):
        bad.append(("count", n, m, len(chains)))
    if chains != shuffle_chains:
        bad.append(("shuffle-chains", n, m))
    for s in shuffles(n, m):
        if shuffle_of_chain(s.chain(), n, m) != s:
            bad.append(("decode", s.perm))
    return bad


def combinatorial_identity_report(m_cap: int = 3, n_cap: int = 2) -> dict[str, list]:
    """Run every vertex-level identity check up to the caps; values are defect lists."""
    report: dict[str, list] = {"alpha-face": [], "alpha-degeneracy": [], "iota-eta": [],
                               "chi": [], "k-shuffle": [], "max-simplex": []}
    for m in range(1, m_cap + 1):
        report["alpha-face"] += alpha_face_defects(m)
        report["alpha-degeneracy"] += alpha_degeneracy_defects(m)
        report["iota-eta"] += iota_eta_defects(m)
        report["chi"] += chi_defects(m)
    for n in range(0, n_cap + 1):
        for m in range(0, m_cap + 1):
            report["max-simplex"] += max_simplex_defects(n, m)
            if m >= 1:
                report["k-shuffle"] += k_shuffle_defects(n, m)
    return report
