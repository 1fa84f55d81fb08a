"""Cleavages of vector fibrations and the prism fills derived from them.

A cleavage picks, for every base simplex ``g`` of dimension ``n`` and every
``k < n``, a linear section ``c_{n,k}(g)`` of the horn restriction
``rho_{n,k}(g): V|g -> ⊕_{i != k} V|d_i g``.  Sections are stored as matrices
on the ambient horn space (the blocks stacked in increasing ``i``); they are
right inverses of ``rho`` on its image.

Lifts of shapes built from poset nerves (``Δ^n × I^m``, the interpolation
sheets, products with intervals) are :class:`Lift` objects.  A lift stores
one matrix per nondegenerate chain: the columns are indexed by a fixed
parameter space, so a single lift records a whole linear family of simplicial
maps at once (for instance ``v -> P(g, v)`` for ``v`` ranging over a fiber).
Values on degenerate chains are recovered from their nondegenerate cores
through the bundle action.

:class:`PrismLift` implements the canonical prism fill: given data on
``A × 0 ∪ B × I`` it fills each prism ``a × I`` (``a`` a nondegenerate simplex
of ``A`` not in ``B``) through its standard decomposition into
``(k+1)``-simplices, using horn fillers in descending order.  The interval
coordinate may sit at any position of the ambient point, which gives the
cube-direction fills used by the splitting recursions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from . import combinatorics as cb
from .bundle import BundleError, VectorFibration, seeded_rng
from .combinatorics import PosetMap
from .linalg import (
    LinAlgError, Matrix, columns, from_columns, independent_columns, left_inverse, mat_mul,
    mat_sub, mat_vec, mat_zero, matrix_from_json, matrix_to_json, rank,
)


class CleavageError(ValueError):
    """Raised for inconsistent lifting data or sections that do not exist."""


# ---------------------------------------------------------------------------
# cleavages


class Cleavage:
    """A family of horn sections ``c_{n,k}(g)``, built on demand and memoized.

    With ``seed=None`` the sections are canonical (deterministic pivoting);
    otherwise the complement of the degenerate part is spanned by seeded
    random preimages, so distinct seeds give distinct cleavages whenever the
    horn maps have nontrivial kernels.  ``normal=True`` forces every image to
    contain the degenerate vectors.
    """

    def __init__(self, bundle: VectorFibration, seed: Optional[int] = None, normal: bool = True,
                 name: str = "c"):
        self.bundle = bundle
        self.seed = seed
        self.normal = normal
        self.name = name
        self._sections: dict = {}

    def _build(self, g, k: int) -> Matrix:
        b = self.bundle
        rho = b.rho(g, k)
        constraint = b.degenerate_vectors(g) if self.normal else []
        rng = None if self.seed is None else seeded_rng("cleavage", self.seed, g, k)
        try:
            return _section(rho, b.dim(g), constraint, rng)
        except LinAlgError as exc:
            raise CleavageError(f"no section of the horn map at {g}, k={k}: {exc}") from exc

    def section(self, g, k: int) -> Matrix:
        key = (g, k)
        hit = self._sections.get(key)
        if hit is None:
            hit = self._build(g, k)
            self._sections[key] = hit
        return hit

    def fill(self, g, k: int, faces: Sequence[Matrix], cols: int) -> Matrix:
        """Fill the horn whose faces ``d_i``, ``i != k`` (in increasing order) are given.

        Each face is a matrix with ``cols`` columns, so a whole family of horns
        is filled at once.
        """
        stacked: list = []
        for f in faces:
            stacked.extend(f)
        return mat_mul(self.section(g, k), tuple(stacked), cols)

    def image(self, g, k: int) -> list:
        """A basis of ``C_{n,k}(g) = im c_{n,k}(g)``."""
        mat = self.section(g, k)
        cols = columns(mat, len(mat[0]) if mat else 0)
        return [cols[i] for i in independent_columns(cols, self.bundle.dim(g))]

    def to_json(self, encode: Callable, cap: int) -> dict:
        """All sections over base simplices of dimension ``<= cap``."""
        out = []
        for n in range(1, cap + 1):
            for g in self.bundle.base.simplices(n):
                for k in range(n):
                    out.append({"n": n, "k": k, "simplex": encode(g),
                                "section": matrix_to_json(self.section(g, k))})
        return {"name": self.name, "seed": self.seed, "normal": self.normal, "sections": out}


class TableCleavage(Cleavage):
    """A cleavage read back from serialized sections (falls back to the seed above the table)."""

    def __init__(self, bundle: VectorFibration, table: dict, seed: Optional[int] = None,
                 normal: bool = True, name: str = "c"):
        super().__init__(bundle, seed, normal, name)
        self._sections.update(table)

    @classmethod
    def from_json(cls, bundle: VectorFibration, data: dict, decode: Callable) -> "TableCleavage":
        table = {(decode(rec["simplex"]), int(rec["k"])): matrix_from_json(rec["section"])
                 for rec in data["sections"]}
        return cls(bundle, table, data.get("seed"), bool(data.get("normal", True)), data.get("name", "c"))


class ImageCleavage(Cleavage):
    """The cleavage whose image at ``(g, k)`` is the span of ``image_fn(g, k)``.

    The spanning vectors must form a complement of ``ker rho_{n,k}(g)``.
    """

    def __init__(self, bundle: VectorFibration, image_fn: Callable, name: str = "c"):
        super().__init__(bundle, None, True, name)
        self.image_fn = image_fn

    def _build(self, g, k: int) -> Matrix:
        b = self.bundle
        dim = b.dim(g)
        rho = b.rho(g, k)
        basis = list(self.image_fn(g, k))
        images = [mat_vec(rho, v) for v in basis]
        codim = len(rho)
        if len(independent_columns(images, codim)) != len(basis):
            raise CleavageError(f"prescribed image at {g}, k={k} meets the kernel of the horn map")
        if len(basis) != (rank(rho) if rho else 0):
            raise CleavageError(f"prescribed image at {g}, k={k} does not map onto the horn space")
        if not basis:
            return mat_zero(dim, codim)
        return mat_mul(from_columns(basis, dim), left_inverse(images, codim))


def _section(rho: Matrix, dim: int, constraint, rng) -> Matrix:
    from .linalg import section_of
    if not rho:
        return tuple(() for _ in range(dim))
    return section_of(rho, dim, constraint, rng)


def random_normal_cleavage(bundle: VectorFibration, seed: int, name: str = "") -> Cleavage:
    return Cleavage(bundle, seed=seed, normal=True, name=name or f"c[{seed}]")


def canonical_cleavage(bundle: VectorFibration, name: str = "c") -> Cleavage:
    return Cleavage(bundle, seed=None, normal=True, name=name)


# ---------------------------------------------------------------------------
# predicates


@dataclass
class CleavageReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_sections(c: Cleavage, cap: int) -> CleavageReport:
    """``rho ∘ c = id`` on the space of matching horns, for base simplices up to ``cap``."""
    rep = CleavageReport()
    b = c.bundle
    for n in range(1, cap + 1):
        for g in b.base.simplices(n):
            for k in range(n):
                rho = b.rho(g, k)
                sec = c.section(g, k)
                for h in b.horn_space(g, k):
                    rep.checked += 1
                    if mat_vec(rho, mat_vec(sec, h)) != h:
                        rep.failures.append((g, k))
                        break
    return rep


def is_normal(c: Cleavage, cap: int) -> CleavageReport:
    """Every degenerate vector over ``g`` lies in ``im c_{n,k}(g)`` (equivalently ``c ρ x = x``)."""
    rep = CleavageReport()
    b = c.bundle
    for n in range(1, cap + 1):
        for g in b.base.simplices(n):
            degenerate = b.degenerate_vectors(g)
            if not degenerate:
                continue
            for k in range(n):
                rho = b.rho(g, k)
                sec = c.section(g, k)
                rep.checked += 1
                if any(mat_vec(sec, mat_vec(rho, x)) != tuple(x) for x in degenerate):
                    rep.failures.append((g, k))
    return rep


def is_coherent(c: Cleavage, cap: int) -> CleavageReport:
    """The image ``C_{n,k}(g)`` does not depend on ``k``; failures list ``(g, k, k')`` witnesses."""
    rep = CleavageReport()
    b = c.bundle
    for n in range(2, cap + 1):
        for g in b.base.simplices(n):
            dim = b.dim(g)
            first = c.image(g, 0)
            for k in range(1, n):
                other = c.image(g, k)
                rep.checked += 1
                joint = len(independent_columns(first + other, dim))
                if joint != len(first) or joint != len(other):
                    rep.failures.append((g, 0, k))
    return rep


# ---------------------------------------------------------------------------
# lifts


def dedupe(chain: Sequence) -> tuple[tuple, Optional[PosetMap]]:
    """Split a chain into its nondegenerate core and the collapsing map (``None`` if injective)."""
    core = [chain[0]]
    vals = [0]
    for p in chain[1:]:
        if p != core[-1]:
            core.append(p)
        vals.append(len(core) - 1)
    if len(core) == len(chain):
        return tuple(chain), None
    return tuple(core), PosetMap(tuple(vals), len(core) - 1)


def remove(chain: tuple, i: int) -> tuple:
    return chain[:i] + chain[i + 1:]


class Lift:
    """A linear family of simplicial maps from a poset-nerve shape into a bundle.

    ``label`` sends a shape point to a vertex index of the base simplex ``g``;
    the base of a chain is ``g`` acted on by the labels of its points.  Values
    are matrices with ``cols`` columns.  Missing values come from ``source``.
    """

    def __init__(self, bundle: VectorFibration, g, label: Callable, cols: int,
                 source: Optional[Callable] = None, name: str = "lift"):
        self.bundle = bundle
        self.g = g
        self.top = bundle.base.dim_of(g)
        self.label = label
        self.cols = cols
        self.source = source
        self.name = name
        self.values: dict = {}
        self._bases: dict = {}

    def base_of(self, chain: Sequence):
        labels = tuple(self.label(p) for p in chain)
        hit = self._bases.get(labels)
        if hit is None:
            hit = self.bundle.base.act(self.g, PosetMap(labels, self.top))
            self._bases[labels] = hit
        return hit

    def _compute(self, core: tuple) -> Matrix:
        if self.source is None:
            raise CleavageError(f"{self.name}: no value for {core}")
        return self.source(core)

    def value(self, chain: Sequence) -> Matrix:
        core, epi = dedupe(chain)
        val = self.values.get(core)
        if val is None:
            val = self._compute(core)
            self._check_shape(core, val)
            self.values[core] = val
        if epi is None:
            return val
        return mat_mul(self.bundle.act(self.base_of(core), epi), val, self.cols)

    def _check_shape(self, core, val):
        rows = self.bundle.dim(self.base_of(core))
        if len(val) != rows or any(len(r) != self.cols for r in val):
            raise CleavageError(f"{self.name}: value at {core} has the wrong shape")

    def vector(self, chain: Sequence, coeffs: Sequence) -> tuple:
        """The value of the family at a parameter vector."""
        return mat_vec(self.value(chain), tuple(coeffs))


class FunctionLift(Lift):
    """A lift whose nondegenerate values all come from ``source`` (memoized)."""


def restrict(lift: Lift, fn: Callable, label: Optional[Callable] = None, name: str = "") -> Lift:
    """The pullback ``lift ∘ fn`` along a point map ``fn`` into the lift's shape."""
    lab = label or (lambda p: lift.label(fn(p)))
    return Lift(lift.bundle, lift.g, lab, lift.cols,
                source=lambda core: lift.value(tuple(fn(p) for p in core)),
                name=name or f"{lift.name}∘f")


def simplex_lift(bundle: VectorFibration, x, n: int) -> Lift:
    """``v -> v`` on ``Δ^n`` at the vertex ``x``: the family of all ``v ∈ V|1_n x``.

    Points are ``(i, ())`` so that it is the ``m = 0`` case of ``Δ^n × I^m``.
    """
    from .bundle import unit_simplex
    g = unit_simplex(bundle.base, x, 0)
    top = unit_simplex(bundle.base, x, n)
    cols = bundle.dim(top)

    def source(core):
        return bundle.act(top, PosetMap(tuple(p[0] for p in core), n))
    return Lift(bundle, g, lambda p: 0, cols, source, name=f"id[{n}]")


# ---------------------------------------------------------------------------
# the canonical prism fill


class PrismLift(Lift):
    """The fill ``c_⊔^{A,B}(h, w)`` of ``A × I`` from data on ``A × 0 ∪ B × I``.

    ``split(point) -> (a_point, e)`` and ``join(a_point, e) -> point`` identify
    the lift's points with ``A × {0, 1}``; ``in_b(chain)`` decides membership
    of a nondegenerate chain of ``A`` in ``B``.  ``known(core)`` supplies the
    values on ``A × 0 ∪ B × I``.  Prisms are filled lazily, so only the part of
    ``A`` that is actually queried gets computed.
    """

    def __init__(self, cleavage: Cleavage, g, label: Callable, cols: int, split: Callable,
                 join: Callable, in_b: Callable, known: Callable, name: str = "prism"):
        super().__init__(cleavage.bundle, g, label, cols, None, name)
        self.cleavage = cleavage
        self.split = split
        self.join = join
        self.in_b = in_b
        self.known = known
        self._done: set = set()

    def given(self, core: tuple) -> bool:
        """Whether a nondegenerate chain lies in ``A × 0 ∪ B × I``."""
        pairs = [self.split(p) for p in core]
        if all(e == 0 for _, e in pairs):
            return True
        a, _ = dedupe(tuple(x for x, _ in pairs))
        return self.in_b(a)

    def _compute(self, core: tuple) -> Matrix:
        pairs = [self.split(p) for p in core]
        a, _ = dedupe(tuple(x for x, _ in pairs))
        if all(e == 0 for _, e in pairs) or self.in_b(a):
            return self.known(core)
        self.ensure_prism(a)
        hit = self.values.get(core)
        if hit is None:
            raise CleavageError(f"{self.name}: {core} is not covered by the prism over {a}")
        return hit

    def ensure_prism(self, a: tuple):
        if a in self._done:
            return
        k = len(a) - 1
        if k > 0:
            for i in range(k + 1):
                f = remove(a, i)
                if not self.in_b(f):
                    self.ensure_prism(f)
        join = self.join
        faces_of = self.bundle.face
        for j in range(k, -1, -1):
            tau = tuple(join(a[q], 0) for q in range(j + 1)) + tuple(join(a[q], 1) for q in range(j, k + 1))
            base = self.base_of(tau)
            faces = [self.value(remove(tau, i)) for i in range(k + 2) if i != j]
            val = self.cleavage.fill(base, j, faces, self.cols)
            self.values[tau] = val
            self.values[remove(tau, j)] = mat_mul(faces_of(base, j), val, self.cols)
        self._done.add(a)

    def fill_all(self, chains_of_a: Iterable[tuple]):
        for a in chains_of_a:
            if not self.in_b(a):
                self.ensure_prism(a)


# ---------------------------------------------------------------------------
# shapes built from Δ^n × cubes


def in_boundary_product(chain: Sequence, n: int, m: int) -> bool:
    """Membership of a chain of ``Δ^n × I^m`` in ``∂Δ^n × I^m ∪ Δ^n × ∂I^m``."""
    if cb.simplex_face_indices(chain, n):
        return True
    return any(cb.constant_coordinates(chain, i) is not None for i in range(m))


def cube_prism_geometry(position: int) -> tuple[Callable, Callable]:
    """``split``/``join`` for ``Δ^n × I^m`` with the interval at cube coordinate ``position`` (1-based)."""
    idx = position - 1

    def split(p):
        j, r = p
        return (j, r[:idx] + r[idx + 1:]), r[idx]

    def join(a, e):
        j, r = a
        return (j, r[:idx] + (e,) + r[idx:])
    return split, join


def in_pi_face(chain: Sequence, n: int, m: int, i: int) -> bool:
    """Membership in ``Π^{n,m}_{i|1}``: everything on ``∂(Δ^n × I^m)`` except ``∂_{i|1}``."""
    if cb.simplex_face_indices(chain, n):
        return True
    for c in range(m):
        v = cb.constant_coordinates(chain, c)
        if v == 0 or (v == 1 and c != i - 1):
            return True
    return False


def pi_fill(cleavage: Cleavage, g, label: Callable, cols: int, n: int, m: int, known: Callable,
            position: Optional[int] = None, name: str = "") -> PrismLift:
    """``c^{n,m}_{i|1}(h, w)`` with ``i = position`` (default ``m``, giving ``c^{n,m}``).

    ``known`` must answer every chain of ``Π^{n,m}_{i|1}``.
    """
    position = m if position is None else position
    if not 1 <= position <= m:
        raise CleavageError("the prism coordinate must be a cube coordinate")
    split, join = cube_prism_geometry(position)
    return PrismLift(cleavage, g, label, cols, split, join,
                     lambda a: in_boundary_product(a, n, m - 1), known,
                     name=name or f"c^{n},{m}_{position}|1")


def sheet_aux_label(label: Callable, a: int) -> Callable:
    """Labels on ``Δ^n × I^{m+1}`` pulled back along ``id × eta_a``."""
    et = cb.eta(a)
    return lambda p: label((p[0], et(p[1])))


def in_pi_sheet(chain: Sequence, n: int, m: int, a: int) -> bool:
    """Membership of a chain of ``Δ^n × I^m_a`` in ``Π^{n,m}_a``."""
    if cb.simplex_face_indices(chain, n):
        return True
    pts = [p[1] for p in chain]
    for c in range(m):
        vals = {q[c] for q in pts}
        if vals == {0} and c != a - 1:
            return True
        if vals == {1} and c < m - 1:
            return True
    if all(q[-1] == sum(q[: a - 1]) for q in pts):
        return True
    if a == m and all(q[-1] == sum(q[:a]) for q in pts):
        return True
    return False


class SheetLift(Lift):
    """``c^{n,m}_a(h, w)`` on ``Δ^n × I^m_a``, computed through ``c^{n,m+1}_{m|1}``
    on ``Δ^n × I^{m+1}`` pulled back along ``id × iota_a``.

    ``known`` answers chains of ``Π^{n,m}_a``; the auxiliary fill only ever asks
    for chains whose image under ``id × eta_a`` lies there (checked).
    """

    def __init__(self, cleavage: Cleavage, g, label: Callable, cols: int, n: int, m: int, a: int,
                 known: Callable, name: str = ""):
        super().__init__(cleavage.bundle, g, label, cols, None, name or f"c^{n},{m}_{a}")
        self.n, self.m, self.a = n, m, a
        self.known = known
        et = cb.eta(a)
        self._eta = lambda p: (p[0], et(p[1]))
        io = cb.iota(a)
        self._iota = lambda p: (p[0], io(p[1]))

        def aux_known(core):
            image = tuple(self._eta(p) for p in core)
            img_core, epi = dedupe(image)
            if not in_pi_sheet(img_core, n, m, a):
                raise CleavageError(f"{self.name}: auxiliary fill asked for {core} outside Π_a")
            val = self.value(image)
            return val
        self.aux = pi_fill(cleavage, g, sheet_aux_label(label, a), cols, n, m + 1, aux_known,
                           position=m, name=f"{self.name}/aux")

    def _compute(self, core: tuple) -> Matrix:
        if in_pi_sheet(core, self.n, self.m, self.a):
            return self.known(core)
        return self.aux.value(tuple(self._iota(p) for p in core))


def in_pi_plus(chain: Sequence, n: int, m: int) -> bool:
    """Membership of a chain of ``Δ^n × I^m_+`` in ``Π^{n,m}_+``."""
    if cb.simplex_face_indices(chain, n):
        return True
    return cb.in_pi_plus_cube([p[1] for p in chain], m)


def lowest_sheet(chain: Sequence, m: int) -> int:
    for a in range(1, m + 1):
        if all(cb.in_sheet(p[1], a) for p in chain):
            return a
    raise CleavageError(f"{chain} does not lie in a single sheet")


class PlusLift(Lift):
    """The canonical interpolation fill ``c^{n,m}_+(h, w)`` on ``Δ^n × I^m_+``.

    Sheets are filled in the order ``a = 1..m``; a chain lying in several
    sheets takes its value from the lowest one, which is where the higher
    sheets read their bottom data from.
    """

    def __init__(self, cleavage: Cleavage, g, label: Callable, cols: int, n: int, m: int,
                 known: Callable, name: str = ""):
        super().__init__(cleavage.bundle, g, label, cols, None, name or f"c^{n},{m}_+")
        self.n, self.m = n, m
        self.known = known
        self.sheets = {a: SheetLift(cleavage, g, label, cols, n, m, a, self.value,
                                    name=f"{self.name}/{a}") for a in range(1, m + 1)}

    def _compute(self, core: tuple) -> Matrix:
        if in_pi_plus(core, self.n, self.m):
            return self.known(core)
        return self.sheets[lowest_sheet(core, self.m)].value(core)


# ---------------------------------------------------------------------------
# general prism fills and seeded test lifts


def prism_fill(cleavage: Cleavage, g, label: Callable, cols: int, in_b: Callable, known: Callable,
               name: str = "c_⊔") -> PrismLift:
    """``c_⊔^{A,B}(h, w)`` on ``A × I`` with points ``(a, e)``, ``e ∈ {0, 1}``.

    ``in_b`` decides membership of nondegenerate chains of ``A`` in ``B`` and
    ``known`` answers every chain of ``A × 0 ∪ B × I``.
    """
    return PrismLift(cleavage, g, label, cols, lambda p: (p[0], p[1]), lambda a, e: (a, e),
                     in_b, known, name)


def generic_lift(bundle: VectorFibration, g, label: Callable, n: int, width: int, seed: int,
                 name: str = "") -> Lift:
    """A seeded lift of ``Δ^n × I^width`` over ``g ∘ label`` with no built-in symmetry.

    The lift starts from the identity family on ``Δ^n × 0`` (columns indexed by
    the fiber over the base of ``Δ^n × 0``) and is extended one cube coordinate
    at a time by prism fills through a random cleavage that is *not* normal, so
    the result is generally not degenerate in any direction.
    """
    raw = Cleavage(bundle, seed=seed, normal=False, name=f"raw[{seed}]")
    zeros = (0,) * width
    base_labels = tuple(label((i, zeros)) for i in range(n + 1))
    top = bundle.base.act(g, PosetMap(base_labels, bundle.base.dim_of(g)))
    cols = bundle.dim(top)

    def start(core):
        return bundle.act(top, PosetMap(tuple(p[0] for p in core), n))
    cur: Lift = Lift(bundle, g, lambda p: label((p[0], zeros)), cols, start, name=f"{name or 'w'}/0")
    for k in range(1, width + 1):
        pad = (0,) * (width - k)
        split, join = cube_prism_geometry(k)
        prev = cur
        cur = PrismLift(raw, g, lambda p, pad=pad: label((p[0], p[1] + pad)), cols, split, join,
                        lambda a: False,
                        lambda core, prev=prev: prev.value(tuple((p[0], p[1][:-1]) for p in core)),
                        name=f"{name or 'w'}/{k}")
    return cur


def unary_embedding(m: int) -> Callable:
    """The injective monotone map ``I^m_+ -> I^{2m}``, ``(r; r_+) -> (r, 1^{r_+} 0^{m - r_+})``.

    Pulling a generic cube lift back along it gives generic lifts of the
    interpolation complexes and their sheets.
    """
    def f(p):
        r, lv = p[:-1], p[-1]
        return r + (1,) * lv + (0,) * (m - lv)
    return f


def generic_plus_lift(bundle: VectorFibration, g, n: int, m: int, seed: int,
                      label: Optional[Callable] = None) -> Lift:
    """A seeded lift of ``Δ^n × I^m_+`` over ``g ∘ label`` (default ``g α_+ ∘ pr``)."""
    lab = label or (lambda p: cb.alpha_plus(p[1]))
    emb = unary_embedding(m)
    cube_label = lambda p: lab((p[0], p[1][:m] + (sum(p[1][m:]),)))
    big = generic_lift(bundle, g, cube_label, n, 2 * m, seed, name="w+")
    return restrict(big, lambda p: (p[0], emb(p[1])), label=lab, name="w+")


def simplex_degeneracy_point(j: int) -> Callable:
    """``upsilon_j × id`` on points ``(i, r)``."""
    return lambda p: ((p[0] if p[0] <= j else p[0] - 1),) + tuple(p[1:])


def simplex_face_point(j: int) -> Callable:
    """``delta_j × id`` on points ``(i, r)``."""
    return lambda p: ((p[0] if p[0] < j else p[0] + 1),) + tuple(p[1:])


def second(fn: Callable) -> Callable:
    """``id × fn`` on points ``(i, r)``."""
    return lambda p: (p[0], fn(p[1]))


# ---------------------------------------------------------------------------
# properties of the derived cleavages, as predicates returning failing chains


def prism_pullback_defects(cleavage: Cleavage, v: Lift, kappa: Callable, in_b_prime: Callable,
                           chains: Iterable[tuple]) -> list:
    """Stability of ``c_⊔`` under ``κ × id``: where the fill of ``v ∘ (κ × id)``
    from ``A' × 0 ∪ B' × I`` differs from ``v ∘ (κ × id)``.

    ``v`` should itself be a ``c_⊔^{A,B}`` fill and ``B'`` should contain ``κ^{-1}(B)``.
    """
    pulled = restrict(v, lambda p: (kappa(p[0]), p[1]), name="v∘κ")
    fill = prism_fill(cleavage, v.g, pulled.label, v.cols, in_b_prime, pulled.value, name="c_⊔'")
    return lift_difference(fill, pulled, chains)


def prism_projection_defects(cleavage: Cleavage, v: Lift, in_b: Callable,
                             chains: Iterable[tuple]) -> list:
    """Where the fill of ``v ∘ pr`` from ``A × 0 ∪ B × I`` differs from ``v ∘ pr``."""
    pulled = restrict(v, lambda p: p[0], name="v∘pr")
    fill = prism_fill(cleavage, v.g, pulled.label, v.cols, in_b, pulled.value, name="c_⊔(v∘pr)")
    return lift_difference(fill, pulled, chains)


def sheet_factorization_defects(cleavage: Cleavage, w: Lift, n: int, m: int, a: int,
                                chains: Iterable[tuple]) -> list:
    """``c_a(h, w|Π_a)`` against ``c^{n,m+1}_{m|1}(h η_a, w η_a) ∘ ι_a`` for an arbitrary ``w``
    on ``Δ^n × I^m_a``; the right-hand side reads ``w ∘ η_a`` on all of ``Π^{n,m+1}_{m|1}``."""
    lhs = SheetLift(cleavage, w.g, w.label, w.cols, n, m, a, w.value, name="c_a")
    et, io = second(cb.eta(a)), second(cb.iota(a))
    aux = pi_fill(cleavage, w.g, sheet_aux_label(w.label, a), w.cols, n, m + 1,
                  lambda core: w.value(tuple(et(p) for p in core)), position=m, name="aux")
    rhs = restrict(aux, io, label=w.label, name="aux∘ι")
    return lift_difference(lhs, rhs, chains)


def sheet_eta_defects(cleavage: Cleavage, w: Lift, n: int, m: int, a: int,
                      chains: Iterable[tuple]) -> list:
    """Where ``c^{n,m+1}_{m|1}(h η_a, w η_a|Π)`` differs from ``w ∘ η_a`` (chains of
    ``Δ^n × I^{m+1}``); holds for ``a = m`` and for ``w`` produced by ``c_a``."""
    pulled = restrict(w, second(cb.eta(a)), label=sheet_aux_label(w.label, a), name="w∘η")
    fill = pi_fill(cleavage, w.g, pulled.label, w.cols, n, m + 1, pulled.value, position=m)
    return lift_difference(fill, pulled, chains)


def permutation_defects(cleavage: Cleavage, w: Lift, n: int, m: int, i: int, theta: Sequence[int],
                        chains: Iterable[tuple]) -> list:
    """``c_{i|1}(h θ^*, w θ^*)`` against ``c_{θ^{-1}(i)|1}(h, w) ∘ θ^*`` on ``Δ^n × I^m``."""
    perm = cb.permute_cube(theta)
    pulled = restrict(w, second(perm), name="w∘θ")
    lhs = pi_fill(cleavage, w.g, pulled.label, w.cols, n, m, pulled.value, position=i)
    j = list(theta).index(i) + 1
    plain = pi_fill(cleavage, w.g, w.label, w.cols, n, m, w.value, position=j)
    rhs = restrict(plain, second(perm), name="c∘θ")
    return lift_difference(lhs, rhs, chains)


def face_fill_degeneracy_defects(cleavage: Cleavage, w: Lift, n: int, m: int, i: int, j: int,
                                 chains: Iterable[tuple]) -> list:
    """For ``w = c_{i|1}(qw, w|Π_{i|1})``: where ``c^{n+1,m}_{i|1}`` applied to
    ``w ∘ (υ_j × id)`` differs from ``w ∘ (υ_j × id)`` (chains of ``Δ^{n+1} × I^m``)."""
    pulled = restrict(w, simplex_degeneracy_point(j), name="w∘υ")
    fill = pi_fill(cleavage, w.g, pulled.label, w.cols, n + 1, m, pulled.value, position=i)
    return lift_difference(fill, pulled, chains)


def plus_fill_degeneracy_defects(cleavage: Cleavage, w: Lift, n: int, m: int, j: int,
                                 chains: Iterable[tuple]) -> list:
    """For ``w = c_+(qw, w|Π_+)``: where ``c^{n+1,m}_+`` applied to ``w ∘ (υ_j × id)``
    differs from ``w ∘ (υ_j × id)``."""
    pulled = restrict(w, simplex_degeneracy_point(j), name="w∘υ")
    fill = PlusLift(cleavage, w.g, pulled.label, w.cols, n + 1, m, pulled.value)
    return lift_difference(fill, pulled, chains)


def plus_cube_degeneracy_defects(cleavage: Cleavage, w: Lift, n: int, m: int, i: int,
                                 chains: Iterable[tuple]) -> list:
    """For ``w = c_+(qw, w|Π_+)``: where ``c^{n,m+1}_+`` applied to ``w ∘ (id × ε_{+,i})``
    differs from ``w ∘ (id × ε_{+,i})`` (chains of ``Δ^n × I^{m+1}_+``)."""
    pulled = restrict(w, second(cb.plus_degeneracy(i)), name="w∘ε+")
    fill = PlusLift(cleavage, w.g, pulled.label, w.cols, n, m + 1, pulled.value)
    return lift_difference(fill, pulled, chains)


# ---------------------------------------------------------------------------
# comparing lifts


def lift_difference(a: Lift, b: Lift, chains: Iterable[tuple]) -> list:
    """Chains on which two lifts disagree."""
    bad = []
    for ch in chains:
        if a.value(ch) != b.value(ch):
            bad.append(ch)
    return bad


def product_chains(n: int, cube_like: cb.ChainComplex) -> list:
    """All nondegenerate chains of ``Δ^n × X`` for a cube-like complex ``X`` (points ``(i, r)``)."""
    shape = cb.product_of(cb.simplex_complex(n), cube_like)
    out = []
    for k in sorted(shape.counts()):
        out.extend(shape.nondegenerate(k))
    return out



def prism_chains(n: int, k: int) -> list:
    """All nondegenerate chains of ``(Δ^n × I^k) × I`` with points ``((i, r), e)``."""
    shape = cb.product_of(cb.simplex_complex(n), cb.cube(k), cb.simplex_complex(1))
    out = []
    for d in sorted(shape.counts()):
        out.extend(tuple(((p[0], p[1]), p[2]) for p in ch) for ch in shape.nondegenerate(d))
    return out


def kappa_family(n: int, k: int) -> list[tuple[str, Callable, int, int]]:
    """The structure maps into ``Δ^n × I^k`` as ``(name, point map, n', k')`` with source ``Δ^{n'} × I^{k'}``.

    Simplex degeneracies and faces act on the first factor; cube faces,
    degeneracies and coordinate permutations act on the second.
    """
    out = [(f"upsilon{j}", simplex_degeneracy_point(j), n + 1, k) for j in range(n + 1)]
    if n >= 1:
        out += [(f"delta{j}", simplex_face_point(j), n - 1, k) for j in range(n + 1)]
    out += [(f"cube_face{i}|{r}", second(cb.cube_face(i, r)), n, k - 1)
            for i in range(1, k + 1) for r in (0, 1)]
    out += [(f"cube_degeneracy{i}", second(cb.cube_degeneracy(i)), n, k + 1) for i in range(k + 1)]
    out += [(f"permute{th}", second(cb.permute_cube(th)), n, k)
            for th in itertools.permutations(range(1, k + 1))]
    return out


def prism_subcomplexes(n: int, k: int) -> dict[str, Callable]:
    """Sample subcomplexes ``B`` of ``Δ^n × I^k``: empty, the boundary, and the face missing vertex 0."""
    return {
        "empty": lambda a: False,
        "boundary": lambda a: in_boundary_product(a, n, k),
        "face0": lambda a: 0 not in {p[0] for p in a},
    }


def prism_lemma_defects(cleavage: Cleavage, shapes: Iterable[tuple[int, int]], seed: int = 1,
                        max_dim: int = 4) -> tuple[int, list]:
    """Check the prism fill against pullback by the κ-family and against projection.

    For each shape ``Δ^n × I^k`` and sample ``B``, a generic lift ``h`` on
    ``(Δ^n × I^k) × I`` is filled from ``A × 0 ∪ B × I``.  The fill must be
    stable under every ``κ`` of :func:`kappa_family` whose source has total
    dimension at most ``max_dim`` (with ``B' = κ^{-1}(B)``, and with ``B'``
    enlarged by the face missing vertex 0).  Filling ``v ∘ pr`` for a generic
    ``v`` on ``Δ^n × I^k`` must give ``v ∘ pr`` back.  Returns the number of
    checks and a list of ``(n, k, B, test, failing chain count)``.
    """
    bundle = cleavage.bundle
    base = bundle.base
    checked, bad = 0, []
    for n, k in shapes:
        g = base.simplices(k + 1)[-1]
        label = lambda p: cb.alpha(p[0][1] + (p[1],))
        gen = generic_lift(bundle, g, lambda p: cb.alpha(p[1]), n, k + 1, seed=seed)
        h = restrict(gen, lambda p: (p[0][0], p[0][1] + (p[1],)), label=label)
        flat = generic_lift(bundle, base.simplices(k)[-1], lambda p: cb.alpha(p[1]), n, k, seed=seed)
        for bname, in_b in prism_subcomplexes(n, k).items():
            v = prism_fill(cleavage, g, label, h.cols, in_b, h.value)
            for name, kappa, n2, k2 in kappa_family(n, k):
                if n2 + k2 + 1 > max_dim:
                    continue
                chains = prism_chains(n2, k2)
                pre = lambda a, kappa=kappa, in_b=in_b: in_b(dedupe(tuple(kappa(p) for p in a))[0])
                bigger = lambda a, pre=pre: pre(a) or 0 not in {p[0] for p in a}
                for tag, in_bp in (("", pre), ("+face0", bigger)):
                    checked += 1
                    d = prism_pullback_defects(cleavage, v, kappa, in_bp, chains)
                    if d:
                        bad.append((n, k, bname, name + tag, len(d)))
            if n + k + 1 <= max_dim:
                checked += 1
                d = prism_projection_defects(cleavage, flat, in_b, prism_chains(n, k))
                if d:
                    bad.append((n, k, bname, "projection", len(d)))
    return checked, bad


def dump_sections(c: Cleavage, encode: Callable, cap: int) -> str:
    return json.dumps(c.to_json(encode, cap), sort_keys=True)
