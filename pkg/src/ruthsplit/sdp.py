"""The semidirect product of a representation up to homotopy.

Given a unital representation ``E = (E, R)`` concentrated in degrees
``0..-N``, :func:`semidirect` builds the simplicial vector bundle ``Ē`` with

    Ē_n|g = ⊕_{ν: [l] >->_0 [n]} E^{-l}_{x_ν g},

one summand for every injection ``ν`` fixing ``0``, stored at the vertex
``ν(l)`` of ``g``.  An injection is encoded by its image minus ``0``, a subset
of ``{1..n}``; summands are laid out in the lexicographic order of these
subsets (as sorted tuples).  Faces ``d_i`` with ``i >= 1`` and all
degeneracies just reindex summands; ``d_0`` mixes them through the tensors
``R_m``.

The bundle carries the canonical cleavage ``c̄`` whose image is the kernel of
the projection onto the top summand ``ν = id``.  Splitting ``(Ē, c̄)`` gives
back ``E`` on the nose; :func:`roundtrip` checks this tensor by tensor.
Intertwiners and homotopies between them are transported to bundle
morphisms and simplicial homotopies by :func:`transport_intertwiner` and
:func:`transport_homotopy`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import combinatorics as cb
from .bundle import VectorFibration, source_of, target_of, unit_simplex, vertex_at
from .cleavage import ImageCleavage
from .combinatorics import PosetMap
from .linalg import (
    ONE, ZERO, Matrix, from_columns, identity, inverse, mat_add, mat_mul, mat_scale, unit,
)
from .ruth import (
    D, HomCochain, Ruth, is_zero_cochain, is_zero_matrix, linear_combination, sign, unitality_failures,
)


class SdpError(ValueError):
    """Raised for inputs outside the domain of the semidirect product constructions."""


def injections(n: int) -> list[tuple]:
    """All ``ν: [l] >->_0 [n]`` as value tuples ``(0, s_1, ..., s_l)``, in the fixed order."""
    subsets = []
    for l in range(n + 1):
        subsets.extend(itertools.combinations(range(1, n + 1), l))
    return [(0,) + s for s in sorted(subsets)]


class SdpBundle(VectorFibration):
    """``Ē`` for a unital representation ``E`` vanishing outside degrees ``0..-E.top``."""

    kind = "semidirect"

    def __init__(self, E: Ruth, name: str = ""):
        super().__init__(E.base, name or f"sdp({E.name})")
        if E.top is None:
            raise SdpError("the semidirect product needs a bounded representation")
        if E.low != 0:
            raise SdpError("the semidirect product needs a representation vanishing in positive degrees")
        self.E = E
        # horn fillers are unique from dimension top + 1 on (from 0 on for one term)
        self.strictness = E.top + 1 if E.top else 0
        self._layouts: dict = {}

    # ---- layout ------------------------------------------------------------
    def layout(self, g) -> list[tuple[tuple, int, int]]:
        """``(ν values, offset, rank)`` for every summand of ``Ē|g`` (zero ranks included)."""
        hit = self._layouts.get(g)
        if hit is None:
            n = self.base.dim_of(g)
            hit, off = [], 0
            for nu in injections(n):
                l = len(nu) - 1
                d = self.E.dim(vertex_at(self.base, g, nu[-1]), l)
                hit.append((nu, off, d))
                off += d
            self._layouts[g] = hit
        return hit

    def block(self, g, nu: tuple) -> tuple[int, int]:
        for values, off, d in self.layout(g):
            if values == nu:
                return off, d
        raise SdpError(f"{nu} is not an injection into [{self.base.dim_of(g)}] fixing 0")

    def embed(self, g, nu: tuple, e) -> tuple:
        """The vector ``(g, e, ν)``."""
        off, d = self.block(g, nu)
        out = [ZERO] * self.dim(g)
        for r in range(d):
            out[off + r] = e[r]
        return tuple(out)

    def projection(self, g, nu: tuple) -> Matrix:
        """The matrix of ``pr_ν`` on ``Ē|g``."""
        off, d = self.block(g, nu)
        total = self.dim(g)
        return tuple(unit(total, off + r) for r in range(d))

    def _dim(self, g) -> int:
        return sum(d for _, _, d in self.layout(g))

    # ---- structure maps ----------------------------------------------------
    def _reindex(self, g, theta: PosetMap) -> Matrix:
        """``Ē_θ`` for ``θ(0) = 0``: the ``μ`` summand receives the ``θμ`` summand."""
        h = self.base.act(g, theta)
        cols = self.dim(g)
        src = {nu: (off, d) for nu, off, d in self.layout(g)}
        rows = []
        for mu, _, d in self.layout(h):
            image = tuple(theta.values[t] for t in mu)
            hit = src.get(image) if len(set(image)) == len(image) else None
            for r in range(d):
                row = [ZERO] * cols
                if hit is not None:
                    row[hit[0] + r] = ONE
                rows.append(tuple(row))
        return tuple(rows)

    def _face(self, g, i: int) -> Matrix:
        n = self.base.dim_of(g)
        if i > 0:
            return self._reindex(g, cb.delta(i, n))
        return self._face_zero(g)

    def _degen(self, g, j: int) -> Matrix:
        return self._reindex(g, cb.upsilon(j, self.base.dim_of(g)))

    def _face_zero(self, g) -> Matrix:
        n = self.base.dim_of(g)
        h = self.base.face(g, 0)
        cols = self.dim(g)
        rows = [[ZERO] * cols for _ in range(self.dim(h))]

        def put(row_off, rows_n, col_off, mat, scale):
            for r in range(rows_n):
                for c, x in enumerate(mat[r]):
                    if x:
                        rows[row_off + r][col_off + c] += scale * x

        for mu, moff, md in self.layout(h):
            if md == 0:
                continue
            k = len(mu) - 1
            plus = (0,) + tuple(v + 1 for v in mu)
            for i in range(1, k + 1):
                nu = plus[:i] + plus[i + 1:]
                off, d = self.block(g, nu)
                put(moff, md, off, identity(d), sign(i - 1))
            edge = self.base.act(g, PosetMap(plus, n))
            for l in range(0, k + 2):
                nu = plus[: l + 1]
                off, d = self.block(g, nu)
                if d == 0:
                    continue
                tensor = self.E.tensor(k + 1 - l, self.base.back(edge, k + 1 - l), l)
                put(moff, md, off, tensor, sign(k))
        return tuple(tuple(r) for r in rows)


def semidirect(E: Ruth, m_cap: int = 3, name: str = "") -> SdpBundle:
    """``Ē`` for a unital representation ``E``; unitality is checked up to ``m_cap``."""
    if E.top is None:
        raise SdpError("the semidirect product needs a bounded representation")
    bad = unitality_failures(E, m_cap, E.top)
    if bad:
        raise SdpError(f"{E.name} is not unital: first failure {bad[0]}")
    return SdpBundle(E, name)


def canonical_cleavage(bundle: SdpBundle, name: str = "c̄") -> ImageCleavage:
    """The cleavage with image ``ker pr_id`` in every horn direction."""

    def image_fn(g, k):
        n = bundle.base.dim_of(g)
        top = tuple(range(n + 1))
        out = []
        for nu, off, d in bundle.layout(g):
            if nu != top:
                out.extend(unit(bundle.dim(g), off + r) for r in range(d))
        return out

    return ImageCleavage(bundle, image_fn, name)


# ---------------------------------------------------------------------------
# morphisms


@dataclass
class BundleMorphism:
    """A fiberwise linear map ``V|g -> W|g`` over the identity of the base."""

    source: VectorFibration
    target: VectorFibration
    fn: Callable
    name: str = "φ"
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, g) -> Matrix:
        hit = self._cache.get(g)
        if hit is None:
            hit = self.fn(g)
            self._cache[g] = hit
        return hit


def morphism_defects(phi: BundleMorphism, cap: int) -> list:
    """``(g, tag)`` wherever ``φ`` fails to commute with a face or degeneracy, ``dim g <= cap``."""
    V, W = phi.source, phi.target
    base = V.base
    bad = []
    for n in range(0, cap + 1):
        for g in base.simplices(n):
            d = V.dim(g)
            for i in range(n + 1 if n else 0):
                h = base.face(g, i)
                if mat_mul(W.face(g, i), phi(g), d) != mat_mul(phi(h), V.face(g, i), d):
                    bad.append((g, f"d{i}"))
            if n < cap:
                for j in range(n + 1):
                    h = base.degeneracy(g, j)
                    if mat_mul(W.degeneracy(g, j), phi(g), d) != mat_mul(phi(h), V.degeneracy(g, j), d):
                        bad.append((g, f"u{j}"))
    return bad


def compose_morphisms(psi: BundleMorphism, phi: BundleMorphism) -> BundleMorphism:
    """``ψ ∘ φ``."""
    return BundleMorphism(phi.source, psi.target,
                          lambda g: mat_mul(psi(g), phi(g), phi.source.dim(g)),
                          f"{psi.name}∘{phi.name}")


def _require_zero(cochain: HomCochain, m_cap: int, what: str):
    cmp = is_zero_cochain(cochain, m_cap, cochain.source.top)
    if not cmp.equal:
        raise SdpError(f"{what}: first nonzero component {cmp.witnesses[0]}")


def _transported(Ebar: SdpBundle, Fbar: SdpBundle, g, choose: Callable) -> Matrix:
    """Assemble ``pr_μ X(g, e, ν) = X_{k-l}(t_{k-l} G_μ g) e`` with ``X`` picked per ``(μ, l)``."""
    n = Ebar.base.dim_of(g)
    cols = Ebar.dim(g)
    rows = [[ZERO] * cols for _ in range(Fbar.dim(g))]
    src = Ebar.layout(g)
    for mu, moff, md in Fbar.layout(g):
        if md == 0:
            continue
        k = len(mu) - 1
        face = Ebar.base.act(g, PosetMap(mu, n))
        for nu, off, d in src:
            l = len(nu) - 1
            if d == 0 or l > k or mu[: l + 1] != nu:
                continue
            mat = choose(mu, face, k, l)
            for r in range(md):
                for c in range(d):
                    rows[moff + r][off + c] += mat[r][c]
    return tuple(tuple(r) for r in rows)


def transport_intertwiner(phi: HomCochain, source: Optional[SdpBundle] = None,
                          target: Optional[SdpBundle] = None, m_cap: Optional[int] = None) -> BundleMorphism:
    """``Φ̄: Ē -> F̄`` for an intertwiner ``Φ: E -> F``.

    With ``m_cap`` given, ``DΦ = 0`` is verified up to that cap first.
    """
    if phi.degree != 0:
        raise SdpError("only degree zero cochains can be intertwiners")
    if m_cap is not None:
        _require_zero(D(phi), m_cap, f"{phi.name} is not an intertwiner")
    Ebar = source or SdpBundle(phi.source)
    Fbar = target or SdpBundle(phi.target)
    base = Ebar.base

    def choose(mu, face, k, l):
        return phi(k - l, base.back(face, k - l), l)

    return BundleMorphism(Ebar, Fbar, lambda g: _transported(Ebar, Fbar, g, choose), f"{phi.name}̄")


# ---------------------------------------------------------------------------
# homotopies


def interval_index(j: int, theta: PosetMap) -> int:
    """``j'`` with ``ε_j θ = ε_{j'}``, where ``ε_j: [n] -> [1]`` takes the value 1 exactly ``j`` times."""
    n = theta.target_dim
    return sum(1 for v in theta.values if v >= n + 1 - j)


@dataclass
class SimplicialHomotopy:
    """``Ω̄_n(ε_j; g): Ē|g -> F̄|g`` for ``0 <= j <= n + 1``."""

    source: VectorFibration
    target: VectorFibration
    fn: Callable
    name: str = "Ω̄"
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, j: int, g) -> Matrix:
        key = (j, g)
        hit = self._cache.get(key)
        if hit is None:
            n = self.source.base.dim_of(g)
            if not 0 <= j <= n + 1:
                raise SdpError(f"ε_{j} is not an {n}-simplex of the interval")
            hit = self.fn(j, g)
            self._cache[key] = hit
        return hit

    def endpoint(self, r: int) -> BundleMorphism:
        """The restriction to the constant simplices at ``r`` (``0`` or ``1``)."""
        base = self.source.base
        return BundleMorphism(self.source, self.target,
                              lambda g: self(0 if r == 0 else base.dim_of(g) + 1, g), f"{self.name}|{r}")


def transport_homotopy(omega: HomCochain, phi: HomCochain, psi: HomCochain,
                       source: Optional[SdpBundle] = None, target: Optional[SdpBundle] = None,
                       m_cap: Optional[int] = None) -> SimplicialHomotopy:
    """``Ω̄: Φ̄ => Ψ̄`` for a homotopy ``Ω: Φ => Ψ`` (``DΩ = Ψ - Φ``).

    With ``m_cap`` given, the homotopy equation is verified up to that cap first.
    """
    if omega.degree != -1 or phi.degree != 0 or psi.degree != 0:
        raise SdpError("a homotopy has degree -1 between two degree 0 cochains")
    if m_cap is not None:
        gap = linear_combination([(1, D(omega)), (-1, psi), (1, phi)], "DΩ-(Ψ-Φ)")
        _require_zero(gap, m_cap, f"{omega.name} is not a homotopy {phi.name} => {psi.name}")
    E = phi.source
    Ebar = source or SdpBundle(E)
    Fbar = target or SdpBundle(phi.target)
    base = Ebar.base

    def fn(j, g):
        n = base.dim_of(g)

        def choose(mu, face, k, l):
            jm = sum(1 for v in mu if v >= n + 1 - j)
            tail = base.back(face, k - l)
            if l > k - jm:
                return psi(k - l, tail, l)
            out = phi(k - l, tail, l)
            for i in range(jm):
                r = E.tensor(k - l - i, base.front(tail, k - l - i), l)
                w = omega(i, base.back(face, i), k - i - 1)
                out = mat_add(out, mat_scale(sign(i), mat_mul(w, r, len(r[0]) if r else 0)))
            return out

        return _transported(Ebar, Fbar, g, choose)

    return SimplicialHomotopy(Ebar, Fbar, fn, f"{omega.name}̄")


def homotopy_defects(H: SimplicialHomotopy, cap: int) -> list:
    """Failures of ``F̄_θ Ω̄(ε, g) = Ω̄(εθ, gθ) Ē_θ`` for faces and degeneracies, ``dim g <= cap``."""
    V, W = H.source, H.target
    base = V.base
    bad = []
    for n in range(0, cap + 1):
        for g in base.simplices(n):
            d = V.dim(g)
            for j in range(n + 2):
                maps = [(cb.delta(i, n), f"d{i}") for i in range(n + 1)] if n else []
                if n < cap:
                    maps += [(cb.upsilon(i, n), f"u{i}") for i in range(n + 1)]
                for theta, tag in maps:
                    h = base.act(g, theta)
                    jj = interval_index(j, theta)
                    lhs = mat_mul(W.act(g, theta), H(j, g), d)
                    rhs = mat_mul(H(jj, h), V.act(g, theta), d)
                    if lhs != rhs:
                        bad.append((j, g, tag))
    return bad


def endpoint_defects(H: SimplicialHomotopy, phi_bar: BundleMorphism, psi_bar: BundleMorphism,
                     cap: int) -> list:
    """``(r, g)`` wherever the restriction of ``Ω̄`` to the end ``r`` differs from ``Φ̄`` / ``Ψ̄``."""
    bad = []
    for n in range(0, cap + 1):
        for g in H.source.base.simplices(n):
            if H(0, g) != phi_bar(g):
                bad.append((0, g))
            if H(n + 1, g) != psi_bar(g):
                bad.append((1, g))
    return bad


# ---------------------------------------------------------------------------
# the round trip


@dataclass
class RoundtripReport:
    checked: int = 0
    identification_ok: bool = True
    failures: list = field(default_factory=list)
    nonzero: dict = field(default_factory=dict)   # m -> whether some R_m component is nonzero

    @property
    def ok(self) -> bool:
        return self.identification_ok and not self.failures


def identification(split, bundle: SdpBundle, x, n: int) -> Optional[Matrix]:
    """Coordinates in ``V̂^{-n}_x`` of ``e -> (1_n x, e, id)``; ``None`` if not normalized."""
    from .bundle import BundleError
    dk = split.dold_kan
    g = unit_simplex(bundle.base, x, n)
    top = tuple(range(n + 1))
    dim = bundle.E.dim(x, n)
    cols = []
    for r in range(dim):
        try:
            cols.append(dk.coordinates(x, n, bundle.embed(g, top, unit(dim, r))))
        except BundleError:
            return None
    return from_columns(cols, dk.dim(x, n))


def roundtrip(E: Ruth, m_cap: int, bundle: Optional[SdpBundle] = None, check: bool = False) -> RoundtripReport:
    """Split ``(Ē, c̄)`` and compare ``R̂`` with ``R`` through the top-summand identification."""
    from .split import Splitting
    Ebar = bundle or semidirect(E, m_cap)
    split = Splitting(canonical_cleavage(Ebar), check)
    top = E.top
    hat = split.dold_kan_ruth(top)
    rep = RoundtripReport()
    J = {}
    for x in E.vertices():
        for n in range(top + 1):
            mat = identification(split, Ebar, x, n)
            d = E.dim(x, n)
            if mat is None or split.dold_kan.dim(x, n) != d or (d and inverse(mat) is None):
                rep.identification_ok = False
                rep.failures.append(("identification", x, n))
                return rep
            J[(x, n)] = mat
    base = E.base
    for m in range(m_cap + 1):
        for g in base.simplices(m):
            sx, tx = source_of(base, g), target_of(base, g)
            for n in range(top + 1):
                t = n + m - 1
                if t < 0 or t > top:
                    continue
                rep.checked += 1
                mine = E.tensor(m, g, n)
                if not is_zero_matrix(mine):
                    rep.nonzero[m] = True
                d = E.dim(sx, n)
                lhs = mat_mul(hat.tensor(m, g, n), J[(sx, n)], d)
                rhs = mat_mul(J[(tx, t)], mine, d)
                if lhs != rhs:
                    rep.failures.append((m, g, n))
    return rep
