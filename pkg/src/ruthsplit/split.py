"""Splitting a vector fibration by a normal cleavage.

:class:`Splitting` builds the lifts ``P(g, v): Δ^n × I^m -> V`` recursively
(lexicographically in ``(m, n)``), reads off the Moore representation ``R``
as alternating sums over the top face ``∂_{m|1}`` and normalizes it into the
Dold-Kan representation ``R̂``.

:class:`MorphismSplitting` does the same for a morphism ``φ: V -> W`` of
fibrations with cleavages on both sides: the lifts
``P_+(g, v): Δ^n × I^m_+ -> W`` interpolate between ``P^W(g, φ v)`` at the
bottom and ``φ P^V(g, v)`` at the top, and their alternating sums give the
Moore intertwiner ``φ_m``, normalized into ``φ̂``.

All lifts are linear families: the columns of every value are indexed by the
standard basis of the fiber ``V^{-n}_{sg} = V|1_n(sg)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import combinatorics as cb
from .bundle import DoldKan, VectorFibration, moore_differential, source_of, target_of, unit_simplex
from .cleavage import (
    Cleavage, CleavageError, Lift, PlusLift, in_pi_plus, lowest_sheet, pi_fill, simplex_degeneracy_point,
    simplex_face_point, simplex_lift,
)
from .combinatorics import PosetMap
from .linalg import Matrix, columns, from_columns, identity, mat_add, mat_mul, mat_scale, mat_sub, mat_zero
from .ruth import HomCochain, InvertResult, Ruth, compare, identity_cochain, intertwiner_check, invert


class SplitError(ValueError):
    """Raised when boundary prescriptions disagree or a request exceeds the caps."""


def _sum(terms, rows: int, cols: int) -> Matrix:
    acc = mat_zero(rows, cols)
    for sgn, mat in terms:
        acc = mat_add(acc, mat if sgn == 1 else mat_scale(sgn, mat))
    return acc


def diagonal(rho_points) -> tuple:
    """The chain ``((0, ρ_0), ..., (p, ρ_p))`` of ``Δ^p × X``."""
    return tuple((q, r) for q, r in enumerate(rho_points))


# ---------------------------------------------------------------------------
# the Moore and Dold-Kan splittings


class Splitting:
    """The lifts ``P(g, ·)`` for one fibration and one normal cleavage.

    ``check=True`` evaluates every applicable boundary prescription on the
    overlaps of ``Π^{n,m}`` and raises :class:`SplitError` on disagreement.
    """

    def __init__(self, cleavage: Cleavage, check: bool = False):
        self.cleavage = cleavage
        self.bundle: VectorFibration = cleavage.bundle
        self.base = self.bundle.base
        self.check = check
        self._lifts: dict = {}
        self.dold_kan = DoldKan(self.bundle)

    # ---- lifts -----------------------------------------------------------
    def fiber_dim(self, x, n: int) -> int:
        return self.bundle.dim(unit_simplex(self.base, x, n))

    def lift(self, g, n: int) -> Lift:
        """``v -> P(g, v)`` on ``Δ^n × I^m`` (``m = dim g``), points ``(i, r)``."""
        key = (g, n)
        hit = self._lifts.get(key)
        if hit is not None:
            return hit
        m = self.base.dim_of(g)
        if m == 0:
            hit = simplex_lift(self.bundle, g, n)
        else:
            cols = self.fiber_dim(source_of(self.base, g), n)
            hit = pi_fill(self.cleavage, g, lambda p: cb.alpha(p[1]), cols, n, m,
                          lambda core: self._boundary(g, n, m, core), name=f"P({g},{n})")
        self._lifts[key] = hit
        return hit

    def _prescriptions(self, g, n: int, m: int, core: tuple):
        """Yield ``(tag, thunk)`` for every boundary prescription applying to ``core``."""
        for j in cb.simplex_face_indices(core, n):
            yield (f"{j}", lambda j=j: self._face_j(g, n, j, core))
        for i in range(1, m + 1):
            v = cb.constant_coordinates(core, i - 1)
            if v == 0:
                yield (f"{i}|0", lambda i=i: self._face_i0(g, n, i, core))
            elif v == 1 and i < m:
                yield (f"{i}|1", lambda i=i: self._face_i1(g, n, i, core))

    def _boundary(self, g, n: int, m: int, core: tuple) -> Matrix:
        return _resolve(self._prescriptions(g, n, m, core), self.check, core)

    def _face_j(self, g, n, j, core):
        x = source_of(self.base, g)
        top = unit_simplex(self.base, x, n)
        lower = self.lift(g, n - 1).value(cb.squeeze_simplex(core, j))
        return mat_mul(lower, self.bundle.face(top, j), self.bundle.dim(top))

    def _face_i0(self, g, n, i, core):
        low = self.lift(self.base.face(g, i), n)
        return low.value(tuple((p[0], p[1][: i - 1] + p[1][i:]) for p in core))

    def _face_i1(self, g, n, i, core):
        m = self.base.dim_of(g)
        front = self.lift(self.base.front(g, i), n)
        p = len(core) - 1
        # T = P(s_i g, ·) ∘ (id × δ_{i|1}) evaluated on the Δ^n × I^{i-1} part
        t_val = front.value(tuple((q[0], q[1][: i - 1] + (1,)) for q in core))
        back = self.lift(self.base.back(g, m - i), p)
        outer = back.value(diagonal(q[1][i:] for q in core))
        return mat_mul(outer, t_val, front.cols)

    # ---- tensors -----------------------------------------------------------
    def moore_tensor(self, m: int, g, n: int) -> Matrix:
        """``R_m^{-n}(g): V^{-n}_{sg} -> V^{1-m-n}_{tg}``."""
        if m == 0:
            if n == 0:
                return mat_zero(0, self.fiber_dim(g, 0))
            return moore_differential(self.bundle, g, n)
        lift = self.lift(g, n)
        rows = self.fiber_dim(target_of(self.base, g), n + m - 1)
        terms = []
        for pi in cb.shuffles(n, m - 1):
            chain = tuple((i, r + (1,)) for i, r in pi.chain())
            terms.append((pi.sign, lift.value(chain)))
        return _sum(terms, rows, lift.cols)

    def dold_kan_tensor(self, m: int, g, n: int) -> Matrix:
        """``R̂_m^{-n}(g)`` in the normalized bases of :class:`DoldKan`."""
        dk = self.dold_kan
        x, y = source_of(self.base, g), target_of(self.base, g)
        if m == 0:
            return dk.differential(x, n)
        inc = dk.inclusion(x, n)
        moore = self.moore_tensor(m, g, n)
        proj = dk.projection(y, n + m - 1)
        cols = dk.dim(x, n)
        if not proj or not cols:
            return mat_zero(dk.dim(y, n + m - 1), cols)
        return mat_mul(proj, mat_mul(moore, inc, cols), cols)

    def moore(self, top: int) -> Ruth:
        """The Moore representation on degrees ``0..-top``."""
        return Ruth(self.base, lambda x, n: self.fiber_dim(x, n),
                    lambda m, g, n: self.moore_tensor(m, g, n), 0, top,
                    name=f"Moore[{self.cleavage.name}]")

    def dold_kan_ruth(self, top: int) -> Ruth:
        """The Dold-Kan representation ``R̂`` on ``V̂``, degrees ``0..-top``."""
        return Ruth(self.base, lambda x, n: self.dold_kan.dim(x, n),
                    lambda m, g, n: self.dold_kan_tensor(m, g, n), 0, top,
                    name=f"DK[{self.cleavage.name}]")


def _resolve(prescriptions, check: bool, core) -> Matrix:
    result = None
    first = None
    for tag, thunk in prescriptions:
        val = thunk()
        if result is None:
            result, first = val, tag
            if not check:
                return result
        elif val != result:
            raise SplitError(f"boundary prescriptions {first} and {tag} disagree at {core}")
    if result is None:
        raise SplitError(f"{core} is not on the prescribed boundary")
    return result


def split_moore(cleavage: Cleavage, top: int, check: bool = False) -> Ruth:
    return Splitting(cleavage, check).moore(top)


def split_dold_kan(cleavage: Cleavage, top: int, check: bool = False) -> Ruth:
    return Splitting(cleavage, check).dold_kan_ruth(top)


def moore_ruth_defects(R: Ruth, m_cap: int) -> list:
    """RUTH equation defects for the Moore representation, restricted to the
    equations whose degrees all lie in ``0..-R.top`` (the complex is unbounded)."""
    from .ruth import is_zero_matrix, ruth_equation_defect
    bad = []
    for m in range(0, m_cap + 1):
        for n in range(0, R.top - m + 2):
            if n + m - 1 > R.top or n + m - 1 < 0:
                continue
            for g in R.base.simplices(m):
                if not is_zero_matrix(ruth_equation_defect(R, m, g, n)):
                    bad.append((m, g, n))
    return bad


# ---------------------------------------------------------------------------
# morphisms


BundleMap = Callable  # g -> matrix of φ|g: V|g -> W|g


def identity_map(bundle: VectorFibration) -> BundleMap:
    return lambda g: identity(bundle.dim(g))


class MorphismSplitting:
    """The lifts ``P_+(g, ·)`` and the tensors ``φ_m``, ``φ̂_m`` of a morphism.

    ``source`` and ``target`` are splittings of ``V`` and ``W``; the
    interpolation cleavage is built from the target's cleavage.
    """

    def __init__(self, source: Splitting, target: Splitting, phi: BundleMap, check: bool = False):
        if source.base is not target.base:
            raise SplitError("source and target fibrations must share their base")
        self.source = source
        self.target = target
        self.phi = phi
        self.base = source.base
        self.check = check
        self._lifts: dict = {}

    def lift(self, g, n: int) -> Lift:
        """``v -> P_+(g, v)`` on ``Δ^n × I^m_+``, points ``(i, (r_1..r_m, level))``."""
        key = (g, n)
        hit = self._lifts.get(key)
        if hit is not None:
            return hit
        m = self.base.dim_of(g)
        cols = self.source.fiber_dim(source_of(self.base, g), n)
        label = lambda p: cb.alpha_plus(p[1])
        if m == 0:
            top = unit_simplex(self.base, g, n)
            V = self.source.bundle

            def source(core):
                theta = PosetMap(tuple(p[0] for p in core), n)
                return mat_mul(self.phi(self.base.act(top, theta)), V.act(top, theta), cols)
            hit = Lift(self.target.bundle, g, label, cols, source, name=f"P+({g},{n})")
        else:
            hit = PlusLift(self.target.cleavage, g, label, cols, n, m,
                           lambda core: self._boundary(g, n, m, core), name=f"P+({g},{n})")
        self._lifts[key] = hit
        return hit

    def _prescriptions(self, g, n: int, m: int, core: tuple):
        for j in cb.simplex_face_indices(core, n):
            yield (f"{j}", lambda j=j: self._face_j(g, n, j, core))
        pts = [p[1] for p in core]
        for i in range(1, m + 1):
            vals = {q[i - 1] for q in pts}
            if vals == {0}:
                yield (f"{i}|0", lambda i=i: self._face_i0(g, n, i, core))
            elif vals == {1} and i < m:
                for a in range(1, m + 1):
                    if all(cb.in_sheet(q, a) for q in pts):
                        yield (f"{a},{i}|1", lambda i=i, a=a: self._face_i1(g, n, i, a, core))
        if all(q[-1] == sum(q[:-1]) for q in pts):
            yield ("top", lambda: self._face_top(g, n, core))
        if all(q[-1] == 0 for q in pts):
            yield ("bottom", lambda: self._face_bottom(g, n, core))

    def _boundary(self, g, n, m, core):
        return _resolve(self._prescriptions(g, n, m, core), self.check, core)

    def _face_j(self, g, n, j, core):
        x = source_of(self.base, g)
        top = unit_simplex(self.base, x, n)
        V = self.source.bundle
        lower = self.lift(g, n - 1).value(cb.squeeze_simplex(core, j))
        return mat_mul(lower, V.face(top, j), V.dim(top))

    def _face_i0(self, g, n, i, core):
        low = self.lift(self.base.face(g, i), n)
        return low.value(tuple((p[0], p[1][: i - 1] + p[1][i:]) for p in core))

    def _face_i1(self, g, n, i, a, core):
        m = self.base.dim_of(g)
        p = len(core) - 1
        back_g = self.base.back(g, m - i)
        front_g = self.base.front(g, i)
        if a <= i:
            # P^W(t_{m-i} g, P_+(s_i g, ·) ∘ δ_{a,i|1}) ∘ χ: the level stays in front
            inner = self.lift(front_g, n)
            t_val = inner.value(tuple((q[0], q[1][:i] + (q[1][-1],)) for q in core))
            outer = self.target.lift(back_g, p).value(diagonal(q[1][i:-1] for q in core))
            return mat_mul(outer, t_val, inner.cols)
        # P_+(t_{m-i} g, P^V(s_i g, ·) ∘ δ_{i|1}) ∘ χ_{a-1}: the level moves to the back
        inner = self.source.lift(front_g, n)
        t_val = inner.value(tuple((q[0], q[1][: i - 1] + (1,)) for q in core))
        outer = self.lift(back_g, p).value(
            diagonal(q[1][i:-1] + (q[1][-1] - sum(q[1][:i]),) for q in core))
        return mat_mul(outer, t_val, inner.cols)

    def _face_top(self, g, n, core):
        val = self.source.lift(g, n).value(tuple((p[0], p[1][:-1]) for p in core))
        lift = self.lift(g, n)
        return mat_mul(self.phi(lift.base_of(core)), val, lift.cols)

    def _face_bottom(self, g, n, core):
        x = source_of(self.base, g)
        top = unit_simplex(self.base, x, n)
        val = self.target.lift(g, n).value(tuple((p[0], p[1][:-1]) for p in core))
        return mat_mul(val, self.phi(top), self.source.bundle.dim(top))

    # ---- tensors -----------------------------------------------------------
    def moore_tensor(self, m: int, g, n: int) -> Matrix:
        """``φ_m^{-n}(g): V^{-n}_{sg} -> W^{-m-n}_{tg}``."""
        if m == 0:
            return self.phi(unit_simplex(self.base, g, n))
        lift = self.lift(g, n)
        rows = self.target.fiber_dim(target_of(self.base, g), n + m)
        terms = []
        for a in range(1, m):
            face = cb.sheet_face(a, m, 1)
            for pi in cb.shuffles_marked(n, m - 1, a):
                chain = tuple((i, face(r)) for i, r in pi.marked_chain(a))
                terms.append((pi.sign, lift.value(chain)))
        top = cb.sheet_top_face_at(m)
        for pi in cb.shuffles(n, m):
            terms.append((pi.sign, lift.value(tuple((i, top(r)) for i, r in pi.chain()))))
        return _sum(terms, rows, lift.cols)

    def dold_kan_tensor(self, m: int, g, n: int) -> Matrix:
        """``φ̂_m^{-n}(g)`` in normalized bases."""
        dv, dw = self.source.dold_kan, self.target.dold_kan
        x, y = source_of(self.base, g), target_of(self.base, g)
        cols = dv.dim(x, n)
        rows = dw.dim(y, n + m)
        if not cols or not rows:
            return mat_zero(rows, cols)
        inc = dv.inclusion(x, n)
        return mat_mul(dw.projection(y, n + m), mat_mul(self.moore_tensor(m, g, n), inc, cols), cols)

    def cochain(self, source_ruth: Ruth, target_ruth: Ruth) -> HomCochain:
        return HomCochain(source_ruth, target_ruth, 0,
                          lambda m, g, n: self.dold_kan_tensor(m, g, n), name="φ̂")


def split_morphism(source: Splitting, target: Splitting, phi: BundleMap, top: int,
                   check: bool = False) -> tuple[HomCochain, MorphismSplitting]:
    """The intertwiner ``φ̂`` between the Dold-Kan representations of ``source`` and ``target``."""
    ms = MorphismSplitting(source, target, phi, check)
    return ms.cochain(source.dold_kan_ruth(top), target.dold_kan_ruth(top)), ms


@dataclass
class Comparison:
    """Outcome of comparing two cleavages of one fibration."""

    forward: HomCochain
    intertwiner_ok: bool
    phi0_is_identity: bool
    inverse: InvertResult
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.intertwiner_ok and self.phi0_is_identity and self.inverse.invertible
                and bool(self.inverse.left_ok) and bool(self.inverse.right_ok))


def compare_cleavages(c1: Cleavage, c2: Cleavage, top: int, m_cap: int) -> Comparison:
    """``φ̂`` for the identity of ``V`` from the ``c1`` splitting to the ``c2`` splitting,
    together with its inverse."""
    if c1.bundle is not c2.bundle:
        raise SplitError("both cleavages must belong to the same fibration")
    s1, s2 = Splitting(c1), Splitting(c2)
    phi, _ = split_morphism(s1, s2, identity_map(c1.bundle), top)
    rep = intertwiner_check(phi, m_cap, top)
    zero_ok = True
    for x in phi.base.simplices(0):
        for n in range(0, top + 1):
            d = phi.source.dim(x, n)
            if phi(0, x, n) != identity(d):
                zero_ok = False
    inv = invert(phi, m_cap, top)
    return Comparison(phi, rep.ok, zero_ok, inv, rep.equation_witnesses + rep.vanishing_witnesses)


# ---------------------------------------------------------------------------
# degeneracy laws of the lifts


def fiber_degeneracy_defects(split, g, n: int, j: int, chains) -> list:
    """``P(g, u_j v) = P(g, v) ∘ (υ_j × id)`` (also for :class:`MorphismSplitting`, with ``P_+``).

    ``chains`` are chains of ``Δ^{n+1} × X``; returns those where the two sides differ.
    """
    base = split.base
    src = split.source.bundle if isinstance(split, MorphismSplitting) else split.bundle
    top = unit_simplex(base, source_of(base, g), n)
    u = src.degeneracy(top, j)
    big, small = split.lift(g, n + 1), split.lift(g, n)
    ups = simplex_degeneracy_point(j)
    bad = []
    for ch in chains:
        if mat_mul(big.value(ch), u, small.cols) != small.value(tuple(ups(p) for p in ch)):
            bad.append(ch)
    return bad


def base_degeneracy_defects(split, g, n: int, i: int, chains) -> list:
    """``P(u_i g, v) = P(g, v) ∘ (id × ε_i)``, or with ``P_+`` and ``ε_{+,i}`` for a
    :class:`MorphismSplitting`; ``chains`` live on ``Δ^n × I^{m+1}`` (resp. ``I^{m+1}_+``)."""
    eps = cb.plus_degeneracy(i) if isinstance(split, MorphismSplitting) else cb.cube_degeneracy(i)
    up = split.lift(split.base.degeneracy(g, i), n)
    low = split.lift(g, n)
    return [ch for ch in chains if up.value(ch) != low.value(tuple((p[0], eps(p[1])) for p in ch))]


# ---------------------------------------------------------------------------
# shuffle-sum identities for lifts over a vertex


def shuffle_sum(lift: Lift, n: int, m: int, face: Callable = cb.ident) -> Matrix:
    """``Σ_{π ∈ S^{n,m}} sgn(π) T ∘ (id × face) σ_π``."""
    return _total([(pi.sign, lift.value(tuple((i, face(r)) for i, r in pi.chain())))
                   for pi in cb.shuffles(n, m)])


def marked_shuffle_sum(lift: Lift, n: int, m: int, a: int, face: Callable = cb.ident) -> Matrix:
    """``Σ_{π ∈ S^{n,m}_a} sgn(π) T ∘ (id × face) σ_{a,π}`` for ``T`` on ``Δ^n × I^m_a``-like shapes."""
    return _total([(pi.sign, lift.value(tuple((i, face(r)) for i, r in pi.marked_chain(a))))
                   for pi in cb.shuffles_marked(n, m, a)])


def _total(terms) -> Optional[Matrix]:
    acc = None
    for sgn, mat in terms:
        term = mat if sgn == 1 else mat_scale(sgn, mat)
        acc = term if acc is None else mat_add(acc, term)
    return acc


def _minus(a: Optional[Matrix], b: Optional[Matrix]) -> Optional[Matrix]:
    if a is None:
        return None if b is None else mat_scale(-1, b)
    return a if b is None else mat_sub(a, b)


def _alternating_faces(bundle: VectorFibration, x, p: int, vec: Optional[Matrix], cols: int) -> Optional[Matrix]:
    """``Σ_k (-1)^k δ_k`` applied to a family of ``p``-simplices over ``1_p x``."""
    if vec is None or p == 0:
        return None
    top = unit_simplex(bundle.base, x, p)
    return _total([((-1) ** k, mat_mul(bundle.face(top, k), vec, cols)) for k in range(p + 1)])


def _is_zero(mat: Optional[Matrix]) -> bool:
    return mat is None or all(v == 0 for row in mat for v in row)


def _vertex_of(lift: Lift):
    return source_of(lift.bundle.base, lift.g)


def extended_value(lift_at: Callable, T: Lift, chain: Sequence, splitter: Callable) -> Matrix:
    """``P(h, T)`` at a chain: ``P(h, T α)`` evaluated on the diagonal chain of ``ρ``.

    ``splitter`` sends a point to ``(α-point, ρ-point)``; ``lift_at(p)`` is the
    lift ``P(h, ·)`` (or ``P_+(h, ·)``) on ``Δ^p × (...)``.
    """
    parts = [splitter(q) for q in chain]
    alpha = tuple(a for a, _ in parts)
    outer = lift_at(len(chain) - 1).value(diagonal(r for _, r in parts))
    return mat_mul(outer, T.value(alpha), T.cols)


def boundary_shuffle_defect(T: Lift, n: int, m: int) -> bool:
    """The boundary of the shuffle sum of ``T: Δ^n × I^m -> V`` over a vertex.

    ``Σ_k (-1)^k (Σ_π sgn T σ_π) δ_k`` equals the alternating sum over the
    simplex faces ``δ_j × id`` plus ``(-1)^n Σ_i (-1)^i`` of the differences
    between the cube faces ``δ_{i|0}`` and ``δ_{i|1}``.  Returns ``True`` when
    the identity fails.
    """
    b = T.bundle
    x = _vertex_of(T)
    lhs = _alternating_faces(b, x, n + m, shuffle_sum(T, n, m), T.cols)
    terms = []
    for j in range(n + 1 if n > 0 else 0):
        dj = simplex_face_point(j)
        terms += [((-1) ** j * pi.sign, T.value(tuple(dj(p) for p in pi.chain())))
                  for pi in cb.shuffles(n - 1, m)]
    for i in range(1, m + 1):
        s = (-1) ** (n + i)
        for pi in cb.shuffles(n, m - 1):
            ch = pi.chain()
            terms.append((s * pi.sign, T.value(tuple((q[0], cb.cube_face(i, 0)(q[1])) for q in ch))))
            terms.append((-s * pi.sign, T.value(tuple((q[0], cb.cube_face(i, 1)(q[1])) for q in ch))))
    return not _is_zero(_minus(lhs, _total(terms)))


def prism_shuffle_defect(split: Splitting, h, T: Lift, n: int, k: int) -> bool:
    """``Σ_{S^{n,m-1}} sgn P(h, T)(id × δ_{m|1})σ_π`` against
    ``Σ_{S^{n+k,m-k-1}} sgn P(h, Σ_{S^{n,k}} sgn T σ_π')(id × δ_{m-k|1})σ_π``
    for ``T: Δ^n × I^k`` over ``sh``, ``m = k + dim h``."""
    m = k + split.base.dim_of(h)
    at = lambda p: split.lift(h, p)
    splitter = lambda q: ((q[0], q[1][:k]), q[1][k:])
    lhs = _total([(pi.sign, extended_value(at, T, tuple((i, r + (1,)) for i, r in pi.chain()), splitter))
                  for pi in cb.shuffles(n, m - 1)])
    inner = shuffle_sum(T, n, k)
    outer = split.lift(h, n + k)
    rhs = _total([(pi.sign, mat_mul(outer.value(tuple((i, r + (1,)) for i, r in pi.chain())), inner, T.cols))
                  for pi in cb.shuffles(n + k, m - k - 1)])
    return not _is_zero(_minus(lhs, rhs))


def plus_prism_shuffle_defect(ms: MorphismSplitting, h, T: Lift, n: int, k: int) -> bool:
    """Both halves of the ``P_+(h, T)`` shuffle identity for ``T: Δ^n × I^k -> V`` over ``sh``:
    the marked sums for ``k < a < m`` and the top-sheet sum, ``m = k + dim h``."""
    m = k + ms.base.dim_of(h)
    at = lambda p: ms.lift(h, p)
    inner = shuffle_sum(T, n, k)
    outer = ms.lift(h, n + k)
    for a in range(k + 1, m):
        chi = cb.chi_sheet(k, a)
        face = cb.sheet_face(a, m, 1)
        split = lambda q, chi=chi: ((q[0], chi(q[1])[0]), chi(q[1])[1])
        lhs = _total([(pi.sign, extended_value(at, T, tuple((i, face(r)) for i, r in pi.marked_chain(a)), split))
                      for pi in cb.shuffles_marked(n, m - 1, a)])
        face2 = cb.sheet_face(a - k, m - k, 1)
        rhs = _total([(pi.sign, mat_mul(outer.value(tuple((i, face2(r)) for i, r in pi.marked_chain(a - k))),
                                        inner, T.cols))
                      for pi in cb.shuffles_marked(n + k, m - k - 1, a - k)])
        if not _is_zero(_minus(lhs, rhs)):
            return True
    chi = cb.chi_sheet(k, m)
    top = cb.sheet_top_face_at(m)
    split = lambda q: ((q[0], chi(q[1])[0]), chi(q[1])[1])
    lhs = _total([(pi.sign, extended_value(at, T, tuple((i, top(r)) for i, r in pi.chain()), split))
                  for pi in cb.shuffles(n, m)])
    top2 = cb.sheet_top_face_at(m - k)
    rhs = _total([(pi.sign, mat_mul(outer.value(tuple((i, top2(r)) for i, r in pi.chain())), inner, T.cols))
                  for pi in cb.shuffles(n + k, m - k)])
    return not _is_zero(_minus(lhs, rhs))


def sheet_prism_shuffle_defect(split: Splitting, h, T: Lift, n: int, i: int, a: int) -> bool:
    """For ``1 <= a < i < m`` and ``T: Δ^n × I^{i-1}_a -> W`` over ``sh``, ``m = i + dim h``:
    the marked sum of ``P(h, T)(id × χ_a δ_{a,m-1|1})`` against
    ``(-1)^{m-i-1} Σ_{S^{i+n,m-i-1}} sgn P(h, Σ_{S^{n,i-1}_a} sgn T σ_{a,π'})(id × δ_{m-i|1})σ_π``."""
    m = i + split.base.dim_of(h)
    at = lambda p: split.lift(h, p)
    chi = cb.chi_sheet(i - 1, a)
    face = cb.sheet_face(a, m - 1, 1)
    splitter = lambda q: ((q[0], chi(q[1])[0]), chi(q[1])[1])
    lhs = _total([(pi.sign, extended_value(at, T, tuple((j, face(r)) for j, r in pi.marked_chain(a)), splitter))
                  for pi in cb.shuffles_marked(n, m - 2, a)])
    inner = marked_shuffle_sum(T, n, i - 1, a)
    outer = split.lift(h, n + i)
    s = (-1) ** (m - i - 1)
    rhs = _total([(s * pi.sign, mat_mul(outer.value(tuple((j, r + (1,)) for j, r in pi.chain())), inner, T.cols))
                  for pi in cb.shuffles(n + i, m - i - 1)])
    return not _is_zero(_minus(lhs, rhs))


def interpolation_boundary_defect(T: Lift, n: int, m: int) -> bool:
    """The boundary of the marked shuffle sums of ``T: Δ^n × I^{m-1}_+ -> W`` over a vertex,
    expanded over simplex faces, cube faces, the sheet faces ``δ_{a,i|1}``, and the
    top and bottom of the interpolation complex.  Returns ``True`` on failure."""
    b = T.bundle
    x = _vertex_of(T)
    lhs_terms = []
    for a in range(1, m):
        lhs_terms += [(pi.sign, T.value(pi.marked_chain(a))) for pi in cb.shuffles_marked(n, m - 1, a)]
    lhs = _alternating_faces(b, x, n + m, _total(lhs_terms), T.cols)
    terms = []
    for j in range(n + 1 if n > 0 else 0):
        dj = simplex_face_point(j)
        for a in range(1, m):
            terms += [((-1) ** j * pi.sign, T.value(tuple(dj(p) for p in pi.marked_chain(a))))
                      for pi in cb.shuffles_marked(n - 1, m - 1, a)]
    for i in range(1, m):
        s = (-1) ** (n + i)
        zero = cb.plus_face_zero(i)
        for a in range(1, m - 1):
            terms += [(s * pi.sign, T.value(tuple((q[0], zero(q[1])) for q in pi.marked_chain(a))))
                      for pi in cb.shuffles_marked(n, m - 2, a)]
        for a in range(i + 1, m):
            face = cb.sheet_face(a, i, 1)
            terms += [(-s * pi.sign, T.value(tuple((q[0], face(q[1])) for q in pi.marked_chain(a - 1))))
                      for pi in cb.shuffles_marked(n, m - 2, a - 1)]
        top = cb.sheet_top_face_at(i)
        terms += [(s * (-1) ** (m - i) * pi.sign, T.value(tuple((q[0], top(q[1])) for q in pi.chain())))
                  for pi in cb.shuffles(n, m - 1)]
        for a in range(1, i):
            face = cb.sheet_face(a, i, 1)
            terms += [(-s * pi.sign, T.value(tuple((q[0], face(q[1])) for q in pi.marked_chain(a))))
                      for pi in cb.shuffles_marked(n, m - 2, a)]
    s = -((-1) ** (n + m))
    up, down = cb.sheet_top(m - 1), cb.sheet_bottom(1)
    for pi in cb.shuffles(n, m - 1):
        ch = pi.chain()
        terms.append((s * pi.sign, T.value(tuple((q[0], up(q[1])) for q in ch))))
        terms.append((-s * pi.sign, T.value(tuple((q[0], down(q[1])) for q in ch))))
    return not _is_zero(_minus(lhs, _total(terms)))


# ---------------------------------------------------------------------------
# closed forms over groupoids


class VBGroupoid:
    """The groupoid ``V_1 ⇉ V_0`` of a 2-strict fibration over a groupoid nerve.

    Composition and inversion are read off the unique fillers of 2-dimensional
    horns.  All operations act on matrices whose columns are families of
    vectors, like the lifts elsewhere in this module.
    """

    def __init__(self, cleavage: Cleavage):
        self.cleavage = cleavage
        self.bundle = cleavage.bundle
        self.base = self.bundle.base
        self.groupoid = self.base.g

    def arrow(self, x: int, a: int):
        return (x, (a,))

    def triangle(self, x: int, first: int, second: int):
        """The 2-simplex ``x -first-> · -second-> ·`` of the nerve."""
        return (x, (first, second))

    def inverse_arrow(self, g):
        x, (a,) = g
        return (self.groupoid.target[a], (self.groupoid.inv[a],))

    def compose(self, A: Matrix, g2, B: Matrix, g1, cols: int) -> Matrix:
        """``A · B`` for ``A`` over ``g2`` and ``B`` over ``g1`` with ``t g1 = s g2``."""
        sigma = self.triangle(g1[0], g1[1][0], g2[1][0])
        filled = self.cleavage.fill(sigma, 1, [A, B], cols)
        return mat_mul(self.bundle.face(sigma, 1), filled, cols)

    def invert(self, A: Matrix, g, cols: int) -> Matrix:
        """``A^{-1}`` over ``g^{-1}`` for ``A`` over ``g``."""
        b = self.bundle
        x, (a,) = g
        sigma = self.triangle(x, a, self.groupoid.inv[a])
        src = mat_mul(b.face(g, 1), A, cols)
        unit_at = mat_mul(b.degeneracy(self.base.face(g, 1), 0), src, cols)
        filled = self.cleavage.fill(sigma, 0, [unit_at, A], cols)
        return mat_mul(b.face(sigma, 0), filled, cols)

    def lift(self, g, v: Matrix, cols: int) -> Matrix:
        """``c_{1,0}(g; v)``."""
        return self.cleavage.fill(g, 0, [v], cols)

    def act(self, g, v: Matrix, cols: int) -> Matrix:
        """``g v = t c_{1,0}(g; v)``."""
        return mat_mul(self.bundle.face(g, 0), self.lift(g, v, cols), cols)

    def composite(self, g2, g1):
        x, (a1,) = g1
        return (x, (self.groupoid.mul(g2[1][0], a1),))


def vb_groupoid_tensors(cleavage: Cleavage) -> dict:
    """The Dold-Kan tensors of a VB-groupoid computed from the groupoid structure of ``V``.

    Keys are ``(m, g, n)`` as for :meth:`Ruth.tensor`, covering ``R̂_0^{-1}``,
    ``R̂_1^0``, ``R̂_1^{-1}`` and ``R̂_2^0``; the matrices use the bases of
    :class:`DoldKan`.
    """
    vb = VBGroupoid(cleavage)
    b, base = vb.bundle, vb.base
    dk = DoldKan(b)
    out = {}
    for x in base.simplices(0):
        w = dk.inclusion(x, 1)
        cols = dk.dim(x, 1)
        sharp = mat_mul(b.face(unit_simplex(base, x, 1), 0), w, cols)
        out[(0, x, 1)] = sharp
    for g in base.simplices(1):
        x0, x1 = source_of(base, g), target_of(base, g)
        d0 = b.dim(x0)
        out[(1, g, 0)] = vb.act(g, identity(d0), d0)
        w = dk.inclusion(x0, 1)
        cols = dk.dim(x0, 1)
        if cols:
            ginv = vb.inverse_arrow(g)
            sharp = mat_mul(b.face(unit_simplex(base, x0, 1), 0), w, cols)
            zero = mat_zero(b.dim(ginv), cols)
            unit_x0 = unit_simplex(base, x0, 1)
            inner = vb.compose(w, unit_x0, zero, ginv, cols)
            outer = vb.compose(vb.lift(g, sharp, cols), g, inner, ginv, cols)
            out[(1, g, 1)] = from_columns([dk.coordinates(x1, 1, col) for col in columns(outer, cols)],
                                          dk.dim(x1, 1))
        else:
            out[(1, g, 1)] = mat_zero(dk.dim(x1, 1), 0)
    for g in base.simplices(2):
        g1, g2 = base.face(g, 2), base.face(g, 0)
        x0, x2 = source_of(base, g), target_of(base, g)
        d0 = b.dim(x0)
        v = identity(d0)
        g21 = vb.composite(g2, g1)
        first = vb.lift(g2, vb.act(g1, v, d0), d0)
        second = vb.lift(g1, v, d0)
        third = vb.invert(vb.lift(g21, v, d0), g21, d0)
        g21inv = vb.inverse_arrow(g21)
        tail = vb.compose(second, g1, third, g21inv, d0)
        over = vb.composite(g1, g21inv)
        loop = vb.compose(first, g2, tail, over, d0)
        proj = dk.projection(x2, 1)
        out[(2, g, 0)] = mat_mul(proj, loop, d0) if proj else mat_zero(0, d0)
    return out


def vb_groupoid_defects(split: Splitting) -> list:
    """Keys where the split Dold-Kan tensors differ from the VB-groupoid closed forms."""
    closed = vb_groupoid_tensors(split.cleavage)
    return [key for key, mat in closed.items() if split.dold_kan_tensor(*key) != mat]


def multiplicativity_defects(R: Ruth, n: int = 0) -> list:
    """Composable pairs ``(g_2, g_1)`` with ``R_1(g_2 g_1) != R_1(g_2) R_1(g_1)`` in degree ``-n``."""
    base = R.base
    bad = []
    for g in base.simplices(2):
        g1, g2, g21 = base.face(g, 2), base.face(g, 0), base.face(g, 1)
        cols = R.dim(source_of(base, g), n)
        if R.tensor(1, g21, n) != mat_mul(R.tensor(1, g2, n), R.tensor(1, g1, n), cols):
            bad.append(g)
    return bad
