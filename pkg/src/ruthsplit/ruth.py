"""Representations up to homotopy and their dg-category of cochains.

A representation ``E = (E, R)`` lives on a graded bundle over the vertices of
a base; ``E^{-n}_x`` has dimension ``dim(x, n)`` for ``low <= n <= top``.
Tensors are evaluated lazily: ``R.tensor(m, g, n)`` is the matrix of
``R_m(g): E^{-n}_{sg} -> E^{1-m-n}_{tg}``.  Cochains ``Φ`` of degree ``k``
have components ``Φ(m, g, n): E^{-n}_{sg} -> F^{k-m-n}_{tg}``.

Everything here is exact and evaluated only up to explicit caps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .bundle import source_of, target_of
from .linalg import (
    Matrix, block_diag, identity, inverse, mat_add, mat_mul, mat_scale, mat_sub, mat_zero,
    matrix_from_json, matrix_to_json,
)


class RuthError(ValueError):
    """Raised for degree mismatches and violated preconditions."""


def sign(e: int) -> int:
    return -1 if e % 2 else 1


def is_zero_matrix(m: Matrix) -> bool:
    return all(not x for row in m for x in row)


def _front(base, g, k):
    return base.front(g, k)


def _back(base, g, k):
    return base.back(g, k)


class Ruth:
    """A representation up to homotopy given by a dimension function and a tensor function.

    ``tensor_fn(m, g, n)`` must return the matrix of ``R_m^{-n}(g)``; it is
    only called when both the source index ``n`` and the target index
    ``n + m - 1`` lie in ``[low, top]``.
    """

    def __init__(self, base, dim_fn: Callable, tensor_fn: Callable, low: int = 0,
                 top: Optional[int] = None, name: str = "E"):
        self.base = base
        self._dim_fn = dim_fn
        self._tensor_fn = tensor_fn
        self.low = low
        self.top = top
        self.name = name
        self._cache: dict = {}
        self._dims: dict = {}

    def in_range(self, n: int) -> bool:
        return n >= self.low and (self.top is None or n <= self.top)

    def dim(self, x, n: int) -> int:
        if not self.in_range(n):
            return 0
        key = (x, n)
        d = self._dims.get(key)
        if d is None:
            d = self._dim_fn(x, n)
            self._dims[key] = d
        return d

    def tensor(self, m: int, g, n: int) -> Matrix:
        key = (m, g, n)
        hit = self._cache.get(key)
        if hit is None:
            src = self.dim(source_of(self.base, g), n)
            tgt = self.dim(target_of(self.base, g), n + m - 1)
            if src == 0 or tgt == 0:
                hit = mat_zero(tgt, src)
            else:
                hit = self._tensor_fn(m, g, n)
                if len(hit) != tgt or any(len(r) != src for r in hit):
                    raise RuthError(f"{self.name}: tensor R_{m} at {g}, degree -{n} has the wrong shape")
            self._cache[key] = hit
        return hit

    def degrees(self, n_cap: int) -> range:
        top = n_cap if self.top is None else min(self.top, n_cap)
        return range(self.low, top + 1)

    def vertices(self) -> list:
        return list(self.base.simplices(0))


class TableRuth(Ruth):
    """A representation given by a finite table; absent tensors are zero."""

    def __init__(self, base, dims: dict, tensors: dict, low: int = 0, top: Optional[int] = None,
                 name: str = "E"):
        self.table_dims = dict(dims)
        self.table = dict(tensors)
        if top is None:
            top = max((n for (_, n) in dims), default=0)
        super().__init__(base, lambda x, n: self.table_dims.get((x, n), 0),
                         lambda m, g, n: self._lookup(m, g, n), low, top, name)

    def _lookup(self, m, g, n):
        hit = self.table.get((m, g, n))
        if hit is not None:
            return hit
        src = self.dim(source_of(self.base, g), n)
        tgt = self.dim(target_of(self.base, g), n + m - 1)
        return mat_zero(tgt, src)

    def to_json(self, encode: Callable) -> dict:
        return {
            "low": self.low,
            "top": self.top,
            "dims": [[encode(x), n, d] for (x, n), d in sorted(self.table_dims.items(), key=repr)],
            "tensors": [
                {"m": m, "simplex": encode(g), "n": n, "matrix": matrix_to_json(mat)}
                for (m, g, n), mat in sorted(self.table.items(), key=repr)
            ],
        }

    @classmethod
    def from_json(cls, base, data: dict, decode: Callable, name: str = "E") -> "TableRuth":
        dims = {(decode(x), int(n)): int(d) for x, n, d in data["dims"]}
        tensors = {}
        for rec in data.get("tensors", []):
            tensors[(int(rec["m"]), decode(rec["simplex"]), int(rec["n"]))] = matrix_from_json(rec["matrix"])
        return cls(base, dims, tensors, int(data.get("low", 0)), data.get("top"), name)


def tabulate(ruth: Ruth, m_cap: int, n_cap: int) -> TableRuth:
    """Freeze the tensors of a lazy representation up to caps."""
    dims = {(x, n): ruth.dim(x, n) for x in ruth.vertices() for n in ruth.degrees(n_cap)}
    tensors = {}
    for m in range(m_cap + 1):
        for g in ruth.base.simplices(m):
            for n in ruth.degrees(n_cap):
                t = ruth.tensor(m, g, n)
                if not is_zero_matrix(t):
                    tensors[(m, g, n)] = t
    return TableRuth(ruth.base, dims, tensors, ruth.low, ruth.top if ruth.top is not None else n_cap,
                     ruth.name)


# ---------------------------------------------------------------------------
# RUTH equations


@dataclass
class RuthReport:
    m_cap: int
    n_cap: int
    checked: int = 0
    failures: list = field(default_factory=list)      # (m, g, n)
    unital_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def unital(self) -> bool:
        return not self.unital_failures


def ruth_equation_defect(R: Ruth, m: int, g, n: int) -> Matrix:
    """LHS minus RHS of the degree ``-n`` component of the RUTH equation at ``g``."""
    base = R.base
    x0 = source_of(base, g)
    src = R.dim(x0, n)
    tgt = R.dim(target_of(base, g), n + m - 2)
    total = mat_zero(tgt, src)
    for k in range(m + 1):
        l = m - k
        right = R.tensor(l, _front(base, g, l), n)
        left = R.tensor(k, _back(base, g, k), n + l - 1)
        total = mat_add(total, mat_scale(sign(k), mat_mul(left, right, src)))
    for i in range(1, m):
        total = mat_sub(total, mat_scale(sign(m - i), R.tensor(m - 1, base.face(g, i), n)))
    return total


def ruth_check(R: Ruth, m_cap: int, n_cap: int, unital: bool = True) -> RuthReport:
    """Evaluate every RUTH equation (and optionally unitality) up to the caps."""
    rep = RuthReport(m_cap, n_cap)
    base = R.base
    for m in range(m_cap + 1):
        for g in base.simplices(m):
            for n in R.degrees(n_cap):
                rep.checked += 1
                if not is_zero_matrix(ruth_equation_defect(R, m, g, n)):
                    rep.failures.append((m, g, n))
    if unital:
        rep.unital_failures = unitality_failures(R, m_cap, n_cap)
    return rep


def unitality_failures(R: Ruth, m_cap: int, n_cap: int) -> list:
    base = R.base
    bad = []
    for x in R.vertices():
        ux = base.degeneracy(x, 0)
        for n in R.degrees(n_cap):
            if R.tensor(1, ux, n) != identity(R.dim(x, n)):
                bad.append(("R1(1x)", x, n))
    for m in range(1, m_cap):
        for g in base.simplices(m):
            for j in range(m + 1):
                ug = base.degeneracy(g, j)
                for n in R.degrees(n_cap):
                    if not is_zero_matrix(R.tensor(m + 1, ug, n)):
                        bad.append(("R(u_j g)", m + 1, g, j, n))
    return bad


# ---------------------------------------------------------------------------
# cochains


class HomCochain:
    """A homogeneous cochain of degree ``degree`` from ``source`` to ``target``."""

    def __init__(self, source: Ruth, target: Ruth, degree: int, fn: Callable, name: str = "Φ"):
        if source.base is not target.base:
            raise RuthError("cochains need representations over the same base")
        self.source = source
        self.target = target
        self.degree = degree
        self._fn = fn
        self.name = name
        self._cache: dict = {}

    @property
    def base(self):
        return self.source.base

    def target_index(self, m: int, n: int) -> int:
        return n + m - self.degree

    def __call__(self, m: int, g, n: int) -> Matrix:
        key = (m, g, n)
        hit = self._cache.get(key)
        if hit is None:
            src = self.source.dim(source_of(self.base, g), n)
            tgt = self.target.dim(target_of(self.base, g), self.target_index(m, n))
            if src == 0 or tgt == 0:
                hit = mat_zero(tgt, src)
            else:
                hit = self._fn(m, g, n)
                if len(hit) != tgt or any(len(r) != src for r in hit):
                    raise RuthError(f"{self.name}: component {m} at {g}, degree -{n} has the wrong shape")
            self._cache[key] = hit
        return hit

    def degrees(self, n_cap: int) -> range:
        return self.source.degrees(n_cap)


def cochain_from_table(source: Ruth, target: Ruth, degree: int, table: dict, name: str = "Φ") -> HomCochain:
    def fn(m, g, n):
        hit = table.get((m, g, n))
        if hit is None:
            return mat_zero(target.dim(target_of(source.base, g), n + m - degree),
                            source.dim(source_of(source.base, g), n))
        return hit
    return HomCochain(source, target, degree, fn, name)


def identity_cochain(E: Ruth) -> HomCochain:
    """The strict identity intertwiner ``I`` with ``I_0(x) = id``."""
    def fn(m, g, n):
        if m == 0:
            return identity(E.dim(g, n))
        return mat_zero(E.dim(target_of(E.base, g), n + m), E.dim(source_of(E.base, g), n))
    return HomCochain(E, E, 0, fn, "I")


def zero_cochain(E: Ruth, F: Ruth, degree: int) -> HomCochain:
    def fn(m, g, n):
        return mat_zero(F.dim(target_of(E.base, g), n + m - degree), E.dim(source_of(E.base, g), n))
    return HomCochain(E, F, degree, fn, "0")


def linear_combination(terms: list[tuple[int, HomCochain]], name: str = "Σ") -> HomCochain:
    """``Σ c_i Φ_i`` for cochains of equal degree between the same representations."""
    first = terms[0][1]
    for _, phi in terms:
        if phi.degree != first.degree or phi.source is not first.source or phi.target is not first.target:
            raise RuthError("linear combinations need cochains of one degree between the same objects")

    def fn(m, g, n):
        total = None
        for c, phi in terms:
            part = mat_scale(c, phi(m, g, n))
            total = part if total is None else mat_add(total, part)
        return total
    return HomCochain(first.source, first.target, first.degree, fn, name)


def D(phi: HomCochain) -> HomCochain:
    """The derivative: a cochain of degree ``deg + 1``."""
    E, F, deg = phi.source, phi.target, phi.degree
    base = phi.base

    def fn(m, g, n):
        src = E.dim(source_of(base, g), n)
        tgt = F.dim(target_of(base, g), n + m - deg - 1)
        total = mat_zero(tgt, src)
        for k in range(m + 1):
            l = m - k
            a = phi(l, _front(base, g, l), n)
            b = F.tensor(k, _back(base, g, k), n + l - deg)
            total = mat_add(total, mat_scale(sign(k * deg), mat_mul(b, a, src)))
        for i in range(1, m):
            total = mat_add(total, mat_scale(sign(deg) * sign(m - i), phi(m - 1, base.face(g, i), n)))
        for k in range(m + 1):
            l = m - k
            r = E.tensor(l, _front(base, g, l), n)
            p = phi(k, _back(base, g, k), n + l - 1)
            total = mat_sub(total, mat_scale(sign(deg) * sign(k), mat_mul(p, r, src)))
        return total
    return HomCochain(E, F, deg + 1, fn, f"D{phi.name}")


def compose(phi: HomCochain, psi: HomCochain) -> HomCochain:
    """``(Φ ∘ Ψ)_m(g) = Σ_k (-1)^{k deg Ψ} Φ_k(t_k g) Ψ_{m-k}(s_{m-k} g)``."""
    if phi.source is not psi.target:
        raise RuthError("cochains are not composable")
    base = phi.base
    dpsi = psi.degree
    E, G = psi.source, phi.target
    deg = phi.degree + dpsi

    def fn(m, g, n):
        src = E.dim(source_of(base, g), n)
        tgt = G.dim(target_of(base, g), n + m - deg)
        total = mat_zero(tgt, src)
        for k in range(m + 1):
            l = m - k
            b = psi(l, _front(base, g, l), n)
            a = phi(k, _back(base, g, k), n + l - dpsi)
            total = mat_add(total, mat_scale(sign(k * dpsi), mat_mul(a, b, src)))
        return total
    return HomCochain(E, G, deg, fn, f"{phi.name}∘{psi.name}")


@dataclass
class CochainComparison:
    equal: bool
    checked: int
    witnesses: list


def compare(phi: HomCochain, psi: HomCochain, m_cap: int, n_cap: int) -> CochainComparison:
    """Exact componentwise comparison up to caps."""
    if phi.degree != psi.degree:
        return CochainComparison(False, 0, [("degree", phi.degree, psi.degree)])
    wit, checked = [], 0
    for m in range(m_cap + 1):
        for g in phi.base.simplices(m):
            for n in phi.degrees(n_cap):
                checked += 1
                if phi(m, g, n) != psi(m, g, n):
                    wit.append((m, g, n))
    return CochainComparison(not wit, checked, wit)


def is_zero_cochain(phi: HomCochain, m_cap: int, n_cap: int) -> CochainComparison:
    wit, checked = [], 0
    for m in range(m_cap + 1):
        for g in phi.base.simplices(m):
            for n in phi.degrees(n_cap):
                checked += 1
                if not is_zero_matrix(phi(m, g, n)):
                    wit.append((m, g, n))
    return CochainComparison(not wit, checked, wit)


def normalization_failures(phi: HomCochain, m_cap: int, n_cap: int) -> list:
    """Witnesses of ``Φ_{m+1}(u_j g) != 0``."""
    base = phi.base
    bad = []
    for m in range(0, m_cap):
        for g in base.simplices(m):
            for j in range(m + 1):
                ug = base.degeneracy(g, j)
                for n in phi.degrees(n_cap):
                    if not is_zero_matrix(phi(m + 1, ug, n)):
                        bad.append((m + 1, g, j, n))
    return bad


@dataclass
class IntertwinerReport:
    equations_ok: bool
    vanishing_ok: bool
    equation_witnesses: list
    vanishing_witnesses: list

    @property
    def ok(self) -> bool:
        return self.equations_ok and self.vanishing_ok


def intertwiner_check(phi: HomCochain, m_cap: int, n_cap: int) -> IntertwinerReport:
    """``DΦ = 0`` plus the vanishing on degenerate simplices, up to caps."""
    if phi.degree != 0:
        raise RuthError("intertwiners have degree 0")
    z = is_zero_cochain(D(phi), m_cap, n_cap)
    van = normalization_failures(phi, m_cap, n_cap)
    return IntertwinerReport(z.equal, not van, z.witnesses, van)


# ---------------------------------------------------------------------------
# mapping cone


def mapping_cone(phi: HomCochain) -> Ruth:
    """``cone(Φ)^{-n} = E^{-n} ⊕ F^{-1-n}`` with block tensors ``[[R, 0], [Φ, (-1)^{m-1} S]]``."""
    if phi.degree != 0:
        raise RuthError("the mapping cone needs a degree 0 intertwiner")
    E, F = phi.source, phi.target
    base = E.base
    low = min(E.low, F.low - 1)
    top = None if E.top is None or F.top is None else max(E.top, F.top - 1)

    def dim_fn(x, n):
        return E.dim(x, n) + F.dim(x, n + 1)

    def tensor_fn(m, g, n):
        sx, tx = source_of(base, g), target_of(base, g)
        e_s, f_s = E.dim(sx, n), F.dim(sx, n + 1)
        e_t, f_t = E.dim(tx, n + m - 1), F.dim(tx, n + m)
        r = E.tensor(m, g, n)
        p = phi(m, g, n)
        s = mat_scale(sign(m - 1), F.tensor(m, g, n + 1))
        rows = []
        for i in range(e_t):
            rows.append(tuple(r[i]) + (0,) * f_s)
        for i in range(f_t):
            rows.append(tuple(p[i]) + tuple(s[i]))
        return _as_q(tuple(rows))

    return Ruth(base, dim_fn, tensor_fn, low, top, f"cone({phi.name})")


def _as_q(m: Matrix) -> Matrix:
    from .linalg import q
    return tuple(tuple(q(x) if isinstance(x, int) else x for x in row) for row in m)


# ---------------------------------------------------------------------------
# inversion


@dataclass
class InvertResult:
    invertible: bool
    inverse: Optional[HomCochain] = None
    failing: Optional[tuple] = None          # (n, x) where Φ_0 is not invertible
    certified_up_to: Optional[int] = None
    left_ok: Optional[bool] = None
    right_ok: Optional[bool] = None
    homotopy_inverse: Optional[HomCochain] = None


def _block(m: Matrix, r0: int, r1: int, c0: int, c1: int) -> Matrix:
    return tuple(tuple(row[c0:c1]) for row in m[r0:r1])


def invert(phi: HomCochain, m_cap: int, n_cap: Optional[int] = None, verify: bool = True) -> InvertResult:
    """Two-sided inverse of an intertwiner whose ``Φ_0`` is fiberwise invertible.

    Builds a contracting homotopy of the mapping cone from ``Φ_0^{-1}`` by the
    recursion ``Ω_m(g) = Ω_0(tg)((DΩ)_m(g) - R_0(tg)Ω_m(g))`` in lexicographic
    ``(m, n)`` order, reads off a homotopy inverse ``Ψ`` and homotopy ``K``
    from its blocks, solves ``K̃ ∘ Φ = K`` and returns ``Ψ + D K̃``.
    """
    E, F = phi.source, phi.target
    if phi.degree != 0:
        raise RuthError("only degree 0 intertwiners can be inverted")
    if E.low < 0 or F.low < 0:
        raise RuthError("inversion needs representations vanishing in positive degrees")
    tops = [t for t in (E.top, F.top) if t is not None]
    if n_cap is None:
        if len(tops) < 2:
            raise RuthError("unbounded representations need an explicit degree cap")
        n_cap = max(tops)
    base = E.base
    # decision: Φ_0 invertible fiberwise
    inv0: dict = {}
    for x in E.vertices():
        for n in range(0, n_cap + 1):
            a = phi(0, x, n)
            de, df = E.dim(x, n), F.dim(x, n)
            if de != df:
                return InvertResult(False, failing=(n, x))
            if de == 0:
                inv0[(x, n)] = ()
                continue
            ai = inverse(a)
            if ai is None:
                return InvertResult(False, failing=(n, x))
            inv0[(x, n)] = ai

    cone = mapping_cone(phi)

    def omega0(x, n):
        # cone^{-n} = E^{-n} ⊕ F^{-1-n}  ->  cone^{-1-n} = E^{-1-n} ⊕ F^{-2-n}
        e_s, f_s = E.dim(x, n), F.dim(x, n + 1)
        e_t, f_t = E.dim(x, n + 1), F.dim(x, n + 2)
        psi0 = inv0.get((x, n + 1)) if n + 1 <= n_cap else None
        rows = []
        for i in range(e_t):
            row = [0] * (e_s + f_s)
            if psi0:
                for j in range(f_s):
                    row[e_s + j] = -psi0[i][j]
            rows.append(tuple(row))
        for i in range(f_t):
            rows.append((0,) * (e_s + f_s))
        return _as_q(tuple(rows))

    omega_cache: dict = {}

    def omega_fn(m, g, n):
        key = (m, g, n)
        hit = omega_cache.get(key)
        if hit is not None:
            return hit
        if m == 0:
            hit = omega0(g, n)
        else:
            tx = target_of(base, g)
            src = cone.dim(source_of(base, g), n)
            # (DΩ)_m(g) without its k = 0 leading term R_0(tg) Ω_m(g)
            tgt = cone.dim(tx, n + m)
            total = mat_zero(tgt, src)
            deg = -1
            for k in range(1, m + 1):
                l = m - k
                a = omega(l, _front(base, g, l), n)
                b = cone.tensor(k, _back(base, g, k), n + l - deg)
                total = mat_add(total, mat_scale(sign(k * deg), mat_mul(b, a, src)))
            for i in range(1, m):
                total = mat_add(total, mat_scale(sign(deg) * sign(m - i), omega(m - 1, base.face(g, i), n)))
            for k in range(m + 1):
                l = m - k
                r = cone.tensor(l, _front(base, g, l), n)
                p = omega(k, _back(base, g, k), n + l - 1)
                total = mat_sub(total, mat_scale(sign(deg) * sign(k), mat_mul(p, r, src)))
            hit = mat_mul(omega(0, tx, n + m), total, src)
        omega_cache[key] = hit
        return hit

    omega = HomCochain(cone, cone, -1, omega_fn, "Ω")

    def psi_fn(m, g, p):
        # Ψ_m^{-p}: F^{-p} -> E^{-p-m}; sits in Ω_m^{-(p-1)} at block (E-row, F-col)
        n = p - 1
        sx, tx = source_of(base, g), target_of(base, g)
        full = omega(m, g, n)
        e_s = E.dim(sx, n)
        e_t = E.dim(tx, n + 1 + m)
        blk = _block(full, 0, e_t, e_s, e_s + F.dim(sx, n + 1))
        return mat_scale(sign(m - 1), blk)

    psi = HomCochain(F, E, 0, psi_fn, "Ψ")

    def k_fn(m, g, n):
        sx, tx = source_of(base, g), target_of(base, g)
        full = omega(m, g, n)
        return _block(full, 0, E.dim(tx, n + 1 + m), 0, E.dim(sx, n))

    K = HomCochain(E, E, -1, k_fn, "K")

    ktilde_cache: dict = {}

    def ktilde_fn(m, g, n):
        # K̃_m(g) Φ_0(sg) = K_m(g) - Σ_{k<m} K̃_k(t_k g) Φ_{m-k}(s_{m-k} g)
        key = (m, g, n)
        hit = ktilde_cache.get(key)
        if hit is not None:
            return hit
        sx = source_of(base, g)
        src = E.dim(sx, n)
        rhs = K(m, g, n)
        for k in range(m):
            l = m - k
            a = phi(l, _front(base, g, l), n)
            b = ktilde(k, _back(base, g, k), n + l)
            rhs = mat_sub(rhs, mat_mul(b, a, src))
        hit = mat_mul(rhs, inv0[(sx, n)], F.dim(sx, n))
        ktilde_cache[key] = hit
        return hit

    ktilde = HomCochain(F, E, -1, ktilde_fn, "K̃")
    inv = linear_combination([(1, psi), (1, D(ktilde))], "Φ^{-1}")
    result = InvertResult(True, inverse=inv, certified_up_to=m_cap, homotopy_inverse=psi)
    if verify:
        result.left_ok = compare(compose(inv, phi), identity_cochain(E), m_cap, n_cap).equal
        result.right_ok = compare(compose(phi, inv), identity_cochain(F), m_cap, n_cap).equal
    return result


# ---------------------------------------------------------------------------
# generators


def strict_representation(base, dims: dict, differential: dict, action: Callable,
                          name: str = "E") -> Ruth:
    """``R_0(x) = differential[(x, n)]``, ``R_1(g) = action(g, n)``, higher tensors zero.

    ``dims[(x, n)]`` gives ``dim E^{-n}_x``.  ``action`` must be functorial and
    commute with the differentials for the result to be a representation.
    """
    top = max((n for (_, n) in dims), default=0)

    def tensor_fn(m, g, n):
        if m == 0:
            return differential[(g, n)]
        if m == 1:
            return action(g, n)
        return mat_zero(dims.get((target_of(base, g), n + m - 1), 0), dims.get((source_of(base, g), n), 0))

    return Ruth(base, lambda x, n: dims.get((x, n), 0), tensor_fn, 0, top, name)


def transport(R: Ruth, phi_fn: Callable, name: str = "F") -> tuple[Ruth, HomCochain]:
    """Transport ``R`` along a degree 0 cochain with invertible ``Φ_0``.

    Returns ``(S, Φ)`` where ``S`` is the unique representation on the same
    graded bundle making ``Φ: (E, R) -> (E, S)`` an intertwiner.  The tensors
    are solved for in increasing ``m``.
    """
    base = R.base
    inv_cache: dict = {}

    def phi0_inv(x, n):
        key = (x, n)
        if key not in inv_cache:
            inv_cache[key] = inverse(phi_fn(0, x, n)) if R.dim(x, n) else ()
        return inv_cache[key]

    def phi(m, g, n):
        src = R.dim(source_of(base, g), n)
        tgt = R.dim(target_of(base, g), n + m)
        if src == 0 or tgt == 0:
            return mat_zero(tgt, src)
        return phi_fn(m, g, n)

    S: Ruth

    def tensor_fn(m, g, n):
        sx = source_of(base, g)
        src = R.dim(sx, n)
        tgt = R.dim(target_of(base, g), n + m - 1)
        total = mat_zero(tgt, src)
        for k in range(m + 1):
            l = m - k
            r = R.tensor(l, _front(base, g, l), n)
            p = phi(k, _back(base, g, k), n + l - 1)
            total = mat_add(total, mat_scale(sign(k), mat_mul(p, r, src)))
        for i in range(1, m):
            total = mat_sub(total, mat_scale(sign(m - i), phi(m - 1, base.face(g, i), n)))
        for k in range(m):
            l = m - k
            a = phi(l, _front(base, g, l), n)
            b = S.tensor(k, _back(base, g, k), n + l)
            total = mat_sub(total, mat_mul(b, a, src))
        return mat_mul(total, phi0_inv(sx, n), src)

    S = Ruth(base, R._dim_fn, tensor_fn, R.low, R.top, name)
    return S, HomCochain(R, S, 0, lambda m, g, n: phi(m, g, n), "Φ")


def random_ruth(base, degree_dims: list[int], seed: int, character: bool = False,
                m_random: int = 3, name: str = "E") -> Ruth:
    """A seeded unital representation with generically nonzero higher tensors.

    Start from a strict representation with a random differential (trivial
    action, or the sign character of a cyclic group when ``character``) and
    transport it along a random cochain with invertible ``Φ_0`` and random
    ``Φ_m`` (``1 <= m <= m_random``) on nondegenerate simplices.
    """
    from .bundle import seeded_rng
    from .linalg import Q, random_vector

    top = len(degree_dims) - 1
    vertices = list(base.simplices(0))
    if character:
        g = base.g
        if any(sign(g.mul(b, a)) != sign(a) * sign(b) for (b, a) in g.comp):
            raise RuthError(f"a -> (-1)^a is not a character of {g.name}")
    dims = {(x, n): degree_dims[n] for x in vertices for n in range(top + 1)}
    rng = seeded_rng("ruth-differential", seed)
    # one random complex E^{-top} -> ... -> E^0 shared by all vertices, so that the
    # trivial action commutes with it; d^{-n} is made to vanish on the image of d^{-n-1}
    from .linalg import columns, kernel
    complex_: dict = {0: mat_zero(0, degree_dims[0])}
    prev = None
    for n in range(top, 0, -1):
        src, tgt = degree_dims[n], degree_dims[n - 1]
        a = tuple(tuple(Q(rng.randint(-2, 2)) for _ in range(src)) for _ in range(tgt))
        if prev is not None and prev[0]:
            img = columns(prev, degree_dims[n + 1])
            if img and src:
                ann = kernel(tuple(img), src)   # functionals vanishing on the image
                if ann:
                    coeff = tuple(tuple(Q(rng.randint(-2, 2)) for _ in ann) for _ in range(tgt))
                    a = mat_mul(coeff, tuple(ann), src)
                else:
                    a = mat_zero(tgt, src)
        complex_[n] = a
        prev = a
    differential = {(x, n): complex_[n] for x in vertices for n in range(top + 1)}

    def action(g, n):
        d = degree_dims[n] if n <= top else 0
        if character:
            arrow = g[1][0]
            return mat_scale(sign(arrow), identity(d))
        return identity(d)

    strict = strict_representation(base, dims, differential, action, name + "0")
    cache: dict = {}

    def phi_fn(m, g, n):
        key = (m, g, n)
        if key in cache:
            return cache[key]
        src = degree_dims[n]
        tgt = degree_dims[n + m] if n + m <= top else 0
        r = seeded_rng("ruth-gauge", seed, m, g, n)
        if m == 0:
            while True:
                mat = tuple(tuple(Q(r.randint(-2, 2)) for _ in range(src)) for _ in range(src))
                if inverse(mat) is not None:
                    break
        elif m > m_random or base.is_degenerate(g):
            mat = mat_zero(tgt, src)
        else:
            mat = tuple(random_vector(r, src, 2) for _ in range(tgt))
        cache[key] = mat
        return mat

    S, _ = transport(strict, phi_fn, name)
    return S


def random_cochain(E: Ruth, F: Ruth, degree: int, seed: int, m_random: int = 3,
                   invertible_zero: bool = False, name: str = "Φ") -> HomCochain:
    """A seeded normalized cochain: random on nondegenerate simplices up to ``m_random``.

    ``invertible_zero`` forces square invertible ``Φ_0`` components (degree 0 only).
    """
    from .bundle import seeded_rng
    from .linalg import Q, random_vector

    base = E.base

    def fn(m, g, n):
        src = E.dim(source_of(base, g), n)
        tgt = F.dim(target_of(base, g), n + m - degree)
        r = seeded_rng("cochain", seed, degree, m, g, n)
        if m > m_random or (m > 0 and base.is_degenerate(g)):
            return mat_zero(tgt, src)
        if m == 0 and invertible_zero and degree == 0 and src == tgt:
            while True:
                mat = tuple(tuple(Q(r.randint(-2, 2)) for _ in range(src)) for _ in range(src))
                if inverse(mat) is not None:
                    return mat
        return tuple(random_vector(r, src, 2) for _ in range(tgt))

    return HomCochain(E, F, degree, fn, name)
