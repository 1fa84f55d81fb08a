"""Command-line front end: ``ruthsplit run <spec.json>``.

A spec names a base, a bundle, cleavage seeds, caps and a list of tasks.
The run writes a transcript (and a few artifacts) to the output directory.
The transcript is a canonical JSON document: keys sorted, rationals as
``"p/q"`` strings, no timings and no absolute paths, so that re-running a
spec reproduces it byte for byte.  Timings go to ``timings.json`` and, with
``--verbose``, to stderr.

Exit codes: 0 when every check passes, 1 when some check fails, 2 for
unreadable or invalid input.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import click

from . import bundle as bd
from . import cleavage as cl
from . import combinatorics as cb
from . import ruth as rt
from . import sdp
from . import split as sp
from .linalg import identity, mat_mul, matrix_to_json, q_to_str

TASKS = ("check-fibration", "split", "split-morphism", "compare-cleavages",
         "sdp-roundtrip", "invariant-suite")
WITNESS_LIMIT = 5


class SpecError(ValueError):
    """Invalid input.  ``field`` is the dotted path of the offending spec entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


# ---------------------------------------------------------------------------
# canonical JSON


def plain(obj: Any) -> Any:
    """Turn tuples, rationals and other library values into plain JSON values."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, cb.PosetMap):
        return list(obj.values)
    if isinstance(obj, cb.Simplex):
        return [obj.core, list(obj.epi.values)]
    if type(obj).__name__ == "mpq":
        return q_to_str(obj)
    return str(obj)


def canonical(obj: Any) -> str:
    return json.dumps(plain(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def parse_json(text: str, where: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(where, f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def read_json(path: Path, where: str) -> tuple[Any, str]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(where, f"cannot read {path.name}: {exc.strerror}") from exc
    return parse_json(text, where), hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# spec


@dataclass
class Caps:
    m: int = 3
    n: int = 2


@dataclass
class ExperimentSpec:
    base: Any
    bundle: dict
    seeds: list[int]
    caps: Caps
    tasks: list[str]
    output_dir: Optional[str] = None
    transcript_name: str = "transcript.json"
    root: Path = field(default_factory=Path)
    raw: dict = field(default_factory=dict)


def _int(value, where: str, positive: bool = False, nonneg: bool = False) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(where, f"expected an integer, got {json.dumps(value)}")
    if positive and value < 1:
        raise SpecError(where, "must be positive")
    if nonneg and value < 0:
        raise SpecError(where, "must be nonnegative")
    return value


def _dict(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise SpecError(where, "expected an object")
    return value


def _int_list(value, where: str, nonneg: bool = False) -> list[int]:
    if not isinstance(value, list) or not value:
        raise SpecError(where, "expected a nonempty list of integers")
    return [_int(v, f"{where}[{i}]", nonneg=nonneg) for i, v in enumerate(value)]


def parse_caps(value, where: str) -> Caps:
    if isinstance(value, str):
        parts = value.split(",")
        if len(parts) != 2 or not all(p.strip().lstrip("-").isdigit() for p in parts):
            raise SpecError(where, "expected 'm,n'")
        value = [int(p) for p in parts]
    if isinstance(value, dict):
        unknown = set(value) - {"m", "n"}
        if unknown:
            raise SpecError(f"{where}.{sorted(unknown)[0]}", "unknown key")
        value = [value.get("m", 3), value.get("n", 2)]
    if not isinstance(value, list) or len(value) != 2:
        raise SpecError(where, "expected [m, n] or {\"m\": .., \"n\": ..}")
    return Caps(_int(value[0], f"{where}.m", positive=True), _int(value[1], f"{where}.n", positive=True))


def load_spec(text: str, root: Path) -> ExperimentSpec:
    data = _dict(parse_json(text, "spec"), "spec")
    known = {"base", "bundle", "seeds", "caps", "tasks", "output"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise SpecError(unknown[0], "unknown field")
    for key in ("base", "bundle", "seeds", "tasks"):
        if key not in data:
            raise SpecError(key, "missing required field")
    seeds = _int_list(data["seeds"], "seeds")
    if len(set(seeds)) != len(seeds):
        raise SpecError("seeds", "seeds must be distinct")
    caps = parse_caps(data.get("caps", [3, 2]), "caps")
    tasks = data["tasks"]
    if not isinstance(tasks, list) or not tasks:
        raise SpecError("tasks", "expected a nonempty list of task names")
    for i, t in enumerate(tasks):
        if t not in TASKS:
            raise SpecError(f"tasks[{i}]", f"unknown task {json.dumps(t)}; known: {', '.join(TASKS)}")
    if "compare-cleavages" in tasks and len(seeds) < 2:
        raise SpecError("seeds", "compare-cleavages needs at least two seeds")
    bundle = _dict(data["bundle"], "bundle")
    output = _dict(data.get("output", {}), "output")
    for key in output:
        if key not in ("dir", "transcript"):
            raise SpecError(f"output.{key}", "unknown key")
    out_dir = output.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise SpecError("output.dir", "expected a path string")
    name = output.get("transcript", "transcript.json")
    if not isinstance(name, str) or "/" in name or not name:
        raise SpecError("output.transcript", "expected a plain file name")
    return ExperimentSpec(data["base"], bundle, seeds, caps, list(tasks), out_dir, name, root, data)


# ---------------------------------------------------------------------------
# bases


def _table_int(value, where: str, bound: int) -> int:
    v = _int(value, where, nonneg=True)
    if v >= bound:
        raise SpecError(where, f"index {v} out of range (< {bound})")
    return v


def ingest_groupoid(tables: dict, where: str = "base.tables", name: str = "G") -> cb.GroupoidNerve:
    """Validate groupoid tables and return the nerve.

    ``tables`` holds ``objects`` (a list of labels), ``arrows`` (objects with
    ``source`` and ``target`` indices and an optional ``name``), ``identity``
    (the unit arrow of each object) and ``compose`` (triples ``[b, a, c]``
    meaning ``b ∘ a = c``).  Axiom failures raise :class:`SpecError` naming
    the witness.
    """
    tables = _dict(tables, where)
    for key in ("objects", "arrows", "identity", "compose"):
        if key not in tables:
            raise SpecError(f"{where}.{key}", "missing table")
    objects = tables["objects"]
    if not isinstance(objects, list) or not objects:
        raise SpecError(f"{where}.objects", "expected a nonempty list")
    arrows = tables["arrows"]
    if not isinstance(arrows, list) or not arrows:
        raise SpecError(f"{where}.arrows", "expected a nonempty list")
    n_obj, n_arr = len(objects), len(arrows)
    source, target, names = [], [], []
    for i, a in enumerate(arrows):
        a = _dict(a, f"{where}.arrows[{i}]")
        source.append(_table_int(a.get("source"), f"{where}.arrows[{i}].source", n_obj))
        target.append(_table_int(a.get("target"), f"{where}.arrows[{i}].target", n_obj))
        names.append(str(a.get("name", i)))
    ident = tables["identity"]
    if not isinstance(ident, list) or len(ident) != n_obj:
        raise SpecError(f"{where}.identity", "expected one unit arrow per object")
    ident = [_table_int(e, f"{where}.identity[{i}]", n_arr) for i, e in enumerate(ident)]
    comp = {}
    if not isinstance(tables["compose"], list):
        raise SpecError(f"{where}.compose", "expected a list of [b, a, c] triples")
    for i, row in enumerate(tables["compose"]):
        if not isinstance(row, list) or len(row) != 3:
            raise SpecError(f"{where}.compose[{i}]", "expected [b, a, c]")
        b, a, c = (_table_int(v, f"{where}.compose[{i}]", n_arr) for v in row)
        if (b, a) in comp and comp[(b, a)] != c:
            raise SpecError(f"{where}.compose[{i}]", f"composite ({b}, {a}) given twice")
        comp[(b, a)] = c
    try:
        g = cb.Groupoid(objects, source, target, comp, ident, names, name=name)
    except cb.GroupoidError as exc:
        raise SpecError(where, exc.args[0]) from exc
    return cb.GroupoidNerve(g)


def group_from_table(table, where: str, unit: int = 0) -> cb.GroupoidNerve:
    if not isinstance(table, list) or not table:
        raise SpecError(where, "expected a nonempty square table")
    size = len(table)
    for i, row in enumerate(table):
        if not isinstance(row, list) or len(row) != size:
            raise SpecError(f"{where}[{i}]", f"expected a row of length {size}")
        for j, v in enumerate(row):
            _table_int(v, f"{where}[{i}][{j}]", size)
    try:
        return cb.GroupoidNerve(cb.Groupoid.from_group_table(table, unit, name=f"G{size}"))
    except cb.GroupoidError as exc:
        raise SpecError(where, exc.args[0]) from exc


@dataclass
class Base:
    nerve: Any
    description: dict
    hashes: dict

    def encode(self, g) -> Any:
        return plain(g)

    def decode(self, data):
        if isinstance(self.nerve, cb.FinSSet):
            core, values = data
            return cb.Simplex(core, cb.PosetMap(tuple(values), self.nerve.dims[core]))
        x0, arrows = data
        return (x0, tuple(arrows))


def build_base(spec: ExperimentSpec) -> Base:
    raw = spec.base
    hashes: dict = {}
    if isinstance(raw, str):
        text = raw.strip()
        if text.startswith("Z/") and text[2:].isdigit() and int(text[2:]) >= 1:
            raw = {"kind": "group", "order": int(text[2:])}
        else:
            raise SpecError("base", f"unknown shorthand {json.dumps(raw)}; use 'Z/<order>' or an object")
    raw = _dict(raw, "base")
    kind = raw.get("kind")
    if kind == "group":
        if "table" in raw:
            nerve = group_from_table(raw["table"], "base.table", _int(raw.get("unit", 0), "base.unit", nonneg=True))
        else:
            nerve = cb.GroupoidNerve(cb.Groupoid.cyclic(_int(raw.get("order"), "base.order", positive=True)))
    elif kind == "pair":
        nerve = cb.GroupoidNerve(cb.Groupoid.pair(_int(raw.get("objects"), "base.objects", positive=True)))
    elif kind == "discrete":
        nerve = cb.GroupoidNerve(cb.Groupoid.discrete(_int(raw.get("objects"), "base.objects", positive=True)))
    elif kind == "groupoid":
        if "file" in raw:
            tables, h = read_json(spec.root / str(raw["file"]), "base.file")
            hashes["base.file"] = h
            nerve = ingest_groupoid(tables, "base.file")
        else:
            nerve = ingest_groupoid(raw.get("tables"), "base.tables")
    elif kind == "complex":
        if "file" not in raw:
            raise SpecError("base.file", "missing complex file")
        data, h = read_json(spec.root / str(raw["file"]), "base.file")
        hashes["base.file"] = h
        try:
            nerve = cb.FinSSet.from_json(_dict(data, "base.file"))
        except (KeyError, TypeError, IndexError, cb.CombinatoricsError) as exc:
            raise SpecError("base.file", f"malformed complex: {exc}") from exc
    else:
        raise SpecError("base.kind", "expected one of group, pair, discrete, groupoid, complex")
    return Base(nerve, raw, hashes)


# ---------------------------------------------------------------------------
# bundles


@dataclass
class BundleSetup:
    bundle: bd.VectorFibration
    top: int
    ruth: Optional[rt.Ruth] = None          # the representation behind a semidirect product
    hashes: dict = field(default_factory=dict)


def _dims(value, where: str) -> list[int]:
    dims = _int_list(value, where, nonneg=True)
    if not any(dims):
        raise SpecError(where, "all ranks are zero")
    return dims


def build_bundle(spec: ExperimentSpec, base: Base) -> BundleSetup:
    raw = spec.bundle
    kind = raw.get("kind")
    hashes: dict = {}
    ruth = None
    nerve = base.nerve
    if kind == "generator":
        dims = _dims(raw.get("dims"), "bundle.dims")
        V: bd.VectorFibration = bd.DirectSumBundle(nerve, dims, name="V")
        top = len(dims)
    elif kind == "semidirect":
        if "ruth_file" in raw:
            data, h = read_json(spec.root / str(raw["ruth_file"]), "bundle.ruth_file")
            hashes["bundle.ruth_file"] = h
            try:
                ruth = rt.TableRuth.from_json(nerve, _dict(data, "bundle.ruth_file"), base.decode)
            except (KeyError, TypeError, ValueError) as exc:
                raise SpecError("bundle.ruth_file", f"malformed representation: {exc}") from exc
        elif "random" in raw:
            rnd = _dict(raw["random"], "bundle.random")
            dims = _dims(rnd.get("dims"), "bundle.random.dims")
            if "seed" not in rnd:
                raise SpecError("bundle.random.seed", "seeds are mandatory")
            seed = _int(rnd["seed"], "bundle.random.seed")
            try:
                ruth = rt.random_ruth(nerve, dims, seed, character=bool(rnd.get("character", False)))
            except rt.RuthError as exc:
                raise SpecError("bundle.random", str(exc)) from exc
        else:
            raise SpecError("bundle", "semidirect needs ruth_file or random")
        report = rt.ruth_check(ruth, spec.caps.m, ruth.top or 0)
        if not report.ok or not report.unital:
            raise SpecError("bundle", "the representation fails the RUTH equations or unitality")
        try:
            V = sdp.semidirect(ruth, m_cap=spec.caps.m)
        except sdp.SdpError as exc:
            raise SpecError("bundle", str(exc)) from exc
        top = ruth.top or 0
    elif kind == "explicit":
        if "file" not in raw:
            raise SpecError("bundle.file", "missing bundle file")
        data, h = read_json(spec.root / str(raw["file"]), "bundle.file")
        hashes["bundle.file"] = h
        try:
            V = bd.TabulatedBundle.from_json(nerve, _dict(data, "bundle.file"), base.decode)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError("bundle.file", f"malformed bundle: {exc}") from exc
        bad = V.validate()
        if bad:
            raise SpecError("bundle.file", f"simplicial identity fails: {canonical(bad[0])}")
        s = V.strictness
        if s is None:
            s = bd.check_fibration(V, V.level + 1).strictness
        if s is None:
            raise SpecError("bundle.file", "fillers are not unique within the tabulated levels")
        top = max(s - 1, 0)
    else:
        raise SpecError("bundle.kind", "expected one of generator, semidirect, explicit")
    if "gauge_seed" in raw:
        V = bd.GaugedBundle(V, _int(raw["gauge_seed"], "bundle.gauge_seed"))
    return BundleSetup(V, top, ruth, hashes)


# ---------------------------------------------------------------------------
# checks and tasks


@dataclass
class Check:
    name: str
    ok: bool
    count: int = 0
    witnesses: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "ok": bool(self.ok), "count": self.count,
               "witnesses": plain(self.witnesses[:WITNESS_LIMIT])}
        if len(self.witnesses) > WITNESS_LIMIT:
            out["witnesses_total"] = len(self.witnesses)
        if self.data:
            out["data"] = plain(self.data)
        return out


@dataclass
class Context:
    spec: ExperimentSpec
    base: Base
    setup: BundleSetup
    out: Path
    verbose: bool
    artifacts: dict = field(default_factory=dict)
    _splits: dict = field(default_factory=dict)

    @property
    def bundle(self) -> bd.VectorFibration:
        return self.setup.bundle

    @property
    def m(self) -> int:
        return self.spec.caps.m

    @property
    def n(self) -> int:
        return self.spec.caps.n

    def splitting(self, seed: int, bundle: Optional[bd.VectorFibration] = None) -> sp.Splitting:
        bundle = bundle or self.bundle
        key = (id(bundle), seed)
        if key not in self._splits:
            self._splits[key] = sp.Splitting(cl.random_normal_cleavage(bundle, seed))
        return self._splits[key]

    def write(self, name: str, obj: Any):
        text = json.dumps(plain(obj), sort_keys=True, indent=1, ensure_ascii=True) + "\n"
        (self.out / name).write_text(text)
        self.artifacts[name] = hashlib.sha256(text.encode()).hexdigest()

    def log(self, msg: str):
        if self.verbose:
            click.echo(msg, err=True)


def _pairs(seeds: list[int]) -> list[tuple[int, int]]:
    if len(seeds) == 1:
        return [(seeds[0], seeds[0])]
    return list(zip(seeds, seeds[1:]))


def cochain_table(phi: rt.HomCochain, m_cap: int, n_cap: int, encode: Callable) -> list:
    rows = []
    for m in range(0, m_cap + 1):
        for g in phi.base.simplices(m):
            for n in range(0, n_cap + 1):
                mat = phi(m, g, n)
                if mat and any(any(r) for r in mat):
                    rows.append({"m": m, "simplex": encode(g), "n": n, "matrix": matrix_to_json(mat)})
    return rows


def task_check_fibration(ctx: Context) -> list[Check]:
    V = ctx.bundle
    up_to = ctx.m + 1
    rep = bd.check_fibration(V, up_to)
    checks = [Check("horn maps surjective", rep.surjective, up_to, rep.failures,
                    {"measured_strictness": rep.strictness, "declared_strictness": V.strictness})]
    if V.strictness is not None and rep.strictness is not None:
        checks.append(Check("declared strictness", rep.strictness <= V.strictness, 1,
                            [] if rep.strictness <= V.strictness else [[rep.strictness, V.strictness]]))
    bad = bd.simplicial_identity_defects(V, up_to)
    checks.append(Check("simplicial identities", not bad, up_to, bad))
    return checks


def _cleavage_checks(ctx: Context, seed: int) -> list[Check]:
    c = ctx.splitting(seed).cleavage
    out = []
    for label, fn in (("sections", cl.check_sections), ("normal", cl.is_normal)):
        rep = fn(c, ctx.m)
        out.append(Check(f"cleavage {seed} {label}", rep.ok, rep.checked, rep.failures))
    # splitting only needs normality; seeded cleavages are usually not coherent
    out[-1].data["coherent"] = cl.is_coherent(c, ctx.m).ok
    return out


def _unit_check(R: rt.Ruth, label: str) -> Check:
    base = R.base
    bad = []
    count = 0
    for x in base.simplices(0):
        one = bd.unit_simplex(base, x, 1)
        for n in R.degrees(R.top or 0):
            count += 1
            if R.tensor(1, one, n) != identity(R.dim(x, n)):
                bad.append([x, n])
    return Check(f"{label} R1(1x) = id", not bad, count, bad)


def task_split(ctx: Context) -> list[Check]:
    checks = []
    for seed in ctx.spec.seeds:
        S = ctx.splitting(seed)
        R = S.dold_kan_ruth(ctx.setup.top)
        rep = rt.ruth_check(R, ctx.m, ctx.n)
        nonzero = {m: any(any(any(r) for r in R.tensor(m, g, k)) for g in ctx.base.nerve.simplices(m)
                          for k in R.degrees(ctx.n)) for m in range(ctx.m + 1)}
        checks.append(Check(f"seed {seed} RUTH equations", rep.ok, rep.checked, rep.failures,
                            {"nonzero_tensors": nonzero, "dims": {str(n): [R.dim(x, n) for x in R.vertices()]
                                                                  for n in R.degrees(ctx.n)}}))
        checks.append(Check(f"seed {seed} unital", rep.unital, rep.checked, rep.unital_failures))
        checks.append(_unit_check(R, f"seed {seed}"))
        checks += _cleavage_checks(ctx, seed)
        ctx.write(f"split-{seed}.json", rt.tabulate(R, ctx.m, ctx.n).to_json(ctx.base.encode))
    return checks


def task_split_morphism(ctx: Context) -> list[Check]:
    V = ctx.bundle
    checks = []
    for s, t in _pairs(ctx.spec.seeds):
        if isinstance(V, bd.GaugedBundle):
            source_bundle = V.inner
            phi_map = lambda g: V.gauge(g)[0]
            label = f"gauge {s}->{t}"
        else:
            source_bundle = V
            phi_map = sp.identity_map(V)
            label = f"identity {s}->{t}"
        S1, S2 = ctx.splitting(s, source_bundle), ctx.splitting(t, V)
        phi, _ = sp.split_morphism(S1, S2, phi_map, ctx.setup.top)
        rep = rt.intertwiner_check(phi, ctx.m, ctx.n)
        checks.append(Check(f"{label} intertwiner equations", rep.equations_ok, ctx.m, rep.equation_witnesses))
        checks.append(Check(f"{label} vanishing on degenerate simplices", rep.vanishing_ok, ctx.m,
                            rep.vanishing_witnesses))
        bad = []
        count = 0
        dv, dw = S1.dold_kan, S2.dold_kan
        for x in ctx.base.nerve.simplices(0):
            for n in range(0, min(ctx.n, ctx.setup.top) + 1):
                count += 1
                cols = dv.dim(x, n)
                restricted = mat_mul(dw.projection(x, n),
                                     mat_mul(phi_map(bd.unit_simplex(ctx.base.nerve, x, n)), dv.inclusion(x, n), cols),
                                     cols) if cols and dw.dim(x, n) else phi(0, x, n)
                if phi(0, x, n) != restricted:
                    bad.append([x, n])
        checks.append(Check(f"{label} zeroth component is the restricted map", not bad, count, bad))
        ctx.write(f"split-morphism-{s}-{t}.json", cochain_table(phi, ctx.m, ctx.n, ctx.base.encode))
    return checks


def task_compare_cleavages(ctx: Context) -> list[Check]:
    checks = []
    for s, t in _pairs(ctx.spec.seeds):
        c1, c2 = ctx.splitting(s).cleavage, ctx.splitting(t).cleavage
        cmp = sp.compare_cleavages(c1, c2, ctx.setup.top, ctx.m)
        inv = cmp.inverse
        certificate = {"intertwiner": cmp.intertwiner_ok, "phi0_identity": cmp.phi0_is_identity,
                       "invertible": inv.invertible, "left_inverse": bool(inv.left_ok),
                       "right_inverse": bool(inv.right_ok), "certified_up_to": inv.certified_up_to}
        checks.append(Check(f"cleavages {s},{t} isomorphism certificate", cmp.ok, ctx.m, cmp.details,
                            certificate))
        artifact = {"seeds": [s, t], "certificate": certificate,
                    "forward": cochain_table(cmp.forward, ctx.m, ctx.setup.top, ctx.base.encode)}
        if inv.inverse is not None:
            artifact["inverse"] = cochain_table(inv.inverse, ctx.m, ctx.setup.top, ctx.base.encode)
        ctx.write(f"compare-{s}-{t}.json", artifact)
    return checks


def task_sdp_roundtrip(ctx: Context) -> list[Check]:
    E = ctx.setup.ruth
    if E is None:
        seed = ctx.spec.seeds[0]
        E = rt.tabulate(ctx.splitting(seed).dold_kan_ruth(ctx.setup.top), ctx.m, ctx.setup.top)
        origin = f"split of seed {seed}"
    else:
        origin = "bundle representation"
    Ebar = ctx.bundle.inner if isinstance(ctx.bundle, bd.GaugedBundle) and ctx.setup.ruth is not None \
        else sdp.semidirect(E, m_cap=ctx.m)
    checks = []
    fib = bd.check_fibration(Ebar, ctx.m + 1)
    checks.append(Check("semidirect product is a fibration", fib.ok, ctx.m + 1, fib.failures,
                        {"strictness": fib.strictness}))
    c = sdp.canonical_cleavage(Ebar)
    for label, fn in (("normal", cl.is_normal), ("coherent", cl.is_coherent)):
        rep = fn(c, ctx.m)
        checks.append(Check(f"canonical cleavage {label}", rep.ok, rep.checked, rep.failures))
    rep = sdp.roundtrip(E, ctx.m, Ebar)
    checks.append(Check("roundtrip tensors", rep.ok, rep.checked, rep.failures,
                        {"source": origin, "identification": rep.identification_ok,
                         "nonzero_tensors": rep.nonzero}))
    return checks


def task_invariant_suite(ctx: Context) -> list[Check]:
    checks = []
    report = cb.combinatorial_identity_report(min(ctx.m, 3), min(ctx.n, 2))
    for name, bad in report.items():
        checks.append(Check(f"combinatorics {name}", not bad, 1, bad))
    V = ctx.bundle
    bad = bd.simplicial_identity_defects(V, ctx.m + 1)
    checks.append(Check("bundle simplicial identities", not bad, ctx.m + 1, bad))
    dk = bd.check_dold_kan(V, ctx.m + 1)
    checks.append(Check("Dold-Kan layer", dk.ok, ctx.m + 1, dk.details,
                        {"moore_d2": dk.moore_d2, "normalized_d2": dk.normalized_d2,
                         "nor_chain_map": dk.nor_chain_map, "nor_retracts": dk.nor_retracts,
                         "homology_agrees": dk.homology_agrees}))
    for seed in ctx.spec.seeds:
        checks += _cleavage_checks(ctx, seed)
        R = ctx.splitting(seed).dold_kan_ruth(ctx.setup.top)
        checks.append(_unit_check(R, f"seed {seed}"))
        unit_bad = rt.unitality_failures(R, ctx.m, ctx.n)
        checks.append(Check(f"seed {seed} unital", not unit_bad, ctx.m, unit_bad))
    return checks


RUNNERS: dict[str, Callable[[Context], list[Check]]] = {
    "check-fibration": task_check_fibration,
    "split": task_split,
    "split-morphism": task_split_morphism,
    "compare-cleavages": task_compare_cleavages,
    "sdp-roundtrip": task_sdp_roundtrip,
    "invariant-suite": task_invariant_suite,
}

LIBRARY_ERRORS = (cb.CombinatoricsError, bd.BundleError, cl.CleavageError, rt.RuthError, sp.SplitError,
                  sdp.SdpError)


# ---------------------------------------------------------------------------
# orchestration


@dataclass
class RunResult:
    transcript: dict
    text: str
    ok: bool
    timings: dict


def run_spec(spec: ExperimentSpec, out: Path, verbose: bool = False, spec_hash: str = "") -> RunResult:
    base = build_base(spec)
    setup = build_bundle(spec, base)
    out.mkdir(parents=True, exist_ok=True)
    ctx = Context(spec, base, setup, out, verbose)
    results, timings = [], {}
    for task in spec.tasks:
        ctx.log(f"[{task}] running")
        start = time.perf_counter()
        try:
            checks = RUNNERS[task](ctx)
        except LIBRARY_ERRORS as exc:
            checks = [Check("task raised", False, 0, [f"{type(exc).__name__}: {exc}"])]
        elapsed = time.perf_counter() - start
        timings[task] = round(elapsed, 3)
        ok = all(c.ok for c in checks)
        ctx.log(f"[{task}] {'pass' if ok else 'FAIL'} in {elapsed:.2f}s")
        for c in checks:
            ctx.log(f"    {'pass' if c.ok else 'FAIL'} {c.name}")
        results.append({"task": task, "ok": ok, "checks": [c.to_json() for c in checks]})
    transcript = {
        "ok": all(r["ok"] for r in results),
        "input_hashes": {"spec": spec_hash, **base.hashes, **setup.hashes},
        "seeds": spec.seeds,
        "caps": {"m": spec.caps.m, "n": spec.caps.n},
        "base": {"description": base.description,
                 "simplices": {str(k): len(base.nerve.simplices(k)) for k in range(3)}},
        "bundle": {"source": spec.bundle, "name": setup.bundle.name, "kind": setup.bundle.kind,
                   "amplitude": setup.top},
        "tasks": results,
        "artifacts": dict(sorted(ctx.artifacts.items())),
    }
    text = json.dumps(plain(transcript), sort_keys=True, indent=1, ensure_ascii=True) + "\n"
    (out / spec.transcript_name).write_text(text)
    (out / "timings.json").write_text(json.dumps(timings, sort_keys=True, indent=1) + "\n")
    return RunResult(transcript, text, transcript["ok"], timings)


def run_file(path: Path, caps: Optional[str] = None, out: Optional[Path] = None,
             verbose: bool = False) -> RunResult:
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError("spec", f"cannot read {path}: {exc.strerror}") from exc
    spec = load_spec(text, path.parent)
    if caps is not None:
        spec.caps = parse_caps(caps, "--caps")
    if out is None:
        out = path.parent / (spec.output_dir or f"{path.stem}-out")
    spec_hash = digest(spec.raw)
    return run_spec(spec, out, verbose, spec_hash)


@click.group()
def main():
    """Split vector fibrations over groupoid nerves into representations up to homotopy."""


@main.command()
@click.argument("spec_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--caps", "caps", default=None, help="Override caps as 'm,n'.")
@click.option("--out", "out", default=None, type=click.Path(file_okay=False, path_type=Path),
              help="Output directory (defaults to output.dir of the spec file).")
@click.option("--verbose", is_flag=True, help="Progress and timings on stderr.")
def run(spec_file: Path, caps: Optional[str], out: Optional[Path], verbose: bool):
    """Run the tasks of SPEC_FILE and write a transcript."""
    try:
        result = run_file(spec_file, caps, out, verbose)
    except SpecError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(2)
    digest_hex = hashlib.sha256(result.text.encode()).hexdigest()
    for task in result.transcript["tasks"]:
        click.echo(f"{'pass' if task['ok'] else 'FAIL'} {task['task']}")
    click.echo(f"transcript sha256 {digest_hex}")
    sys.exit(0 if result.ok else 1)


if __name__ == "__main__":
    main()
