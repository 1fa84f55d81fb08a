"""One test per acceptance criterion, each printing a single pass/FAIL line."""

import json
import time
from pathlib import Path

import pytest

from ruthsplit import bundle as bd
from ruthsplit import cleavage as cl
from ruthsplit import cli
from ruthsplit import combinatorics as cb
from ruthsplit import ruth as rt
from ruthsplit import sdp
from ruthsplit import split as sp
from ruthsplit.bundle import source_of, unit_simplex
from ruthsplit.linalg import identity, inverse, mat_mul

SPECS = Path(__file__).resolve().parent.parent / "scripts" / "specs"


@pytest.fixture
def verdict(capsys):
    def report(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'pass' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return report


def nerve(kind, n):
    g = cb.Groupoid.cyclic(n) if kind == "Z" else cb.Groupoid.pair(n)
    return cb.GroupoidNerve(g)


def test_criterion_1_combinatorial_identities(verdict):
    start = time.perf_counter()
    report = cb.combinatorial_identity_report(m_cap=3, n_cap=2)
    elapsed = time.perf_counter() - start
    bad = {k: len(v) for k, v in report.items() if v}
    verdict(1, not bad and elapsed < 1.0, f"defects {bad or 'none'}, {elapsed:.2f}s")


def test_criterion_2_dold_kan_layer(verdict):
    start = time.perf_counter()
    cases = [(kind, order, dims, seed)
             for kind, order in (("Z", 2), ("Pair", 2))
             for dims, seed in (([1], 1), ([2], 2), ([1, 1], 3), ([2, 1], 4), ([1, 0, 1], 5), ([1, 1, 1], 6))]
    failed = []
    for kind, order, dims, seed in cases:
        V = bd.GaugedBundle(bd.DirectSumBundle(nerve(kind, order), dims), seed=seed)
        rep = bd.check_dold_kan(V, 3)
        if not rep.ok:
            failed.append((kind, dims, seed, rep.details[:2]))
    elapsed = time.perf_counter() - start
    verdict(2, not failed and elapsed < 10, f"{len(cases)} bundles, failures {failed or 'none'}, {elapsed:.2f}s")


def test_criterion_3_prism_fill_lemmas(verdict):
    start = time.perf_counter()
    G = nerve("Z", 2)
    V = bd.GaugedBundle(bd.DirectSumBundle(G, [1, 1]), seed=3)
    c = cl.random_normal_cleavage(V, 7)
    shapes = [(n, k) for n in range(4) for k in range(4) if n + k + 1 <= 4]
    checked, bad = cl.prism_lemma_defects(c, shapes, max_dim=4)
    elapsed = time.perf_counter() - start
    verdict(3, not bad and elapsed < 30, f"{checked} checks, failures {bad[:3] or 'none'}, {elapsed:.2f}s")


def test_criterion_4_split_representation(verdict):
    details, ok = [], True
    for kind, order, dims in (("Z", 2, [1, 1]), ("Pair", 2, [1, 1]), ("Z", 3, [2, 1])):
        start = time.perf_counter()
        G = nerve(kind, order)
        V = bd.GaugedBundle(bd.DirectSumBundle(G, dims), seed=5)
        S = sp.Splitting(cl.random_normal_cleavage(V, 1), check=True)
        moore = sp.moore_ruth_defects(S.moore(3), 3)
        R = S.dold_kan_ruth(len(dims))
        rep = rt.ruth_check(R, 3, len(dims))
        units = all(R.tensor(1, unit_simplex(G, x, 1), n) == identity(R.dim(x, n))
                    for x in G.simplices(0) for n in range(len(dims) + 1))
        elapsed = time.perf_counter() - start
        good = not moore and rep.ok and rep.unital and units and elapsed < 120
        ok &= good
        details.append(f"{kind}/{order} {dims} {'ok' if good else 'bad'} {elapsed:.1f}s")
    # closed forms on a 2-strict bundle
    G = nerve("Pair", 2)
    W = bd.GaugedBundle(bd.DirectSumBundle(G, [1]), seed=3)
    S = sp.Splitting(cl.random_normal_cleavage(W, 2))
    vb = sp.vb_groupoid_defects(S)
    r2 = any(any(any(r) for r in S.dold_kan_tensor(2, g, 0)) for g in G.simplices(2))
    ok &= not vb and bd.check_fibration(W, 3).strictness == 2
    details.append(f"closed forms {len(vb)} defects, R2 nonzero {r2}")
    # an honest representation from a bundle concentrated in one degree
    Z3 = nerve("Z", 3)
    U = bd.GaugedBundle(sdp.semidirect(rt.random_ruth(Z3, [2], seed=3)), seed=2)
    mult = sp.multiplicativity_defects(sp.Splitting(cl.random_normal_cleavage(U, 4)).dold_kan_ruth(0))
    ok &= not mult
    details.append(f"multiplicativity {len(mult)} defects")
    verdict(4, ok, "; ".join(details))


def test_criterion_5_split_morphism(verdict):
    details, ok = [], True
    for kind in ("Z", "Pair"):
        G = nerve(kind, 2)
        V = bd.GaugedBundle(bd.DirectSumBundle(G, [1, 1]), seed=3)
        S1 = sp.Splitting(cl.random_normal_cleavage(V.inner, 2))
        S2 = sp.Splitting(cl.random_normal_cleavage(V, 7))
        phi_map = lambda g, V=V: V.gauge(g)[0]
        phi, _ = sp.split_morphism(S1, S2, phi_map, 2, check=True)
        rep = rt.intertwiner_check(phi, 3, 2)
        dv, dw = S1.dold_kan, S2.dold_kan
        zero_bad = []
        for x in G.simplices(0):
            for n in range(3):
                cols = dv.dim(x, n)
                restricted = mat_mul(dw.projection(x, n),
                                     mat_mul(phi_map(unit_simplex(G, x, n)), dv.inclusion(x, n), cols), cols)
                if phi(0, x, n) != restricted:
                    zero_bad.append((x, n))
        good = rep.equations_ok and rep.vanishing_ok and not zero_bad
        ok &= good
        details.append(f"{kind}/2 equations {rep.equations_ok} vanishing {rep.vanishing_ok} "
                       f"zeroth {'ok' if not zero_bad else zero_bad}")
    verdict(5, ok, "; ".join(details))


def test_criterion_6_cleavage_independence(verdict):
    pairs = [(1, 2), (3, 4), (5, 6), (7, 11), (13, 17)]
    results = []
    for kind, gauge in (("Z", 3), ("Pair", 5)):
        V = bd.GaugedBundle(bd.DirectSumBundle(nerve(kind, 2), [1, 1]), seed=gauge)
        for s, t in pairs:
            cmp = sp.compare_cleavages(cl.random_normal_cleavage(V, s), cl.random_normal_cleavage(V, t), 2, 3)
            results.append(((kind, s, t), cmp.ok))
    bad = [key for key, good in results if not good]
    verdict(6, not bad, f"{len(results)} comparisons, failures {bad or 'none'}")


def _phi0_invertible(phi, n_cap):
    E, F = phi.source, phi.target
    for x in E.vertices():
        for n in range(n_cap + 1):
            if E.dim(x, n) != F.dim(x, n):
                return False
            if E.dim(x, n) and inverse(phi(0, x, n)) is None:
                return False
    return True


def test_criterion_7_ruth_algebra(verdict):
    G = nerve("Z", 2)
    E, F = rt.random_ruth(G, [1, 2], 3), rt.random_ruth(G, [1, 2], 4)
    algebra = True
    for deg in (-1, 0, 1):
        for seed in range(3):
            phi = rt.random_cochain(E, F, deg, seed)
            psi = rt.random_cochain(F, E, deg, seed + 50)
            algebra &= rt.is_zero_cochain(rt.D(rt.D(phi)), 3, 1).equal
            lhs = rt.D(rt.compose(phi, psi))
            rhs = rt.linear_combination([(1, rt.compose(rt.D(phi), psi)),
                                         (rt.sign(deg), rt.compose(phi, rt.D(psi)))])
            algebra &= rt.compare(lhs, rhs, 3, 1).equal
    S, phi = rt.transport(E, rt.random_cochain(E, E, 0, 11, invertible_zero=True))
    cone = rt.ruth_check(rt.mapping_cone(phi), 3, 1)
    candidates = [phi, rt.zero_cochain(E, S, 0)]
    candidates += [rt.D(rt.random_cochain(E, S, -1, s)) for s in range(3)]
    candidates += [rt.linear_combination([(1, phi), (1, rt.D(rt.random_cochain(E, S, -1, s)))]) for s in range(3)]
    decisions = []
    for cand in candidates:
        expected = _phi0_invertible(cand, 1)
        res = rt.invert(cand, 3)
        agrees = res.invertible == expected and (not expected or (res.left_ok and res.right_ok))
        decisions.append((expected, agrees))
    agree = all(a for _, a in decisions)
    mix = {e for e, _ in decisions} == {True, False}
    verdict(7, algebra and cone.ok and cone.unital and agree and mix,
            f"D^2 and Leibniz {algebra}, cone {cone.ok}, invert decisions "
            f"{sum(a for _, a in decisions)}/{len(decisions)} agree")


def test_criterion_8_semidirect_product(verdict):
    start = time.perf_counter()
    details, ok = [], True
    for kind in ("Z", "Pair"):
        G = nerve(kind, 2)
        E = rt.random_ruth(G, [1, 2], seed=4)
        F, phi = rt.transport(E, rt.random_cochain(E, E, 0, 9, invertible_zero=True))
        H, psi = rt.transport(F, rt.random_cochain(F, F, 0, 10, invertible_zero=True))
        Eb, Fb, Hb = sdp.semidirect(E), sdp.semidirect(F), sdp.semidirect(H)
        fib = bd.check_fibration(Eb, 4).ok
        c = sdp.canonical_cleavage(Eb)
        cleave = cl.is_normal(c, 3).ok and cl.is_coherent(c, 3).ok
        pb = sdp.transport_intertwiner(phi, Eb, Fb, m_cap=3)
        qb = sdp.transport_intertwiner(psi, Fb, Hb, m_cap=3)
        both = sdp.transport_intertwiner(rt.compose(psi, phi), Eb, Hb, m_cap=3)
        comp = sdp.compose_morphisms(qb, pb)
        one = sdp.transport_intertwiner(rt.identity_cochain(E), Eb, Eb)
        functor = (all(comp(g) == both(g) for n in range(4) for g in G.simplices(n))
                   and all(one(g) == identity(Eb.dim(g)) for n in range(4) for g in G.simplices(n)))
        omega = rt.random_cochain(E, F, -1, 12)
        psi2 = rt.linear_combination([(1, phi), (1, rt.D(omega))])
        Hom = sdp.transport_homotopy(omega, phi, psi2, Eb, Fb, m_cap=3)
        p2b = sdp.transport_intertwiner(psi2, Eb, Fb, m_cap=3)
        homotopy = not sdp.homotopy_defects(Hom, 3) and not sdp.endpoint_defects(Hom, pb, p2b, 3)
        rep = sdp.roundtrip(E, 3, Eb)
        roundtrip = rep.ok and bool(rep.nonzero.get(2))
        good = fib and cleave and functor and homotopy and roundtrip
        ok &= good
        details.append(f"{kind}/2 fibration {fib} cleavage {cleave} functorial {functor} "
                       f"homotopy {homotopy} roundtrip {roundtrip}")
    elapsed = time.perf_counter() - start
    verdict(8, ok and elapsed < 60, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_9_shuffle_identities(verdict):
    G = nerve("Z", 2)
    V = bd.GaugedBundle(bd.DirectSumBundle(G, [1, 1]), seed=3)
    S1 = sp.Splitting(cl.random_normal_cleavage(V, 7))
    S2 = sp.Splitting(cl.random_normal_cleavage(V, 11))
    ms = sp.MorphismSplitting(S1, S2, sp.identity_map(V))
    x = G.simplices(0)[0]
    tally: dict = {}

    def record(name, defect):
        seen, bad = tally.get(name, (0, 0))
        tally[name] = (seen + 1, bad + bool(defect))

    start = time.perf_counter()
    for n in range(3):
        for m in range(4):
            if n + m <= 4:
                T = cl.generic_lift(V, x, lambda p: 0, n, m, seed=n * 10 + m)
                record("boundary", sp.boundary_shuffle_defect(T, n, m))
    for m in range(2, 5):
        for n in range(3):
            if n + m <= 5:
                T = cl.generic_plus_lift(V, x, n, m - 1, seed=3, label=lambda p: 0)
                record("interpolation", sp.interpolation_boundary_defect(T, n, m))
    for m in range(1, 4):
        for k in range(m):
            for h in G.simplices(m - k)[-2:]:
                for n in range(3):
                    T = cl.generic_lift(V, source_of(G, h), lambda p: 0, n, k, seed=5)
                    record("prism", sp.prism_shuffle_defect(S1, h, T, n, k))
                    record("plus-prism", sp.plus_prism_shuffle_defect(ms, h, T, n, k))
    for m in range(3, 5):
        for i in range(2, m):
            for a in range(1, i):
                for h in G.simplices(m - i)[-2:]:
                    for n in range(2):
                        T = cl.generic_plus_lift(V, source_of(G, h), n, i - 1, seed=9, label=lambda p: 0)
                        record("sheet-prism", sp.sheet_prism_shuffle_defect(S2, h, T, n, i, a))
    elapsed = time.perf_counter() - start
    bad = {k: b for k, (_, b) in tally.items() if b}
    counts = ", ".join(f"{k} {s}" for k, (s, _) in tally.items())
    verdict(9, not bad, f"{counts}; failures {bad or 'none'}; {elapsed:.0f}s")


def test_criterion_10_reproducible_transcripts(verdict, tmp_path):
    spec = SPECS / "pair_all_tasks.json"
    a = cli.run_file(spec, out=tmp_path / "a")
    b = cli.run_file(spec, out=tmp_path / "b")
    same = (tmp_path / "a" / "transcript.json").read_bytes() == (tmp_path / "b" / "transcript.json").read_bytes()
    artifacts = json.loads(a.text)["artifacts"]
    same_artifacts = all((tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
                         for name in artifacts)
    verdict(10, same and same_artifacts and a.ok,
            f"transcript identical {same}, {len(artifacts)} artifacts identical {same_artifacts}")
