import json

import pytest
from hypothesis import given, settings, strategies as st

from ruthsplit import bundle as bd
from ruthsplit import cleavage as cl
from ruthsplit import combinatorics as cb
from ruthsplit.combinatorics import PosetMap
from ruthsplit.linalg import mat_vec


@pytest.fixture(scope="module")
def gauged(z2):
    return bd.GaugedBundle(bd.DirectSumBundle(z2, [1, 1]), seed=3)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_seeded_cleavages_are_normal_sections(gauged, seed):
    c = cl.random_normal_cleavage(gauged, seed)
    assert cl.check_sections(c, 3).ok
    assert cl.is_normal(c, 3).ok


def test_distinct_seeds_give_distinct_cleavages(gauged, z2):
    a, b = cl.random_normal_cleavage(gauged, 1), cl.random_normal_cleavage(gauged, 2)
    g = z2.simplices(2)[-1]
    assert a.section(g, 0) != b.section(g, 0)


def test_raw_cleavage_is_not_normal(gauged):
    raw = cl.Cleavage(gauged, seed=7, normal=False)
    assert cl.check_sections(raw, 2).ok
    assert not cl.is_normal(raw, 2).ok


def test_coherence_witnesses(gauged, z2):
    rep = cl.is_coherent(cl.random_normal_cleavage(gauged, 7), 3)
    assert not rep.ok
    g, k0, k1 = rep.failures[0]
    assert z2.dim_of(g) >= 2 and k0 == 0 and 0 < k1 < z2.dim_of(g)


def test_section_table_roundtrip(gauged, z2):
    c = cl.random_normal_cleavage(gauged, 5)
    enc = lambda g: [g[0], list(g[1])]
    data = json.loads(cl.dump_sections(c, enc, 2))
    back = cl.TableCleavage.from_json(gauged, data, lambda s: (s[0], tuple(s[1])))
    for g in z2.simplices(2):
        assert back.section(g, 1) == c.section(g, 1)


def test_image_cleavage_rejects_kernel_vectors(z2):
    V = bd.DirectSumBundle(z2, [1, 1])
    g = z2.simplices(2)[-1]
    ker = V.kernel_of_rho(g, 0)
    assert ker
    bad = cl.ImageCleavage(V, lambda h, k: ker)
    with pytest.raises(cl.CleavageError):
        bad.section(g, 0)


def test_fill_reproduces_a_degenerate_family(gauged, z2):
    # the family θ -> g θ on Δ^n, pulled back to Δ^n × I, is the unique normal fill
    for n in range(4):
        g = z2.simplices(n)[-1]
        c = cl.random_normal_cleavage(gauged, 2)
        label = lambda p: p[0]
        known = lambda core, g=g, n=n: gauged.act(g, PosetMap(tuple(p[0] for p in core), n))
        pl = cl.pi_fill(c, g, label, gauged.dim(g), n, 1, known)
        for ch in cl.product_chains(n, cb.cube(1)):
            assert pl.value(ch) == known(ch)


SHAPES = [(0, 1), (1, 0), (1, 1), (2, 0), (0, 2)]


def test_prism_fill_is_stable_under_structure_maps(gauged):
    c = cl.random_normal_cleavage(gauged, 7)
    checked, bad = cl.prism_lemma_defects(c, SHAPES, max_dim=3)
    assert checked > 100 and bad == []


def test_prism_check_detects_a_non_normal_cleavage(gauged):
    raw = cl.Cleavage(gauged, seed=7, normal=False)
    _, bad = cl.prism_lemma_defects(raw, [(0, 1)], max_dim=3)
    assert any(name.startswith("upsilon0") for *_, name, _ in bad)


def test_kappa_family_sizes():
    names = [k[0] for k in cl.kappa_family(1, 2)]
    # 2 degeneracies, 2 faces, 4 cube faces, 3 cube degeneracies, 2 permutations
    assert len(names) == 13
    # one degeneracy, one cube degeneracy and the empty permutation
    assert len(cl.kappa_family(0, 0)) == 3


def test_permutation_and_face_fill(gauged, z2):
    import itertools
    c = cl.random_normal_cleavage(gauged, 7)
    for n in (0, 1):
        for m in (1, 2):
            g = z2.simplices(m)[-1]
            w = cl.generic_lift(gauged, g, lambda p: cb.alpha(p[1]), n, m, seed=11)
            chains = cl.product_chains(n, cb.cube(m))
            for i in range(1, m + 1):
                for theta in itertools.permutations(range(1, m + 1)):
                    assert cl.permutation_defects(c, w, n, m, i, theta, chains) == []
                wf = cl.pi_fill(c, g, w.label, w.cols, n, m, w.value, position=i)
                for j in range(n + 1):
                    assert cl.face_fill_degeneracy_defects(
                        c, wf, n, m, i, j, cl.product_chains(n + 1, cb.cube(m))) == []


@pytest.mark.parametrize("n,m", [(0, 1), (1, 1), (0, 2)])
def test_sheet_and_plus_fills(gauged, z2, n, m):
    c = cl.random_normal_cleavage(gauged, 7)
    g = z2.simplices(m)[-1]
    w = cl.generic_plus_lift(gauged, g, n, m, seed=5)
    for a in range(1, m + 1):
        chains = cl.product_chains(n, cb.interpolation_sheet(m, a))
        assert cl.sheet_factorization_defects(c, w, n, m, a, chains) == []
        wa = cl.SheetLift(c, g, w.label, w.cols, n, m, a, w.value)
        assert cl.sheet_eta_defects(c, wa, n, m, a, cl.product_chains(n, cb.cube(m + 1))) == []
        # an arbitrary lift is not invariant, so the check has teeth
        assert cl.sheet_eta_defects(c, w, n, m, a, cl.product_chains(n, cb.cube(m + 1)))
    wp = cl.PlusLift(c, g, w.label, w.cols, n, m, w.value)
    for j in range(n + 1):
        assert cl.plus_fill_degeneracy_defects(
            c, wp, n, m, j, cl.product_chains(n + 1, cb.interpolation(m))) == []
    for i in range(1, m + 1):
        assert cl.plus_cube_degeneracy_defects(
            c, wp, n, m, i, cl.product_chains(n, cb.interpolation(m + 1))) == []
