import pytest

from ruthsplit import bundle as bd
from ruthsplit import cleavage as cl
from ruthsplit import combinatorics as cb
from ruthsplit import ruth as rt
from ruthsplit import sdp
from ruthsplit import split as sp
from ruthsplit.bundle import unit_simplex
from ruthsplit.linalg import identity, mat_mul


@pytest.fixture(scope="module")
def gauged(z2):
    return bd.GaugedBundle(bd.DirectSumBundle(z2, [1, 1]), seed=3)


@pytest.fixture(scope="module")
def split7(gauged):
    return sp.Splitting(cl.random_normal_cleavage(gauged, 7), check=True)


def test_moore_representation(split7):
    assert sp.moore_ruth_defects(split7.moore(3), 3) == []


def test_dold_kan_representation_is_unital(split7, z2):
    R = split7.dold_kan_ruth(2)
    rep = rt.ruth_check(R, 3, 2)
    assert rep.ok and rep.unital
    for x in z2.simplices(0):
        for n in range(3):
            one = unit_simplex(z2, x, 1)
            assert R.tensor(1, one, n) == identity(R.dim(x, n))


def test_split_tensors_are_not_strict(split7, z2):
    nonzero = [g for g in z2.simplices(2)
               if any(any(row) for row in split7.dold_kan_tensor(2, g, 0))]
    assert nonzero


def test_boundary_prescriptions_agree(gauged, z2):
    # check=True evaluates every overlapping prescription and raises on a clash
    S = sp.Splitting(cl.random_normal_cleavage(gauged, 3), check=True)
    for g in z2.simplices(3):
        S.lift(g, 1).value(((0, (0, 0, 0)), (1, (1, 1, 1))))


@pytest.mark.parametrize("make", [
    lambda G: bd.GaugedBundle(bd.DirectSumBundle(G, [1]), seed=3),
    lambda G: bd.GaugedBundle(bd.DirectSumBundle(G, [2]), seed=5),
    lambda G: bd.GaugedBundle(sdp.semidirect(rt.random_ruth(G, [1, 1], seed=2)), seed=1),
], ids=["sum1", "sum2", "semidirect"])
def test_vb_groupoid_closed_forms(pair2, make):
    V = make(pair2)
    assert bd.check_fibration(V, 3).strictness <= 2
    S = sp.Splitting(cl.random_normal_cleavage(V, 1))
    assert sp.vb_groupoid_defects(S) == []


def test_single_degree_bundle_gives_an_honest_representation(z3):
    W = bd.GaugedBundle(sdp.semidirect(rt.random_ruth(z3, [2], seed=3)), seed=2)
    # fibers do not grow with the simplex: every horn map is an isomorphism
    assert bd.check_fibration(W, 3).strictness == 0
    R = sp.Splitting(cl.random_normal_cleavage(W, 4)).dold_kan_ruth(0)
    assert sp.multiplicativity_defects(R) == []
    # a nonmultiplicative table is caught
    T = rt.tabulate(R, 2, 0)
    g = z3.simplices(1)[-1]
    T.table[(1, g, 0)] = tuple(tuple(2 * v for v in row) for row in T.tensor(1, g, 0))
    T._cache.clear()
    assert sp.multiplicativity_defects(T)


def test_split_morphism_of_a_gauge(gauged, split7, z2):
    inner = gauged.inner
    S1 = sp.Splitting(cl.random_normal_cleavage(inner, 2))
    phi_map = lambda g: gauged.gauge(g)[0]
    phi, ms = sp.split_morphism(S1, split7, phi_map, 2, check=True)
    rep = rt.intertwiner_check(phi, 3, 2)
    assert rep.ok
    dv, dw = S1.dold_kan, split7.dold_kan
    for x in z2.simplices(0):
        for n in range(3):
            cols = dv.dim(x, n)
            restricted = mat_mul(dw.projection(x, n),
                                 mat_mul(phi_map(unit_simplex(z2, x, n)), dv.inclusion(x, n), cols), cols)
            assert phi(0, x, n) == restricted


def test_comparing_a_cleavage_with_itself(gauged, z2):
    c = cl.random_normal_cleavage(gauged, 7)
    cmp = sp.compare_cleavages(c, c, 2, 3)
    assert cmp.ok
    for m in (1, 2, 3):
        for g in z2.simplices(m):
            for n in range(3):
                assert not any(any(row) for row in cmp.forward(m, g, n))


@pytest.mark.parametrize("seeds", [(1, 2), (7, 11)])
def test_distinct_cleavages_are_isomorphic(gauged, seeds):
    c1, c2 = (cl.random_normal_cleavage(gauged, s) for s in seeds)
    cmp = sp.compare_cleavages(c1, c2, 2, 3)
    assert cmp.intertwiner_ok and cmp.phi0_is_identity
    assert cmp.inverse.invertible and cmp.inverse.left_ok and cmp.inverse.right_ok


def test_compare_needs_one_bundle(gauged, z2):
    other = bd.DirectSumBundle(z2, [1, 1])
    with pytest.raises(sp.SplitError):
        sp.compare_cleavages(cl.random_normal_cleavage(gauged, 1), cl.random_normal_cleavage(other, 1), 2, 2)


@pytest.mark.parametrize("n,m", [(0, 1), (1, 1), (0, 2), (1, 2)])
def test_shuffle_sum_boundary_identity(gauged, z2, n, m):
    x = z2.simplices(0)[0]
    T = cl.generic_lift(gauged, x, lambda p: 0, n, m, seed=n * 10 + m)
    assert not sp.boundary_shuffle_defect(T, n, m)


@pytest.mark.parametrize("n,m", [(0, 2), (1, 2), (0, 3)])
def test_interpolation_boundary_identity(gauged, z2, n, m):
    x = z2.simplices(0)[0]
    T = cl.generic_plus_lift(gauged, x, n, m - 1, seed=3, label=lambda p: 0)
    assert not sp.interpolation_boundary_defect(T, n, m)


@pytest.mark.parametrize("m,k,n", [(1, 0, 1), (2, 1, 0), (2, 1, 1), (2, 0, 2)])
def test_prism_shuffle_identities(gauged, z2, m, k, n):
    c1, c2 = cl.random_normal_cleavage(gauged, 7), cl.random_normal_cleavage(gauged, 11)
    S1, S2 = sp.Splitting(c1), sp.Splitting(c2)
    ms = sp.MorphismSplitting(S1, S2, sp.identity_map(gauged))
    h = z2.simplices(m - k)[-1]
    T = cl.generic_lift(gauged, bd.source_of(z2, h), lambda p: 0, n, k, seed=5)
    assert not sp.prism_shuffle_defect(S1, h, T, n, k)
    assert not sp.plus_prism_shuffle_defect(ms, h, T, n, k)


def test_sheet_prism_shuffle_identity(gauged, z2):
    S = sp.Splitting(cl.random_normal_cleavage(gauged, 11))
    h = z2.simplices(1)[-1]
    T = cl.generic_plus_lift(gauged, bd.source_of(z2, h), 0, 1, seed=9, label=lambda p: 0)
    assert not sp.sheet_prism_shuffle_defect(S, h, T, 0, 2, 1)
