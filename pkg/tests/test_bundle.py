import pytest
from hypothesis import given, settings, strategies as st

from ruthsplit import bundle as bd
from ruthsplit import combinatorics as cb
from ruthsplit.linalg import Q, identity, mat_mul, mat_sub, mat_zero


class ConstantBundle(bd.VectorFibration):
    """``Q^d`` over every simplex, every structure map the identity."""

    kind = "constant"

    def __init__(self, base, d):
        super().__init__(base, "const")
        self.d = d

    def _dim(self, g):
        return self.d

    def _act(self, g, theta):
        return identity(self.d)


def test_direct_sum_ranks(z2):
    one = bd.DirectSumBundle(z2, [1])
    assert [one.dim(z2.simplices(n)[0]) for n in range(4)] == [1, 2, 3, 4]
    two = bd.DirectSumBundle(z2, [1, 1])
    assert two.dim(z2.simplices(2)[0]) == 6
    zero = bd.DirectSumBundle(z2, [0, 0])
    assert all(zero.dim(g) == 0 for g in z2.simplices(2))
    assert bd.check_fibration(zero, 2).ok


def test_direct_sum_kernel_of_horn_map(z2):
    V = bd.DirectSumBundle(z2, [1, 1])
    for g in z2.simplices(2):
        for k in range(3):
            ker = bd.kernel(V.rho(g, k), V.dim(g)) if V.dim(g) else []
            span = V.kernel_of_rho(g, k)
            joint = bd.rank(tuple(zip(*(ker + span)))) if ker else 0
            assert len(ker) == len(span) == joint


def test_moore_differential_in_degree_one(z2):
    V = bd.GaugedBundle(bd.DirectSumBundle(z2, [1, 1]), seed=4)
    x = z2.simplices(0)[0]
    g = V.unit(x, 1)
    assert bd.moore_differential(V, x, 1) == mat_sub(V.face(g, 0), V.face(g, 1))


def test_constant_bundle(point, z2):
    for base in (point, z2):
        V = ConstantBundle(base, 2)
        assert bd.check_fibration(V, 3).ok
        x = base.simplices(0)[0]
        for n in range(1, 4):
            d = bd.moore_differential(V, x, n)
            # an alternating sum of n+1 identities
            assert d == (mat_zero(2, 2) if n % 2 else tuple(tuple((-1) ** (n - 1) * e for e in row) for row in identity(2)))
        dk = bd.DoldKan(V)
        assert dk.dim(x, 0) == 2
        assert [dk.dim(x, n) for n in range(1, 4)] == [0, 0, 0]


def test_normalization_low_degrees(z2):
    V = bd.GaugedBundle(bd.DirectSumBundle(z2, [1, 2]), seed=9)
    dk = bd.DoldKan(V)
    x = z2.simplices(0)[0]
    assert dk.nor(x, 0) == identity(V.dim(x))
    g1 = V.unit(x, 1)
    d = V.dim(g1)
    expected = mat_sub(identity(d), mat_mul(V.degeneracy(x, 0), V.face(g1, 1), d))
    assert dk.nor(x, 1) == expected
    assert dk.dim(x, 0) == V.dim(x)


def test_broken_bundle_is_caught(z2):
    V = bd.DirectSumBundle(z2, [1, 1])
    g = z2.simplices(2)[3]
    broken = bd.BrokenBundle(V, g, 1)
    assert bd.simplicial_identity_defects(broken, 3)
    rep = bd.check_fibration(broken, 3)
    assert not rep.ok
    assert all(len(f) == 5 and f[0] >= 1 for f in rep.failures)
    assert bd.check_fibration(V, 3).ok and not bd.simplicial_identity_defects(V, 3)


def test_fibration_strictness(z2):
    assert bd.check_fibration(bd.DirectSumBundle(z2, [2]), 3).strictness == 2
    assert bd.check_fibration(bd.DirectSumBundle(z2, [1, 1]), 4).strictness == 3


def test_tabulated_snapshot_roundtrip(z2):
    V = bd.GaugedBundle(bd.DirectSumBundle(z2, [1]), seed=2)
    T = bd.TabulatedBundle.snapshot(V, 3)
    assert T.validate() == []
    data = T.to_json(lambda g: [g[0], list(g[1])])
    back = bd.TabulatedBundle.from_json(z2, data, lambda s: (s[0], tuple(s[1])))
    for n in range(1, 5):
        for g in z2.simplices(n):
            for i in range(n + 1):
                assert back.face(g, i) == T.face(g, i)
    # above the table the matching-tuple extension is still a bundle
    assert not bd.simplicial_identity_defects(back, 4)


def test_tabulated_missing_fiber_is_rejected(z2):
    V = bd.DirectSumBundle(z2, [1])
    data = bd.TabulatedBundle.snapshot(V, 1).to_json(lambda g: [g[0], list(g[1])])
    data["levels"][1]["simplices"].pop()
    with pytest.raises(bd.BundleError, match="missing fiber"):
        bd.TabulatedBundle.from_json(z2, data, lambda s: (s[0], tuple(s[1])))


BASES = {"Z/2": cb.Groupoid.cyclic(2), "Pair(2)": cb.Groupoid.pair(2)}


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(sorted(BASES)), st.lists(st.integers(0, 2), min_size=1, max_size=3),
       st.integers(0, 10_000))
def test_dold_kan_layer_on_seeded_bundles(base_name, dims, seed):
    nerve = cb.GroupoidNerve(BASES[base_name])
    V = bd.GaugedBundle(bd.DirectSumBundle(nerve, dims), seed=seed)
    rep = bd.check_dold_kan(V, 3)
    assert rep.ok, rep.details
