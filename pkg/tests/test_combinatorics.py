import itertools

import pytest
from hypothesis import given, strategies as st

from ruthsplit import combinatorics as cb
from ruthsplit.combinatorics import PosetMap


# ---------------------------------------------------------------------------
# poset maps

def test_codegeneracy_after_coface_is_identity():
    for n in range(1, 4):
        for j in range(n):
            assert cb.compose(cb.upsilon(j, n - 1), cb.delta(j, n)).is_identity()
            assert cb.compose(cb.upsilon(j, n - 1), cb.delta(j + 1, n)).is_identity()


def test_compose_two_cofaces_by_hand():
    # [0] -> [1] -> [2]: 0 -> 1 (skip 0) -> 2 (skip 1)
    theta = cb.compose(cb.delta(1, 2), cb.delta(0, 1))
    assert theta.values == (2,)
    assert cb.compose(cb.delta(1, 2), PosetMap((0,), 1)).values == (0,)


def test_compose_two_codegeneracies_is_constant():
    assert cb.compose(cb.upsilon(0, 0), cb.upsilon(0, 1)).values == (0, 0, 0)


def test_compose_rejects_mismatch():
    with pytest.raises(cb.CombinatoricsError):
        cb.compose(cb.delta(0, 2), cb.delta(0, 3))


def test_epi_mono_factor_by_hand():
    epi, mono = cb.epi_mono_factor(PosetMap((0, 0, 2), 2))
    assert epi.values == (0, 0, 1) and mono.values == (0, 2)
    ident = cb.identity_map(2)
    assert cb.epi_mono_factor(ident) == (ident, ident)
    ups = cb.upsilon(0, 1)
    epi, mono = cb.epi_mono_factor(ups)
    assert epi == ups and mono.is_identity()


@st.composite
def poset_maps(draw, max_dim=4):
    m = draw(st.integers(0, max_dim))
    n = draw(st.integers(0, max_dim))
    vals = sorted(draw(st.lists(st.integers(0, n), min_size=m + 1, max_size=m + 1)))
    return PosetMap(tuple(vals), n)


@given(poset_maps())
def test_epi_mono_factorization_recomposes(theta):
    epi, mono = cb.epi_mono_factor(theta)
    assert epi.is_surjective() and mono.is_injective()
    assert cb.compose(mono, epi) == theta


@given(poset_maps(), st.data())
def test_groupoid_nerve_action_is_functorial(theta, data):
    nerve = cb.GroupoidNerve(cb.Groupoid.pair(2))
    x = data.draw(st.sampled_from(nerve.simplices(theta.target_dim)))
    k = data.draw(st.integers(0, 3))
    vals = sorted(data.draw(st.lists(st.integers(0, theta.source_dim), min_size=k + 1, max_size=k + 1)))
    theta2 = PosetMap(tuple(vals), theta.source_dim)
    assert nerve.act(nerve.act(x, theta), theta2) == nerve.act(x, cb.compose(theta, theta2))


# ---------------------------------------------------------------------------
# nerves, products, cubes

def test_nerve_counts():
    assert cb.nerve(cb.chain_poset(1)).counts() == {0: 2, 1: 1}
    square = cb.cube(2)
    assert square.counts() == {0: 4, 1: 5, 2: 2}
    antichain = cb.FinitePoset.from_predicate(range(3), lambda a, b: a == b)
    assert cb.nerve(antichain).counts() == {0: 3}


def test_product_of_intervals_is_the_square():
    prod = cb.product(cb.standard_simplex(1), cb.standard_simplex(1))
    assert prod.counts() == {0: 4, 1: 5, 2: 2}
    assert cb.product_of(cb.simplex_complex(1), cb.simplex_complex(1)).counts() == {0: 4, 1: 5, 2: 2}


def test_point_times_y_is_y():
    y = cb.cube(2)
    assert cb.product_of(cb.simplex_complex(0), y).counts() == y.counts()


@pytest.mark.parametrize("n,m", [(0, 0), (1, 1), (2, 1), (1, 2), (2, 3)])
def test_maximal_simplex_count(n, m):
    prism = cb.product_of(cb.simplex_complex(n), cb.cube(m))
    assert len(prism.maximal_simplices()) == cb.max_simplex_count(n, m)
    assert cb.max_simplex_count(1, 1) == 2


def test_interpolation_small_cases():
    assert cb.interpolation(0).counts() == {0: 1}
    sheet = cb.interpolation_sheet(1, 1)
    assert sorted(sheet.points()) == [(0, 0), (1, 0), (1, 1)]
    assert sheet.counts() == {0: 3, 1: 3, 2: 1}
    # I^2_+ is glued from two sheets; count maximal chains of both orders
    two = cb.interpolation(2)
    per_sheet = [len(cb.interpolation_sheet(2, a).maximal_simplices()) for a in (1, 2)]
    assert len(two.maximal_simplices()) == 6
    assert per_sheet == [3, 3]


def test_sheet_posets_are_partial_orders():
    for m in range(1, 4):
        for a in range(1, m + 1):
            assert cb.sheet_poset(m, a).check_partial_order()


# ---------------------------------------------------------------------------
# horns and the Kan condition

def test_z2_horn_fills_by_multiplication(z2):
    # Λ^2_1 with d_2 = g and d_0 = g: the filler is (g, g), whose d_1 is g g = e
    g = (0, (1,))
    fills = z2.fill({0: g, 2: g}, 2)
    assert fills == [(0, (1, 1))]
    assert z2.face(fills[0], 1) == (0, (0,))


def test_kan_reports():
    z2 = cb.GroupoidNerve(cb.Groupoid.cyclic(2))
    rep = cb.is_kan(z2, 3)
    assert rep.is_kan and rep.strictness == 2
    assert not cb.is_kan(cb.standard_simplex(1), 2).is_kan
    point = cb.standard_simplex(0)
    assert cb.is_kan(point, 3).is_kan and cb.is_kan(point, 3).strictness == 0


# ---------------------------------------------------------------------------
# alpha, iota, eta, chi

def test_alpha_on_the_square():
    assert [cb.alpha(r) for r in [(0, 0), (1, 0), (0, 1), (1, 1)]] == [0, 1, 2, 2]


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_alpha_face_and_degeneracy_identities(m):
    assert cb.alpha_face_defects(m) == []
    assert cb.alpha_degeneracy_defects(m) == []


@pytest.mark.parametrize("m", [1, 2, 3])
def test_iota_eta(m):
    assert cb.iota_eta_defects(m) == []


@pytest.mark.parametrize("m", [1, 2, 3])
def test_chi_maps(m):
    assert cb.chi_defects(m) == []


def test_chi_k_sheet_reduces_to_chi_for_initial_segments():
    for m in range(1, 4):
        for k in range(1, m):
            for a in range(1, m + 1):
                fn = cb.chi_k_sheet(tuple(range(1, k + 1)), m, a)
                for p in cb.interpolation_sheet(m, a).points():
                    assert fn(p) == cb.chi_sheet(k, a)(p)


def test_chi_k_sheet_by_hand():
    # K = {2} in I^2: theta = (2, 1); on I^2_{theta(1)} = I^2_2 the level lowered by r_1
    fn = cb.chi_k_sheet((2,), 2, 1)
    assert fn((1, 1, 2)) == ((1, 1), (1,))
    assert fn((1, 1, 1)) == ((1, 0), (1,))
    assert fn((0, 1, 0)) == ((1, 0), (0,))


def test_chi_k_sheet_rejects_bad_index():
    with pytest.raises(cb.CombinatoricsError):
        cb.chi_k_sheet((1,), 2, 3)


# ---------------------------------------------------------------------------
# shuffles

def test_shuffle_small_cases():
    (only,) = cb.shuffles(2, 0)
    assert only.perm == (1, 2) and only.sign == 1
    pair = cb.shuffles(1, 1)
    assert len(pair) == 2 and {s.sign for s in pair} == {1, -1}


@given(st.integers(0, 3), st.integers(0, 3))
def test_shuffle_chains_are_maximal_and_decode(n, m):
    prism = cb.product_of(cb.simplex_complex(n), cb.cube(m))
    seen = set()
    for s in cb.shuffles(n, m):
        chain = s.chain()
        assert prism.is_simplex(chain) and len(chain) == n + m + 1
        assert cb.shuffle_of_chain(chain, n, m) == s
        assert s.sign == cb.permutation_sign(s.perm)
        seen.add(chain)
    assert len(seen) == cb.max_simplex_count(n, m)


@given(st.integers(0, 2), st.integers(1, 3), st.data())
def test_marked_shuffles_lie_over_their_sheet(n, m, data):
    a = data.draw(st.integers(1, m))
    sheet = cb.product_of(cb.simplex_complex(n), cb.interpolation_sheet(m, a))
    for s in cb.shuffles_marked(n, m, a):
        assert s.inverse_position(n + a) < s.inverse_position(n + m + 1)
        assert sheet.is_simplex(s.marked_chain(a))


@pytest.mark.parametrize("n,m", [(0, 1), (1, 2), (2, 2), (1, 3), (2, 3)])
def test_k_shuffle_bijections_and_signs(n, m):
    assert cb.k_shuffle_defects(n, m) == []


def test_standard_product_sign_multiplicative():
    for mu in cb.shuffles(1, 1):
        for nu in cb.shuffles(2, 1):
            pi = cb.k_shuffle_product(mu, nu, (1,), 2)
            assert pi.sign == mu.sign * nu.sign


def test_theta_plus_sign():
    for m in range(1, 5):
        for k in range(m + 1):
            for K in itertools.combinations(range(1, m + 1), k):
                plus = cb.permutation_sign(cb.k_shuffle(K + (m + 1,), m + 1))
                assert plus == (-1) ** (m - k) * cb.permutation_sign(cb.k_shuffle(K, m))


def test_identity_report_is_clean():
    assert all(not bad for bad in cb.combinatorial_identity_report(3, 2).values())


# ---------------------------------------------------------------------------
# groupoids

def test_groupoid_counts(z2, pair2):
    assert len(z2.simplices(2)) == 4
    assert pair2.g.n_arrows == 4 and len(pair2.simplices(2)) == 8


def test_groupoid_validation_names_triple():
    loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(cb.GroupoidError) as info:
        cb.Groupoid.from_group_table(loop)
    assert info.value.args[1] == (1, 1, 2)
    assert "(1, 1, 2)" in info.value.args[0]


def test_groupoid_rejects_missing_composite():
    with pytest.raises(cb.GroupoidError, match="missing composite"):
        cb.Groupoid(["*"], [0, 0], [0, 0], {(0, 0): 0, (1, 0): 1, (0, 1): 1}, [0])
