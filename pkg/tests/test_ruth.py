import pytest
from hypothesis import given, settings, strategies as st

from ruthsplit import ruth as rt
from ruthsplit.bundle import source_of, target_of
from ruthsplit.linalg import Q, identity, mat_add, mat_mul, mat_scale


@pytest.fixture(scope="module")
def reps(z2):
    return {
        "E": rt.random_ruth(z2, [1, 2], 3),
        "F": rt.random_ruth(z2, [1, 2], 4),
        "C": rt.random_ruth(z2, [2, 1], 1, character=True),
    }


def test_random_representation_is_unital_and_nonstrict(z2, reps):
    for E in reps.values():
        rep = rt.ruth_check(E, 3, 1)
        assert rep.ok and rep.unital
    E = reps["E"]
    nondeg = [g for g in z2.simplices(2) if not z2.is_degenerate(g)]
    assert any(any(v for row in E.tensor(2, g, 0) for v in row) for g in nondeg)


def test_corrupted_tensor_is_reported(z2, reps):
    T = rt.tabulate(reps["C"], 3, 1)
    g = z2.simplices(2)[3]
    T.table[(2, g, 0)] = mat_add(T.tensor(2, g, 0), ((Q(1), Q(0)),))
    T._cache.clear()
    rep = rt.ruth_check(T, 3, 1)
    assert not rep.ok
    assert rep.failures


def test_sign_character_needs_even_order(z3):
    with pytest.raises(rt.RuthError, match="character"):
        rt.random_ruth(z3, [1, 1], 0, character=True)


def test_table_json_roundtrip(z2, reps):
    T = rt.tabulate(reps["E"], 3, 1)
    enc = lambda g: [g[0], list(g[1])]
    dec = lambda s: (s[0], tuple(s[1]))
    back = rt.TableRuth.from_json(z2, T.to_json(enc), dec)
    for m in range(4):
        for g in z2.simplices(m):
            for n in range(2):
                assert back.tensor(m, g, n) == T.tensor(m, g, n)


def test_composition_in_low_arity(z2, reps):
    E, F = reps["E"], reps["F"]
    phi = rt.random_cochain(E, F, 0, 1)
    psi = rt.random_cochain(F, E, 1, 2)
    comp = rt.compose(psi, phi)
    x = z2.simplices(0)[0]
    for n in range(2):
        src = E.dim(x, n)
        assert comp(0, x, n) == mat_mul(psi(0, x, n), phi(0, x, n), src)
    g = z2.simplices(1)[1]
    s, t = source_of(z2, g), target_of(z2, g)
    src = E.dim(s, 0)
    expected = mat_add(mat_mul(psi(0, t, 1), phi(1, g, 0), src),
                       mat_mul(psi(1, g, 0), phi(0, s, 0), src))
    assert comp(1, g, 0) == expected
    # with a degree 1 right factor the k = 1 term flips sign
    comp2 = rt.compose(phi, psi)
    src = F.dim(s, 1)
    expected = mat_add(mat_mul(phi(0, t, 1), psi(1, g, 1), src),
                       mat_scale(-1, mat_mul(phi(1, g, 0), psi(0, s, 1), src)))
    assert comp2(1, g, 1) == expected


@settings(max_examples=8, deadline=None)
@given(st.integers(-1, 1), st.integers(0, 1000), st.integers(0, 1000))
def test_differential_squares_to_zero_and_is_a_derivation(z2, reps, deg, s1, s2):
    E, F = reps["E"], reps["F"]
    phi = rt.random_cochain(E, F, deg, s1)
    psi = rt.random_cochain(F, E, deg, s2)
    assert rt.is_zero_cochain(rt.D(rt.D(phi)), 3, 1).equal
    lhs = rt.D(rt.compose(phi, psi))
    rhs = rt.linear_combination([(1, rt.compose(rt.D(phi), psi)),
                                 (rt.sign(deg), rt.compose(phi, rt.D(psi)))])
    assert rt.compare(lhs, rhs, 3, 1).equal


def test_identity_is_an_intertwiner(reps):
    assert rt.intertwiner_check(rt.identity_cochain(reps["E"]), 3, 1).ok


def _gauge(E, seed):
    return rt.random_cochain(E, E, 0, seed, invertible_zero=True)


def test_transport_produces_an_intertwiner(reps):
    E = reps["E"]
    g = _gauge(E, 11)
    S, phi = rt.transport(E, g)
    assert rt.ruth_check(S, 3, 1).ok
    assert rt.intertwiner_check(phi, 3, 1).ok


def test_mapping_cone(z2, reps):
    E = reps["E"]
    S, phi = rt.transport(E, _gauge(E, 12))
    C = rt.mapping_cone(phi)
    x = z2.simplices(0)[0]
    assert [C.dim(x, n) for n in range(-1, 2)] == [1, 3, 2]
    rep = rt.ruth_check(C, 3, 1)
    assert rep.ok and rep.unital


def test_invert_gives_two_sided_inverse(reps):
    E = reps["E"]
    S, phi = rt.transport(E, _gauge(E, 13))
    res = rt.invert(phi, 3)
    assert res.invertible and res.left_ok and res.right_ok
    assert rt.intertwiner_check(res.inverse, 3, 1).ok


def test_invert_rejects_singular_component(z2, reps):
    E = reps["E"]
    res = rt.invert(rt.zero_cochain(E, E, 0), 3)
    assert not res.invertible
    assert res.failing == (0, z2.simplices(0)[0])
