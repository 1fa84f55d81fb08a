import pytest

from ruthsplit import bundle as bd
from ruthsplit import cleavage as cl
from ruthsplit import ruth as rt
from ruthsplit import sdp
from ruthsplit.linalg import identity


@pytest.fixture(scope="module", params=["z2", "pair2"])
def rep(request):
    base = request.getfixturevalue(request.param)
    return rt.random_ruth(base, [1, 2], seed=4)


def test_fiber_dimensions_on_a_point(point):
    E = rt.random_ruth(point, [1, 1], seed=0)
    Eb = sdp.semidirect(E)
    x = point.simplices(0)[0]
    # E^0 once, plus E^{-1} once per injection [1] -> [n]
    assert [Eb.dim(bd.unit_simplex(point, x, n)) for n in range(4)] == [1, 2, 3, 4]


def test_semidirect_bundle_is_a_fibration(rep):
    Eb = sdp.semidirect(rep)
    fr = bd.check_fibration(Eb, 4)
    assert fr.ok and fr.strictness == 2
    assert not bd.simplicial_identity_defects(Eb, 3)


def test_canonical_cleavage(rep):
    c = sdp.canonical_cleavage(sdp.semidirect(rep))
    assert cl.check_sections(c, 3).ok
    assert cl.is_normal(c, 3).ok
    assert cl.is_coherent(c, 3).ok


def test_roundtrip_recovers_the_representation(rep):
    assert any(not rt.is_zero_matrix(rep.tensor(2, g, 0)) for g in rep.base.simplices(2))
    report = sdp.roundtrip(rep, 3)
    assert report.ok and report.nonzero.get(2)


def test_roundtrip_notices_a_different_representation(rep):
    other = rt.random_ruth(rep.base, [1, 2], seed=5)
    report = sdp.roundtrip(rep, 3, sdp.semidirect(other))
    assert not report.ok


@pytest.fixture(scope="module")
def chain(rep):
    E = rep
    F, phi = rt.transport(E, rt.random_cochain(E, E, 0, 9, invertible_zero=True))
    G, psi = rt.transport(F, rt.random_cochain(F, F, 0, 10, invertible_zero=True))
    return E, F, G, phi, psi


def test_transport_is_functorial(chain):
    E, F, G, phi, psi = chain
    Eb, Fb, Gb = sdp.semidirect(E), sdp.semidirect(F), sdp.semidirect(G)
    pb = sdp.transport_intertwiner(phi, Eb, Fb, m_cap=3)
    qb = sdp.transport_intertwiner(psi, Fb, Gb, m_cap=3)
    assert sdp.morphism_defects(pb, 3) == [] and sdp.morphism_defects(qb, 3) == []
    both = sdp.transport_intertwiner(rt.compose(psi, phi), Eb, Gb, m_cap=3)
    comp = sdp.compose_morphisms(qb, pb)
    base = E.base
    assert all(comp(g) == both(g) for n in range(4) for g in base.simplices(n))
    one = sdp.transport_intertwiner(rt.identity_cochain(E), Eb, Eb)
    assert all(one(g) == identity(Eb.dim(g)) for n in range(4) for g in base.simplices(n))


def test_transport_rejects_a_non_intertwiner(chain):
    E, F, *_ = chain
    bogus = rt.random_cochain(E, F, 0, 3)
    with pytest.raises(sdp.SdpError):
        sdp.transport_intertwiner(bogus, sdp.semidirect(E), sdp.semidirect(F), m_cap=3)


def test_homotopy_transport(chain):
    E, F, _, phi, _ = chain
    Eb, Fb = sdp.semidirect(E), sdp.semidirect(F)
    omega = rt.random_cochain(E, F, -1, 12)
    psi = rt.linear_combination([(1, phi), (1, rt.D(omega))], "Ψ")
    H = sdp.transport_homotopy(omega, phi, psi, Eb, Fb, m_cap=3)
    pb = sdp.transport_intertwiner(phi, Eb, Fb, m_cap=3)
    qb = sdp.transport_intertwiner(psi, Eb, Fb, m_cap=3)
    assert sdp.homotopy_defects(H, 3) == []
    assert sdp.endpoint_defects(H, pb, qb, 3) == []
    # swapping the endpoints is caught
    assert sdp.endpoint_defects(H, qb, pb, 3)
    H0 = sdp.transport_homotopy(rt.zero_cochain(E, F, -1), phi, phi, Eb, Fb, m_cap=3)
    base = E.base
    assert all(H0(j, g) == pb(g) for n in range(4) for g in base.simplices(n) for j in range(n + 2))
