import pytest

from ruthsplit import combinatorics as cb


@pytest.fixture(scope="session")
def z2():
    return cb.GroupoidNerve(cb.Groupoid.cyclic(2))


@pytest.fixture(scope="session")
def z3():
    return cb.GroupoidNerve(cb.Groupoid.cyclic(3))


@pytest.fixture(scope="session")
def pair2():
    return cb.GroupoidNerve(cb.Groupoid.pair(2))


@pytest.fixture(scope="session")
def point():
    return cb.GroupoidNerve(cb.Groupoid.discrete(1))
