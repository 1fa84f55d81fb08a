import random

import pytest
from hypothesis import given, strategies as st

from ruthsplit import linalg as la
from ruthsplit.linalg import Q


def mat(rows):
    return tuple(tuple(Q(x) for x in r) for r in rows)


def test_rational_parsing_and_printing():
    assert la.q("3/6") == Q(1, 2)
    assert la.q_to_str(Q(-4, 2)) == "-2"
    assert la.q_to_str(Q(5, 2)) == "5/2"
    m = mat([[1, "1/3"], [0, -2]])
    assert la.matrix_from_json(la.matrix_to_json(m)) == m


def test_kernel_small_cases():
    assert la.kernel(mat([[1, -1]])) == [(Q(1), Q(1))]
    assert la.kernel(la.identity(3)) == []
    zero = la.mat_zero(2, 3)
    assert len(la.kernel(zero)) == 3 and la.rank(zero) == 0


def test_solve_canonical_and_inconsistent():
    assert la.solve(mat([[1, 1]]), (Q(2),)) == (Q(2), Q(0))
    b = (Q(1), Q(-1))
    assert la.solve(la.identity(2), b) == b
    assert la.solve(la.mat_zero(2, 2), b) is None


def test_section_with_constraint_is_forced():
    f = mat([[1, 0]])
    s = la.section_of(f, 2, [(Q(1), Q(0))])
    assert s == mat([[1], [0]])
    assert la.section_of(la.identity(2), 2) == la.identity(2)


def test_section_rejects_constraint_in_kernel():
    with pytest.raises(la.LinAlgError):
        la.section_of(mat([[1, 0]]), 2, [(Q(0), Q(1))])


small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return tuple(tuple(Q(draw(small)) for _ in range(c)) for _ in range(r)), c


@given(matrices())
def test_rank_nullity(mc):
    m, c = mc
    ker = la.kernel(m, c)
    assert la.rank(m) + len(ker) == c
    for v in ker:
        assert la.is_zero(la.mat_vec(m, v))


@given(matrices(), st.integers(0, 10_000))
def test_seeded_section_is_a_right_inverse(mc, seed):
    m, c = mc
    rng = random.Random(seed)
    s = la.section_of(m, c, (), rng)
    image = la.column_space(la.columns(m, c), len(m))
    for v in image:
        assert la.mat_vec(m, la.mat_vec(s, v)) == v


@given(matrices(max_rows=3, max_cols=3))
def test_inverse_is_two_sided(mc):
    m, c = mc
    if len(m) != c:
        return
    inv = la.inverse(m)
    if inv is None:
        assert la.rank(m) < c
    else:
        assert la.mat_mul(m, inv) == la.identity(c)
        assert la.mat_mul(inv, m) == la.identity(c)


@given(matrices(), st.data())
def test_solve_agrees_with_image(mc, data):
    m, c = mc
    x = tuple(Q(data.draw(small)) for _ in range(c))
    b = la.mat_vec(m, x)
    sol = la.solve(m, b)
    assert sol is not None and la.mat_vec(m, sol) == b
