import itertools

import pytest
from hypothesis import given, settings, strategies as st

from densityclone.tupling import cantor_pair, cantor_unpair, iroot, shell_rank, shell_unrank


def test_k2_index_table():
    assert [shell_unrank(m, 2) for m in range(9)] == [
        (0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2), (2, 0), (2, 1), (2, 2)]


def test_k3_first_cube():
    assert [shell_unrank(m, 3) for m in range(8)] == list(itertools.product(range(2), repeat=3))


@pytest.mark.parametrize("k,b", [(1, 50), (2, 40), (3, 9), (4, 5)])
def test_prefix_is_exactly_the_box(k, b):
    got = {shell_unrank(m, k) for m in range(b ** k)}
    assert got == set(itertools.product(range(b), repeat=k))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 12), st.integers(1, 5))
def test_rank_inverts_unrank(m, k):
    assert shell_rank(shell_unrank(m, k)) == m


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 30), st.integers(1, 7))
def test_iroot(m, k):
    s = iroot(m, k)
    assert s ** k <= m < (s + 1) ** k


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_cantor_roundtrip(x, y):
    assert cantor_unpair(cantor_pair(x, y)) == (x, y)


def test_cantor_is_onto_prefix():
    assert sorted(cantor_pair(x, y) for x in range(20) for y in range(20 - x)) == list(range(210))
