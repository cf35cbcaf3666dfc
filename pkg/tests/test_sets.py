import pytest
from hypothesis import given, settings, strategies as st

from densityclone import sets
from densityclone.errors import EnumerationBoundError, SpecParseError
from densityclone.sets import FiniteSet, Intervals, parse_set


def brute(A, n):
    return [x for x in range(n) if x in A]


SPECS = ["empty", "all", "evens", "odds", "squares", "multiples:3", "powers:2", "powers:3",
         "intervals:[0,8),[64,128)", "intervals:[5,inf)", "finite:1,4,9,10",
         "complement:0,1,2", "pred:x1 % 7 @5000", "union(squares;powers:2)",
         "inter(evens;multiples:3)"]


@pytest.mark.parametrize("spec", SPECS)
def test_enumeration_matches_membership_and_prefix(spec):
    A = parse_set(spec)
    n = 700
    scan = brute(A, n)
    assert A.elements_below(n) == scan
    for m in (0, 1, 2, 17, 64, 255, 699):
        assert A.prefix_count(m) == sum(1 for x in scan if x < m)
    assert all(a < b for a, b in zip(scan, scan[1:]))


def test_prefix_count_examples():
    assert sets.evens().prefix_count(10) == 5
    assert sets.empty().prefix_count(1000) == 0
    # 0, 1, 4, ..., 81
    assert sets.squares().prefix_count(100) == 10


def test_nth_agrees_with_enumeration():
    for A in (sets.squares(), sets.powers(3), parse_set("union(squares;powers:2)")):
        first = A.elements_below(5000)
        assert [A.nth(j) for j in range(len(first))] == first


def test_predicate_bound_is_an_error():
    A = parse_set("pred:eq(x1 % 5, 0, 1, 0)@100")
    assert A.prefix_count(100) == 20
    with pytest.raises(EnumerationBoundError):
        A.prefix_count(101)
    with pytest.raises(EnumerationBoundError):
        150 in A


def test_interval_merging_and_labels():
    A = Intervals([(3, 5), (0, 2), (4, 9)])
    assert A.intervals == ((0, 2), (3, 9))
    assert parse_set("all").label == "all"
    assert parse_set("intervals:[2,4)").elements_below(10) == [2, 3]


def test_file_sets(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("1\n5\n\n9\n")
    assert parse_set(f"file:{p}").elements_below(100) == [1, 5, 9]
    p.write_text("5\n1\n")
    with pytest.raises(SpecParseError):
        parse_set(f"file:{p}")


@pytest.mark.parametrize("bad", ["sqares", "multiples:", "intervals:[3,1)", "union(evens)",
                                 "powers:1", "finite:1,x"])
def test_parse_errors(bad):
    with pytest.raises((SpecParseError, ValueError)):
        parse_set(bad)


def test_parse_error_carries_position():
    with pytest.raises(SpecParseError) as info:
        parse_set("union(evens;bogus)")
    assert info.value.position > 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 400), max_size=40), st.integers(0, 450))
def test_finite_prefix_monotone(elems, n):
    A = FiniteSet(elems)
    c = A.prefix_count(n)
    assert c == len([x for x in set(elems) if x < n])
    assert c <= n
    assert A.prefix_count(n + 1) >= c


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 200), st.integers(0, 60)), max_size=6),
       st.integers(0, 300))
def test_interval_prefix_matches_scan(pairs, n):
    A = Intervals([(a, a + w) for a, w in pairs])
    assert A.prefix_count(n) == len(brute(A, n))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SPECS), st.lists(st.integers(0, 600), min_size=1, max_size=12))
def test_checkpoint_cache_is_idempotent(spec, queries):
    A, B = parse_set(spec), parse_set(spec)
    got = [A.prefix_count(q) for q in queries]
    fresh = [parse_set(spec).prefix_count(q) for q in queries]
    assert got == fresh
    assert [B.prefix_count(q) for q in reversed(queries)] == list(reversed(fresh))
