from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from densityclone import sets
from densityclone.density import (block_counts, dyadic_block_densities, scale_bound_check,
                                  upper_density_estimate)
from densityclone.errors import PreconditionViolated
from densityclone.functions import parse_expression, parse_function
from densityclone.sets import parse_set


def test_estimate_examples():
    assert upper_density_estimate(sets.evens(), (10, 100)).ratio == Fraction(1, 2)
    assert upper_density_estimate(sets.squares(), (100, 10000)).ratio == Fraction(1, 10)
    rep = upper_density_estimate(parse_set("intervals:[0,8),[64,128)"), (8, 128))
    assert rep.ratio == 1 and rep.horizon == 8


def test_estimate_rejects_bad_horizons():
    for hs in ((), (10, 10), (0, 5), (100, 10)):
        with pytest.raises(ValueError):
            upper_density_estimate(sets.evens(), hs)


def test_report_serializes_rationals():
    d = upper_density_estimate(sets.squares(), (16, 256)).to_dict()
    assert d["ratio"] == Fraction(1, 4)
    assert all(b["count"] <= 2 ** b["k"] for b in d["dyadic_blocks"])


def test_dyadic_examples():
    # block 0 is [1, 2), which holds no even number
    assert dyadic_block_densities(sets.evens(), 3) == [0] + [Fraction(1, 2)] * 3
    assert dyadic_block_densities(sets.powers(2), 3) == [1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert dyadic_block_densities(sets.empty(), 5) == [0] * 6


@pytest.mark.parametrize("spec", ["squares", "evens", "powers:3", "union(squares;multiples:7)",
                                  "intervals:[3,40),[100,130)"])
def test_dyadic_consistent_with_prefix(spec):
    A = parse_set(spec)
    blocks = block_counts(A, 12)
    for k in range(13):
        assert A.prefix_count(2 ** (k + 1)) == A.prefix_count(1) + sum(blocks[: k + 1])


def test_scale_bound_examples():
    r = scale_bound_check(parse_function("id"), sets.evens(), 1, 100)
    assert r.passed and r.left == r.right == Fraction(1, 2)
    with pytest.raises(PreconditionViolated) as info:
        scale_bound_check(parse_expression("x1 // 2"), sets.evens(), 1, 100)
    assert info.value.witness == 1
    assert scale_bound_check(parse_expression("2 * x1"), sets.squares(), 2, 200).passed


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 6), st.integers(1, 300),
       st.sampled_from(["squares", "evens", "powers:2", "multiples:5", "all"]))
def test_scale_bound_holds_when_premise_holds(a, q, c, n, spec):
    # f(x) = a*x + c satisfies f(x) >= x*eps for eps = a/q <= a
    f = parse_expression(f"{a} * x1 + {c}")
    eps = Fraction(a, q)
    r = scale_bound_check(f, parse_set(spec), eps, n)
    assert r.passed and r.left <= r.right
