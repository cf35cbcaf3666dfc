import pytest
from hypothesis import given, settings, strategies as st

from oracles import mod4_element, mod4_laws
from densityclone.errors import BranchNotInTree, PartitionError, SpecParseError
from densityclone.monoid import (AX, AY, TX, TY, ZERO, Value, branch_elements, collapse_map,
                                 format_tree, full_binary_tree, make_partition,
                                 monoid_element_from_branch, mutate, parse_tree,
                                 single_branch_tree, verify_monoid_laws)
from densityclone.sets import FiniteSet, Progression

P = make_partition(100)


def int_branches(tree):
    return [tuple((x.n, y.n) for x, y in b) for b in tree.branches()]


# -- partition -----------------------------------------------------------------------

def test_default_partition_counts():
    assert P.validate(100).details["counts"] == {"zero": 1, "T_x": 25, "T_y": 25, "A_x": 25, "A_y": 24}
    assert [P.cell_of(x) for x in range(6)] == [ZERO, TX, TY, AX, AY, TX]
    assert P.enumerate(AY, 3) == [4, 8, 12]


def test_custom_partition_errors():
    overlap = [FiniteSet([0]), Progression(4, 1), Progression(4, 2), Progression(4, 3),
               Progression(2, 0)]
    with pytest.raises(PartitionError):
        make_partition(40, overlap)
    gap = [FiniteSet([0]), Progression(4, 1), Progression(4, 2), Progression(4, 3),
           Progression(8, 4)]
    with pytest.raises(PartitionError):
        make_partition(40, gap)
    thin = [FiniteSet([0]), Progression(4, 1), Progression(4, 2), Progression(4, 3),
            Progression(4, 0, start=1)]
    assert make_partition(64, thin).validate(64).passed
    with pytest.raises(ValueError):
        make_partition(4)


# -- trees ---------------------------------------------------------------------------

def test_tree_roundtrip():
    text = "(0:0(0:0,1:1),1:1(0:0,=7:1))"
    tree = parse_tree(text)
    assert tree.depth == 2 and tree.branch_count() == 4
    assert format_tree(tree) == text
    assert parse_tree(" ( 0 : 0 ( 1 : 2 ) ) ").depth == 2
    assert format_tree(full_binary_tree(2)) == "(0:0(0:0,1:1),1:1(0:0,1:1))"
    assert format_tree(single_branch_tree(3)) == "(0:0(0:0(0:0)))"


@pytest.mark.parametrize("bad", ["", "(0:0", "(0:)", "(0:0)(", "(0:0(1:1),2:2)", "(a:0)"])
def test_tree_parse_errors(bad):
    with pytest.raises(SpecParseError):
        parse_tree(bad)


def test_branch_not_in_tree():
    tree = full_binary_tree(2)
    with pytest.raises(BranchNotInTree):
        monoid_element_from_branch(P, tree, [(Value(0), Value(0)), (Value(2), Value(0))])
    with pytest.raises(BranchNotInTree):
        monoid_element_from_branch(P, tree, [(Value(0), Value(0))])


# -- elements ------------------------------------------------------------------------

def test_collapse_and_branch_values():
    h = collapse_map(P).function
    assert [h(x) for x in range(9)] == [0, 1, 2, 3, 0, 5, 6, 7, 0]
    tree = full_binary_tree(1)
    f0, f1 = branch_elements(P, tree)
    # first A_x element is 3, first A_y is 4; index 1 of T_x is 5, of T_y is 6
    assert (f0.function(3), f1.function(3)) == (1, 5)
    assert (f0.function(4), f1.function(4)) == (2, 6)
    assert f1.function(7) == 1 and f1.function(8) == 2
    assert branch_elements(P, parse_tree("()")) == []


def test_raw_values_resolve_literally():
    tree = parse_tree("(=9:=0)")
    f = monoid_element_from_branch(P, tree, next(tree.branches())).function
    assert f(3) == 9 and f(4) == 0


# -- laws ----------------------------------------------------------------------------

@pytest.mark.parametrize("tree", [single_branch_tree(6), full_binary_tree(6)],
                         ids=["single", "binary"])
def test_laws_hold(tree):
    elems = branch_elements(P, tree)
    rec = verify_monoid_laws(P, tree, elems, 2000)
    assert rec.passed, rec.failures[:3]
    assert set(rec.details["classes"]) <= {"identity", "collapse", "F", "G'"}


def test_depth_zero_checks_identity_and_collapse():
    tree = parse_tree("()")
    rec = verify_monoid_laws(P, tree, [], 200)
    assert rec.passed and rec.details["checks"]["i"] == 0


def test_mutation_is_caught():
    tree = single_branch_tree(6)
    (f,) = branch_elements(P, tree)
    rec = verify_monoid_laws(P, tree, [mutate(f, 4, 7)], 2000)
    assert not rec.passed
    first = rec.first_failure
    assert first["law"] == "i" and first["witness"] == 4


def random_tree(draw, depth):
    if depth == 0:
        return ""
    pairs = draw(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                          min_size=1, max_size=2, unique=True))
    return "(" + ",".join(f"{a}:{b}{random_tree(draw, depth - 1)}" for a, b in pairs) + ")"


@st.composite
def trees(draw):
    return parse_tree(random_tree(draw, draw(st.integers(1, 3))))


@settings(max_examples=40, deadline=None)
@given(trees(), st.data())
def test_laws_agree_with_hand_oracle(tree, data):
    N = 80
    elems = branch_elements(P, tree)
    branches = int_branches(tree)
    fns = [mod4_element(b) for b in branches]
    if data.draw(st.booleans()):
        # corrupt one element at one point
        j = data.draw(st.integers(0, len(elems) - 1))
        x, v = data.draw(st.integers(0, N - 1)), data.draw(st.integers(0, N - 1))
        elems[j] = mutate(elems[j], x, v)
        fns[j] = lambda y, f=fns[j], x=x, v=v: v if y == x else f(y)
    for e, f in zip(elems, fns):
        assert all(e.function(x) == f(x) for x in range(N))
    rec = verify_monoid_laws(P, tree, elems, N)
    bad = mod4_laws(fns, branches, N)
    assert rec.passed == (not bad)
    assert {f["law"] for f in rec.failures if "law" in f} == bad
