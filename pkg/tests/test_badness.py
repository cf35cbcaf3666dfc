import bisect
from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st

from exprgen import expressions
from oracles import brute_entry_ok, brute_search, brute_validate
from densityclone import sets
from densityclone.badness import (BadnessCertificate, CertificateEntry, SearchHorizons,
                                  ak_containment_check, assemble_global_witness,
                                  badness_from_witness, check_density_chain, least_s, least_v,
                                  membership_probe, shadow_witness_lift, validate_certificate)
from densityclone.errors import NoMFound, NoTFound, SpecParseError, StageFailure
from densityclone.functions import (ShadowSpec, enumerate_shadow_specs, parse_expression,
                                    parse_function)
from densityclone.sets import parse_set

SQRT = parse_function("sqrtind")
SMALL = SearchHorizons(m_max=2 ** 12, t_max=2 ** 8, n_max=2 ** 12)


def entries(cert):
    return [e.to_dict() for e in cert.entries]


# -- certificates ---------------------------------------------------------------------

def test_empty_certificate_is_vacuous():
    rec = validate_certificate(SQRT, BadnessCertificate(Fraction(1, 2), []))
    assert rec.passed and rec.scope == "no i witnessed"


def thinned_squares(i, lo, hi):
    """Greedy sparse subset of the squares in [lo, hi)."""
    out = []
    for s in range(isqrt(lo), isqrt(hi) + 1):
        a = s * s
        if lo <= a < hi and (len(out) + 1) * 2 ** i <= a + 1:
            out.append(a)
    return tuple(out)


@pytest.mark.parametrize("t", [3, 6, 10, 40])
def test_thinned_squares_certificate(t):
    A = thinned_squares(2, 2, 1000)
    cert = BadnessCertificate(Fraction(1, 2), [CertificateEntry(2, 1000, t, A)])
    rec = validate_certificate(SQRT, cert)
    assert rec.passed == brute_entry_ok(SQRT, Fraction(1, 2), 2, 1000, t, A)


@pytest.mark.parametrize("entry,condition", [
    (CertificateEntry(5, 3, 9, ()), "bounds"),
    (CertificateEntry(1, 50, 4, (9, 4)), "sorted"),
    (CertificateEntry(2, 50, 4, (1, 9)), "range"),
    (CertificateEntry(2, 50, 4, (2, 3)), "sparsity"),
    (CertificateEntry(1, 50, 30, (9, 16)), "density"),
])
def test_first_failure_is_named(entry, condition):
    rec = validate_certificate(SQRT, BadnessCertificate(Fraction(1, 3), [entry]))
    assert not rec.passed and rec.first_failure["condition"] == condition


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["id", "sqrtind", "x1 // 2", "x1 % 7", "x1 + x2", "cantor", "x1 * x2"]),
       st.integers(0, 4), st.lists(st.integers(0, 120), max_size=8), st.integers(0, 130),
       st.integers(0, 40), st.fractions(Fraction(1, 10), Fraction(3, 2)))
def test_validator_agrees_with_brute_force(spec, i, A, n, t, eps):
    f = parse_function(spec)
    A = tuple(sorted(set(A)))
    cert = BadnessCertificate(eps, [CertificateEntry(i, n, t, A)])
    assert validate_certificate(f, cert).passed == brute_entry_ok(f, eps, i, n, t, A)


def test_certificate_roundtrip():
    cert = BadnessCertificate(Fraction(1, 3), [CertificateEntry(1, 17, 5, (9, 16))], "sqrtind", "squares")
    text = cert.dumps()
    assert '"epsilon": "1/3"' in text
    back = BadnessCertificate.loads(text)
    assert back == cert
    with pytest.raises(SpecParseError):
        BadnessCertificate.loads('{"format": "other"}')


# -- the search -----------------------------------------------------------------------

@pytest.mark.parametrize("spec,B,eps,i", [
    ("sqrtind", "squares", "1/2", 3), ("sqrtind", "squares", "1/3", 1), ("sqrtind", "squares", "1/3", 2),
    ("x1 // 4", "powers:2", "1/8", 1), ("x1 + x2", "powers:3", "1/16", 1),
    ("isqrt(x1)", "powers:2", "1/4", 2), ("x1 % 9", "squares", "1/2", 2),
])
def test_search_matches_literal_oracle(spec, B, eps, i):
    f, Bset = parse_function(spec), parse_set(B)
    expected = brute_search(f, Bset.elements_below(SMALL.n_max), Fraction(eps), i,
                            SMALL.m_max, SMALL.t_max, SMALL.n_max)
    try:
        w = badness_from_witness(f, Bset, eps, i, SMALL)
        got = (w.m, w.i, w.n, w.t, w.A)
    except (NoMFound, NoTFound) as exc:
        got = exc.code
    assert got == expected


def test_search_stage_one_frozen():
    # closed form: |squares ∩ [0,5)| = 3 > 5/2 and every j >= 6 passes
    w = badness_from_witness(SQRT, sets.squares(), Fraction(1, 3), 1)
    assert (w.m, w.entry) == (6, CertificateEntry(1, 17, 5, (9, 16)))


def test_search_failures():
    # a singleton image meets ε·t only while t <= 1/ε
    assert badness_from_witness(parse_function("const:0"), sets.squares(), Fraction(1, 3), 3).t == 3
    with pytest.raises(NoTFound):
        badness_from_witness(parse_function("const:0"), sets.squares(), Fraction(1, 3), 4)
    with pytest.raises(NoTFound):
        badness_from_witness(SQRT, sets.squares(), 2, 1)
    with pytest.raises(NoMFound):
        badness_from_witness(SQRT, sets.everything(), Fraction(1, 3), 1, SMALL)


def test_larger_n_max_keeps_m_and_t():
    base = badness_from_witness(SQRT, sets.squares(), Fraction(1, 2), 3, SMALL)
    wide = badness_from_witness(SQRT, sets.squares(), Fraction(1, 2), 3,
                                SearchHorizons(2 ** 12, 2 ** 8, 2 ** 14))
    assert (base.m, base.t) == (wide.m, wide.t)


# -- global assembly -----------------------------------------------------------------

def squares_second_stage():
    """Closed-form oracle for the second stage with f = sqrtind, B = squares, ε = 1/3, i = 18."""
    i = 18
    # the last failing j sits at the start of a count step: j = s^2 + 1 with count s + 1
    s = max(s for s in range(1, 2 ** 20) if (s + 1) * 2 ** i > s * s + 1)
    m = (s + 1) * 2 ** i
    first_root = isqrt(m - 1) + 1
    t = next(t for t in range(i, 2 ** 20) if 3 * (t - first_root) >= t)
    n = (t - 1) ** 2 + 1
    return m, n, t


@pytest.fixture(scope="module")
def two_stage():
    return assemble_global_witness(SQRT, sets.squares(), Fraction(1, 3), 2, delta=1)


def test_two_stage_assembly(two_stage):
    m, n, t = squares_second_stage()
    asm = two_stage
    assert asm.n_seq == [17, n] and asm.t_seq == [5, t]
    assert asm.witnesses[1].m == m
    assert asm.record.passed
    assert brute_validate(SQRT, Fraction(1, 3), entries(asm.certificate()))
    assert (asm.v, asm.s) == (2, 35) and asm.density_record.passed


def test_density_chain_against_closed_form(two_stage):
    A = two_stage.A
    # (1/m)|A ∩ [0,m)| < 1 everywhere past s; tight points are m = a + 1
    for a in A[:50] + A[-50:]:
        assert bisect.bisect_left(A, a + 1) < a + 1


def test_three_stages_cannot_be_built():
    # stage 3 asks for sparsity w.r.t. i ≈ 1.5e11, far past any horizon
    with pytest.raises(StageFailure) as info:
        assemble_global_witness(SQRT, sets.squares(), Fraction(1, 3), 3)
    assert info.value.stage == 3 and isinstance(info.value.cause, NoMFound)


def test_zero_stages():
    asm = assemble_global_witness(SQRT, sets.squares(), Fraction(1, 3), 0, delta=Fraction(1, 2))
    assert asm.A == () and asm.density_record.passed


def test_constant_zero_fails_at_stage_two():
    with pytest.raises(StageFailure) as info:
        assemble_global_witness(parse_function("const:0"), sets.squares(), Fraction(1, 3), 2)
    assert info.value.stage == 2 and isinstance(info.value.cause, NoTFound)


@pytest.mark.parametrize("delta", [Fraction(1, 4), Fraction(1, 10), Fraction(1), Fraction(3, 7)])
def test_least_v_and_s_are_minimal(delta):
    v = least_v(delta)
    assert Fraction(1, 2 ** v) < delta / 2 and not Fraction(1, 2 ** (v - 1)) < delta / 2 or v == 1
    for n_prev in (0, 1, 17, 1000):
        s = least_s(n_prev, delta)
        assert Fraction(n_prev, s) < delta / 2
        assert s == 1 or not Fraction(n_prev, s - 1) < delta / 2


def test_least_v_example():
    assert least_v(Fraction(1, 4)) == 4


def test_density_chain_detects_violation():
    rec = check_density_chain((3, 4, 5), 2, 10, Fraction(1, 2))
    assert not rec.passed


# -- probing and shadows ----------------------------------------------------------------

def test_probe_verdicts():
    T = [sets.squares()]
    assert membership_probe(parse_function("id"), T).kind == "Inconclusive"
    assert membership_probe(parse_function("sqrtind"), T).kind == "NonMemberWitnessed"
    assert membership_probe(parse_function("const:0/2"), T).kind == "Inconclusive"


def test_lift_examples():
    B = sets.squares()
    assert shadow_witness_lift(SQRT, ShadowSpec((1,)), B).lifted is B
    f = parse_expression("x1 + x2")
    lift = shadow_witness_lift(f, ShadowSpec((1, 2), (3,)), B)
    assert lift.lifted.prefix_count(10) == 5  # 0, 1, 3, 4, 9
    assert shadow_witness_lift(f, ShadowSpec((1, 2), (3,)), sets.evens(), 50).record.passed


@settings(max_examples=60, deadline=None)
@given(expressions(), st.data(), st.sampled_from(["squares", "evens", "powers:2", "finite:1,5,7"]))
def test_lift_containment_property(case, data, B):
    arity, text = case
    f = parse_expression(text, arity)
    s = data.draw(st.sampled_from(enumerate_shadow_specs(arity, 4)))
    assert shadow_witness_lift(f, s, parse_set(B), 20).record.passed


@settings(max_examples=80, deadline=None)
@given(expressions(max_arity=1), st.integers(0, 30),
       st.sampled_from(["squares", "evens", "all", "powers:2", "multiples:3"]))
def test_ak_containments(case, i, B):
    _, text = case
    rec = ak_containment_check(parse_expression(text, 1), parse_set(B), i, 60)
    assert rec.passed


def test_ak_equality_failure_is_flagged_not_fatal():
    rec = ak_containment_check(parse_expression("x1 % 3"), sets.everything(), 5, 40)
    assert rec.passed and rec.details["equality_holds"] is False
