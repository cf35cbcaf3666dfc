"""Constructions that generate every function from one outside function.

The chain is::

    A --g--> B --f--> C,    h : C × D -> ℕ,    t(x, y) = h(f(g(x)), y)

followed by a right inverse ``r`` of ``t`` with values in ``Z = A ∪ D`` and
the composite ``t(r_1(u(x̄)), r_2(u(x̄)))`` that reproduces any target ``u``.

Interval conventions: the large-set map counts ``B`` on the half-open
``[n_i, e·n_i)`` but keeps the closed intervals ``[n_i, e·n_i]`` pairwise
disjoint (``n_{i+1} > e·n_i``).  Candidates ``n_i`` start at 2, because the
onto construction divides by ``n_{i(k)}`` and needs ``n_{i(k)} >= 2``.
"""

from __future__ import annotations

import bisect
import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .density import upper_density_estimate
from .errors import (NoPreimage, NotEnoughIntervals, PipelineStageError,
                     PremiseUnmet, RTableGap, SetTooSmall)
from .functions import (FinFun, Term, compose, from_table, parse_function,
                        prefix_equal, projection)
from .report import VerificationRecord
from .sets import FiniteSet, Intervals, NatSet, Union
from .tupling import iroot, shell_unrank

# -- unarization ------------------------------------------------------------------


@dataclass
class UnarizationResult:
    source_arity: int
    components: list[FinFun]
    h: FinFun
    enumerated: int      # |A ∩ [0, horizon)|
    box_side: int        # indices [0, side^k) cover (first side elements of A)^k
    record: VerificationRecord
    tupling: str = "shell"

    def to_dict(self):
        return {"source_arity": self.source_arity, "tupling": self.tupling,
                "enumerated": self.enumerated, "box_side": self.box_side,
                "components": [c.label for c in self.components], "h": self.h.label,
                "record": self.record}


def unarize(g: FinFun, A: NatSet, horizon: int) -> UnarizationResult:
    """Replace a ``k``-ary ``g`` by a unary ``h`` with ``h[A] = g[A^k]``.

    ``f_i(a_m) = a_{τ(m)_i}`` where ``τ`` is the shell tupling and ``a_m`` the
    ``m``-th element of ``A``; ``f_i`` is ``0`` off ``A``.  Verification uses
    the ``M = |A ∩ [0, horizon)|`` enumerated elements and the box of side
    ``floor(M^(1/k))``, which needs ``M >= 2^k``.
    """
    k = g.arity
    elems = A.elements_below(horizon)
    M = len(elems)
    side = iroot(M, k) if M else 0
    if side < 2:
        raise SetTooSmall(f"{A.label} has {M} elements below {horizon}; "
                          f"need at least {2 ** k} for arity {k}")

    def component(i):
        def fi(x):
            if x not in A:
                return 0
            return A.nth(shell_unrank(A.prefix_count(x), k)[i])
        return FinFun(1, fi, kind="host-defined", label=f"unarize[{A.label}]_{i + 1}")

    comps = [component(i) for i in range(k)]
    h = compose(g, comps, label=f"{g.label}∘(f_1..f_{k})")

    rec = VerificationRecord("unarization", scope=f"first {M} elements of {A.label}")
    g_image = None
    for m, a in enumerate(elems):
        tup = tuple(c(a) for c in comps)
        expected = tuple(elems[j] for j in shell_unrank(m, k))
        if tup != expected:
            rec.fail(condition="component values", index=m, got=list(tup))
            break
        if h(a) != g(*tup):
            rec.fail(condition="h = g∘f", index=m)
            break
    box = elems[:side]
    hit = {h(a) for a in elems[:side ** k]}
    g_image = {g(*xs) for xs in itertools.product(box, repeat=k)}
    rec.check(hit == g_image, condition="surjective onto g-image of the box")
    idx = {shell_unrank(m, k) for m in range(side ** k)}
    rec.check(len(idx) == side ** k and all(max(t) < side for t in idx),
              condition="index map is a bijection onto the box")
    for x in range(min(horizon, 2 ** 12)):
        if x not in A and any(c(x) for c in comps):
            rec.fail(condition="zero off A", x=x)
            break
    rec.details.update(box_side=side, box_size=side ** k)
    return UnarizationResult(k, comps, h, M, side, rec)


# -- large-set map -----------------------------------------------------------------


@dataclass
class LargeSetMap:
    e: int
    n_seq: list[int]
    f: FinFun
    density_estimate: Fraction
    horizon: int
    record: VerificationRecord

    @property
    def C(self) -> NatSet:
        return Intervals([(n, 2 * n) for n in self.n_seq])

    def to_dict(self):
        return {"e": self.e, "n": self.n_seq, "intervals": [[n, self.e * n] for n in self.n_seq],
                "density_estimate": self.density_estimate, "horizon": self.horizon,
                "record": self.record}


def build_large_set_map(B: NatSet, e: int, count: int, horizon: int) -> LargeSetMap:
    if e < 2:
        raise ValueError("e must be at least 2")
    estimate = upper_density_estimate(B, [horizon]).ratio
    if not estimate > Fraction(3, e):
        raise PremiseUnmet(f"density estimate {estimate} of {B.label} at {horizon} "
                           f"does not exceed 3/{e}")
    elems = B.elements_below(horizon)
    n_seq: list[int] = []
    mapping: dict[int, int] = {}
    n = 2
    while len(n_seq) < count:
        if n >= horizon:
            raise NotEnoughIntervals(f"found {len(n_seq)} of {count} intervals below {horizon}")
        lo = bisect.bisect_left(elems, n)
        hi = bisect.bisect_left(elems, e * n)
        if hi - lo >= n:
            n_seq.append(n)
            for j, b in enumerate(elems[lo:lo + n]):
                mapping[b] = n + j
            n = e * n + 1
        else:
            n += 1

    def fn(x, mapping=mapping):
        return mapping.get(x, x)

    f = FinFun(1, fn, kind="host-defined",
               label=f"large-set-map[e={e}, n={n_seq}]")

    rec = VerificationRecord("large-set-map", scope=f"x below {horizon}")
    rec.check(all(a < b for a, b in zip(n_seq, n_seq[1:])), condition="n_i increasing")
    rec.check(all(e * a < b for a, b in zip(n_seq, n_seq[1:])),
              condition="closed intervals disjoint")
    for x in range(horizon):
        if f(x) * e < x:
            rec.fail(condition="f(x)·e >= x", x=x)
            break
    for n_i in n_seq:
        lo = bisect.bisect_left(elems, n_i)
        rec.check(bisect.bisect_left(elems, e * n_i) - lo >= n_i,
                  condition="|B ∩ [n, en)| >= n", n=n_i)
        covered = {f(b) for b in elems[lo:bisect.bisect_right(elems, e * n_i)]}
        missing = [y for y in range(n_i, 2 * n_i) if y not in covered]
        rec.check(not missing, condition="f[B ∩ I] ⊇ [n, 2n)", n=n_i,
                  value=missing[0] if missing else None)
    return LargeSetMap(e, n_seq, f, estimate, horizon, rec)


# -- onto construction ---------------------------------------------------------------


@dataclass(frozen=True)
class OntoBlock:
    k: int
    i: int         # i(k)
    n: int         # n_{i(k)}
    d: int         # d_k
    surplus: int   # |R_k| - 2^k

    @property
    def D_range(self) -> range:
        return range(2 ** self.k - self.d + 1, 2 ** self.k + 1)

    @property
    def rows(self) -> range:
        return range(self.n, 2 * self.n)

    @property
    def R_size(self) -> int:
        return self.n * self.d

    def pair_index(self, x: int, y: int) -> int:
        """Row-major position of ``(x, y)`` in ``R_k``."""
        return (x - self.n) * self.d + (y - (2 ** self.k - self.d + 1))

    def pair_at(self, j: int) -> tuple[int, int]:
        x, y = divmod(j, self.d)
        return self.n + x, 2 ** self.k - self.d + 1 + y

    def to_dict(self):
        return {"k": self.k, "i": self.i, "n": self.n, "d": self.d,
                "D": [self.D_range.start, self.D_range.stop - 1],
                "R_size": self.R_size, "surplus": self.surplus}


class OntoSet(NatSet):
    """``D = ⋃_{k>=1} D_k`` with ``D_k = (2^k - d_k, 2^k]``."""

    kind = "named-family"

    def __init__(self, oc: "OntoConstruction"):
        self.oc = oc
        super().__init__(f"onto-D[{oc.n_seq}]")

    def __contains__(self, y):
        if y < 2:
            return False
        k = (y - 1).bit_length()
        return y > 2 ** k - self.oc.d(k)

    def iter_from(self, lo=0):
        k = max(1, (max(lo, 2) - 1).bit_length())
        while True:
            for y in range(max(lo, 2 ** k - self.oc.d(k) + 1), 2 ** k + 1):
                yield y
            k += 1


class OntoConstruction:
    """Binary ``h`` with ``h[C × D] ⊇ [0, 2^(k_max+1))``.

    ``n_0 = 2`` is prepended to ``n_seq``.  ``S_k`` is the first ``2^k`` pairs
    of ``R_k`` in row-major order and ``g_k`` sends the ``j``-th of them to
    ``2^k + j``.  Values whose ``S_k`` pair falls outside ``C × D`` (possible
    only when ``i(k) = 0`` and ``n_1 > 2``), and the value 1, are moved onto
    spare pairs of ``C × D``: first the surplus ``R_k ∖ S_k`` of the lowest
    blocks, then pairs of ``C × D`` outside every ``R_k``.
    """

    def __init__(self, n_seq: Sequence[int], k_max: int):
        n_seq = list(n_seq)
        if any(b <= a for a, b in zip(n_seq, n_seq[1:])):
            raise ValueError("n_seq must be strictly increasing")
        if n_seq and n_seq[0] < 2:
            raise ValueError("n_seq entries must be at least 2")
        if k_max < 0:
            raise ValueError("k_max must be nonnegative")
        self.n_seq = n_seq
        self.n_full = [2] + n_seq
        self.k_max = k_max
        self.C: NatSet = Intervals([(n, 2 * n) for n in n_seq])
        self._i_cache: dict[int, int] = {}
        self.D: NatSet = OntoSet(self)
        self.blocks = [self.block(k) for k in range(1, k_max + 1)]
        self.patches: dict[tuple[int, int], int] = {}
        self.displaced: list[dict] = []
        self._assign_patches()
        self.h = FinFun(2, self._h, kind="host-defined", label=f"onto-h[{self.n_seq}]")

    def i_of(self, k: int) -> int:
        i = self._i_cache.get(k)
        if i is None:
            i = self._i_cache[k] = bisect.bisect_right(self.n_full, 2 ** k) - 1
        return i

    def d(self, k: int) -> int:
        n = self.n_full[self.i_of(k)]
        return -(-(2 ** k) // n)

    def block(self, k: int) -> OntoBlock:
        i = self.i_of(k)
        n = self.n_full[i]
        d = -(-(2 ** k) // n)
        return OntoBlock(k, i, n, d, n * d - 2 ** k)

    def S(self, k: int) -> list[tuple[int, int]]:
        b = self.block(k)
        return [b.pair_at(j) for j in range(2 ** k)]

    def _in_CD(self, x, y):
        return x in self.C and y in self.D

    def _spare_pairs(self):
        for b in self.blocks:
            for j in range(2 ** b.k, b.R_size):
                x, y = b.pair_at(j)
                if x in self.C:
                    yield (x, y), f"surplus of R_{b.k}"
        # pairs of C × D lying in no R_k; rows of C up to the largest block
        top = max([2 * b.n for b in self.blocks] + [2 * n for n in self.n_seq[:1]])
        ys = [y for b in self.blocks for y in b.D_range]
        for x in self.C.elements_below(top):
            for y in ys:
                kb = self.blocks[(y - 1).bit_length() - 1]
                if not kb.n <= x < 2 * kb.n:
                    yield (x, y), "outside every R_k"

    def _assign_patches(self):
        needed = [1]
        for b in self.blocks:
            if b.i == 0:
                for j in range(2 ** b.k):
                    x, y = b.pair_at(j)
                    if x not in self.C:
                        needed.append(2 ** b.k + j)
                        self.displaced.append({"k": b.k, "pair": [x, y], "value": 2 ** b.k + j})
        spares = self._spare_pairs()
        self.modification = []
        for value in needed:
            pair = next(spares, None)
            if pair is None:
                self.modification.append({"value": value, "pair": None})
                continue
            self.patches[pair[0]] = value
            self.modification.append({"value": value, "pair": list(pair[0]), "source": pair[1]})
        self.covers_one = any(m["value"] == 1 and m["pair"] for m in self.modification)

    def _h(self, x, y):
        if self.patches:
            v = self.patches.get((x, y))
            if v is not None:
                return v
        return self.block_value(x, y)

    def block_value(self, x, y):
        """``g_k(x, y)`` on ``S_k`` and 0 elsewhere, before any patch."""
        if y < 2:
            return 0
        k = (y - 1).bit_length()
        n = self.n_full[self.i_of(k)]
        d = -(-(2 ** k) // n)
        if y <= 2 ** k - d or not n <= x < 2 * n:
            return 0
        j = (x - n) * d + (y - (2 ** k - d + 1))
        return 2 ** k + j if j < 2 ** k else 0

    def to_dict(self):
        return {"n": self.n_seq, "n0": 2, "k_max": self.k_max,
                "blocks": [b.to_dict() for b in self.blocks],
                "modification": self.modification, "displaced": self.displaced,
                "covers_one": self.covers_one}


def build_onto_construction(n_seq: Sequence[int], k_max: int) -> OntoConstruction:
    return OntoConstruction(n_seq, k_max)


def onto_invariants(oc: OntoConstruction) -> VerificationRecord:
    """Block-level invariants of the construction, checked exactly."""
    rec = VerificationRecord("onto-invariants", scope=f"k = 1..{oc.k_max}")
    prev_i, prev_top = 0, 0
    for b in oc.blocks:
        rec.check(b.i >= prev_i, k=b.k, condition="i(k) weakly increasing")
        rec.check(oc.n_full[b.i] <= 2 ** b.k and
                  (b.i + 1 >= len(oc.n_full) or oc.n_full[b.i + 1] > 2 ** b.k),
                  k=b.k, condition="i(k) = max{i : n_i <= 2^k}")
        rec.check(b.d == -(-(2 ** b.k) // b.n), k=b.k, condition="d_k = ceil(2^k / n)")
        rec.check(1 <= b.d <= 2 ** (b.k - 1), k=b.k, condition="1 <= d_k <= 2^(k-1)")
        rec.check(len(b.D_range) == b.d and b.D_range.start > prev_top, k=b.k,
                  condition="D_k disjoint, |D_k| = d_k")
        rec.check(2 ** b.k <= b.R_size <= 2 ** b.k + b.n, k=b.k,
                  condition="2^k <= |R_k| <= 2^k + n")
        vals = sorted(oc.block_value(x, y) for x, y in oc.S(b.k))
        rec.check(vals == list(range(2 ** b.k, 2 ** (b.k + 1))),
                  k=b.k, condition="g_k is a bijection S_k -> [2^k, 2^(k+1))")
        prev_i, prev_top = b.i, 2 ** b.k
    return rec


def verify_onto(oc: OntoConstruction, k_max: int | None = None) -> VerificationRecord:
    """Exhaustive scan of ``h`` over ``(C × D)`` restricted to the first blocks."""
    k_max = oc.k_max if k_max is None else k_max
    if k_max > oc.k_max:
        raise ValueError(f"construction only has {oc.k_max} blocks")
    target = 2 ** (k_max + 1)
    rec = VerificationRecord("onto-coverage", scope=f"values below {target}")
    if k_max == 0:
        rec.details.update(vacuous=True, pairs_scanned=0)
        return rec
    ys = oc.D.elements_below(2 ** k_max + 1) if k_max >= 1 else []
    ys = sorted(set(ys) | {y for (x, y) in oc.patches})
    tops = [2 * b.n for b in oc.blocks[:k_max]] + [x + 1 for (x, y) in oc.patches]
    xs = oc.C.elements_below(max(tops, default=0))
    h = oc.h
    witness: dict[int, tuple[int, int]] = {}
    for x in xs:
        for y in ys:
            v = h(x, y)
            if v < target and v not in witness:
                witness[v] = (x, y)
    if 0 not in witness and oc.n_seq:
        # every block row may be used up; C is finite, so look further for a zero
        zero = next(((x, y) for x in oc.C.elements_below(2 * oc.n_seq[-1]) for y in ys
                     if h(x, y) == 0), None)
        if zero:
            witness[0] = zero
    need = [0] + list(range(2, target))
    if oc.covers_one and target > 1:
        need.append(1)
    missing = sorted(v for v in need if v not in witness)
    if missing:
        rec.fail(condition="coverage-gap", value=missing[0])
    outside = [v for v, p in witness.items() if not oc._in_CD(*p)]
    rec.check(not outside, condition="witness outside C × D",
              value=outside[0] if outside else None)
    rec.details.update(pairs_scanned=len(xs) * len(ys), covered=len(witness),
                       covers_one=oc.covers_one,
                       value_one_witness=list(witness[1]) if 1 in witness else None)
    return rec


def verify_onto_preserves_ideal(oc: OntoConstruction, T: NatSet, epsilon,
                                k_range: Sequence[int]) -> VerificationRecord:
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    rec = VerificationRecord("onto-preserves-ideal", scope=f"k in {list(k_range)}")
    rows_out = []
    for k in k_range:
        b = oc.block(k)
        xs = T.elements_below(2 * b.n, lo=b.n)
        ys = T.elements_below(b.D_range.stop, lo=b.D_range.start)
        first = len(xs) <= b.n * eps
        second = len(ys) <= b.d
        row = {"k": k, "n": b.n, "d": b.d, "row_count": len(xs), "column_count": len(ys),
               "first_premise": first, "second_premise": second}
        if first and second:
            vals = {oc.h(x, y) for x in xs for y in ys}
            bound = 2 * eps * 2 ** k
            row.update(image_size=len(vals), bound=bound, holds=len(vals) <= bound)
            if len(vals) > bound:
                rec.fail(k=k, image_size=len(vals), bound=bound)
        else:
            row.update(status="premise-unmet")
        rows_out.append(row)
    rec.details["rows"] = rows_out
    return rec


# -- right inverse and generation -------------------------------------------------------


@dataclass
class RightInverse:
    r1: list[int]
    r2: list[int]
    search_horizon: int

    def tables(self) -> tuple[FinFun, FinFun]:
        return (from_table(dict(enumerate(self.r1)), 0, label="r_1"),
                from_table(dict(enumerate(self.r2)), 0, label="r_2"))

    def to_dict(self):
        return {"N_out": len(self.r1), "search_horizon": self.search_horizon,
                "r1": self.r1, "r2": self.r2}


def right_inverse(t: FinFun, Z: NatSet, N_out: int, search_horizon: int) -> RightInverse:
    """Lexicographically least ``(z1, z2) ∈ (Z ∩ [0, H))^2`` with ``t(z1, z2) = n``."""
    if t.arity != 2:
        raise ValueError("right_inverse handles binary t")
    zs = Z.elements_below(search_horizon)
    found: dict[int, tuple[int, int]] = {}
    for z1 in zs:
        for z2 in zs:
            v = t(z1, z2)
            if v < N_out and v not in found:
                found[v] = (z1, z2)
        if len(found) == N_out:
            break
    for n in range(N_out):
        if n not in found:
            raise NoPreimage(n, search_horizon)
    return RightInverse([found[n][0] for n in range(N_out)],
                        [found[n][1] for n in range(N_out)], search_horizon)


@dataclass
class Generated:
    function: FinFun
    record: VerificationRecord


def generate_function(t: FinFun, r: RightInverse, u: FinFun, N: int) -> Generated:
    """Build ``t(r_1∘u, r_2∘u)`` and check it equals ``u`` on ``[0, N)^m``."""
    top = max((u(*xs) for xs in itertools.product(range(N), repeat=u.arity)), default=-1)
    if top >= len(r.r1):
        raise RTableGap(f"{u.label} reaches {top} on [0,{N})^{u.arity}; "
                        f"r tables cover [0,{len(r.r1)})")
    r1, r2 = r.tables()
    composite = compose(t, [compose(r1, [u]), compose(r2, [u])],
                        label=f"t(r_1∘[{u.label}], r_2∘[{u.label}])")
    cmp = prefix_equal(composite, u, N)
    rec = VerificationRecord("generated-function", scope=f"[0,{N})^{u.arity}")
    rec.check(cmp.equal, condition="prefix-equal", witness=cmp.witness)
    rec.check(isinstance(composite.term, Term) and composite.term.arity == u.arity,
              condition="arity preserved")
    rec.details.update(term=str(composite.term), max_value=top)
    return Generated(composite, rec)


# -- the whole pipeline --------------------------------------------------------------


@dataclass
class PipelineConfig:
    set_horizon: int = 2 ** 20      # enumeration horizon for A
    image_horizon: int = 2 ** 10    # horizon for B = g[A] and the large-set map
    interval_count: int = 4
    e_max: int = 64
    k_max: int = 14
    n_out: int = 2 ** 12
    search_horizon: int = 2 ** 17
    target: str = "x1 * x1 + 1"
    target_check: int = 50


@dataclass
class PipelineResult:
    config: PipelineConfig
    stages: dict = field(default_factory=dict)
    g: FinFun | None = None
    A: NatSet | None = None
    B: NatSet | None = None
    large_set: LargeSetMap | None = None
    onto: OntoConstruction | None = None
    t: FinFun | None = None
    Z: NatSet | None = None
    r: RightInverse | None = None
    generated: Generated | None = None

    @property
    def passed(self) -> bool:
        return all(rec.passed for st in self.stages.values()
                   for rec in st.get("records", []))

    def to_dict(self):
        return {"passed": self.passed, "stages": self.stages}


def _stage(name):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except (PremiseUnmet, NotEnoughIntervals, NoPreimage, RTableGap,
                    SetTooSmall, ValueError) as exc:
                raise PipelineStageError(name, exc) from exc
        return run
    return wrap


def run_precompleteness_pipeline(g: FinFun, A: NatSet,
                                 config: PipelineConfig | None = None) -> PipelineResult:
    cfg = config or PipelineConfig()
    res = PipelineResult(cfg)

    if g.arity > 1:
        un = _stage("unarize")(unarize)(g, A, cfg.set_horizon)
        res.stages["unarize"] = {"result": un, "records": [un.record]}
        g = un.h
    res.g, res.A = g, A

    a_elems = A.elements_below(cfg.set_horizon)
    a_est = upper_density_estimate(A, [cfg.set_horizon])
    B = FiniteSet(sorted({g(a) for a in a_elems}), label=f"image[{g.label}]")
    b_est = upper_density_estimate(B, [cfg.image_horizon])
    res.B = B
    res.stages["image"] = {"A_estimate": a_est, "B_estimate": b_est, "B_size": len(B)}

    e = next((e for e in range(2, cfg.e_max + 1) if b_est.ratio > Fraction(3, e)), None)
    if e is None:
        raise PipelineStageError("large-set-map", PremiseUnmet(
            f"density estimate {b_est.ratio} of B at {cfg.image_horizon} "
            f"is not above 3/e for any e <= {cfg.e_max}"))
    lsm = _stage("large-set-map")(build_large_set_map)(B, e, cfg.interval_count,
                                                      cfg.image_horizon)
    res.large_set = lsm
    res.stages["large-set-map"] = {"result": lsm, "records": [lsm.record]}

    oc = _stage("onto")(build_onto_construction)(lsm.n_seq, cfg.k_max)
    onto_inv = onto_invariants(oc)
    onto_cov = verify_onto(oc)
    res.onto = oc
    res.stages["onto"] = {"result": oc, "records": [onto_inv, onto_cov]}

    fg = compose(lsm.f, [g], label="f∘g")
    t_term = compose(oc.h, [compose(fg, [projection(2, 1)]), projection(2, 2)],
                     label="t(x,y) = h(f(g(x)), y)")
    # same function as t_term, evaluated without the nested wrappers
    h_raw = oc._h
    first = functools.lru_cache(maxsize=None)(lambda x, f=lsm.f, g=g: f(g(x)))
    t = FinFun(2, lambda x, y: h_raw(first(x), y), kind="composition-term",
               label=t_term.label, term=t_term.term)
    res.t = t
    cover = VerificationRecord("t-covers", scope=f"t[A × D] ⊇ [0, {cfg.n_out})")
    ds = oc.D.elements_below(cfg.n_out)
    seen = set()
    for x in a_elems:
        u = fg(x)
        for y in ds:
            v = oc.h(u, y)
            if v < cfg.n_out:
                seen.add(v)
    missing = [v for v in range(cfg.n_out) if v not in seen]
    cover.check(not missing, condition="coverage-gap", value=missing[0] if missing else None)
    res.stages["t"] = {"definition": t.label, "term": str(t.term), "records": [cover]}

    Z = Union(A, oc.D, label=f"union({A.label};D)")
    res.Z = Z
    r = _stage("right-inverse")(right_inverse)(t, Z, cfg.n_out, cfg.search_horizon)
    inv = VerificationRecord("right-inverse", scope=f"n below {cfg.n_out}")
    for n in range(cfg.n_out):
        if t(r.r1[n], r.r2[n]) != n or r.r1[n] not in Z or r.r2[n] not in Z:
            inv.fail(n=n)
            break
    res.r = r
    res.stages["right-inverse"] = {"result": r, "records": [inv]}

    u = parse_function(cfg.target)
    gen = _stage("generate")(generate_function)(t, r, u, cfg.target_check)
    res.generated = gen
    res.stages["generate"] = {"target": u.label, "records": [gen.record]}
    return res


__all__ = [
    "UnarizationResult", "unarize", "LargeSetMap", "build_large_set_map", "OntoBlock",
    "OntoConstruction", "build_onto_construction", "onto_invariants", "verify_onto",
    "verify_onto_preserves_ideal", "RightInverse", "right_inverse", "Generated",
    "generate_function", "PipelineConfig", "PipelineResult", "run_precompleteness_pipeline",
]
