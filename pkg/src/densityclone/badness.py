"""Badness certificates and finite-horizon non-membership witnesses.

A certificate for ``f`` is a rational ``ε > 0`` plus entries ``(i, n, t, A)``
where ``A ⊆ [i, n)`` is sparse with respect to ``i``
(``|A ∩ [0, r)| <= r / 2^i`` for every ``r``) and ``f[A^k]`` meets ``[0, t)``
in at least ``ε·t`` points.  A valid certificate says that ``f`` is bad for
the finitely many ``i`` it lists, nothing more.
"""

from __future__ import annotations

import bisect
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .density import block_counts
from .errors import (NoMFound, NoStabilizingN, NoTFound, SearchFailure,
                     SpecParseError, StageFailure)
from .functions import (FinFun, ShadowSpec, enumerate_shadow_specs, image,
                        shadow)
from .report import VerificationRecord, fraction_str, parse_fraction
from .sets import FiniteSet, NatSet, Union

CERTIFICATE_FORMAT = "densityclone/badness-certificate"


def exceeds_scaled(count: int, i: int, bound: int) -> bool:
    """``count * 2**i > bound`` without building ``2**i`` when it is huge."""
    if count <= 0:
        return False
    if i >= bound.bit_length():
        return True
    return (count << i) > bound


@dataclass(frozen=True)
class CertificateEntry:
    i: int
    n: int
    t: int
    A: tuple[int, ...]

    def to_dict(self):
        return {"i": self.i, "n": self.n, "t": self.t, "A": list(self.A)}


@dataclass
class BadnessCertificate:
    epsilon: Fraction
    entries: list[CertificateEntry] = field(default_factory=list)
    function: str = ""
    witness_set: str = ""

    def to_dict(self):
        return {"format": CERTIFICATE_FORMAT, "version": 1, "function": self.function,
                "witness_set": self.witness_set, "epsilon": fraction_str(self.epsilon),
                "entries": [e.to_dict() for e in self.entries]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "BadnessCertificate":
        if data.get("format") != CERTIFICATE_FORMAT:
            raise SpecParseError(f"not a badness certificate (format={data.get('format')!r})")
        entries = [CertificateEntry(int(e["i"]), int(e["n"]), int(e["t"]),
                                    tuple(int(a) for a in e["A"]))
                   for e in data["entries"]]
        return cls(parse_fraction(data["epsilon"]), entries,
                   data.get("function", ""), data.get("witness_set", ""))

    @classmethod
    def loads(cls, text: str) -> "BadnessCertificate":
        return cls.from_dict(json.loads(text))


def _check_entry(f: FinFun, eps: Fraction, e: CertificateEntry) -> dict | None:
    """First violated condition of one entry, or None."""
    if e.n < e.i or e.t < e.i:
        return {"condition": "bounds", "detail": f"need n, t >= i (i={e.i}, n={e.n}, t={e.t})"}
    A = e.A
    if any(b <= a for a, b in zip(A, A[1:])):
        return {"condition": "sorted", "detail": "A must be strictly increasing"}
    if A and (A[0] < e.i or A[-1] >= e.n):
        bad = A[0] if A[0] < e.i else A[-1]
        return {"condition": "range", "detail": f"{bad} is outside [i, n)", "value": bad}
    # |A ∩ [0, r)| only grows at r = a + 1, and r/2^i grows with r
    for j, a in enumerate(A):
        if exceeds_scaled(j + 1, e.i, a + 1):
            return {"condition": "sparsity", "r": a + 1, "count": j + 1}
    hits = len(image(f, A, below=e.t))
    if hits < eps * e.t:
        return {"condition": "density", "count": hits, "required": eps * e.t}
    return None


def validate_certificate(f: FinFun, cert: BadnessCertificate) -> VerificationRecord:
    eps = Fraction(cert.epsilon)
    rec = VerificationRecord("badness-certificate")
    if eps <= 0:
        rec.fail(condition="epsilon", detail="epsilon must be positive")
    witnessed = sorted({e.i for e in cert.entries})
    rec.scope = (f"f is bad as far as witnessed for i in {witnessed}" if witnessed
                 else "no i witnessed")
    rec.details["epsilon"] = eps
    rec.details["entries"] = []
    for index, e in enumerate(cert.entries):
        problem = _check_entry(f, eps, e) if eps > 0 else None
        rec.details["entries"].append({"index": index, "i": e.i, "passed": problem is None})
        if problem is not None:
            rec.fail(entry=index, **problem)
    return rec


# -- search ------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchHorizons:
    m_max: int = 2 ** 38
    t_max: int = 2 ** 20
    n_max: int = 2 ** 38


@dataclass(frozen=True)
class BadnessWitness:
    entry: CertificateEntry
    m: int

    i = property(lambda self: self.entry.i)
    n = property(lambda self: self.entry.n)
    t = property(lambda self: self.entry.t)
    A = property(lambda self: self.entry.A)


def _least_sparse_start(elems: Sequence[int], i: int, n_max: int) -> int:
    """Least ``m >= i`` with ``|B ∩ [0,j)| <= j/2^i`` for all ``j`` in ``[m, n_max]``.

    For ``j`` in the stretch ``[e_{p-1}+1, e_p]`` the count is ``p``, and the
    last failing ``j`` there is ``min(e_p, p·2^i - 1)``.
    """
    P = len(elems)
    if P and i < 62 and n_max < 2 ** 62 and (P << i) < 2 ** 62:
        e = np.asarray(elems, dtype=np.int64)
        p = np.arange(1, P + 1, dtype=np.int64)
        lo = np.maximum(e + 1, i)
        hi = np.append(e[1:], np.int64(n_max))
        top = np.minimum(hi, (p << i) - 1)
        hit = top >= lo
        last_fail = int(top[hit].max()) if hit.any() else -1
        return max(i, last_fail + 1)
    last_fail = -1
    for p in range(1, P + 1):
        lo = max(elems[p - 1] + 1, i)
        hi = elems[p] if p < P else n_max
        if lo <= hi:
            top = hi if exceeds_scaled(p, i, hi) else (p << i) - 1
            if top >= lo:
                last_fail = max(last_fail, top)
    return max(i, last_fail + 1)


def badness_from_witness(f: FinFun, B: NatSet, epsilon, i: int,
                         horizons: SearchHorizons = SearchHorizons()) -> BadnessWitness:
    """Bounded search for one entry ``(i, n, t, A)`` with ``A = B ∩ [m, n)``."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    h = horizons
    elems = B.elements_below(h.n_max)
    m = _least_sparse_start(elems, i, h.n_max)
    if m > h.m_max:
        raise NoMFound(f"no m in [{i}, {h.m_max}] makes {B.label} sparse w.r.t. i={i} "
                       f"up to {h.n_max}", horizon=h.m_max)
    D = elems[bisect.bisect_left(elems, m):]

    # value -> least n' such that the value is reached from (D ∩ [0, n'))^k
    reach: dict[int, int] = {}
    if f.arity == 1:
        for d in D:
            v = f(d)
            if v < h.t_max and v not in reach:
                reach[v] = d + 1
    else:
        for xs in itertools.product(D, repeat=f.arity):
            v = f(*xs)
            if v < h.t_max:
                top = max(xs) + 1
                if top < reach.get(v, h.n_max + 1):
                    reach[v] = top

    values = sorted(reach)
    t = None
    prev = -1
    for p in range(len(values) + 1):
        lo = max(prev + 1, i)
        hi = values[p] if p < len(values) else h.t_max
        # t in [prev+1, hi] sees exactly p image points below it
        if lo <= hi and lo * eps <= p:
            t = lo
            break
        if p < len(values):
            prev = values[p]
    if t is None:
        raise NoTFound(f"no t in [{i}, {h.t_max}] with |f[D^k] ∩ [0,t)| >= {eps}·t",
                       horizon=h.t_max)

    n = max([m] + [reach[v] for v in values if v < t])
    if n > h.n_max:
        raise NoStabilizingN(f"image below {t} does not stabilize by {h.n_max}",
                             horizon=h.n_max)
    A = tuple(D[:bisect.bisect_left(D, n)])
    return BadnessWitness(CertificateEntry(i, n, t, A), m)


@dataclass
class WitnessAssembly:
    epsilon: Fraction
    witnesses: list[BadnessWitness]
    record: VerificationRecord
    delta: Fraction | None = None
    v: int | None = None
    s: int | None = None
    density_record: VerificationRecord | None = None

    @property
    def n_seq(self):
        return [w.n for w in self.witnesses]

    @property
    def t_seq(self):
        return [w.t for w in self.witnesses]

    @property
    def A(self) -> tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(w.A for w in self.witnesses))

    def certificate(self, function: str = "", witness_set: str = "") -> BadnessCertificate:
        return BadnessCertificate(self.epsilon, [w.entry for w in self.witnesses],
                                  function, witness_set)

    def to_dict(self):
        out = {"epsilon": self.epsilon, "J": len(self.witnesses),
               "entries": [dict(w.entry.to_dict(), m=w.m, size=len(w.A))
                           for w in self.witnesses],
               "n": self.n_seq, "t": self.t_seq, "invariants": self.record}
        if self.delta is not None:
            out.update(delta=self.delta, v=self.v, s=self.s, density_chain=self.density_record)
        return out


def least_v(delta: Fraction) -> int:
    """Least ``v > 0`` with ``1/2^v < δ/2``."""
    v = 1
    while Fraction(1, 2 ** v) >= delta / 2:
        v += 1
    return v


def least_s(n_prev: int, delta: Fraction) -> int:
    """Least ``s >= 1`` with ``n_prev / s < δ/2``."""
    return max(1, int(2 * n_prev / delta) + 1) if n_prev else 1


def check_density_chain(A: Sequence[int], s: int, n_top: int, delta: Fraction) -> VerificationRecord:
    """Exact check of ``|A ∩ [0,m)| < δ·m`` for every ``m`` in ``(s, n_top]``.

    The ratio only needs checking at ``m = s+1`` and at ``m = a+1`` for
    ``a ∈ A``: between those points the count is constant and ``m`` grows.
    """
    rec = VerificationRecord("density-chain", scope=f"m in ({s}, {n_top}]")
    num, den = delta.numerator, delta.denominator
    start = bisect.bisect_left(A, s + 1)  # a + 1 > s + 1  <=>  a > s
    first = bisect.bisect_right(A, s)
    points = [(s + 1, start)] + [(A[j] + 1, j + 1) for j in range(first, len(A))]
    worst = None
    checked = 0
    for m, c in points:
        if m > n_top:
            break
        checked += 1
        if worst is None or c * worst[0] > worst[1] * m:
            worst = (m, c)
        if c * den >= num * m:
            rec.fail(m=m, count=c, ratio=Fraction(c, m))
            break
    rec.details.update(checked_points=checked, vacuous=checked == 0,
                       worst_m=worst[0] if worst else None,
                       worst_ratio=Fraction(worst[1], worst[0]) if worst else None)
    return rec


def assemble_global_witness(f: FinFun, B: NatSet, epsilon, J: int,
                            horizons: SearchHorizons = SearchHorizons(),
                            delta=None) -> WitnessAssembly:
    eps = Fraction(epsilon)
    witnesses: list[BadnessWitness] = []
    n_prev = t_prev = 0
    for j in range(1, J + 1):
        i = max(n_prev, t_prev) + 1
        try:
            w = badness_from_witness(f, B, eps, i, horizons)
        except SearchFailure as exc:
            raise StageFailure(j, exc) from exc
        witnesses.append(w)
        n_prev, t_prev = w.n, w.t

    rec = VerificationRecord("witness-assembly", scope=f"J = {J}")
    n_prev = t_prev = 0
    for j, w in enumerate(witnesses, 1):
        rec.check(w.n > n_prev, stage=j, condition="n increasing", n=w.n)
        rec.check(w.t > t_prev, stage=j, condition="t increasing", t=w.t)
        if w.A:
            rec.check(w.A[0] >= n_prev and w.A[-1] < w.n, stage=j, condition="A_j range")
        for c, a in enumerate(w.A, 1):
            if exceeds_scaled(c, n_prev, a + 1):
                rec.fail(stage=j, condition="sparsity", r=a + 1, count=c)
                break
        hits = len(image(f, w.A, below=w.t))
        rec.check(hits >= eps * w.t, stage=j, condition="density", count=hits)
        n_prev, t_prev = w.n, w.t

    out = WitnessAssembly(eps, witnesses, rec)
    if delta is not None:
        d = Fraction(delta)
        if d <= 0:
            raise ValueError("delta must be positive")
        v = least_v(d)
        n_seq = [0] + out.n_seq
        # a finite assembly has nothing past n_J, so n_J stands in for later n's
        capped = v - 1 > J
        n_used = n_seq[min(v - 1, J)]
        s = least_s(n_used, d)
        chain = check_density_chain(out.A, s, n_seq[-1], d)
        chain.details.update(v=v, s=s, n_v_minus_1=n_used, capped_at_n_J=capped)
        out.delta, out.v, out.s, out.density_record = d, v, s, chain
    return out


# -- probing and shadows -------------------------------------------------------------

@dataclass(frozen=True)
class ProbeHorizons:
    input_horizon: int = 2 ** 22
    k_max: int = 10
    a_bound: int = 2
    tail: int = 3
    image_threshold: Fraction = Fraction(1, 4)
    set_threshold: Fraction = Fraction(1, 32)
    max_tuples: int = 2_000_000


@dataclass
class ProbeVerdict:
    kind: str  # "NonMemberWitnessed" | "Inconclusive"
    reports: list
    witness: dict | None = None

    def to_dict(self):
        return {"verdict": self.kind, "witness": self.witness, "reports": self.reports}


def membership_probe(f: FinFun, test_sets: Sequence[NatSet],
                     horizons: ProbeHorizons = ProbeHorizons()) -> ProbeVerdict:
    """Look for a shadow and a test set whose image has dense tail blocks.

    The image is computed from inputs below ``input_horizon`` and so is a
    subset of the true image; its block counts are lower bounds.
    """
    h = horizons
    ks = range(max(0, h.k_max - h.tail + 1), h.k_max + 1)
    reports = []
    for T in test_sets:
        t_blocks = block_counts(T, h.k_max)
        set_tail = [Fraction(t_blocks[k], 2 ** k) for k in ks]
        inputs = T.elements_below(h.input_horizon)
        for spec in enumerate_shadow_specs(f.arity, h.a_bound):
            g = shadow(f, spec)
            cap = len(inputs)
            if len(inputs) ** g.arity > h.max_tuples:
                cap = int(round(h.max_tuples ** (1 / g.arity)))
                while cap ** g.arity > h.max_tuples:
                    cap -= 1
            vals = image(g, inputs[:cap], below=2 ** (h.k_max + 1))
            img_blocks = [sum(1 for v in vals if 2 ** k <= v < 2 ** (k + 1)) for k in ks]
            img_tail = [Fraction(c, 2 ** k) for c, k in zip(img_blocks, ks)]
            report = {"set": T.label, "shadow": str(spec), "inputs_used": cap,
                      "truncated": cap < len(inputs), "blocks": list(ks),
                      "image_block_ratios": img_tail, "set_block_ratios": set_tail}
            reports.append(report)
            if (all(r >= h.image_threshold for r in img_tail)
                    and all(r <= h.set_threshold for r in set_tail)):
                witness = {"shadow": str(spec), "perm": list(spec.perm),
                           "fixed": list(spec.fixed), "set": T.label}
                return ProbeVerdict("NonMemberWitnessed", [report], witness)
    return ProbeVerdict("Inconclusive", reports)


@dataclass
class LiftResult:
    lifted: NatSet
    record: VerificationRecord


def shadow_witness_lift(f: FinFun, s: ShadowSpec, B: NatSet, N: int = 50) -> LiftResult:
    """``B' = B ∪ ā`` and a check that ``f[B'^k] ⊇ f_{π,ā}[B^{k-ℓ}]`` below ``N``."""
    s.validate(f.arity)
    lifted = B if not s.fixed else Union(B, FiniteSet(s.fixed),
                                         label=f"union({B.label};finite:{','.join(map(str, s.fixed))})")
    g = shadow(f, s)
    small = image(g, B.elements_below(N), below=N)
    base = lifted.elements_below(max([N] + [a + 1 for a in s.fixed]))
    big = image(f, base, below=N)
    rec = VerificationRecord("shadow-lift-containment", scope=f"values below {N}")
    missing = sorted(small - big)
    if missing:
        rec.fail(value=missing[0])
    rec.details.update(shadow_image_size=len(small), lifted_image_size=len(big))
    return LiftResult(lifted, rec)


def ak_containment_check(f: FinFun, B: NatSet, i: int, N: int) -> VerificationRecord:
    """Unary case: ``f[B] ∖ f[[0,i]] ⊆ f[B ∖ [0,i]] ⊆ f[B]`` on ``[0, N)``.

    Inputs are taken from ``B ∩ [0, N)``.  A strict failure of the set
    equality (a value of ``f[B ∖ [0,i]]`` also hit from ``[0,i]``) is recorded
    in ``details`` without failing the record.
    """
    if f.arity != 1:
        raise ValueError("only the unary case is checked")
    elems = B.elements_below(N)
    fB = image(f, elems, below=N)
    f_tail = image(f, [b for b in elems if b > i], below=N)
    f_head = image(f, range(i + 1), below=N)
    rec = VerificationRecord("ak-containments", scope=f"values below {N}, inputs below {N}")
    lower = sorted((fB - f_head) - f_tail)
    upper = sorted(f_tail - fB)
    if lower:
        rec.fail(containment="f[B]\\f[[0,i]] ⊆ f[B\\[0,i]]", value=lower[0])
    if upper:
        rec.fail(containment="f[B\\[0,i]] ⊆ f[B]", value=upper[0])
    overlap = sorted(f_tail & f_head)
    rec.details.update(equality_holds=not overlap, equality_counterexamples=overlap[:10])
    return rec
