"""Finite-horizon density computations.

Upper density is a limsup and is never computed here.  Every function in this
module makes an exact statement about explicitly recorded horizons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Sequence

from .errors import PreconditionViolated
from .sets import NatSet


@dataclass(frozen=True)
class DyadicBlock:
    k: int
    count: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.count, 2 ** self.k)


@dataclass(frozen=True)
class DensityReport:
    """Prefix ratios at the given horizons plus the dyadic block table.

    ``ratio`` is the largest observed ``|A ∩ [0, n)| / n``; it is a finite
    witness, not the upper density.
    """

    set_label: str
    horizons: tuple[int, ...]
    counts: tuple[int, ...]
    horizon: int
    count: int
    blocks: tuple[DyadicBlock, ...] = field(default=())

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.count, self.horizon)

    @property
    def ratios(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, n) for c, n in zip(self.counts, self.horizons))

    def to_dict(self) -> dict:
        return {
            "set": self.set_label,
            "claim": "lower-bound witness for upper density at the listed horizons",
            "horizon": self.horizon,
            "count": self.count,
            "ratio": self.ratio,
            "table": [{"n": n, "count": c, "ratio": Fraction(c, n)}
                      for n, c in zip(self.horizons, self.counts)],
            "dyadic_blocks": [{"k": b.k, "count": b.count, "ratio": b.ratio}
                              for b in self.blocks],
        }


def prefix_count(A: NatSet, n: int) -> int:
    """``|A ∩ [0, n)|``."""
    return A.prefix_count(n)


def block_counts(A: NatSet, k_max: int) -> list[int]:
    """``|A ∩ [2^k, 2^(k+1))|`` for ``k = 0..k_max``."""
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    pc = [A.prefix_count(2 ** k) for k in range(k_max + 2)]
    return [pc[k + 1] - pc[k] for k in range(k_max + 1)]


def dyadic_block_densities(A: NatSet, k_max: int) -> list[Fraction]:
    return [Fraction(c, 2 ** k) for k, c in enumerate(block_counts(A, k_max))]


def upper_density_estimate(A: NatSet, horizons: Sequence[int]) -> DensityReport:
    horizons = tuple(horizons)
    if not horizons:
        raise ValueError("horizons must be nonempty")
    if any(n <= 0 for n in horizons):
        raise ValueError("horizons must be positive")
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ValueError("horizons must be strictly increasing")
    counts = tuple(A.prefix_count(n) for n in horizons)
    best = max(range(len(horizons)), key=lambda j: (Fraction(counts[j], horizons[j]), -j))
    # blocks lying entirely below the largest horizon
    k_top = horizons[-1].bit_length() - 2
    blocks = ()
    if k_top >= 0:
        blocks = tuple(DyadicBlock(k, c) for k, c in enumerate(block_counts(A, k_top)))
    return DensityReport(A.label, horizons, counts, horizons[best], counts[best], blocks)


@dataclass(frozen=True)
class ScaleBoundRecord:
    n: int
    epsilon: Fraction
    image_count: int
    source_count: int
    passed: bool

    @property
    def left(self) -> Fraction:
        return Fraction(self.image_count, self.n)

    @property
    def right(self) -> Fraction:
        return Fraction(self.source_count, self.n)

    def to_dict(self):
        return {"n": self.n, "epsilon": self.epsilon, "left": self.left,
                "right": self.right, "passed": self.passed}


def scale_bound_check(f, A: NatSet, epsilon, n: int) -> ScaleBoundRecord:
    """Check ``(1/n)|f[A] ∩ [0,n)| <= (1/n)|A ∩ [0, n/ε)|`` for a unary ``f``.

    Raises PreconditionViolated at the first ``x < ceil(n/ε)`` with
    ``f(x) < x·ε``.  Under the precondition every ``x >= n/ε`` has
    ``f(x) >= n``, so the image below ``n`` is computed exactly.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    if f.arity != 1:
        raise ValueError("scale_bound_check needs a unary function")
    cut = ceil(n / eps)
    for x in range(cut):
        if f(x) < x * eps:
            raise PreconditionViolated(f"f({x}) = {f(x)} < {x}·{eps}", witness=x)
    image = {v for v in (f(a) for a in A.elements_below(cut)) if v < n}
    source = A.prefix_count(cut)
    return ScaleBoundRecord(n, eps, len(image), source, len(image) <= source)
