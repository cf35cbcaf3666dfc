"""
Sets of naturals and their density
==================================

Prefix ratios |A ∩ [0, n)| / n at a few horizons, and the dyadic block table.
Every number printed is an exact fraction.
"""

import numpy as np

from densityclone import sets
from densityclone.density import dyadic_block_densities, upper_density_estimate
from densityclone.sets import parse_set

# the named families, plus a union built from the set language
families = [sets.evens(), sets.squares(), sets.powers(2), parse_set("union(squares;multiples:7)")]

horizons = [2 ** k for k in (4, 8, 12, 16)]
for A in families:
    rep = upper_density_estimate(A, horizons)
    ratios = [f"{c}/{n}" for c, n in zip(rep.counts, rep.horizons)]
    print(f"{A.label:28s} counts {ratios}  max ratio {rep.ratio}")

# squares thin out like 1/sqrt(n): the block densities halve every two blocks
blocks = dyadic_block_densities(sets.squares(), 12)
print("squares, block k holds", [str(b) for b in blocks])

# the same numbers as floats, only for eyeballing the decay
print(np.round(np.array([float(b) for b in blocks]), 4))

# prefix counts come from a checkpoint cache, so large horizons are cheap
print("squares below 10^12:", sets.squares().prefix_count(10 ** 12))
