"""
A binary map onto an initial segment
====================================

From a growing sequence n_1 < n_2 < ... the construction picks a thin set D
and a map h with h[C × D] covering [0, 2^(k_max+1)), where C is the union of
the rows [n_i, 2n_i).  Here we build it for n_i = 2^i and n_i = 3i.
"""

from fractions import Fraction

import numpy as np

from densityclone import sets
from densityclone.precomplete import (build_onto_construction, onto_invariants, verify_onto,
                                      verify_onto_preserves_ideal)

k_max = 10
for name, rule in (("2^i", lambda i: 2 ** i), ("3i", lambda i: 3 * i)):
    seq, i = [], 1
    while not seq or seq[-1] <= 2 ** (k_max + 1):
        seq.append(rule(i))
        i += 1
    oc = build_onto_construction(seq, k_max)
    print(f"n_i = {name}: invariants {onto_invariants(oc).passed}, coverage {verify_onto(oc).passed}")
    print("   first blocks (k, n, d, surplus):",
          [(b.k, b.n, b.d, b.surplus) for b in oc.blocks[:5]])
    print("   patches:", oc.modification)

    # how thin is D? count it per dyadic block
    D = np.array(oc.D.elements_below(2 ** k_max + 1))
    per_block = np.bincount(np.floor(np.log2(D)).astype(int))
    print("   |D ∩ [2^k, 2^(k+1))|:", per_block.tolist())

# with n_i = 2^i, h(x, 2^k) = x on the k-th row block
oc = build_onto_construction([2 ** i for i in range(1, 13)], k_max)
print([oc.h(x, 16) for x in range(16, 24)])

# a density-zero set stays small under h, block by block
rec = verify_onto_preserves_ideal(oc, sets.squares(), Fraction(1, 8), range(6, 11))
for row in rec.details["rows"]:
    print(row)
