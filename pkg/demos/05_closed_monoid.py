"""
Composition laws of a closed transformation monoid
==================================================

ℕ is cut into five cells by residue mod 4.  Each branch of a pruned tree
gives a map sending A_x into T_x and A_y into T_y; h collapses A_y to 0.
Everything is tabulated on [0, N) with numpy and composed by indexing.
"""

import numpy as np

from densityclone.monoid import (CELLS, branch_elements, collapse_map, full_binary_tree,
                                 make_partition, mutate, parse_tree, verify_monoid_laws)

N = 2000
p = make_partition(N)
print({CELLS[c]: p.cells[c].elements_below(17) for c in range(5)})

tree = full_binary_tree(3)
print(tree.text, "->", tree.branch_count(), "branches")
elems = branch_elements(p, tree)
h = collapse_map(p)

# composition is fancy indexing: (f∘g)[x] = f[g[x]]
f, g = elems[0].table(N), elems[-1].table(N)
print("f∘g == g on [0, N):", np.array_equal(f[g], g))
print("f∘h on 0..12:", f[h.table(N)][:13])

rec = verify_monoid_laws(p, tree, elems, N)
print("laws:", rec.passed, rec.details["checks"], rec.details["classes"])

# a single corrupted value is caught, with the point where it shows
bad = mutate(elems[0], 4, 7)
rec = verify_monoid_laws(p, tree, [bad] + elems[1:], N)
print("mutant:", rec.first_failure)

# trees may also be written by hand; '=v' gives a raw value, here one off its cell
own = parse_tree("(0:0(1:2),3:1(0:0),=7:=2(0:0))")
rec = verify_monoid_laws(p, own, branch_elements(p, own), 500)
print(own.text, "->", rec.passed, rec.first_failure)
