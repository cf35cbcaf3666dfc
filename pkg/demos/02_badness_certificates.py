"""
Badness certificates for the square-root indicator
==================================================

f(x) = sqrt(x) when x is a square, else 0.  On the squares f is onto, so a
sparse set of large squares still has an image that fills a fixed fraction
of an initial segment.  The search below finds such sets and writes them as
a certificate that can be checked on its own.
"""

from fractions import Fraction

from densityclone import sets
from densityclone.badness import (assemble_global_witness, badness_from_witness,
                                  membership_probe, validate_certificate)
from densityclone.errors import StageFailure
from densityclone.functions import parse_function

f = parse_function("sqrtind")
eps = Fraction(1, 3)

# one stage: the least m, t and n for i = 1
w = badness_from_witness(f, sets.squares(), eps, 1)
print(f"i=1: m={w.m} n={w.n} t={w.t} A={w.A}")

# two stages, each i past the previous n and t; delta feeds the density chain
asm = assemble_global_witness(f, sets.squares(), eps, 2, delta=Fraction(1, 2))
print("n =", asm.n_seq, " t =", asm.t_seq, " |A| =", len(asm.A))
# s lands past n_J here, so the chain holds vacuously on (s, n_J]
print("assembly invariants:", asm.record.passed, " density chain:", asm.density_record.passed,
      f"(v={asm.v}, s={asm.s})")

cert = asm.certificate("sqrtind", "squares")
print("certificate re-validated:", validate_certificate(f, cert).passed)

# a third stage would need a set sparse with respect to i ~ 1.5e11
try:
    assemble_global_witness(f, sets.squares(), eps, 3)
except StageFailure as exc:
    print(f"three stages: stage {exc.stage} fails with {exc.cause.code}")

# the constant 0 has a one-point image, which stops being dense once t > 1/eps
try:
    assemble_global_witness(parse_function("const:0"), sets.squares(), eps, 2)
except StageFailure as exc:
    print(f"const:0: stage {exc.stage} fails with {exc.cause.code}")

# the cheap heuristic probe agrees on these two
for spec in ("sqrtind", "id"):
    print(spec, "->", membership_probe(parse_function(spec), [sets.squares()]).kind)
