"""
Generating a function through one outside map
=============================================

g = square-root indicator on A = squares sends a density-zero set onto ℕ.
The pipeline turns g into a binary t with a right inverse r and then
rebuilds x^2 + 1 as t(r_1(u(x)), r_2(u(x))).
"""

import time

from densityclone import sets
from densityclone.functions import parse_expression, parse_function
from densityclone.precomplete import PipelineConfig, run_precompleteness_pipeline

start = time.perf_counter()
res = run_precompleteness_pipeline(parse_function("sqrtind"), sets.squares())
print(f"passed={res.passed} in {time.perf_counter() - start:.1f}s")
print("image density estimate:", res.stages["image"]["B_estimate"].ratio)
print("large-set map: e =", res.large_set.e, " n =", res.large_set.n_seq)

r, t = res.r, res.t
for n in (0, 1, 2, 100, 4095):
    print(f"r({n}) = ({r.r1[n]}, {r.r2[n]})  t(r({n})) = {t(r.r1[n], r.r2[n])}")

gen = res.generated.function
print("x^2 + 1 rebuilt:", [gen(x) for x in range(8)])
print("as a term:", res.generated.record.details["term"][:120], "...")

# binary inputs are first reduced to a unary map through a tupling of A
cfg = PipelineConfig(set_horizon=2 ** 12, image_horizon=128, interval_count=2, n_out=2 ** 10,
                     search_horizon=2 ** 11, k_max=12, target="x1 + x2", target_check=12)
res = run_precompleteness_pipeline(parse_expression("x1 + x2"), sets.evens(), cfg)
print("x1 + x2 on evens:", res.passed, " stages:", list(res.stages))
