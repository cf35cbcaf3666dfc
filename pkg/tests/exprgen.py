"""Random expressions in the function language, for property tests."""

import random

from hypothesis import strategies as st

BINOPS = ["+", "-", "*", "//", "%"]


def random_expression(rng: random.Random, arity: int, depth: int = 3) -> str:
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.7:
            return f"x{rng.randint(1, arity)}"
        return str(rng.randint(0, 9))
    r = rng.random()
    if r < 0.65:
        op = rng.choice(BINOPS)
        return f"({random_expression(rng, arity, depth - 1)} {op} {random_expression(rng, arity, depth - 1)})"
    if r < 0.85:
        fn = rng.choice(["min", "max"])
        return f"{fn}({random_expression(rng, arity, depth - 1)}, {random_expression(rng, arity, depth - 1)})"
    if r < 0.93:
        return f"isqrt({random_expression(rng, arity, depth - 1)})"
    args = ", ".join(random_expression(rng, arity, depth - 1) for _ in range(4))
    return f"eq({args})"


@st.composite
def expressions(draw, max_arity: int = 3):
    arity = draw(st.integers(1, max_arity))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return arity, random_expression(random.Random(seed), arity)
