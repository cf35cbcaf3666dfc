"""Finitary functions on ℕ, term composition, and shadows.

Function expression language::

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "//" | "%") factor)*
    factor  := INT | VAR | CALL | "(" expr ")"
    VAR     := "x" INT                      (x1, x2, ... ; 1-based)
    CALL    := "min(" expr "," expr ")" | "max(" expr "," expr ")"
             | "isqrt(" expr ")" | "eq(" expr "," expr "," expr "," expr ")"

``-`` is truncated subtraction (``max(a - b, 0)``), ``//`` floor division and
``%`` remainder, with ``a // 0 = 0`` and ``a % 0 = a`` so every expression is
total.  ``eq(a, b, u, v)`` is ``u`` if ``a == b`` else ``v``.  Binary
operators associate to the left.  :func:`format_expression` prints the
canonical form, and ``parse_expression(format_expression(e))`` rebuilds the
same tree.

Function specs (``parse_function``) extend expressions with named families::

    fspec := "id" | "sqrtind" | "cantor" | "const:" INT ["/" INT]
           | "proj:" INT "," INT | ["expr" ["/" INT] ":"] EXPR

``const:c/k`` is the ``k``-ary constant ``c``; ``expr/k:`` declares an arity
larger than the highest variable index used.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import factorial, isqrt
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .errors import ArityMismatch, InvalidShadowSpec, SpecParseError
from .tupling import cantor_pair


# -- expression trees ----------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Num | Var | BinOp | Call

_CALL_ARITY = {"min": 2, "max": 2, "isqrt": 1, "eq": 4}
_PREC = {"+": 1, "-": 1, "*": 2, "//": 2, "%": 2}
_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(min|max|isqrt|eq)\b|(//|[-+*%(),]))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecParseError("unexpected character", text, pos)
        start = m.start(m.lastindex)
        out.append((m.lastindex, m.group(m.lastindex), start))
        pos = m.end()
    out.append((0, None, len(text)))
    return out


class _ExprParser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise SpecParseError(f"expected {value!r}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "//", "%"):
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        kind, value, pos = self.peek()
        if kind == 1:
            self.take()
            return Num(int(value))
        if kind == 2:
            self.take()
            idx = int(value[1:])
            if idx < 1:
                raise SpecParseError("variables are numbered from x1", self.text, pos)
            return Var(idx)
        if kind == 3:
            self.take()
            self.take("(")
            args = [self.expr()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
            self.take(")")
            if len(args) != _CALL_ARITY[value]:
                raise SpecParseError(f"{value} takes {_CALL_ARITY[value]} arguments",
                                     self.text, pos)
            return Call(value, tuple(args))
        if value == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        raise SpecParseError("expected a number, variable, call or '('", self.text, pos)

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != 0:
            raise SpecParseError("trailing input", self.text, pos)
        return node


def parse_expr_tree(text: str) -> Expr:
    return _ExprParser(text).parse()


def format_expression(node: Expr) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(format_expression(a) for a in node.args)})"
    p = _PREC[node.op]
    left = format_expression(node.left)
    right = format_expression(node.right)
    if isinstance(node.left, BinOp) and _PREC[node.left.op] < p:
        left = f"({left})"
    if isinstance(node.right, BinOp) and _PREC[node.right.op] <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def max_var(node: Expr) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, BinOp):
        return max(max_var(node.left), max_var(node.right))
    if isinstance(node, Call):
        return max((max_var(a) for a in node.args), default=0)
    return 0


def _monus(a, b):
    return a - b if a > b else 0


def _div(a, b):
    return a // b if b else 0


def _mod(a, b):
    return a % b if b else a


def _eq(a, b, u, v):
    return u if a == b else v


_RUNTIME = {"_monus": _monus, "_div": _div, "_mod": _mod, "_eq": _eq,
            "min": min, "max": max, "isqrt": isqrt}


def _to_python(node: Expr) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Call):
        name = "_eq" if node.name == "eq" else node.name
        return f"{name}({', '.join(_to_python(a) for a in node.args)})"
    a, b = _to_python(node.left), _to_python(node.right)
    if node.op == "+":
        return f"({a} + {b})"
    if node.op == "*":
        return f"({a} * {b})"
    return {"-": "_monus", "//": "_div", "%": "_mod"}[node.op] + f"({a}, {b})"


def compile_expression(node: Expr, arity: int) -> Callable[..., int]:
    params = ", ".join(f"x{j}" for j in range(1, arity + 1))
    # the source is generated from a parsed tree, never from raw user text
    return eval(f"lambda {params}: {_to_python(node)}", dict(_RUNTIME))


# -- functions -------------------------------------------------------------------

class FinFun:
    """A total ``arity``-ary function on ℕ.

    Calling the object evaluates without an arity check; use
    :func:`evaluate` at untrusted boundaries.
    """

    __slots__ = ("arity", "kind", "label", "_fn", "expr", "term", "spec")

    def __init__(self, arity: int, fn: Callable[..., int], *, kind: str = "host-defined",
                 label: str = "", expr: Expr | None = None, term: "Term | None" = None,
                 spec: str | None = None):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.arity = arity
        self._fn = fn
        self.kind = kind
        self.label = label or kind
        self.expr = expr
        self.term = term
        self.spec = spec

    def __call__(self, *args: int) -> int:
        return self._fn(*args)

    def __repr__(self):
        return f"FinFun({self.arity}, {self.label!r})"


def evaluate(f: FinFun, x: Sequence[int]) -> int:
    if len(x) != f.arity:
        raise ArityMismatch(f"{f.label} has arity {f.arity}, got {len(x)} arguments")
    return f(*x)


def parse_expression(text: str, arity: int | None = None) -> FinFun:
    tree = parse_expr_tree(text)
    used = max_var(tree)
    if arity is None:
        arity = max(used, 1)
    if used > arity:
        raise SpecParseError(f"x{used} used in an expression of arity {arity}", text, 0)
    printed = format_expression(tree)
    spec = printed if arity == max(used, 1) else f"expr/{arity}:{printed}"
    return FinFun(arity, compile_expression(tree, arity), kind="expression",
                  label=printed, expr=tree, spec=spec)


def from_table(table: Mapping, default: int = 0, arity: int = 1, label: str = "") -> FinFun:
    """Finite table with a constant default; keys are ints (unary) or tuples."""
    if arity == 1:
        data = {(k[0] if isinstance(k, tuple) else k): v for k, v in table.items()}
        fn = lambda x: data.get(x, default)
    else:
        data = {tuple(k): v for k, v in table.items()}
        fn = lambda *xs: data.get(xs, default)
    return FinFun(arity, fn, kind="finite-table-with-default",
                  label=label or f"table[{len(data)}] default {default}")


def projection(n: int, j: int) -> FinFun:
    if not 1 <= j <= n:
        raise ValueError(f"projection ({n},{j}) needs 1 <= j <= n")
    return FinFun(n, lambda *xs: xs[j - 1], kind="named-family",
                  label=f"proj:{n},{j}", spec=f"proj:{n},{j}")


def identity() -> FinFun:
    return FinFun(1, lambda x: x, kind="named-family", label="id", spec="id")


def constant(c: int, arity: int = 1) -> FinFun:
    spec = f"const:{c}" if arity == 1 else f"const:{c}/{arity}"
    return FinFun(arity, lambda *xs: c, kind="named-family", label=spec, spec=spec)


def _sqrt_indicator(x):
    r = isqrt(x)
    return r if r * r == x else 0


def sqrt_indicator() -> FinFun:
    """``x -> sqrt(x)`` on perfect squares, ``0`` elsewhere."""
    return FinFun(1, _sqrt_indicator, kind="named-family", label="sqrtind", spec="sqrtind")


def cantor() -> FinFun:
    return FinFun(2, cantor_pair, kind="named-family", label="cantor", spec="cantor")


def parse_function(text: str) -> FinFun:
    """Parse a function spec; see the module docstring."""
    s = text.strip()
    if s in ("id", "identity"):
        return identity()
    if s == "sqrtind":
        return sqrt_indicator()
    if s == "cantor":
        return cantor()
    m = re.fullmatch(r"const:(\d+)(?:/(\d+))?", s)
    if m:
        return constant(int(m.group(1)), int(m.group(2) or 1))
    m = re.fullmatch(r"proj:(\d+),(\d+)", s)
    if m:
        try:
            return projection(int(m.group(1)), int(m.group(2)))
        except ValueError as exc:
            raise SpecParseError(str(exc), text, 0) from None
    m = re.match(r"expr(?:/(\d+))?:", s)
    if m:
        return parse_expression(s[m.end():], int(m.group(1)) if m.group(1) else None)
    return parse_expression(s)


def format_function(f: FinFun) -> str:
    """Inverse of :func:`parse_function` for parseable functions."""
    if f.spec is None:
        raise ValueError(f"{f.label} has no textual spec")
    return f.spec


# -- terms -----------------------------------------------------------------------

@dataclass(frozen=True)
class Proj:
    arity: int
    index: int

    def evaluate(self, xs):
        return xs[self.index - 1]

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True, eq=False)
class Term:
    """Composition node ``head(args...)``; leaves are :class:`Proj`."""

    head: FinFun
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.head.arity:
            raise ArityMismatch(f"{self.head.label} takes {self.head.arity} arguments, "
                                f"got {len(self.args)}")
        arities = {a.arity for a in self.args}
        if len(arities) > 1:
            raise ArityMismatch(f"arguments of {self.head.label} disagree on arity {arities}")

    @property
    def arity(self) -> int:
        return self.args[0].arity

    def evaluate(self, xs: Sequence[int]) -> int:
        return self.head(*(a.evaluate(xs) for a in self.args))

    def __str__(self):
        head = self.head.label
        if " " in head:
            head = f"[{head}]"
        return f"{head}({', '.join(map(str, self.args))})"


def _as_term(g: FinFun, m: int):
    if g.term is not None:
        return g.term
    if g.kind == "named-family" and g.label.startswith("proj:"):
        return Proj(m, int(g.label.split(",")[1]))
    return Term(g, tuple(Proj(m, j) for j in range(1, m + 1)))


def compose(outer: FinFun, inners: Sequence[FinFun], label: str = "") -> FinFun:
    """``outer(g_1(x̄), ..., g_n(x̄))`` as an ``m``-ary function."""
    inners = tuple(inners)
    if len(inners) != outer.arity:
        raise ArityMismatch(f"{outer.label} takes {outer.arity} arguments, got {len(inners)}")
    arities = {g.arity for g in inners}
    if len(arities) != 1:
        raise ArityMismatch(f"inner functions disagree on arity: {sorted(arities)}")
    m = arities.pop()
    term = Term(outer, tuple(_as_term(g, m) for g in inners))
    if len(inners) == 1:
        (g,) = inners
        fn = lambda *xs: outer(g(*xs))
    elif len(inners) == 2:
        g1, g2 = inners
        fn = lambda *xs: outer(g1(*xs), g2(*xs))
    else:
        fn = lambda *xs: outer(*(g(*xs) for g in inners))
    return FinFun(m, fn, kind="composition-term", label=label or str(term), term=term)


class Comparison(NamedTuple):
    equal: bool
    witness: tuple | None


def prefix_equal(f: FinFun, g: FinFun, n: int) -> Comparison:
    """Compare on ``[0, n)^k`` in lexicographic order."""
    if f.arity != g.arity:
        raise ArityMismatch(f"arity {f.arity} vs {g.arity}")
    for xs in itertools.product(range(n), repeat=f.arity):
        if f(*xs) != g(*xs):
            return Comparison(False, xs)
    return Comparison(True, None)


def image(f: FinFun, elements: Iterable[int], below: int | None = None) -> set[int]:
    """``f[E^k]``, optionally restricted to values ``< below``."""
    elements = list(elements)
    if f.arity == 1:
        values = (f(x) for x in elements)
    else:
        values = (f(*xs) for xs in itertools.product(elements, repeat=f.arity))
    if below is None:
        return set(values)
    return {v for v in values if v < below}


# -- shadows ---------------------------------------------------------------------

@dataclass(frozen=True)
class ShadowSpec:
    """Permutation ``perm`` (1-based one-line notation) and fixed prefix ``fixed``."""

    perm: tuple[int, ...]
    fixed: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.perm)

    @property
    def proper(self) -> bool:
        return len(self.fixed) > 0

    def validate(self, k: int) -> None:
        if sorted(self.perm) != list(range(1, k + 1)):
            raise InvalidShadowSpec(f"{self.perm} is not a permutation of 1..{k}")
        if len(self.fixed) >= k:
            raise InvalidShadowSpec(f"cannot fix {len(self.fixed)} of {k} variables")
        if any(a < 0 for a in self.fixed):
            raise InvalidShadowSpec("fixed values must be natural numbers")

    def then(self, other: "ShadowSpec") -> "ShadowSpec":
        """The single spec equal to shadowing by ``self`` and then by ``other``."""
        ell = len(self.fixed)
        if other.k != self.k - ell:
            raise InvalidShadowSpec("second shadow has the wrong arity")
        sigma = list(range(1, ell + 1)) + [ell + p for p in other.perm]
        return ShadowSpec(tuple(sigma[p - 1] for p in self.perm), self.fixed + other.fixed)

    def __str__(self):
        return f"π={self.perm} ā={self.fixed}"


def identity_spec(k: int) -> ShadowSpec:
    return ShadowSpec(tuple(range(1, k + 1)), ())


def shadow(f: FinFun, s: ShadowSpec) -> FinFun:
    """``f_{π,ā}``: permute variables by π, then fix the first ℓ to ā."""
    s.validate(f.arity)
    perm = tuple(p - 1 for p in s.perm)
    fixed = tuple(s.fixed)
    arity = f.arity - len(fixed)
    if perm == tuple(range(f.arity)) and not fixed:
        return f

    def fn(*ys):
        z = fixed + ys
        return f(*(z[p] for p in perm))

    return FinFun(arity, fn, kind="host-defined", label=f"{f.label}[{s}]")


def enumerate_shadow_specs(k: int, a_bound: int) -> list[ShadowSpec]:
    """All specs with fixed values ``< a_bound``.

    Order: permutations lexicographic, then ℓ ascending, then ā lexicographic.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    specs = []
    for perm in itertools.permutations(range(1, k + 1)):
        for ell in range(k):
            for a in itertools.product(range(a_bound), repeat=ell):
                specs.append(ShadowSpec(perm, a))
    return specs


def shadow_spec_count(k: int, a_bound: int) -> int:
    return factorial(k) * sum(a_bound ** ell for ell in range(k))
