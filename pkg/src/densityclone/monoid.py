"""A closed transformation monoid, its collapse map and their composites.

ℕ is split into five cells ``{0}, T_x, T_y, A_x, A_y``.  A member of ℱ is
the identity on ``{0} ∪ T_x ∪ T_y`` and sends ``A_x`` into ``T_x`` and
``A_y`` into ``T_y``, with the pair of restrictions drawn from a closed set
given as a pruned tree.  The collapse map ``h`` fixes everything except
``A_y``, which it sends to 0.  Composites fall into ``{h} ∪ ℱ ∪ 𝒢′`` where
𝒢′ members fix the tracked cells, kill ``A_y`` and agree on ``A_x`` with
the first coordinate of some branch.

Tree grammar (whitespace ignored)::

    tree   := "(" [node ("," node)*] ")"
    node   := value ":" value [tree]
    value  := INDEX | "=" NATURAL

A node at depth ``d`` (the root's children have depth 1) fixes the images of
the ``d``-th elements of ``A_x`` and ``A_y``.  ``INDEX`` counts into the
increasing enumeration of ``T_x`` (left) or ``T_y`` (right); ``=v`` gives a
raw value, which lets a tree describe off-cell (corrupted) elements.  Every
leaf must sit at the same depth.

Example, the full binary tree of depth 2::

    (0:0(0:0,1:1),1:1(0:0,1:1))
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import BranchNotInTree, PartitionError, SpecParseError
from .functions import FinFun
from .report import VerificationRecord
from .sets import FiniteSet, NatSet, Progression

CELLS = ("zero", "T_x", "T_y", "A_x", "A_y")
ZERO, TX, TY, AX, AY = range(5)


class Partition:
    """Five disjoint cells covering ℕ, with a cached cell table."""

    def __init__(self, cells: Sequence[NatSet], label: str = "custom"):
        if len(cells) != 5:
            raise PartitionError("a partition needs exactly five cells")
        self.cells = list(cells)
        self.label = label
        self._table = np.zeros(0, dtype=np.int8)

    def cell_of(self, x: int) -> int:
        hits = [c for c, s in enumerate(self.cells) if x in s]
        if len(hits) != 1:
            raise PartitionError(f"{x} lies in cells {[CELLS[c] for c in hits]}")
        return hits[0]

    def cell_table(self, n: int) -> np.ndarray:
        """``table[x]`` is the cell index of ``x`` for ``x < n``."""
        if len(self._table) < n:
            size = max(n, 2 * len(self._table))
            tab = np.full(size, -1, dtype=np.int8)
            for c, s in enumerate(self.cells):
                idx = np.fromiter(s.elements_below(size), dtype=np.int64)
                if idx.size and (tab[idx] != -1).any():
                    x = int(idx[tab[idx] != -1][0])
                    raise PartitionError(f"overlap at {x}: {CELLS[tab[x]]} and {CELLS[c]}")
                tab[idx] = c
            if (tab == -1).any():
                raise PartitionError(f"gap at {int(np.argmax(tab == -1))}")
            self._table = tab
        return self._table[:n]

    def validate(self, N: int) -> VerificationRecord:
        rec = VerificationRecord("partition", scope=f"[0,{N})")
        try:
            tab = self.cell_table(N)
        except PartitionError as exc:
            rec.fail(condition="disjoint cover", error=str(exc))
            return rec
        counts = np.bincount(tab, minlength=5).tolist()
        rec.details["counts"] = dict(zip(CELLS, counts))
        for c in (TX, TY, AX, AY):
            rec.check(8 * counts[c] >= N, condition="cell has at least N/8 elements",
                      cell=CELLS[c], count=counts[c])
        return rec

    def enumerate(self, cell: int, count: int) -> list[int]:
        s = self.cells[cell]
        return [s.nth(j) for j in range(count)]


def make_partition(N: int = 8, cells: Sequence[NatSet] | None = None) -> Partition:
    """Residues mod 4 on the positives by default; custom cells are validated on ``[0, N)``."""
    if N < 8:
        raise ValueError("N must be at least 8")
    if cells is None:
        cells = [FiniteSet([0]), Progression(4, 1, label="T_x=1 mod 4"),
                 Progression(4, 2, label="T_y=2 mod 4"), Progression(4, 3, label="A_x=3 mod 4"),
                 Progression(4, 0, start=1, label="A_y=0 mod 4, positive")]
        p = Partition(cells, label="mod4")
    else:
        p = Partition(cells)
    rec = p.validate(N)
    if not rec.passed:
        raise PartitionError(f"invalid partition on [0,{N}): {rec.first_failure}")
    return p


# -- trees --------------------------------------------------------------------------


@dataclass(frozen=True)
class Value:
    """An index into ``T_x``/``T_y`` or, if ``raw``, a literal natural."""

    n: int
    raw: bool = False

    def __str__(self):
        return f"={self.n}" if self.raw else str(self.n)

    def resolve(self, p: Partition, cell: int) -> int:
        return self.n if self.raw else p.cells[cell].nth(self.n)


@dataclass
class Node:
    x: Value | None = None
    y: Value | None = None
    children: list["Node"] = field(default_factory=list)


class ClosedPairSet:
    """A pruned tree of finite partial pairs; every leaf at depth ``depth``."""

    def __init__(self, root: Node, text: str = ""):
        self.root = root
        depths = set(self._leaf_depths(root, 0))
        if len(depths) != 1:
            raise SpecParseError(f"tree has leaves at depths {sorted(depths)}", text, 0)
        self.depth = depths.pop()
        self.text = text or format_tree(self)

    def _leaf_depths(self, node, d):
        if not node.children:
            yield d
        for c in node.children:
            yield from self._leaf_depths(c, d + 1)

    def branches(self, cap: int | None = None) -> Iterator[tuple[tuple[Value, Value], ...]]:
        """Root-to-leaf branches in tree order, at most ``cap`` of them."""
        count = 0
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if not node.children:
                yield path
                count += 1
                if cap is not None and count >= cap:
                    return
                continue
            for c in reversed(node.children):
                stack.append((c, path + ((c.x, c.y),)))

    def branch_count(self) -> int:
        def n(node):
            return 1 if not node.children else sum(n(c) for c in node.children)
        return n(self.root)

    def contains(self, branch: Sequence[tuple[Value, Value]]) -> bool:
        node = self.root
        for pair in branch:
            node = next((c for c in node.children if (c.x, c.y) == tuple(pair)), None)
            if node is None:
                return False
        return not node.children

    def to_dict(self):
        return {"depth": self.depth, "branches": self.branch_count(), "tree": self.text}


def parse_tree(text: str) -> ClosedPairSet:
    pos = 0
    s = text

    def skip():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def expect(ch):
        nonlocal pos
        skip()
        if pos >= len(s) or s[pos] != ch:
            raise SpecParseError(f"expected {ch!r}", text, pos)
        pos += 1

    def value():
        nonlocal pos
        skip()
        raw = pos < len(s) and s[pos] == "="
        if raw:
            pos += 1
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise SpecParseError("expected a natural number", text, pos)
        return Value(int(s[start:pos]), raw)

    def children():
        nonlocal pos
        expect("(")
        out = []
        skip()
        if pos < len(s) and s[pos] == ")":
            pos += 1
            return out
        while True:
            x = value()
            expect(":")
            y = value()
            skip()
            kids = children() if pos < len(s) and s[pos] == "(" else []
            out.append(Node(x, y, kids))
            skip()
            if pos < len(s) and s[pos] == ",":
                pos += 1
                continue
            expect(")")
            return out

    root = Node(children=children())
    skip()
    if pos != len(s):
        raise SpecParseError("trailing characters", text, pos)
    return ClosedPairSet(root, text.strip())


def format_tree(tree: ClosedPairSet) -> str:
    def fmt(nodes):
        return "(" + ",".join(f"{n.x}:{n.y}{fmt(n.children) if n.children else ''}"
                              for n in nodes) + ")"
    return fmt(tree.root.children)


def single_branch_tree(depth: int) -> ClosedPairSet:
    """The constant branch: every level maps to the least elements of ``T_x``, ``T_y``."""
    text = "()" if depth == 0 else "(0:0" * depth + ")" * depth
    return parse_tree(text)


def full_binary_tree(depth: int) -> ClosedPairSet:
    """Children ``0:0`` and ``1:1`` at every level, ``2^depth`` branches."""
    def build(d):
        if d == 0:
            return ""
        sub = build(d - 1)
        return f"(0:0{sub},1:1{sub})"
    return parse_tree(build(depth) or "()")


# -- elements -----------------------------------------------------------------------


@dataclass
class MonoidElement:
    tag: str                 # identity | F | collapse | G'
    function: FinFun
    branch: tuple | None = None
    depth: int = 0

    def table(self, N: int) -> np.ndarray:
        return np.fromiter((self.function(x) for x in range(N)), dtype=np.int64, count=N)

    def to_dict(self):
        return {"tag": self.tag, "label": self.function.label,
                "branch": None if self.branch is None else [f"{x}:{y}" for x, y in self.branch]}


def identity_element() -> MonoidElement:
    return MonoidElement("identity", FinFun(1, lambda x: x, kind="named-family", label="id"))


def monoid_element_from_branch(p: Partition, tree: ClosedPairSet,
                               branch: Sequence[tuple[Value, Value]]) -> MonoidElement:
    """The ℱ-member fixed by ``branch`` on the first ``depth`` elements of ``A_x``, ``A_y``.

    Past the depth, ``A_x`` goes to ``min T_x`` and ``A_y`` to ``min T_y``.
    """
    branch = tuple(branch)
    if not tree.contains(branch):
        raise BranchNotInTree(f"{[f'{x}:{y}' for x, y in branch]} is not a branch of {tree.text}")
    d = len(branch)
    ax, ay = p.enumerate(AX, d), p.enumerate(AY, d)
    values = {}
    for a, b, (vx, vy) in zip(ax, ay, branch):
        values[a] = vx.resolve(p, TX)
        values[b] = vy.resolve(p, TY)
    default = {AX: p.cells[TX].nth(0), AY: p.cells[TY].nth(0)}
    cells = p.cells

    def fn(x):
        v = values.get(x)
        if v is not None:
            return v
        if x in cells[AX]:
            return default[AX]
        if x in cells[AY]:
            return default[AY]
        return x

    label = "F[" + ",".join(f"{x}:{y}" for x, y in branch) + "]"
    return MonoidElement("F", FinFun(1, fn, label=label), branch, d)


def collapse_map(p: Partition) -> MonoidElement:
    ay = p.cells[AY]
    return MonoidElement("collapse", FinFun(1, lambda x: 0 if x in ay else x, label="h"))


def mutate(element: MonoidElement, x: int, value: int) -> MonoidElement:
    """Copy of ``element`` with its value at ``x`` overridden."""
    f = element.function
    fn = lambda y: value if y == x else f(y)
    return MonoidElement(element.tag, FinFun(1, fn, label=f"{f.label}[{x}->{value}]"),
                         element.branch, element.depth)


def branch_elements(p: Partition, tree: ClosedPairSet,
                    cap: int | None = None) -> list[MonoidElement]:
    """ℱ-members for the tree's branches; a depth-0 tree contributes none."""
    if tree.depth == 0:
        return []
    return [monoid_element_from_branch(p, tree, b) for b in tree.branches(cap)]


# -- laws ----------------------------------------------------------------------------


class _Shapes:
    """Vectorized membership tests for ℱ- and 𝒢′-shapes on ``[0, N)``."""

    def __init__(self, p: Partition, tree: ClosedPairSet, N: int):
        self.N = N
        self.cell = p.cell_table(N)
        self.idx = np.arange(N)
        self.fixed = np.isin(self.cell, (ZERO, TX, TY))
        self.ax = self.cell == AX
        self.ay = self.cell == AY
        d = tree.depth
        self.ax_first = np.array([a for a in p.enumerate(AX, d) if a < N], dtype=np.int64)
        self.ay_first = np.array([a for a in p.enumerate(AY, d) if a < N], dtype=np.int64)
        self.p = p
        branches = list(tree.branches())
        self.full = {tuple((vx.resolve(p, TX), vy.resolve(p, TY)) for vx, vy in b)[:len(self.ax_first)]
                     for b in branches}
        self.proj = {tuple(vx.resolve(p, TX) for vx, _ in b)[:len(self.ax_first)] for b in branches}

    def cells_of(self, values: np.ndarray) -> np.ndarray:
        top = int(values.max(initial=0)) + 1
        return self.p.cell_table(max(top, self.N))[values]

    def classify(self, rows: np.ndarray) -> list[str]:
        """Label each row as identity, collapse, F, G' or unclassified."""
        idx = self.idx
        fixed_ok = (rows[:, self.fixed] == idx[self.fixed]).all(axis=1)
        ax_vals, ay_vals = rows[:, self.ax], rows[:, self.ay]
        ax_cells, ay_cells = self.cells_of(ax_vals), self.cells_of(ay_vals)
        is_id = fixed_ok & (ax_vals == idx[self.ax]).all(1) & (ay_vals == idx[self.ay]).all(1)
        is_h = fixed_ok & (ax_vals == idx[self.ax]).all(1) & (ay_vals == 0).all(1)
        f_shape = fixed_ok & (ax_cells == TX).all(1) & (ay_cells == TY).all(1)
        g_shape = fixed_ok & (ax_cells == TX).all(1) & (ay_vals == 0).all(1)
        out = []
        for r in range(rows.shape[0]):
            if is_id[r]:
                out.append("identity")
            elif is_h[r]:
                out.append("collapse")
            elif f_shape[r]:
                key = tuple(zip(rows[r, self.ax_first].tolist(), rows[r, self.ay_first].tolist()))
                out.append("F" if key in self.full else "unclassified")
            elif g_shape[r]:
                key = tuple(rows[r, self.ax_first].tolist())
                out.append("G'" if key in self.proj else "unclassified")
            else:
                out.append("unclassified")
        return out


def _compose_rows(outer: np.ndarray, inner: np.ndarray, p: Partition, fn: FinFun) -> np.ndarray:
    """``outer∘inner`` as a table; values of ``inner`` past ``N`` fall back to ``fn``."""
    N = len(outer)
    if inner.max(initial=0) < N:
        return outer[inner]
    return np.fromiter((outer[v] if v < N else fn(int(v)) for v in inner.tolist()),
                       dtype=np.int64, count=len(inner))


def verify_monoid_laws(p: Partition, tree: ClosedPairSet, elements: Sequence[MonoidElement],
                       N: int) -> VerificationRecord:
    """Check the four composition laws exhaustively on ``[0, N)``.

    (i)   ``f∘f′ = f′`` for f, f′ in ℱ with f′ not the identity
    (ii)  ``h∘f = f`` for f in ℱ other than the identity
    (iii) ``f∘h`` fixes ``{0} ∪ T_x ∪ T_y``, agrees with f on ``A_x``, kills ``A_y``
    (iv)  every pairwise composite is id, h, an ℱ-shape or a 𝒢′-shape
    """
    rec = VerificationRecord("monoid-laws", scope=f"[0,{N})")
    h = collapse_map(p)
    members = [identity_element()] + [e for e in elements if e.tag != "identity"]
    F = [e for e in members if e.tag in ("identity", "F")]
    tabs = {id(e): e.table(N) for e in members + [h]}
    ht = tabs[id(h)]
    shapes = _Shapes(p, tree, N)
    cell = shapes.cell
    ax_idx = np.flatnonzero(cell == AX)
    firsts = set(shapes.ax_first.tolist())
    defaulted = [int(a) for a in ax_idx if int(a) not in firsts][:1]
    rec.details["default_extension_from"] = defaulted[0] if defaulted else None
    counts = {"i": 0, "ii": 0, "iii": 0, "iv": 0}

    def first_diff(a, b):
        d = np.flatnonzero(a != b)
        return int(d[0]) if d.size else None

    def violation(law, pair, x):
        rec.fail(condition="law-violation", law=law, pair=pair, witness=x,
                 past_depth=x is not None and bool(cell[x] in (AX, AY))
                 and x not in shapes.ax_first and x not in shapes.ay_first)

    for f in F:
        ft = tabs[id(f)]
        for g in F:
            if g.tag == "identity":
                continue
            gt = tabs[id(g)]
            comp = _compose_rows(ft, gt, p, f.function)
            counts["i"] += 1
            x = first_diff(comp, gt)
            if x is not None:
                violation("i", [f.function.label, g.function.label], x)
        if f.tag != "identity":
            hf = _compose_rows(ht, ft, p, h.function)
            counts["ii"] += 1
            x = first_diff(hf, ft)
            if x is not None:
                violation("ii", ["h", f.function.label], x)
        fh = _compose_rows(ft, ht, p, f.function)
        expected = np.where(cell == AY, 0, np.where(cell == AX, ft, np.arange(N)))
        counts["iii"] += 1
        x = first_diff(fh, expected)
        if x is not None:
            violation("iii", [f.function.label, "h"], x)

    everything = members + [h]
    gprime = [_compose_rows(tabs[id(f)], ht, p, f.function) for f in F if f.tag == "F"]
    pool = [tabs[id(e)] for e in everything] + gprime
    names = [e.function.label for e in everything] + \
            [f"{f.function.label}∘h" for f in F if f.tag == "F"]
    hf = h.function
    fns = [e.function for e in everything] + \
          [FinFun(1, lambda x, f=f.function: f(hf(x))) for f in F if f.tag == "F"]
    stack = np.stack(pool)
    classes: dict[str, int] = {}
    for a, at in enumerate(pool):
        if stack.max(initial=0) < N:
            rows = at[stack]
        else:
            rows = np.stack([_compose_rows(at, bt, p, fns[a]) for bt in pool])
        labels = shapes.classify(rows)
        for b, lab in enumerate(labels):
            counts["iv"] += 1
            classes[lab] = classes.get(lab, 0) + 1
            if lab == "unclassified":
                x = _first_bad_point(rows[b], shapes)
                violation("iv", [names[a], names[b]], x)
    rec.details.update(checks=counts, classes=dict(sorted(classes.items())),
                       elements=len(members), gprime=len(gprime))
    # F and G' never coincide while A_y ∩ [0, N) is nonempty
    if shapes.ay.any() and gprime:
        ftabs = {tabs[id(f)].tobytes() for f in F}
        rec.check(not any(g.tobytes() in ftabs for g in gprime),
                  condition="G' disjoint from F")
    return rec


def _first_bad_point(row: np.ndarray, s: _Shapes) -> int | None:
    """A point where ``row`` leaves every admissible shape."""
    bad = s.fixed & (row != s.idx)
    if bad.any():
        return int(np.flatnonzero(bad)[0])
    cells = s.cells_of(row)
    bad = s.ax & (cells != TX) & (row != s.idx)
    if bad.any():
        return int(np.flatnonzero(bad)[0])
    bad = s.ay & (cells != TY) & (row != 0) & (row != s.idx)
    if bad.any():
        return int(np.flatnonzero(bad)[0])
    return int(s.ax_first[0]) if s.ax_first.size else None


__all__ = [
    "CELLS", "Partition", "make_partition", "Value", "Node", "ClosedPairSet", "parse_tree",
    "format_tree", "single_branch_tree", "full_binary_tree", "MonoidElement",
    "identity_element", "monoid_element_from_branch", "collapse_map", "mutate",
    "branch_elements", "verify_monoid_laws",
]
