"""Subsets of the natural numbers.

A :class:`NatSet` answers three questions exactly: membership, ordered
enumeration, and the prefix count ``|A ∩ [0, n)|``.  Families with a closed
form override :meth:`NatSet.prefix_count`; everything else counts by
enumeration and memoizes checkpoints ``(n, count)``.

Set specification mini-language (``parse_set``)::

    spec      := "empty" | "all" | "evens" | "odds" | "squares"
               | "multiples:" INT | "powers:" INT
               | "intervals:" interval ("," interval)*
               | "finite:" [INT ("," INT)*]
               | "complement:" [INT ("," INT)*]
               | "pred:" EXPR "@" INT
               | "union(" spec ";" spec ")" | "inter(" spec ";" spec ")"
               | "file:" PATH
    interval  := "[" INT "," (INT | "inf") ")"

``file:`` reads newline-separated, strictly increasing decimal naturals
(blank lines ignored).  ``pred:`` takes an expression in the function
language (see :mod:`densityclone.functions`) over ``x1``; ``x`` is a member
iff the expression is nonzero.  The number after ``@`` is the enumeration
bound: membership queries at or past it raise
:class:`~densityclone.errors.EnumerationBoundError`.
"""

from __future__ import annotations

import bisect
import heapq
import itertools
import re
import threading
from abc import ABC, abstractmethod
from math import isqrt
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .errors import EnumerationBoundError, SpecParseError


class NatSet(ABC):
    """Abstract subset of ℕ."""

    kind = "abstract"

    def __init__(self, label: str):
        self.label = label
        self._checkpoints: list[tuple[int, int]] = [(0, 0)]
        self._prefix: list[int] = []  # enumerated elements, for nth()
        self._lock = threading.Lock()

    @abstractmethod
    def __contains__(self, x: int) -> bool: ...

    @abstractmethod
    def iter_from(self, lo: int = 0) -> Iterator[int]:
        """Yield the elements ``>= lo`` in strictly increasing order."""

    def __iter__(self) -> Iterator[int]:
        return self.iter_from(0)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"

    def elements_below(self, n: int, lo: int = 0) -> list[int]:
        return list(itertools.takewhile(lambda x: x < n, self.iter_from(lo)))

    def prefix_count(self, n: int) -> int:
        """``|A ∩ [0, n)|``, memoized on a sorted checkpoint list."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        cps = self._checkpoints
        pos = bisect.bisect_right(cps, (n, float("inf"))) - 1
        start, count = cps[pos]
        if start == n:
            return count
        count += sum(1 for _ in itertools.takewhile(lambda x: x < n, self.iter_from(start)))
        with self._lock:
            pos = bisect.bisect_left(self._checkpoints, (n, -1))
            if pos == len(self._checkpoints) or self._checkpoints[pos][0] != n:
                self._checkpoints.insert(pos, (n, count))
        return count

    def count_between(self, lo: int, hi: int) -> int:
        """``|A ∩ [lo, hi)|``."""
        if hi <= lo:
            return 0
        return self.prefix_count(hi) - self.prefix_count(lo)

    def nth(self, index: int) -> int:
        """The element with ``index`` smaller elements (0-based)."""
        if index < 0:
            raise IndexError(index)
        with self._lock:
            if index < len(self._prefix):
                return self._prefix[index]
            start = self._prefix[-1] + 1 if self._prefix else 0
            need = index + 1 - len(self._prefix)
            more = list(itertools.islice(self.iter_from(start), need))
            self._prefix.extend(more)
        if index >= len(self._prefix):
            raise IndexError(f"{self.label} has fewer than {index + 1} elements")
        return self._prefix[index]

    def union(self, other: "NatSet") -> "NatSet":
        return Union(self, other)

    def intersection(self, other: "NatSet") -> "NatSet":
        return Intersection(self, other)

    __or__ = union
    __and__ = intersection


class FiniteSet(NatSet):
    kind = "finite-sorted-list"

    def __init__(self, elements: Iterable[int], label: str | None = None):
        elems = sorted(set(int(x) for x in elements))
        if elems and elems[0] < 0:
            raise ValueError("natural numbers only")
        self.elements = tuple(elems)
        self._members = frozenset(elems)
        if label is None:
            label = "finite:" + ",".join(map(str, elems[:8])) + (",..." if len(elems) > 8 else "")
        super().__init__(label)

    def __contains__(self, x):
        return x in self._members

    def __len__(self):
        return len(self.elements)

    def iter_from(self, lo=0):
        return iter(self.elements[bisect.bisect_left(self.elements, lo):])

    def prefix_count(self, n):
        return bisect.bisect_left(self.elements, n)

    def nth(self, index):
        return self.elements[index]


class Intervals(NatSet):
    """Union of half-open intervals ``[a, b)``; ``b=None`` means unbounded."""

    kind = "interval-union-stream"

    def __init__(self, intervals: Iterable[tuple[int, int | None]], label: str | None = None):
        merged: list[list] = []
        for a, b in sorted(intervals, key=lambda ab: ab[0]):
            if a < 0 or (b is not None and b < a):
                raise ValueError(f"bad interval [{a},{b})")
            if b == a:
                continue
            if merged and (merged[-1][1] is None or merged[-1][1] >= a):
                if merged[-1][1] is not None:
                    merged[-1][1] = None if b is None else max(merged[-1][1], b)
            else:
                merged.append([a, b])
        self.intervals = tuple((a, b) for a, b in merged)
        if label is None:
            if not self.intervals:
                label = "empty"
            elif self.intervals == ((0, None),):
                label = "all"
            else:
                label = "intervals:" + ",".join(
                    f"[{a},{'inf' if b is None else b})" for a, b in self.intervals)
        super().__init__(label)

    def __contains__(self, x):
        return any(a <= x and (b is None or x < b) for a, b in self.intervals)

    def iter_from(self, lo=0):
        for a, b in self.intervals:
            if b is not None and b <= lo:
                continue
            yield from (range(max(a, lo), b) if b is not None else itertools.count(max(a, lo)))

    def prefix_count(self, n):
        total = 0
        for a, b in self.intervals:
            hi = n if b is None else min(b, n)
            if hi > a:
                total += hi - a
        return total


class Progression(NatSet):
    """``{x >= start : x ≡ offset (mod step)}``."""

    kind = "named-family"

    def __init__(self, step: int, offset: int = 0, start: int = 0, label: str | None = None):
        if step < 1:
            raise ValueError("step must be positive")
        self.step, self.offset, self.start = step, offset % step, start
        # least member
        self.first = start + (self.offset - start) % step
        super().__init__(label or f"progression:{step},{self.offset},{start}")

    def __contains__(self, x):
        return x >= self.start and x % self.step == self.offset

    def iter_from(self, lo=0):
        lo = max(lo, self.first)
        x = lo + (self.offset - lo) % self.step
        return itertools.count(x, self.step)

    def prefix_count(self, n):
        if n <= self.first:
            return 0
        return (n - 1 - self.first) // self.step + 1

    def nth(self, index):
        return self.first + index * self.step


class Squares(NatSet):
    kind = "named-family"

    def __init__(self):
        super().__init__("squares")

    def __contains__(self, x):
        return x >= 0 and isqrt(x) ** 2 == x

    def iter_from(self, lo=0):
        r = 0 if lo <= 0 else isqrt(lo - 1) + 1
        return (s * s for s in itertools.count(r))

    def prefix_count(self, n):
        return 0 if n <= 0 else isqrt(n - 1) + 1

    def nth(self, index):
        return index * index


class Powers(NatSet):
    """``{b**k : k >= 0}``."""

    kind = "named-family"

    def __init__(self, base: int):
        if base < 2:
            raise ValueError("base must be at least 2")
        self.base = base
        super().__init__(f"powers:{base}")

    def __contains__(self, x):
        if x < 1:
            return False
        while x % self.base == 0:
            x //= self.base
        return x == 1

    def iter_from(self, lo=0):
        p = 1
        while p < lo:
            p *= self.base
        while True:
            yield p
            p *= self.base

    def prefix_count(self, n):
        count, p = 0, 1
        while p < n:
            count += 1
            p *= self.base
        return count

    def nth(self, index):
        return self.base ** index


class Complement(NatSet):
    """ℕ minus a finite set."""

    kind = "named-family"

    def __init__(self, excluded: Iterable[int]):
        self.excluded = tuple(sorted(set(excluded)))
        self._ex = frozenset(self.excluded)
        super().__init__("complement:" + ",".join(map(str, self.excluded)))

    def __contains__(self, x):
        return x >= 0 and x not in self._ex

    def iter_from(self, lo=0):
        return (x for x in itertools.count(max(lo, 0)) if x not in self._ex)

    def prefix_count(self, n):
        return max(n, 0) - bisect.bisect_left(self.excluded, n)


class Union(NatSet):
    kind = "named-family"

    def __init__(self, left: NatSet, right: NatSet, label: str | None = None):
        self.left, self.right = left, right
        super().__init__(label or f"union({left.label};{right.label})")

    def __contains__(self, x):
        return x in self.left or x in self.right

    def iter_from(self, lo=0):
        last = -1
        for x in heapq.merge(self.left.iter_from(lo), self.right.iter_from(lo)):
            if x != last:
                yield x
                last = x


class Intersection(NatSet):
    kind = "named-family"

    def __init__(self, left: NatSet, right: NatSet, label: str | None = None):
        self.left, self.right = left, right
        super().__init__(label or f"inter({left.label};{right.label})")

    def __contains__(self, x):
        return x in self.left and x in self.right

    def iter_from(self, lo=0):
        # walks the left set; an empty intersection with infinite left never terminates
        return (x for x in self.left.iter_from(lo) if x in self.right)


class PredicateSet(NatSet):
    """Membership given by a predicate, valid only below ``bound``."""

    kind = "predicate-expression"

    def __init__(self, predicate: Callable[[int], bool], bound: int, label: str = "predicate"):
        self.predicate = predicate
        self.bound = bound
        super().__init__(label)

    def _check(self, x):
        if x >= self.bound:
            raise EnumerationBoundError(
                f"{self.label}: query at {x} is past the enumeration bound {self.bound}")

    def __contains__(self, x):
        self._check(x)
        return x >= 0 and bool(self.predicate(x))

    def iter_from(self, lo=0):
        for x in range(max(lo, 0), self.bound):
            if self.predicate(x):
                yield x
        # reaching this point means the caller asked for more than the bound allows
        raise EnumerationBoundError(
            f"{self.label}: enumeration ran past the bound {self.bound}")

    def prefix_count(self, n):
        if n > self.bound:
            self._check(n - 1)
        # counted directly: the generic path would ask the enumerator for one element too many
        return len(self.elements_below(n))

    def elements_below(self, n, lo=0):
        if n > self.bound:
            self._check(n - 1)
        return [x for x in range(max(lo, 0), n) if self.predicate(x)]


def empty() -> NatSet:
    return Intervals([], label="empty")


def everything() -> NatSet:
    return Intervals([(0, None)], label="all")


def evens() -> NatSet:
    return Progression(2, 0, label="evens")


def odds() -> NatSet:
    return Progression(2, 1, label="odds")


def multiples(m: int) -> NatSet:
    return Progression(m, 0, label=f"multiples:{m}")


def squares() -> NatSet:
    return Squares()


def powers(b: int) -> NatSet:
    return Powers(b)


def read_set_file(path: str | Path) -> FiniteSet:
    elems = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if not line.isdigit():
            raise SpecParseError(f"{path}:{lineno}: not a natural number", line, 0)
        x = int(line)
        if elems and x <= elems[-1]:
            raise SpecParseError(f"{path}:{lineno}: values must be strictly increasing", line, 0)
        elems.append(x)
    return FiniteSet(elems, label=f"file:{path}")


# -- parser --------------------------------------------------------------------

_INT = re.compile(r"\d+")


class _SetParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise SpecParseError(msg, self.text, self.pos)

    def peek(self, s):
        return self.text.startswith(s, self.pos)

    def expect(self, s):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def integer(self):
        self.skip_ws()
        m = _INT.match(self.text, self.pos)
        if not m:
            self.error("expected a natural number")
        self.pos = m.end()
        self.skip_ws()
        return int(m.group())

    def int_list(self, stop_chars=";)"):
        values = []
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] in stop_chars:
            return values
        values.append(self.integer())
        while self.peek(","):
            self.pos += 1
            values.append(self.integer())
        return values

    def until_delim(self, nested):
        start = self.pos
        if nested:
            depth = 0
            while self.pos < len(self.text):
                c = self.text[self.pos]
                if c == "(":
                    depth += 1
                elif c == ")":
                    if depth == 0:
                        break
                    depth -= 1
                elif c == ";" and depth == 0:
                    break
                self.pos += 1
        else:
            self.pos = len(self.text)
        return self.text[start:self.pos]

    def spec(self, nested=False) -> NatSet:
        self.skip_ws()
        simple = {"empty": empty, "all": everything, "evens": evens, "odds": odds,
                  "squares": squares}
        for word in ("union(", "inter("):
            if self.peek(word):
                self.pos += len(word)
                left = self.spec(nested=True)
                self.expect(";")
                right = self.spec(nested=True)
                self.skip_ws()
                self.expect(")")
                return Union(left, right) if word == "union(" else Intersection(left, right)
        if self.peek("multiples:"):
            self.pos += len("multiples:")
            m = self.integer()
            if m < 1:
                self.error("multiples:<m> needs m >= 1")
            return multiples(m)
        if self.peek("powers:"):
            self.pos += len("powers:")
            b = self.integer()
            if b < 2:
                self.error("powers:<b> needs b >= 2")
            return powers(b)
        if self.peek("intervals:"):
            self.pos += len("intervals:")
            ivs = [self.interval()]
            while self.peek(","):
                self.pos += 1
                ivs.append(self.interval())
            return Intervals(ivs)
        if self.peek("finite:"):
            self.pos += len("finite:")
            vals = self.int_list()
            return FiniteSet(vals)
        if self.peek("complement:"):
            self.pos += len("complement:")
            return Complement(self.int_list())
        if self.peek("pred:"):
            self.pos += len("pred:")
            body = self.until_delim(nested)
            at = body.rfind("@")
            if at < 0:
                self.error("pred: needs '@<bound>'")
            expr_text, bound_text = body[:at], body[at + 1:].strip()
            if not bound_text.isdigit():
                self.error("pred: bound must be a natural number")
            from .functions import parse_expression
            f = parse_expression(expr_text, arity=1)
            return PredicateSet(lambda x, f=f: f(x) != 0, int(bound_text),
                                label=f"pred:{expr_text.strip()}@{bound_text}")
        if self.peek("file:"):
            self.pos += len("file:")
            path = self.until_delim(nested).strip()
            if not path:
                self.error("file: needs a path")
            return read_set_file(path)
        for word, factory in simple.items():
            if self.peek(word):
                end = self.pos + len(word)
                if end == len(self.text) or not self.text[end].isalnum():
                    self.pos = end
                    return factory()
        self.error("unknown set specification")

    def interval(self):
        self.skip_ws()
        self.expect("[")
        a = self.integer()
        self.expect(",")
        self.skip_ws()
        if self.peek("inf"):
            self.pos += 3
            b = None
        else:
            b = self.integer()
        self.skip_ws()
        self.expect(")")
        if b is not None and b < a:
            self.error("interval end before start")
        return (a, b)


def parse_set(text: str) -> NatSet:
    """Parse a set specification; see the module docstring for the grammar."""
    p = _SetParser(text)
    result = p.spec()
    p.skip_ws()
    if p.pos != len(text):
        p.error("trailing input")
    return result


def as_natset(obj: NatSet | str | Sequence[int]) -> NatSet:
    if isinstance(obj, NatSet):
        return obj
    if isinstance(obj, str):
        return parse_set(obj)
    return FiniteSet(obj)
