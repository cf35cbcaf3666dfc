"""Bijections between ℕ and ℕ^k.

Two schemes are provided.

Cantor pairing ``(x, y) -> (x+y)(x+y+1)/2 + y`` is used where a classical
pairing is wanted.

The shell tupling enumerates ℕ^k box by box: indices ``[0, b**k)`` are sent
exactly onto ``[0, b)**k``.  Index ``m`` lies in shell ``s = floor(m**(1/k))``
(tuples whose maximum is ``s``).  Within a shell, tuples whose first
coordinate is below ``s`` come first (first coordinate ascending, the rest
ranked recursively inside the ``(k-1)``-shell), then the tuples starting with
``s`` (the rest ranked recursively in the box ``[0, s+1)**(k-1)``).

Worked index table for ``k = 2``::

    m      0      1      2      3      4      5      6      7      8
    tuple  (0,0)  (0,1)  (1,0)  (1,1)  (0,2)  (1,2)  (2,0)  (2,1)  (2,2)

For ``k = 3`` the first eight indices cover ``[0,2)**3``::

    m      0        1        2        3        4        5        6        7
    tuple  (0,0,0)  (0,0,1)  (0,1,0)  (0,1,1)  (1,0,0)  (1,0,1)  (1,1,0)  (1,1,1)
"""

from __future__ import annotations

from math import isqrt


def cantor_pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def iroot(m: int, k: int) -> int:
    """Largest ``s`` with ``s**k <= m``."""
    if m < 0 or k < 1:
        raise ValueError("iroot needs m >= 0, k >= 1")
    if k == 1 or m < 2:
        return m
    if k == 2:
        return isqrt(m)
    lo, hi = 0, 1 << (m.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** k <= m:
            lo = mid
        else:
            hi = mid - 1
    return lo


def shell_unrank(m: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (m,)
    s = iroot(m, k)
    r = m - s ** k
    sh = (s + 1) ** (k - 1) - s ** (k - 1)
    if r < s * sh:
        return (r // sh,) + shell_unrank(s ** (k - 1) + r % sh, k - 1)
    return (s,) + shell_unrank(r - s * sh, k - 1)


def shell_rank(t: tuple[int, ...]) -> int:
    k = len(t)
    if k == 1:
        return t[0]
    s = max(t)
    sh = (s + 1) ** (k - 1) - s ** (k - 1)
    first, rest = t[0], t[1:]
    if first < s:
        r = first * sh + shell_rank(rest) - s ** (k - 1)
    else:
        r = s * sh + shell_rank(rest)
    return s ** k + r
