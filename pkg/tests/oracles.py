"""Independent brute-force oracles, written from the definitions only.

Nothing here imports the search or validation code under test.
"""

import bisect
import itertools
from fractions import Fraction


def sparse_at(A, i, r):
    """``|A ∩ [0, r)| <= r / 2^i`` in integer arithmetic."""
    c = bisect.bisect_left(A, r)
    if c == 0:
        return True
    if i > r.bit_length():
        return False
    return c * 2 ** i <= r


def brute_entry_ok(f, eps, i, n, t, A, literal_limit=20000):
    """Check one (i, n, t, A) against the definition of badness.

    Sparsity is required for every r in [0, n].  For n up to
    ``literal_limit`` every r is tried.  Above that, r runs over 0, n and
    every a, a+1 with a in A: between consecutive such points the count is
    constant while r / 2^i only grows, so those points are the tight ones.
    """
    eps = Fraction(eps)
    A = sorted(A)
    if not (n >= i and t >= i):
        return False
    if len(set(A)) != len(A) or any(a < i or a >= n for a in A):
        return False
    rs = range(n + 1) if n <= literal_limit else sorted({0, n, *A, *(a + 1 for a in A)})
    if not all(sparse_at(A, i, r) for r in rs if r <= n):
        return False
    values = set()
    for xs in itertools.product(A, repeat=f.arity):
        v = f(*xs)
        if v < t:
            values.add(v)
    return len(values) * eps.denominator >= eps.numerator * t


def brute_validate(f, eps, entries):
    return all(brute_entry_ok(f, eps, e["i"], e["n"], e["t"], e["A"]) for e in entries)


def brute_search(f, B_elems, eps, i, m_max, t_max, n_max):
    """The witness search spelled out literally, for small horizons.

    Returns (m, i, n, t, A) or the name of the failing step.
    """
    eps = Fraction(eps)
    below = [b for b in B_elems if b < n_max]

    counts = [0] * (n_max + 1)
    members = set(below)
    for j in range(1, n_max + 1):
        counts[j] = counts[j - 1] + ((j - 1) in members)

    m = None
    for cand in range(i, m_max + 1):
        if all(counts[j] * 2 ** i <= j for j in range(cand, n_max + 1)):
            m = cand
            break
    if m is None:
        return "no-m-found"
    D = [b for b in below if b >= m]

    def img(elems, t):
        return {v for xs in itertools.product(elems, repeat=f.arity) if (v := f(*xs)) < t}

    t = None
    for cand in range(i, t_max + 1):
        if len(img(D, cand)) >= eps * cand:
            t = cand
            break
    if t is None:
        return "no-t-found"
    full = img(D, t)
    for n in range(0, n_max + 1):
        if img([d for d in D if d < n], t) == full:
            if n < m:
                continue
            A = tuple(d for d in D if d < n)
            return m, i, n, t, A
    return "no-stabilizing-n"


def onto_sets(n_seq, k_max):
    """C and D of the onto construction, rebuilt from their definitions."""
    n_full = [2] + list(n_seq)
    C = set()
    for n in n_seq:
        C.update(range(n, 2 * n))
    D = set()
    for k in range(1, k_max + 1):
        n = max(v for v in n_full if v <= 2 ** k)
        d = -(-(2 ** k) // n)
        D.update(range(2 ** k - d + 1, 2 ** k + 1))
    return C, D


def onto_image(h, n_seq, k_max, below):
    """Every value of h below ``below`` reached on C × D; value -> first pair."""
    C, D = onto_sets(n_seq, k_max)
    seen = {}
    ys = sorted(D)
    for x in sorted(C):
        for y in ys:
            v = h(x, y)
            if v < below and v not in seen:
                seen[v] = (x, y)
    return seen


# -- the mod-4 monoid, by hand ---------------------------------------------------------

def mod4_cell(x):
    """0, 'Tx', 'Ty', 'Ax' or 'Ay' for the residue-mod-4 partition of ℕ."""
    if x == 0:
        return 0
    return {1: "Tx", 2: "Ty", 3: "Ax", 0: "Ay"}[x % 4]


def mod4_element(branch):
    """ℱ-member for a branch of (T_x index, T_y index) pairs."""
    d = len(branch)

    def f(x):
        c = mod4_cell(x)
        if c == "Ax":
            j = (x - 3) // 4
            return 4 * branch[j][0] + 1 if j < d else 1
        if c == "Ay":
            j = (x - 4) // 4
            return 4 * branch[j][1] + 2 if j < d else 2
        return x
    return f


def mod4_collapse(x):
    return 0 if mod4_cell(x) == "Ay" else x


def mod4_shape(c, branches, N):
    """Classify the table ``c`` of a composite on [0, N)."""
    xs = range(N)
    if all(c[x] == x for x in xs):
        return "identity"
    if all(c[x] == mod4_collapse(x) for x in xs):
        return "collapse"
    if any(c[x] != x for x in xs if mod4_cell(x) in (0, "Tx", "Ty")):
        return "unclassified"
    if any(mod4_cell(c[x]) != "Tx" for x in xs if mod4_cell(x) == "Ax"):
        return "unclassified"
    ay = [x for x in xs if mod4_cell(x) == "Ay"]
    d = len(branches[0]) if branches else 0
    firsts_x = [4 * j + 3 for j in range(d) if 4 * j + 3 < N]
    firsts_y = [4 * j + 4 for j in range(d) if 4 * j + 4 < N]
    if all(mod4_cell(c[x]) == "Ty" for x in ay):
        key = tuple(zip([c[x] for x in firsts_x], [c[y] for y in firsts_y]))
        full = {tuple((4 * a + 1, 4 * b + 2) for a, b in br)[:len(firsts_x)] for br in branches}
        return "F" if key in full else "unclassified"
    if all(c[x] == 0 for x in ay):
        key = tuple(c[x] for x in firsts_x)
        proj = {tuple(4 * a + 1 for a, _ in br)[:len(firsts_x)] for br in branches}
        return "G'" if key in proj else "unclassified"
    return "unclassified"


def mod4_laws(functions, branches, N):
    """Brute check of the four composition laws; returns the set of violated laws."""
    ident = lambda x: x
    F = [ident] + list(functions)
    bad = set()
    xs = range(N)
    for f in F:
        for g in functions:
            if any(f(g(x)) != g(x) for x in xs):
                bad.add("i")
    for f in functions:
        if any(mod4_collapse(f(x)) != f(x) for x in xs):
            bad.add("ii")
    for f in F:
        for x in xs:
            c = mod4_cell(x)
            want = 0 if c == "Ay" else (f(x) if c == "Ax" else x)
            if f(mod4_collapse(x)) != want:
                bad.add("iii")
                break
    pool = F + [mod4_collapse] + [lambda x, f=f: f(mod4_collapse(x)) for f in functions]
    for a in pool:
        for b in pool:
            if mod4_shape([a(b(x)) for x in xs], branches, N) == "unclassified":
                bad.add("iv")
    return bad
