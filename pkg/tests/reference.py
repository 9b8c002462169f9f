"""Independent brute-force ranks over F_2 for tiny tensors, used as a second route.

A tensor of shape [2]^d over F_2 is a bitmask of 2^d bits; rank-R is the
shortest XOR-sum of generator masks, found by breadth-first search over all
2^(2^d) tensors.  Nothing here imports the package.
"""
import itertools
from functools import lru_cache

import numpy as np


def _index(point, d):
    return sum(b << (d - 1 - i) for i, b in enumerate(point))


def mask_of(values) -> int:
    a = np.asarray(values) % 2
    d = a.ndim
    return sum(1 << _index(pt, d) for pt in itertools.product((0, 1), repeat=d) if a[pt])


def _functions(k):
    """All nonzero functions {0,1}^k -> F_2, as dicts point -> bit."""
    pts = list(itertools.product((0, 1), repeat=k))
    for bits in range(1, 1 << len(pts)):
        yield {pt: (bits >> i) & 1 for i, pt in enumerate(pts)}


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def generators(d, notion):
    axes = list(range(d))
    if notion == "tr":
        parts_list = [[[a] for a in axes]]
    elif notion == "sr":
        parts_list = [[[a], [b for b in axes if b != a]] for a in axes]
    elif notion == "pr":
        parts_list = [p for p in _set_partitions(axes) if len(p) >= 2]
    else:
        raise ValueError(notion)
    out = set()
    for parts in parts_list:
        for fs in itertools.product(*[list(_functions(len(p))) for p in parts]):
            m = 0
            for pt in itertools.product((0, 1), repeat=d):
                v = 1
                for p, f in zip(parts, fs):
                    v &= f[tuple(pt[a] for a in p)]
                if v:
                    m |= 1 << _index(pt, d)
            out.add(m)
    return sorted(out)


@lru_cache(maxsize=None)
def rank_table(d, notion):
    """Array of length 2^(2^d) with the rank of every tensor."""
    n = 1 << (1 << d)
    gens = np.array(generators(d, notion), dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int8)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        found = []
        for i in range(0, frontier.size, 512):
            nxt = np.unique((frontier[i:i + 512, None] ^ gens[None, :]).ravel())
            nxt = nxt[dist[nxt] < 0]
            dist[nxt] = level
            found.append(nxt)
        frontier = np.unique(np.concatenate(found)) if found else np.array([], dtype=np.int64)
    return dist


def reference_rank(values, notion):
    a = np.asarray(values) % 2
    assert all(n == 2 for n in a.shape)
    return int(rank_table(a.ndim, notion)[mask_of(a)])


def matrix_rank_f(a, p):
    """Rank over F_p by plain Gaussian elimination on Python ints."""
    m = [[int(x) % p for x in row] for row in np.asarray(a)]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
    return r


def padded_rank(values, notion):
    """Rank of a tensor with every axis of size <= 2, padded with zeros to [2]^d."""
    a = np.asarray(values) % 2
    big = np.zeros((2,) * a.ndim, dtype=np.int64)
    big[tuple(slice(0, n) for n in a.shape)] = a
    return reference_rank(big, notion)


def reference_essential(values, axes, notion):
    """min over V supported where two labels agree of rank(T + V), all shapes [<=2]^d."""
    a = np.asarray(values) % 2
    cells = [idx for idx in itertools.product(*[range(n) for n in a.shape])
             if len({axes[i][j] for i, j in enumerate(idx)}) < a.ndim]
    best = None
    for bits in itertools.product((0, 1), repeat=len(cells)):
        b = a.copy()
        for c, v in zip(cells, bits):
            b[c] ^= v
        r = padded_rank(b, notion)
        best = r if best is None else min(best, r)
    return best


def reference_disjoint(values, axes, notion):
    """max rank over restrictions to pairwise-disjoint nonempty label subsets."""
    a = np.asarray(values) % 2
    choices = []
    for ax in axes:
        choices.append([s for r in range(1, len(ax) + 1) for s in itertools.combinations(range(len(ax)), r)])
    best = 0
    for pick in itertools.product(*choices):
        labels = [{axes[i][j] for j in s} for i, s in enumerate(pick)]
        if sum(len(x) for x in labels) != len(set().union(*labels)):
            continue
        best = max(best, padded_rank(a[np.ix_(*pick)], notion))
    return best
