"""Exhaustive ground truth for R-rank, spanning rank, essential and disjoint rank.

Generic R-rank search: every term is a product of factors over the parts of
some partition P in R.  One part of P (the one with most entries) is left
free; the other factors are enumerated up to scalar.  With the enumerated
factors fixed, a term ranges over the subspace g (x) F^{Q(free)}, so deciding
whether k terms suffice reduces to a subspace-membership test, done
incrementally along a depth-first search over increasing option indices.

Tensor rank uses the slice characterisation instead: tr T is the fewest
rank-1 order-(d-1) tensors whose span contains all slices along one axis.

Essential ranks need no enumeration of the modifier V: asking whether
T + V has rank <= k for some V supported on E is the same membership test
after deleting the coordinates in E.
"""
from __future__ import annotations

import functools
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ScaleExceeded
from .families import (
    Partition,
    PartitionFamily,
    has_trivial_partition,
    is_tensor_rank,
    slice_rank_family,
    tensor_rank_family,
)
from .field import EchelonBasis, mat_rank, pack_bits, rank_factorization, solve_left
from .tensor import MinorSelection, Tensor, diagonal_mask, restrict

DEFAULT_NODE_BUDGET = 10**8
BUDGET_ENV = "RANKMINORS_NODE_BUDGET"


def node_budget() -> int:
    return int(os.environ.get(BUDGET_ENV, DEFAULT_NODE_BUDGET))


# certificates


@dataclass
class Term:
    partition: Partition
    factors: dict  # part (tuple of axes) -> array over those axes

    def evaluate(self, shape: Sequence[int], p: int) -> np.ndarray:
        out = np.ones(shape, dtype=np.int64)
        d = len(shape)
        for part, f in self.factors.items():
            f = np.asarray(f, dtype=np.int64)
            view = f.reshape([shape[a] if a in part else 1 for a in range(d)])
            out = out * view % p
        return out


@dataclass
class RankCertificate:
    family: PartitionFamily
    axes: tuple
    p: int
    terms: list = field(default_factory=list)
    notion: str = "R"

    @property
    def value(self) -> int:
        return len(self.terms)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    def evaluate(self) -> Tensor:
        vals = np.zeros(self.shape, dtype=np.int64)
        for term in self.terms:
            vals = (vals + term.evaluate(self.shape, self.p)) % self.p
        return Tensor(vals, self.p, self.axes)

    def is_valid(self) -> bool:
        for term in self.terms:
            if term.partition not in self.family.partitions:
                return False
            if set(term.factors) != set(term.partition):
                return False
        return True

    def verify(self, t: Tensor) -> bool:
        return self.is_valid() and self.evaluate() == t

    def to_dict(self) -> dict:
        out_terms = []
        for term in self.terms:
            factors = {}
            for part, f in term.factors.items():
                key = json.dumps([a + 1 for a in part], separators=(",", ""))
                entries = {}
                f = np.asarray(f)
                for idx in zip(*np.nonzero(f)):
                    labels = [self.axes[a][i] for a, i in zip(part, idx)]
                    entries[json.dumps(labels, separators=(",", ""))] = int(f[idx])
                factors[key] = entries
            out_terms.append({"partition": [[a + 1 for a in part] for part in term.partition], "factors": factors})
        return {
            "notion": self.notion,
            "value": self.value,
            "field_order": self.p,
            "axes": [list(a) for a in self.axes],
            "family": self.family.to_dict(),
            "terms": out_terms,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RankCertificate":
        axes = tuple(tuple(a) for a in data["axes"])
        p = int(data["field_order"])
        fam = PartitionFamily.from_dict(data["family"])
        pos = [{x: i for i, x in enumerate(ax)} for ax in axes]
        terms = []
        for tm in data["terms"]:
            P = tuple(tuple(a - 1 for a in part) for part in tm["partition"])
            factors = {}
            for key, entries in tm["factors"].items():
                part = tuple(a - 1 for a in json.loads(key))
                f = np.zeros([len(axes[a]) for a in part], dtype=np.int64)
                for lk, v in entries.items():
                    labels = json.loads(lk)
                    f[tuple(pos[a][x] for a, x in zip(part, labels))] = v
                factors[part] = f
            terms.append(Term(tuple(sorted(P)), factors))
        return cls(fam, axes, p, terms, data.get("notion", "R"))


@dataclass
class RankReport:
    notion: str
    value: int
    certificate: RankCertificate
    exhausted_below: bool
    method: str

    def to_dict(self) -> dict:
        return {
            "notion": self.notion,
            "value": self.value,
            "lower_bound": {"exhausted_below": self.exhausted_below, "method": self.method},
            "certificate": self.certificate.to_dict(),
        }


def notion_name(R: PartitionFamily) -> str:
    if R == tensor_rank_family(R.ground):
        return "tr"
    if R == slice_rank_family(R.ground):
        return "sr"
    from .families import partition_rank_family

    if R == partition_rank_family(R.ground):
        return "pr"
    return "R"


# enumeration helpers


def normalized_vectors(n: int, p: int) -> list[np.ndarray]:
    """Nonzero vectors of F_p^n whose first nonzero entry is 1, in lexicographic order."""
    out = []
    for v in itertools.product(range(p), repeat=n):
        nz = next((x for x in v if x), 0)
        if nz == 1:
            out.append(np.array(v, dtype=np.int64))
    return out


def _entries(part, shape) -> int:
    return int(np.prod([shape[a] for a in part]))


def free_part(P: Partition, shape) -> tuple[int, ...]:
    return max(P, key=lambda part: (_entries(part, shape), -P.index(part)))


def _count(n: int, k: int) -> int:
    return sum(math.comb(n, j) for j in range(k + 1))


class _Counter:
    __slots__ = ("nodes", "budget")

    def __init__(self, budget: int):
        self.nodes = 0
        self.budget = budget

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise ScaleExceeded(f"search passed the node budget of {self.budget}")


def _encode(arr: np.ndarray, p: int, keep: np.ndarray | None):
    v = np.asarray(arr, dtype=np.int64).ravel() % p
    if keep is not None:
        v = v * keep
    return pack_bits(v) if p == 2 else v


@dataclass
class _Option:
    partition: Partition
    free: tuple[int, ...]
    factors: dict
    gens: list


def _options(shape, p: int, R: PartitionFamily, keep) -> list[_Option]:
    d = len(shape)
    out = []
    for P in R.partitions:
        free = free_part(P, shape)
        others = [part for part in P if part != free]
        choices = [normalized_vectors(_entries(part, shape), p) for part in others]
        free_shape = [shape[a] for a in free]
        for combo in itertools.product(*choices):
            factors = {}
            g = np.ones([1 if a in free else shape[a] for a in range(d)], dtype=np.int64)
            for part, vec in zip(others, combo):
                f = vec.reshape([shape[a] for a in part])
                factors[part] = f
                g = g * f.reshape([shape[a] if a in part else 1 for a in range(d)]) % p
            gens = []
            for z in itertools.product(*[range(n) for n in free_shape]):
                full = np.zeros(shape, dtype=np.int64)
                idx = [slice(None)] * d
                gidx = [slice(None)] * d
                for a, zi in zip(free, z):
                    idx[a] = zi
                    gidx[a] = 0
                full[tuple(idx)] = g[tuple(gidx)]
                gens.append(_encode(full, p, keep))
            out.append(_Option(P, free, factors, gens))
    return out


@functools.lru_cache(maxsize=256)
def _options_cached(shape, p, R, keep_bytes):
    keep = None if keep_bytes is None else np.frombuffer(keep_bytes, dtype=np.int64)
    return _options(shape, p, R, keep)


def _generic_search(target, options, k, n, p, counter) -> list[int] | None:
    """Indices of at most k options whose subspaces together contain target."""

    def dfs(start, chosen, basis):
        if basis.contains(target):
            return list(chosen)
        if len(chosen) == k:
            return None
        last = len(chosen) == k - 1
        r = basis.reduce(target) if last else None
        for i in range(start, len(options)):
            counter.tick()
            if last:
                # only the target's residual matters on the final level
                small = EchelonBasis(n, p)
                for g in options[i].gens:
                    small.add(basis.reduce(g))
                if small.contains(r):
                    return list(chosen) + [i]
                continue
            nb = basis.copy()
            if nb.add_all(options[i].gens) == 0:
                continue
            chosen.append(i)
            res = dfs(i + 1, chosen, nb)
            chosen.pop()
            if res is not None:
                return res
        return None

    return dfs(0, [], EchelonBasis(n, p))


def _solve_terms(t_vals, p, shape, chosen: list[_Option], keep) -> list[Term]:
    gens = []
    for opt in chosen:
        for g in opt.gens:
            gens.append(g)
    target = np.asarray(t_vals, dtype=np.int64).ravel() % p
    if keep is not None:
        target = target * keep
    n = target.size
    if p == 2:
        from .field import unpack_bits

        G = np.array([unpack_bits(g, n) for g in gens], dtype=np.int64).reshape(len(gens), n)
    else:
        G = np.array(gens, dtype=np.int64).reshape(len(gens), n)
    x = solve_left(G, target, p)
    assert x is not None
    terms = []
    pos = 0
    for opt in chosen:
        m = len(opt.gens)
        h = x[pos:pos + m].reshape([shape[a] for a in opt.free])
        pos += m
        if not h.any():
            continue
        factors = dict(opt.factors)
        factors[opt.free] = h
        terms.append(Term(opt.partition, factors))
    return terms


def _trivial_cert(t: Tensor, R: PartitionFamily) -> RankCertificate:
    return RankCertificate(R, t.axes, t.p, [], notion_name(R))


def _single_part_cert(t: Tensor, R: PartitionFamily) -> RankCertificate:
    ground = tuple(range(t.order))
    cert = _trivial_cert(t, R)
    if not t.is_zero():
        cert.terms.append(Term((ground,), {ground: t.values.copy()}))
    return cert


def _matrix_cert(t: Tensor, R: PartitionFamily) -> RankCertificate:
    left, right = rank_factorization(t.values, t.p)
    cert = _trivial_cert(t, R)
    for i in range(left.shape[1]):
        cert.terms.append(Term(((0,), (1,)), {(0,): left[:, i].copy(), (1,): right[i].copy()}))
    return cert


def _rank_one_family(shape, p):
    """Rank-1 tensors of the given shape up to scalar, with their factors."""
    choices = [normalized_vectors(n, p) for n in shape]
    for combo in itertools.product(*choices):
        arr = np.ones((), dtype=np.int64)
        for v in combo:
            arr = np.multiply.outer(arr, v) % p
        yield combo, arr


def _span_search(S, F, p, n, k, counter) -> list[int] | None:
    """Indices of at most k elements of S whose span contains every vector of F."""
    W = EchelonBasis(n, p)
    W.add_all(F)

    def dfs(start, chosen, WC, Cb):
        if WC.dim == Cb.dim:
            return list(chosen)
        if len(chosen) == k or k - len(chosen) < WC.dim - Cb.dim:
            return None
        for i in range(start, len(S)):
            counter.tick()
            nWC = WC.copy()
            nWC.add(S[i])
            if nWC.dim > k:
                continue
            nC = Cb.copy()
            if not nC.add(S[i]):
                continue
            chosen.append(i)
            res = dfs(i + 1, chosen, nWC, nC)
            chosen.pop()
            if res is not None:
                return res
        return None

    return dfs(0, [], W, EchelonBasis(n, p))


def spanning_rank(S: Sequence, F: Sequence, p: int) -> float | int:
    """Fewest elements of S whose span contains F; math.inf when S cannot span F."""
    S = [np.asarray(getattr(s, "values", s), dtype=np.int64).ravel() % p for s in S]
    F = [np.asarray(getattr(f, "values", f), dtype=np.int64).ravel() % p for f in F]
    if not F:
        return 0
    n = F[0].size
    enc = (lambda v: pack_bits(v)) if p == 2 else (lambda v: v)
    Se, Fe = [enc(s) for s in S], [enc(f) for f in F]
    full = EchelonBasis(n, p)
    full.add_all(Se)
    if not all(full.contains(f) for f in Fe):
        return math.inf
    Wb = EchelonBasis(n, p)
    Wb.add_all(Fe)
    budget = node_budget()
    counter = _Counter(budget)
    for k in range(Wb.dim, len(S) + 1):
        if _count(len(S), k) > budget and k > Wb.dim:
            raise ScaleExceeded(f"spanning-rank search with |S|={len(S)}, k={k} passes the budget")
        if _span_search(Se, Fe, p, n, k, counter) is not None:
            return k
    return math.inf


def _tr_axis(shape, p) -> int:
    """Slice along the axis whose complement has the fewest rank-1 tensors."""
    def cost(a):
        return math.prod((p ** shape[b] - 1) // (p - 1) for b in range(len(shape)) if b != a)
    return min(range(len(shape)), key=lambda a: (cost(a), a))


def _tr_decide(t: Tensor, k: int, counter) -> RankCertificate | None:
    p, shape, d = t.p, t.shape, t.order
    R = tensor_rank_family(d)
    axis = _tr_axis(shape, p)
    rest = [a for a in range(d) if a != axis]
    sub_shape = [shape[a] for a in rest]
    n_rank_one = math.prod((p ** m - 1) // (p - 1) for m in sub_shape)
    if _count(n_rank_one, k) > counter.budget:
        raise ScaleExceeded(f"tensor-rank search with {n_rank_one} rank-1 candidates and k={k} passes the budget")
    S = list(_rank_one_family(sub_shape, p))
    n = int(np.prod(sub_shape))
    moved = np.moveaxis(t.values, axis, 0)
    slices = [moved[i].ravel() for i in range(shape[axis])]
    enc = (lambda v: pack_bits(v)) if p == 2 else (lambda v: v)
    chosen = _span_search([enc(arr.ravel()) for _, arr in S], [enc(s) for s in slices], p, n, k, counter)
    if chosen is None:
        return None
    G = np.array([S[i][1].ravel() for i in chosen], dtype=np.int64).reshape(len(chosen), n)
    coeff = np.zeros((len(chosen), shape[axis]), dtype=np.int64)
    for x, s in enumerate(slices):
        c = solve_left(G, s, p)
        coeff[:, x] = c
    cert = RankCertificate(R, t.axes, p, [], "tr")
    singletons = tuple((a,) for a in range(d))
    for j, i in enumerate(chosen):
        if not coeff[j].any():
            continue
        factors = {(axis,): coeff[j].copy()}
        for a, v in zip(rest, S[i][0]):
            factors[(a,)] = v.copy()
        cert.terms.append(Term(singletons, factors))
    return cert


def _keep_mask(t: Tensor) -> np.ndarray:
    return (~diagonal_mask(t.axes)).astype(np.int64).ravel()


def _generic_decide(t: Tensor, R: PartitionFamily, k: int, counter, essential: bool) -> RankCertificate | None:
    p, shape = t.p, t.shape
    keep = _keep_mask(t) if essential else None
    opts = _options_cached(shape, p, R, None if keep is None else keep.tobytes())
    if _count(len(opts), k) > counter.budget:
        raise ScaleExceeded(f"R-rank search with {len(opts)} term options and k={k} passes the budget")
    n = int(np.prod(shape))
    target = _encode(t.values, p, keep)
    chosen = _generic_search(target, opts, k, n, p, counter)
    if chosen is None:
        return None
    terms = _solve_terms(t.values, p, shape, [opts[i] for i in chosen], keep)
    return RankCertificate(R, t.axes, p, terms, notion_name(R))


def _check_family(t: Tensor, R: PartitionFamily) -> PartitionFamily:
    if R.ground != tuple(range(t.order)):
        if R.d != t.order:
            raise ValueError("family order does not match the tensor")
        R = R.reindexed()
    return R


def rrank_decide(t: Tensor, R: PartitionFamily, k: int, *, essential: bool = False, _counter=None) -> RankCertificate | None:
    """A certificate with at most k terms, or None when exhaustion proves none exists.

    With essential=True the certificate represents T + V for some V supported
    on the diagonal set E instead of T itself.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    R = _check_family(t, R)
    counter = _counter or _Counter(node_budget())
    zero = (not np.any(t.values * _keep_mask(t).reshape(t.shape))) if essential else t.is_zero()
    if zero:
        return _trivial_cert(t, R)
    if k == 0:
        return None
    if has_trivial_partition(R) or t.order == 1:
        if essential:
            cert = _trivial_cert(t, R)
            ground = tuple(range(t.order))
            vals = t.values * _keep_mask(t).reshape(t.shape)
            cert.terms.append(Term((ground,), {ground: vals % t.p}))
            return cert
        return _single_part_cert(t, R)
    if not essential and t.order == 2:
        # a family on two axes without the one-part partition is matrix rank
        rk = mat_rank(t.values, t.p)
        return _matrix_cert(t, R) if rk <= k else None
    if not essential and is_tensor_rank(R):
        return _tr_decide(t, k, counter)
    return _generic_decide(t, R, k, counter, essential)


def _tensor_key(t: Tensor):
    return (t.p, t.axes, t.values.tobytes(), t.shape)


def _lower_bound(t: Tensor, R: PartitionFamily) -> int:
    if t.is_zero():
        return 0
    if is_tensor_rank(R):
        from .tensor import flatten

        return max(mat_rank(flatten(t, [a]), t.p) for a in range(t.order)) if t.order > 1 else 1
    return 1


@functools.lru_cache(maxsize=4096)
def _rrank_cached(key, R: PartitionFamily, use_covering: bool):
    p, axes, raw, shape = key
    t = Tensor(np.frombuffer(raw, dtype=np.int64).reshape(shape), p, axes)
    if use_covering and t.order == 3 and R == slice_rank_family(3):
        from .covering import antichain_slice_rank

        res = antichain_slice_rank(t)
        if res is not None:
            return res
    counter = _Counter(node_budget())
    k = _lower_bound(t, R)
    exhausted = True
    while True:
        cert = rrank_decide(t, R, k, _counter=counter)
        if cert is not None:
            return RankReport(notion_name(R), cert.value, cert, exhausted, "exhaustive search")
        k += 1


def rrank_exact(t: Tensor, R: PartitionFamily, *, use_covering: bool = True) -> RankReport:
    """Minimal R-rank by iterative deepening, with certificate.

    For order-3 slice rank on antichain support the covering characterisation
    is used unless use_covering is False.
    """
    R = _check_family(t, R)
    return _rrank_cached(_tensor_key(t), R, use_covering)


def rrank(t: Tensor, R: PartitionFamily) -> int:
    return rrank_exact(t, R).value


def rank_at_least(t: Tensor, R: PartitionFamily, l: int) -> bool:
    """Whether Rrk t >= l, deciding only at l - 1 when the exact value is not cached."""
    if l <= 0:
        return True
    if t.is_zero():
        return False
    return rrank_decide(t, R, l - 1) is None


@dataclass
class EssentialReport:
    value: int
    modifier: Tensor
    certificate: RankCertificate


def _brute_force_essential(t: Tensor, R: PartitionFamily) -> EssentialReport:
    """Enumerate every diagonal modification of a matrix; used for d = 2."""
    mask = diagonal_mask(t.axes)
    cells = list(zip(*np.nonzero(mask)))
    p = t.p
    if p ** len(cells) > node_budget():
        raise ScaleExceeded("too many diagonal modifications to enumerate")
    best = None
    for vals in itertools.product(range(p), repeat=len(cells)):
        v = np.zeros(t.shape, dtype=np.int64)
        for c, x in zip(cells, vals):
            v[c] = x
        rk = mat_rank((t.values + v) % p, p)
        if best is None or rk < best[0]:
            best = (rk, v)
            if rk == 0:
                break
    V = Tensor(best[1], p, t.axes)
    shifted = t + V
    cert = rrank_decide(shifted, R, best[0])
    return EssentialReport(best[0], V, cert)


def essential_rank_exact(t: Tensor, R: PartitionFamily) -> EssentialReport:
    """min over V supported on E of Rrk(T + V), with the minimising V."""
    R = _check_family(t, R)
    return _essential_cached(_tensor_key(t), R)


@functools.lru_cache(maxsize=2048)
def _essential_cached(key, R):
    p, axes, raw, shape = key
    t = Tensor(np.frombuffer(raw, dtype=np.int64).reshape(shape), p, axes)
    if t.order == 2 and not has_trivial_partition(R):
        return _brute_force_essential(t, R)
    counter = _Counter(node_budget())
    k = 0
    while True:
        cert = rrank_decide(t, R, k, essential=True, _counter=counter)
        if cert is not None:
            ev = cert.evaluate()
            V = ev - t
            assert not np.any(V.values[~diagonal_mask(t.axes)])
            return EssentialReport(cert.value, V, cert)
        k += 1


def essential_rank(t: Tensor, R: PartitionFamily) -> int:
    return essential_rank_exact(t, R).value


def disjoint_selections(axes: Sequence[Sequence[int]]):
    """Maximal pairwise-disjoint selections: every label goes to one axis carrying it."""
    labels = sorted({x for ax in axes for x in ax})
    homes = [[a for a, ax in enumerate(axes) if x in ax] for x in labels]
    for choice in itertools.product(*homes):
        subsets = [[] for _ in axes]
        for x, a in zip(labels, choice):
            subsets[a].append(x)
        yield tuple(tuple(s) for s in subsets)


def disjoint_rank_exact(t: Tensor, R: PartitionFamily) -> tuple[int, MinorSelection]:
    """max of Rrk over restrictions to pairwise-disjoint axis subsets."""
    R = _check_family(t, R)
    count = math.prod(sum(1 for ax in t.axes if x in ax) for x in {x for ax in t.axes for x in ax})
    if count > node_budget():
        raise ScaleExceeded("too many disjoint selections to enumerate")
    best = (0, MinorSelection(tuple(() for _ in t.axes), disjoint=True))
    seen = set()
    for subsets in disjoint_selections(t.axes):
        if any(not s for s in subsets) or subsets in seen:
            continue
        seen.add(subsets)
        r = restrict(t, subsets)
        if r.is_zero():
            continue
        if not rank_at_least(r, R, best[0] + 1):
            continue
        val = rrank(r, R)
        if val > best[0]:
            best = (val, MinorSelection(subsets, disjoint=True))
    return best
