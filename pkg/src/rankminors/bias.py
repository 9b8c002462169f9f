"""Multilinear forms, bias, analytic rank, and partition-rank minors over F_p.

The bias of T is the probability over u_1..u_{d-1} that the linear form
u_d -> m(T)(u_1, ..., u_d) vanishes identically.  For fixed u_1..u_{d-2}
the remaining condition on u_{d-1} is a left-kernel condition on a matrix,
so the exact computation enumerates d-2 vectors and counts the rest.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import Infeasible, RankTooLow, ScaleExceeded, VerificationFailed
from .families import partition_rank_family
from .field import independent_rows, mat_rank, solve_left
from .oracles import node_budget, normalized_vectors, rank_at_least
from .tensor import MinorSelection, Tensor, contract, contract_many, greedy_shrink, restrict


def multilinear_form(t: Tensor, us: Sequence) -> int:
    if len(us) != t.order:
        raise ValueError("need one vector per axis")
    return int(contract_many(us, t)) % t.p


def _all_vectors(n: int, p: int):
    return (np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n))


@dataclass(frozen=True)
class BiasValue:
    exact: Fraction | None = None
    estimate: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def value(self) -> float:
        return float(self.exact) if self.exact is not None else self.estimate

    def to_dict(self) -> dict:
        out: dict = {}
        if self.exact is not None:
            out["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        if self.estimate is not None:
            out.update(estimate=self.estimate, samples=self.samples, seed=self.seed)
        return out


def bias_exact(t: Tensor) -> BiasValue:
    p, d = t.p, t.order
    if d == 1:
        return BiasValue(Fraction(1) if t.is_zero() else Fraction(0))
    outer_axes = t.shape[: d - 2]
    n_outer = sum(outer_axes)
    if p ** n_outer > node_budget():
        raise ScaleExceeded("too many vector tuples for exact bias")
    rows = t.shape[d - 2]
    total = Fraction(0)
    count = 0
    for combo in itertools.product(*[list(_all_vectors(n, p)) for n in outer_axes]):
        m = contract_many(combo, t) if combo else t.values
        total += Fraction(1, p ** mat_rank(m.reshape(rows, -1), p))
        count += 1
    return BiasValue(total / count)


def bias_mc(t: Tensor, samples: int, seed: int = 0, batch: int = 20000) -> BiasValue:
    """Monte-Carlo estimate of the bias from a counter-based generator."""
    if samples < 1:
        raise ValueError("samples must be positive")
    p, d = t.p, t.order
    gen = np.random.Generator(np.random.Philox(seed))
    hits = 0
    done = 0
    while done < samples:
        s = min(batch, samples - done)
        cur = np.broadcast_to(t.values, (s,) + t.shape)
        for a in range(d - 1):
            u = gen.integers(0, p, size=(s, t.shape[a]))
            cur = np.einsum("si,si...->s...", u, cur) % p
        hits += int(np.count_nonzero(~cur.reshape(s, -1).any(axis=1)))
        done += s
    return BiasValue(estimate=hits / samples, samples=samples, seed=seed)


@dataclass(frozen=True)
class AnalyticRank:
    bias: Fraction
    p: int
    exact: int | None
    bracket: tuple[int, int]

    @property
    def value(self) -> float:
        return -math.log(self.bias.numerator / self.bias.denominator, self.p) if self.exact is None else float(self.exact)

    def to_dict(self) -> dict:
        return {"bias": f"{self.bias.numerator}/{self.bias.denominator}", "exact": self.exact,
                "bracket": list(self.bracket), "value": self.value}


def analytic_rank(t: Tensor) -> AnalyticRank:
    """-log_p(bias); exact when the bias is a power of p, else an integer bracket."""
    b = bias_exact(t).exact
    p = t.p
    # find j with p^-(j+1) < b <= p^-j
    j = 0
    while b <= Fraction(1, p ** (j + 1)):
        j += 1
    if b == Fraction(1, p ** j):
        return AnalyticRank(b, p, j, (j, j))
    return AnalyticRank(b, p, None, (j, j + 1))


def averaging_check(t: Tensor) -> bool:
    """bias(T) equals the average over u_1 of bias(u_1.T), in exact arithmetic."""
    lhs = bias_exact(t).exact
    p = t.p
    vecs = list(_all_vectors(t.shape[0], p))
    rhs = Fraction(0)
    for u in vecs:
        vals = np.tensordot(u, t.values, axes=([0], [0])) % p
        if t.order == 2:
            rhs += Fraction(1) if not vals.any() else Fraction(0)
        else:
            rhs += bias_exact(Tensor(vals, p, t.axes[1:])).exact
    return lhs == rhs / len(vecs)


# partition-rank separated projections and minors


def pr_at_least(t: Tensor, q: int) -> bool:
    if q <= 0:
        return True
    if t.order == 1:
        return q <= 1 and not t.is_zero()
    if t.order == 2:
        return mat_rank(t.values, t.p) >= q
    return rank_at_least(t, partition_rank_family(t.order), q)


def _combine(us: Sequence[np.ndarray], v: Sequence[int], p: int) -> np.ndarray:
    out = np.zeros_like(us[0])
    for c, u in zip(v, us):
        out = (out + c * u) % p
    return out


def separated_projections(t: Tensor, q: int, l: int) -> list[np.ndarray]:
    """u_1..u_l with pr((sum v_h u_h).T) >= q for every nonzero v.

    Built greedily: the h-th vector must keep pr >= q after adding any
    combination of the earlier ones.  Raises Infeasible when a step finds no
    candidate.
    """
    p = t.p
    n = t.shape[0]
    budget = node_budget()
    us: list[np.ndarray] = []
    for h in range(l):
        if p ** n * p ** h > budget:
            raise ScaleExceeded("separated-projection search passes the budget")
        found = None
        for u in normalized_vectors(n, p):
            ok = True
            for w in itertools.product(range(p), repeat=h):
                cand = (u + _combine(us, w, p)) % p if h else u
                if not cand.any() or not pr_at_least(contract(cand, t), q):
                    ok = False
                    break
            if ok:
                found = u
                break
        if found is None:
            raise Infeasible(f"no vector extends the separated family beyond size {h}")
        us.append(found)
    for v in itertools.product(range(p), repeat=l):
        if any(v):
            assert pr_at_least(contract(_combine(us, v, p), t), q)
    return us


@dataclass
class MinorTrace:
    steps: list = field(default_factory=list)

    def log(self, **kw):
        self.steps.append(kw)


def matrix_minor(t: Tensor, l: int) -> MinorSelection:
    """Rows and columns of an l x l nonsingular submatrix, first witnesses in order."""
    a = t.values
    rows = independent_rows(a, t.p, limit=l)
    if len(rows) < l:
        raise RankTooLow(f"matrix rank {len(rows)} is below {l}")
    cols = independent_rows(a[rows].T, t.p, limit=l)
    return MinorSelection(([t.axes[0][i] for i in rows], [t.axes[1][j] for j in cols]))


def ff_pr_minor_find(t: Tensor, l: int, trace: MinorTrace | None = None) -> MinorSelection:
    """A minor with partition rank >= l by induction on the order.

    Separated projections u_h of the whole tensor are restricted by minors of
    the order-(d-1) combinations; the first axis is then cut down to slices
    spanning the restricted slice space, with u'_h re-expressed on them.
    """
    trace = trace if trace is not None else MinorTrace()
    p, d = t.p, t.order
    if l <= 0:
        return MinorSelection(tuple((ax[0],) for ax in t.axes))
    if d == 2:
        sel = matrix_minor(t, l)
        trace.log(order=2, sizes=sel.sizes)
        return sel
    if not pr_at_least(t, l):
        raise RankTooLow(f"partition rank is below {l}")
    try:
        us = separated_projections(t, l, l)
    except Infeasible:
        # no separated family at this threshold: fall back to certified shrinking
        sel = greedy_shrink(t, lambda r: pr_at_least(r, l))
        trace.log(order=d, sizes=sel.sizes, route="shrink")
        return sel
    rest_sets: list[set] = [set() for _ in range(d - 1)]
    for v in itertools.product(range(p), repeat=l):
        if not any(v) or next(x for x in v if x) != 1:
            continue
        sub = contract(_combine(us, v, p), t)
        sel = ff_pr_minor_find(sub, l, trace)
        for i, s in enumerate(sel.subsets):
            rest_sets[i].update(s)
    rest = [sorted(s) for s in rest_sets]
    # slices restricted to X_2 x ... x X_d; X_1 spans them
    restricted = restrict(t, [t.axes[0]] + rest)
    flat = restricted.values.reshape(t.shape[0], -1)
    x1_idx = independent_rows(flat, p)
    basis = flat[x1_idx]
    coeff = np.zeros((t.shape[0], len(x1_idx)), dtype=np.int64)
    for x in range(t.shape[0]):
        coeff[x] = solve_left(basis, flat[x], p)
    us_prime = []
    for u in us:
        up = np.zeros(t.shape[0], dtype=np.int64)
        up[x1_idx] = u @ coeff % p
        us_prime.append(up)
    X1 = [t.axes[0][i] for i in x1_idx]
    sel = MinorSelection([X1] + rest)
    final = restrict(t, sel)
    # the u'_h agree with u_h on the restricted slices
    for u, up in zip(us, us_prime):
        assert np.array_equal(contract(u, restricted).values, contract(up, restricted).values)
    trace.log(order=d, sizes=sel.sizes, route="separated projections", projections=[u.tolist() for u in us])
    if not pr_at_least(final, l):
        raise VerificationFailed("restricted tensor lost partition rank")
    return sel
