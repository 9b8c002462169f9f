"""Minors on pairwise-disjoint label sets and essential-rank reductions.

Axis labels live in one shared namespace, so "disjoint" means no label is
used on two axes.  E is the set of points with two equal coordinates; the
essential rank ignores whatever a tensor does on E.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bias import matrix_minor, pr_at_least
from .errors import (
    HypothesisUnverifiable,
    Obstructed,
    RankTooLow,
    SliceBoundViolated,
    VerificationFailed,
)
from .families import (
    PartitionFamily,
    canonical_partition,
    down_shadow,
    every_partition_isolates,
    has_trivial_partition,
    induced_family,
    is_tensor_rank,
    partition_rank_family,
    tensor_rank_family,
)
from .field import EchelonBasis, dual_basis, mat_inverse, mat_rank
from .minors import _combine, _nonzero_vectors, _term_slice, separated_family_search
from .oracles import (
    RankCertificate,
    Term,
    _check_family,
    disjoint_rank_exact,
    disjoint_selections,
    essential_rank_exact,
    notion_name,
    rank_at_least,
    rrank,
)
from .tensor import (
    MinorSelection,
    Tensor,
    diagonal_mask,
    flatten,
    greedy_shrink,
    in_diagonal,
    off_diagonal_support,
    outer,
    restrict,
    slice_tensor,
)


@dataclass(frozen=True)
class DiagonalModifier:
    values: Tensor
    provenance: str  # "brute force" or "constructed"

    def __post_init__(self):
        if np.any(self.values.values[~diagonal_mask(self.values.axes)]):
            raise ValueError("modifier has support outside E")


@dataclass
class DisjointCertificate:
    selection: MinorSelection
    notion: str
    bound: int
    transcript: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.selection.is_pairwise_disjoint():
            raise VerificationFailed("disjoint certificate with overlapping label sets")
        if not self.selection.disjoint:
            self.selection = MinorSelection(self.selection.subsets, disjoint=True)

    def to_dict(self) -> dict:
        out = {"notion": self.notion, "bound": self.bound, "disjoint": True,
               "subsets": [list(s) for s in self.selection.subsets]}
        out["transcript"] = {k: v for k, v in self.transcript.items() if isinstance(v, (int, str, bool, list, dict, type(None)))}
        return out


def _empty(d: int) -> MinorSelection:
    return MinorSelection(tuple(() for _ in range(d)), disjoint=True)


def _restricted_rank_at_least(t: Tensor, sel: MinorSelection, R, l: int) -> bool:
    if l <= 0:
        return True
    if any(not s for s in sel.subsets):
        return False
    return rank_at_least(restrict(t, sel), R, l)


# matrices


def matrix_disjoint_extract(A: Tensor) -> DisjointCertificate:
    """Disjoint X, Y with rk A(X x Y) >= erk(A) / 3.

    A locally maximal disjoint nonsingular block A(X x Y) is grown greedily;
    the Schur complement through it defines a diagonal modifier D with
    rk (A + D)((Q1 \\ Y) x (Q2 \\ X)) = |X|, and the three-block split then
    bounds rk(A + D) by 3|X|.
    """
    if A.order != 2:
        raise ValueError("expects a matrix")
    p = A.p
    Q1, Q2 = A.axes
    ess = essential_rank_exact(A, tensor_rank_family(2))
    X: list[int] = []
    Y: list[int] = []
    grown = True
    while grown:
        grown = False
        used = set(X) | set(Y)
        for z in Q1:
            if z in used:
                continue
            for w in Q2:
                if w in used or w == z:
                    continue
                block = restrict(A, [X + [z], Y + [w]]).values
                if mat_rank(block, p) == len(X) + 1:
                    X.append(z)
                    Y.append(w)
                    grown = True
                    break
            if grown:
                break
    k = len(X)
    D = np.zeros(A.shape, dtype=np.int64)
    if k:
        inv_block = mat_inverse(restrict(A, [X, Y]).values, p)
        used = set(X) | set(Y)
        for z in Q1:
            if z in used or z not in Q2:
                continue
            row = restrict(A, [[z], Y]).values
            col = restrict(A, [X, [z]]).values
            target = int((row @ inv_block @ col)[0, 0]) % p
            D[A.position(0, z), A.position(1, z)] = (target - A[(z, z)]) % p
    else:
        for z in Q1:
            if z in Q2:
                D[A.position(0, z), A.position(1, z)] = (-A[(z, z)]) % p
    modified = A.with_values(A.values + D)
    rows_rest = [x for x in Q1 if x not in Y]
    cols_rest = [x for x in Q2 if x not in X]
    blocks = []
    for rs, cs in ((rows_rest, cols_rest), ([x for x in Y if x in Q1], list(Q2)), (rows_rest, [x for x in X if x in Q2])):
        blocks.append(mat_rank(restrict(modified, [rs, cs]).values, p) if rs and cs else 0)
    total = mat_rank(modified.values, p)
    if blocks[0] != k or total > blocks[0] + blocks[1] + blocks[2] or total > 3 * k:
        raise VerificationFailed(f"three-block bound failed: k={k} blocks={blocks} total={total}")
    if 3 * k < ess.value:
        raise VerificationFailed("disjoint rank below a third of the essential rank")
    sel = MinorSelection((tuple(X), tuple(Y)), disjoint=True)
    return DisjointCertificate(sel, "rk", k, {
        "essential_rank": ess.value,
        "modifier": DiagonalModifier(A.with_values(D), "constructed"),
        "block_ranks": blocks,
        "modified_rank": total,
    })


def multi_matrix_disjoint(mats: Sequence[Tensor], lam, l: int) -> DisjointCertificate:
    """Disjoint X, Y with rk (a.A)(X x Y) >= l for every a in lam.

    Peel off one combination at a time: a disjoint block of rank s*l for it
    is good for every a outside a proper subspace W, and the combinations in
    W are handled recursively on the rows and columns the block leaves free.
    """
    lam = [np.asarray(a, dtype=np.int64) % mats[0].p for a in lam]
    p = mats[0].p
    if not lam:
        return DisjointCertificate(_empty(2), "rk", l, {"vacuous": True})
    s = len(mats)
    hyp = {}
    for a in lam:
        combo = mats[0].with_values(_combine([m.values for m in mats], a, p))
        hyp[tuple(int(c) for c in a)] = essential_rank_exact(combo, tensor_rank_family(2)).value
    threshold = s * (s + 1) * l + l

    def solve(rows, cols, todo):
        if not todo:
            return [], []
        basis = EchelonBasis(s, p)
        dim = sum(1 for a in todo if basis.add(a))
        a = todo[0]
        sub = [restrict(m, [rows, cols]) for m in mats]
        combo = sub[0].with_values(_combine([m.values for m in sub], a, p))
        cert = matrix_disjoint_extract(combo)
        k = cert.bound
        if k < l:
            raise RankTooLow(f"combination {a.tolist()} has a disjoint block of rank only {k}")
        # a nonsingular block of size min(k, dim * l)
        X0, Y0 = cert.selection.subsets
        block = restrict(combo, [X0, Y0])
        inner = matrix_minor(block, min(k, dim * l))
        Xp, Yp = list(inner.subsets[0]), list(inner.subsets[1])
        bad = []
        for b in todo:
            c = restrict(sub[0], [Xp, Yp]).with_values(
                _combine([restrict(m, [Xp, Yp]).values for m in sub], b, p))
            if mat_rank(c.values, p) < l:
                bad.append(b)
        if any(np.array_equal(b, a) for b in bad):
            raise VerificationFailed("peeled combination lost rank")
        rows2 = [x for x in rows if x not in Yp]
        cols2 = [x for x in cols if x not in Xp]
        if bad and (not rows2 or not cols2):
            raise RankTooLow("no rows or columns left for the remaining combinations")
        Xr, Yr = solve(rows2, cols2, bad) if bad else ([], [])
        return Xp + Xr, Yp + Yr

    X, Y = solve(list(mats[0].axes[0]), list(mats[0].axes[1]), lam)
    sel = MinorSelection((sorted(X), sorted(Y)), disjoint=True)
    ranks = {}
    for a in lam:
        c = _combine([restrict(m, sel).values for m in mats], a, p)
        ranks[str(a.tolist())] = mat_rank(c, p)
        if ranks[str(a.tolist())] < l:
            raise VerificationFailed("multidimensional disjoint minor lost rank")
    return DisjointCertificate(sel, "rk", l, {
        "ranks": ranks,
        "essential_ranks": {str(list(k)): v for k, v in hyp.items()},
        "hypothesis_threshold": threshold,
        "hypothesis_met": all(v >= threshold for v in hyp.values()),
    })


# support disjointification


def retained_support(t: Tensor, sel: MinorSelection) -> int:
    if any(not s for s in sel.subsets):
        return 0
    return len(restrict(t, sel).support())


def support_disjointify(t: Tensor) -> MinorSelection:
    """Pairwise-disjoint selection keeping at least |eZ| / d^d off-diagonal support points.

    Every label is sent to one axis.  Under a uniform random choice a point
    with distinct coordinates survives with probability d^-d; fixing the
    labels one at a time in canonical order, each time to the axis with the
    largest conditional expectation, keeps at least the expected number.
    A pass of single-label moves then only adds survivors.
    """
    d = t.order
    pts = off_diagonal_support(t)
    labels = sorted({x for ax in t.axes for x in ax})
    color: dict[int, int] = {}
    by_label: dict[int, list[int]] = {}
    for i, x in enumerate(pts):
        for c in x:
            by_label.setdefault(c, []).append(i)
    inv_d = Fraction(1, d)

    def weight(i):
        w = Fraction(1)
        for axis, c in enumerate(pts[i]):
            if c in color:
                if color[c] != axis:
                    return Fraction(0)
            else:
                w *= inv_d
        return w

    for u in labels:
        best = None
        for c in range(d):
            color[u] = c
            score = sum((weight(i) for i in by_label.get(u, [])), Fraction(0))
            if best is None or score > best[0]:
                best = (score, c)
        color[u] = best[1]

    def survivors():
        return sum(1 for x in pts if all(color[c] == a for a, c in enumerate(x)))

    current = survivors()
    improved = True
    while improved:
        improved = False
        for u in labels:
            keep = color[u]
            for c in range(d):
                if c == keep:
                    continue
                color[u] = c
                val = survivors()
                if val > current:
                    current, keep, improved = val, c, True
            color[u] = keep
    subsets = tuple(tuple(x for x in ax if color[x] == a) for a, ax in enumerate(t.axes))
    sel = MinorSelection(subsets, disjoint=True)
    if retained_support(t, sel) * d**d < len(pts):
        raise VerificationFailed("derandomised colouring lost its expectation bound")
    return sel


# essential equivalence


@dataclass
class EssentialReduction:
    certificate: RankCertificate
    modifier: Tensor
    l: int
    m: int
    bound: int
    terms: dict


def _slice_essential_pr(s: Tensor):
    if s.order == 1:
        return None
    return essential_rank_exact(s, partition_rank_family(s.order))


def essential_equivalence_reduce(t: Tensor, R: PartitionFamily, m: int | None = None) -> EssentialReduction:
    """Certificate in the down-shadow family for a tensor agreeing with t off E.

    Starting from an essential R-decomposition of t, the C-part factors are
    recovered through dual vectors supported off E(C^c); each slice used is
    split into an E(C)-supported piece (dropped, it lies in E), a partition
    rank part from the essential oracle, and single-slice pieces coming from
    the modifier.  The term count is at most l^2(m + d'(d-d')) + l^3 + l.
    """
    R = _check_family(t, R)
    d = t.order
    p = t.p
    ds = down_shadow(R)
    C = ds.C
    Cc = tuple(a for a in range(d) if a not in C)
    dprime = len(C)
    ess = essential_rank_exact(t, R)
    cert = ess.certificate
    W = cert.evaluate()  # t plus a modifier supported on E
    l = cert.value
    ys_all = list(itertools.product(*[t.axes[a] for a in Cc]))
    ys_off = [y for y in ys_all if not in_diagonal(y)]
    slice_ess = {}
    for y in ys_off:
        s = slice_tensor(t, C, y)
        slice_ess[y] = _slice_essential_pr(s)
    worst = max((r.value for r in slice_ess.values()), default=0)
    if m is None:
        m = worst
    elif worst > m:
        raise SliceBoundViolated(f"a slice has essential partition rank {worst} > {m}")
    out = RankCertificate(ds.R_prime, t.axes, p, [], notion_name(ds.R_prime))
    counts = {"T2": 0, "T3": 0, "T4": 0}
    bound = l * l * (m + dprime * (d - dprime)) + l**3 + l
    if l == 0:
        return EssentialReduction(out, t.with_values(-t.values), 0, m, 0, counts)
    plus = [tm for tm in cert.terms if C in tm.partition]
    minus = [tm for tm in cert.terms if C not in tm.partition]
    off_index = [ys_all.index(y) for y in ys_off]
    kept = []
    basis = EchelonBasis(len(off_index), p)
    for tm in plus:
        comp = {part: f for part, f in tm.factors.items() if part != C}
        ordered = [a for part in sorted(comp) for a in part]
        arr = outer([comp[part] for part in sorted(comp)], p)
        arr = np.transpose(arr, np.argsort(ordered)).reshape(-1)
        if basis.add(arr[off_index]):
            kept.append((comp, arr[off_index]))
    shape = t.shape
    if kept:
        duals = dual_basis([a for _, a in kept], p)
        support = [ys_off[j] for j in duals.support]
    else:
        duals, support = None, []
    pieces = {}
    for y in support:
        ypos = {a: t.position(a, x) for a, x in zip(Cc, y)}
        Wy = slice_tensor(W, C, y)
        Ty = slice_tensor(t, C, y)
        rep = slice_ess[y]
        local_mask = diagonal_mask([t.axes[a] for a in C])
        Vy = (Wy.values - Ty.values) % p
        ext = np.where(local_mask, 0, Vy)
        # U^y = T_y + V'^y + V_ext: oracle terms plus one term per ext slice
        split = []
        for st in rep.certificate.terms:
            split.append([(tuple(C[a] for a in part), np.asarray(f) % p) for part, f in sorted(st.factors.items())])
        remaining = ext.copy()
        for j, a in enumerate(C):
            for yl in y:
                if yl not in t.axes[a] or not remaining.any():
                    continue
                i = t.position(a, yl)
                sl = np.take(remaining, i, axis=j)
                if not sl.any():
                    continue
                e = np.zeros(shape[a], dtype=np.int64)
                e[i] = 1
                rest = tuple(b for b in C if b != a)
                split.append([((a,), e), (rest, sl % p)])
                idx = [slice(None)] * len(C)
                idx[j] = i
                remaining[tuple(idx)] = 0
        if remaining.any():
            raise VerificationFailed("modifier slice not covered by its single-slice pieces")
        pieces[y] = (split, [_term_slice(tm, C, Cc, ypos, shape, p) for tm in minus])
    for i, (comp, _) in enumerate(kept):
        for jj, y in zip(duals.support, support):
            c = int(duals.duals[i, jj])
            if not c:
                continue
            split, F_slices = pieces[y]
            for parts in split:
                factors = dict(comp)
                for n, (part, f) in enumerate(parts):
                    factors[part] = (c * f) % p if n == 0 else f
                out.terms.append(Term(canonical_partition(list(comp) + [part for part, _ in parts]), factors))
                counts["T2"] += 1
            for J, f, K, g in F_slices:
                factors = dict(comp)
                factors[J] = (-c * f) % p
                factors[K] = g
                out.terms.append(Term(canonical_partition(list(comp) + [J, K]), factors))
                counts["T3"] += 1
    for tm in minus:
        out.terms.append(Term(tm.partition, dict(tm.factors)))
        counts["T4"] += 1
    if not out.is_valid():
        raise VerificationFailed("reduction produced a term outside the down-shadow family")
    Z = out.evaluate()
    modifier = Z - t
    if np.any(modifier.values[~diagonal_mask(t.axes)]):
        raise VerificationFailed("reduced certificate disagrees with the tensor off E")
    if out.value > bound:
        raise VerificationFailed("reduced certificate exceeds its term bound")
    return EssentialReduction(out, modifier, l, m, bound, counts)


# flattening extension


def disjoint_flattening_extend(t: Tensor, axis: int = 0, m: int | None = None) -> DisjointCertificate:
    """Greedy maximal family of fibres along `axis` with all labels fresh.

    Points x_j on `axis` and fibre indices y_j on the other axes, all labels
    pairwise distinct, are added while the fibres restricted to {x_j} stay
    linearly independent.  The restriction to the used labels then has
    flattening rank along `axis` at least the family size.
    """
    d = t.order
    p = t.p
    info: dict = {"axis": axis}
    if m is not None:
        if d != 3:
            raise HypothesisUnverifiable("slice essential-rank bounds are only checked for order 3")
        worst = 0
        for a in range(3):
            keep = [b for b in range(3) if b != a]
            for x in t.axes[a]:
                worst = max(worst, essential_rank_exact(slice_tensor(t, keep, [x]), tensor_rank_family(2)).value)
        info["max_slice_essential_rank"] = worst
        if worst > m:
            raise SliceBoundViolated(f"a slice has essential rank {worst} > {m}")
    others = [a for a in range(d) if a != axis]
    xs: list[int] = []
    ys: list[tuple[int, ...]] = []
    fibre_points = [y for y in itertools.product(*[t.axes[a] for a in others]) if not in_diagonal(y)]
    grown = True
    while grown:
        grown = False
        used = set(xs) | {c for y in ys for c in y}
        for x in t.axes[axis]:
            if x in used:
                continue
            X = xs + [x]
            rows = [t.position(axis, u) for u in X]
            for y in fibre_points:
                if x in y or used & set(y):
                    continue
                vecs = []
                for yy in ys + [y]:
                    idx: list = [None] * d
                    for a, c in zip(others, yy):
                        idx[a] = t.position(a, c)
                    idx[axis] = rows
                    vecs.append(t.values[tuple(idx)])
                if mat_rank(np.array(vecs), p) == len(vecs):
                    xs.append(x)
                    ys.append(y)
                    grown = True
                    break
            if grown:
                break
    k = len(xs)
    if k == 0:
        return DisjointCertificate(_empty(d), f"frank{axis + 1}", 0, info)
    subsets: list = [None] * d
    subsets[axis] = sorted(xs)
    for j, a in enumerate(others):
        subsets[a] = sorted({y[j] for y in ys})
    sel = MinorSelection(subsets, disjoint=True)
    r = mat_rank(flatten(restrict(t, sel), [axis]), p)
    if r < k:
        raise VerificationFailed("flattening family lost rank on restriction")
    info["fibres"] = [list(y) for y in ys]
    info["flattening_rank"] = r
    return DisjointCertificate(sel, f"frank{axis + 1}", k, info)


# disjoint R-rank engine


def _shrink_disjoint(t, R, l, sel):
    if l <= 0:
        return sel
    small = greedy_shrink(t, lambda r: rank_at_least(r, R, l), start=sel.subsets)
    return MinorSelection(small.subsets, disjoint=True)


def _slice_route(t: Tensor, R: PartitionFamily, l: int, depth: int):
    """Fix one label on some axes and recurse on the slice over the remaining labels."""
    d = t.order
    for size in range(1, d - 1):
        for I in itertools.combinations(range(d), size):
            K = [a for a in range(d) if a not in I]
            RK = induced_family(R, K)
            for y in itertools.product(*[t.axes[a] for a in I]):
                if in_diagonal(y):
                    continue
                axes = [[x for x in t.axes[a] if x not in y] for a in K]
                if any(not ax for ax in axes):
                    continue
                s = slice_tensor(t, K, y)
                s = restrict(s, axes)
                if not rank_at_least(s, RK, l):
                    continue
                try:
                    inner = disjoint_rank_find(s, RK, l, _depth=depth + 1)
                except RankTooLow:
                    continue
                subsets: list = [None] * d
                for a, x in zip(I, y):
                    subsets[a] = (x,)
                for a, sub in zip(K, inner.selection.subsets):
                    subsets[a] = sub
                return MinorSelection(subsets, disjoint=True)
    return None


def _flattening_route(t: Tensor, R: PartitionFamily, l: int):
    for axis in range(t.order):
        if not every_partition_isolates(R, axis):
            continue
        cert = disjoint_flattening_extend(t, axis)
        if cert.bound >= l:
            return cert.selection
    return None


def _separated_route(t: Tensor, R: PartitionFamily, l: int, depth: int):
    """Slices at points with distinct labels whose combinations all have large partition rank."""
    ds = down_shadow(R)
    C = ds.C
    Cc = [a for a in range(t.order) if a not in C]
    target = l * (l - 1) + 1
    try:
        fam, _ = separated_family_search(t, C, [target] * l, l, skip_diagonal=True)
    except RankTooLow:
        return None
    if not fam.complete:
        return None
    comp_sets = [sorted({y[j] for y in fam.points}) for j in range(len(Cc))]
    flat = [x for s in comp_sets for x in s]
    if len(flat) != len(set(flat)):
        return None
    used = set(flat)
    axes = [[x for x in t.axes[a] if x not in used] for a in C]
    if any(not ax for ax in axes):
        return None
    slices = [restrict(slice_tensor(t, C, y), axes) for y in fam.points]
    lam = list(_nonzero_vectors(l, t.p, normalized=True))
    try:
        inner = multi_disjoint_find(slices, partition_rank_family(len(C)), lam, target, _depth=depth + 1)
    except (RankTooLow, Obstructed):
        return None
    subsets: list = [None] * t.order
    for a, s in zip(C, inner.selection.subsets):
        subsets[a] = s
    for a, s in zip(Cc, comp_sets):
        subsets[a] = s
    if any(not s for s in subsets):
        return None
    return MinorSelection(subsets, disjoint=True)


def disjoint_rank_find(t: Tensor, R: PartitionFamily, l: int, _depth: int = 0) -> DisjointCertificate:
    """Pairwise-disjoint selection whose restriction has R-rank >= l, oracle-certified.

    Routes, in order: the matrix construction (order 2), separated slices,
    a single slice over the remaining labels, the flattening family extension
    (when every partition isolates an axis), the down-shadow family, and
    finally exhaustive search over maximal disjoint selections.
    """
    R = _check_family(t, R)
    d = t.order
    name = notion_name(R)
    if l <= 0:
        return DisjointCertificate(_empty(d), name, 0, {"route": "trivial"})
    if d >= 2 and not off_diagonal_support(t):
        raise RankTooLow("tensor is supported inside E, so every disjoint restriction vanishes")
    if d == 1 or has_trivial_partition(R):
        if l > 1:
            raise RankTooLow(f"{name}-rank is at most 1")
        x = off_diagonal_support(t)[0] if d >= 2 else t.support()[0]
        sel = MinorSelection(tuple((c,) for c in x), disjoint=True)
        return DisjointCertificate(sel, name, 1, {"route": "single term"})
    route = None
    sel = None
    if d == 2:
        cert = matrix_disjoint_extract(t)
        if cert.bound >= l:
            sel = _shrink_disjoint(t, R, l, cert.selection)
            route = "matrix"
    if sel is None and d > 2 and not is_tensor_rank(R):
        sel = _separated_route(t, R, l, _depth)
        route = "separated slices" if sel is not None else None
    if sel is None and d > 2:
        sel = _slice_route(t, R, l, _depth)
        route = "slice" if sel is not None else None
    if sel is None and d > 2:
        sel = _flattening_route(t, R, l)
        route = "flattening" if sel is not None else None
    if sel is None and d > 2 and not is_tensor_rank(R):
        ds = down_shadow(R)
        if rank_at_least(t, ds.R_prime, l):
            try:
                cand = disjoint_rank_find(t, ds.R_prime, l, _depth=_depth + 1).selection
            except RankTooLow:
                cand = None
            if cand is not None and _restricted_rank_at_least(t, cand, R, l):
                sel, route = cand, "down-shadow"
    if sel is None:
        value, best = disjoint_rank_exact(t, R)
        if value < l:
            raise RankTooLow(f"disjoint {name}-rank is {value} < {l}")
        sel, route = _shrink_disjoint(t, R, l, best), "exhaustive"
    if not _restricted_rank_at_least(t, sel, R, l):
        raise VerificationFailed("disjoint selection fails its rank bound")
    return DisjointCertificate(sel, name, l, {"route": route, "depth": _depth})


def multi_disjoint_find(tensors: Sequence[Tensor], R: PartitionFamily, lam, l: int,
                        h_multiplier: int = 1, _depth: int = 0) -> DisjointCertificate:
    """One disjoint selection with R-rank >= l for every combination a.T, a in lam.

    Combinations are peeled as in the matrix case: a disjoint minor for one
    combination, then the combinations it misses on the labels left unused.
    When that fails an exhaustive scan over maximal disjoint selections
    decides; if every combination is fine alone but none works for all at
    once, the instance is Obstructed.
    """
    lam = [np.asarray(a, dtype=np.int64) % tensors[0].p for a in lam]
    d = tensors[0].order
    p = tensors[0].p
    R = _check_family(tensors[0], R)
    s = len(tensors)
    info = {"h_multiplier": h_multiplier,
            "hypothesis_threshold": s * (s + 1) * l + l + h_multiplier * d * l}
    if not lam:
        return DisjointCertificate(_empty(d), notion_name(R), l, dict(info, vacuous=True))

    def combo(a, ts):
        return ts[0].with_values(_combine([x.values for x in ts], a, p))

    if s == 1 and len(lam) == 1:
        cert = disjoint_rank_find(combo(lam[0], tensors), R, l, _depth)
        cert.transcript.update(info)
        return cert

    def peel(ts, todo):
        if not todo:
            return [set() for _ in range(d)]
        a = todo[0]
        c = combo(a, ts)
        cert = disjoint_rank_find(c, R, l, _depth + 1)
        sel = cert.selection
        bad = [b for b in todo[1:] if not _restricted_rank_at_least(combo(b, ts), sel, R, l)]
        used = {x for sub in sel.subsets for x in sub}
        if not bad:
            return [set(sub) for sub in sel.subsets]
        axes = [[x for x in ax if x not in used] for ax in ts[0].axes]
        if any(not ax for ax in axes):
            raise RankTooLow("labels exhausted while peeling")
        rest = peel([restrict(x, axes) for x in ts], bad)
        return [set(sub) | r for sub, r in zip(sel.subsets, rest)]

    route = "peeling"
    try:
        sets = peel(list(tensors), lam)
        sel = MinorSelection(tuple(sorted(x) for x in sets), disjoint=True)
        ok = all(_restricted_rank_at_least(combo(a, tensors), sel, R, l) for a in lam)
    except RankTooLow:
        ok = False
    if not ok:
        route = "exhaustive"
        sel = None
        for subsets in disjoint_selections(tensors[0].axes):
            cand = MinorSelection(subsets, disjoint=True)
            if all(_restricted_rank_at_least(combo(a, tensors), cand, R, l) for a in lam):
                sel = cand
                break
        if sel is None:
            alone = {}
            for a in lam:
                alone[str(a.tolist())] = disjoint_rank_exact(combo(a, tensors), R)[0]
            if all(v >= l for v in alone.values()):
                raise Obstructed(
                    f"each combination alone has disjoint {notion_name(R)}-rank >= {l} "
                    f"but no single disjoint selection serves all of them: {alone}")
            raise RankTooLow(f"some combination has disjoint rank below {l}: {alone}")
    for a in lam:
        if not _restricted_rank_at_least(combo(a, tensors), sel, R, l):
            raise VerificationFailed("multidimensional disjoint selection fails a combination")
    info["route"] = route
    return DisjointCertificate(sel, notion_name(R), l, info)
