"""Constructive minor extraction.

Every routine returns a selection of axis labels and checks the claimed rank
bound on the restriction with the exhaustive oracle before returning, so a
bug surfaces as VerificationFailed rather than as a wrong answer.

The general engine follows the three-case induction on the family R: a
separated family of slices (case 1), a large complementary coefficient
function (case 2), or the down-shadow family R' (case 3).  The asymptotic
thresholds of the induction are far beyond what the oracle can reach, so the
cases are tried in order and the first one whose output verifies wins; a
certified greedy shrink closes the gap when none does.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bias import MinorTrace, matrix_minor, pr_at_least
from .errors import (
    RankTooLow,
    ScaleExceeded,
    SliceBoundViolated,
    VerificationFailed,
)
from .families import (
    PartitionFamily,
    canonical_partition,
    down_shadow,
    has_trivial_partition,
    is_tensor_rank,
    partition_rank_family,
    product_family,
    slice_rank_family,
    tensor_rank_family,
)
from .field import EchelonBasis, dual_basis, independent_rows, mat_rank, nullspace_basis, rank_factorization
from .oracles import (
    RankCertificate,
    Term,
    _check_family,
    node_budget,
    notion_name,
    rank_at_least,
    rrank,
    rrank_exact,
)
from .tensor import MinorSelection, Tensor, flatten, greedy_shrink, outer, restrict, slice_tensor


def _nonzero_vectors(s: int, p: int, normalized: bool = False):
    if p**s > node_budget():
        raise ScaleExceeded(f"{p}^{s} coefficient vectors exceed the budget")
    for a in itertools.product(range(p), repeat=s):
        if not any(a):
            continue
        if normalized and next(x for x in a if x) != 1:
            continue
        yield np.array(a, dtype=np.int64)


def _combine(arrays: Sequence[np.ndarray], a, p: int) -> np.ndarray:
    out = np.zeros_like(arrays[0])
    for c, x in zip(a, arrays):
        if c:
            out = (out + int(c) * x) % p
    return out


def _support_point(t: Tensor) -> MinorSelection:
    x = t.support()[0]
    return MinorSelection(tuple((c,) for c in x))


def _union(selections: Sequence[MinorSelection], d: int) -> MinorSelection:
    sets: list[set] = [set() for _ in range(d)]
    for sel in selections:
        for s, sub in zip(sets, sel.subsets):
            s.update(sub)
    return MinorSelection(tuple(sorted(s) for s in sets))


# tensor-rank minors


def tr_minor_extract(t: Tensor, k: int) -> MinorSelection:
    """Axis by axis, keep at most k slices whose span has spanning rank >= min(k, current)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    R = tensor_rank_family(t.order)
    if not rank_at_least(t, R, k):
        raise RankTooLow(f"tensor rank is below {k}")
    cur = t
    for axis in range(t.order):
        rows = independent_rows(flatten(cur, [axis]) if t.order > 1 else cur.values[:, None], t.p, limit=k)
        subsets = list(cur.axes)
        subsets[axis] = tuple(cur.axes[axis][i] for i in rows)
        cur = restrict(cur, subsets)
    sel = MinorSelection(cur.axes)
    if not rank_at_least(cur, R, k):
        raise VerificationFailed("tensor-rank minor lost rank")
    return sel


# multidimensional matrix and tensor minors


def _reduce_rows(mats: Sequence[np.ndarray], k: int, p: int, debug: bool = False) -> list[int]:
    """Row indices, at most s*k of them, keeping rank (a.A) >= min(rank, k) for every a.

    Each step removes a row in the common left kernel of the combinations
    a.A of low rank, which leaves those ranks unchanged; combinations of
    rank above k lose at most one.
    """
    s = len(mats)
    coeffs = list(_nonzero_vectors(s, p))
    rows = list(range(mats[0].shape[0]))

    def rank_of(a, rs):
        return mat_rank(_combine([m[rs] for m in mats], a, p), p)

    while len(rows) > s * k:
        ranks = [rank_of(a, rows) for a in coeffs]
        lam = [a for a, r in zip(coeffs, ranks) if r <= k]
        basis = EchelonBasis(s, p)
        gens = [a for a in lam if basis.add(a)]
        if gens:
            big = np.hstack([_combine([m[rows] for m in mats], a, p) for a in gens])
            null = nullspace_basis(big, p)
            x = int(np.flatnonzero(null[0])[0])
        else:
            x = 0
        new_rows = rows[:x] + rows[x + 1:]
        if debug:
            for a, r in zip(coeffs, ranks):
                after = rank_of(a, new_rows)
                if r <= k:
                    assert after == r, "rank of a low-rank combination changed"
                else:
                    assert after >= k, "rank of a high-rank combination fell below k"
        rows = new_rows
    return rows


def multi_matrix_minor(mats: Sequence, k: int, p: int, debug: bool = False) -> tuple[list[int], list[int]]:
    """Rows X and columns Y, each at most s*k, with rk (a.A)(X x Y) >= min(rk a.A, k) for all a."""
    if k < 1:
        raise ValueError("k must be at least 1")
    mats = [np.asarray(m, dtype=np.int64) % p for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    if any(m.shape != mats[0].shape or m.ndim != 2 for m in mats):
        raise ValueError("matrices must share one shape")
    X = _reduce_rows(mats, k, p, debug)
    Y = _reduce_rows([m[X].T for m in mats], k, p, debug)
    for a in _nonzero_vectors(len(mats), p):
        full = _combine(mats, a, p)
        if mat_rank(full[np.ix_(X, Y)], p) < min(mat_rank(full, p), k):
            raise VerificationFailed("multidimensional matrix minor lost rank")
    return X, Y


def multi_tensor_minor(tensors: Sequence[Tensor], k: int) -> MinorSelection:
    """One selection with tr (a.T)(X) >= min(k, tr a.T) for every coefficient vector a."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not tensors:
        raise ValueError("need at least one tensor")
    p = tensors[0].p
    if any(t.p != p or t.axes != tensors[0].axes for t in tensors):
        raise ValueError("tensors must share field and axes")
    d = tensors[0].order
    cur = list(tensors)
    for axis in range(d):
        rows = _reduce_rows([flatten(t, [axis]) for t in cur], k, p)
        subsets = list(cur[0].axes)
        subsets[axis] = tuple(cur[0].axes[axis][i] for i in rows)
        cur = [restrict(t, subsets) for t in cur]
    sel = MinorSelection(cur[0].axes)
    R = tensor_rank_family(d)
    for a in _nonzero_vectors(len(tensors), p, normalized=True):
        full = tensors[0].with_values(_combine([t.values for t in tensors], a, p))
        part = cur[0].with_values(_combine([t.values for t in cur], a, p))
        target = min(k, rrank(full, R))
        if not rank_at_least(part, R, target):
            raise VerificationFailed("multidimensional tensor minor lost rank")
    return sel


# separated families and approximation tables


@dataclass
class SeparatedFamily:
    complement: tuple[int, ...]
    points: list[tuple[int, ...]]
    schedule: tuple[int, ...]
    target: int
    transcript: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def complete(self) -> bool:
        return self.size == self.target

    @property
    def threshold(self) -> int:
        """Every nonzero combination of the chosen slices has at least this partition rank."""
        return self.schedule[self.size - 1] if self.points else 0


@dataclass
class ApproximationTable:
    points: list[tuple[int, ...]]
    coefficients: dict
    bound: int
    residuals: dict

    @property
    def max_residual(self) -> int:
        return max(self.residuals.values(), default=0)

    def coefficient_tensor(self, i: int, axes, p: int) -> Tensor:
        vals = np.zeros([len(a) for a in axes], dtype=np.int64)
        pos = [{x: j for j, x in enumerate(a)} for a in axes]
        for y, c in self.coefficients.items():
            vals[tuple(pos[j][x] for j, x in enumerate(y))] = c[i]
        return Tensor(vals, p, axes)


def _pr(t: Tensor) -> int:
    if t.order == 2:
        return mat_rank(t.values, t.p)
    if t.order == 1:
        return 0 if t.is_zero() else 1
    return rrank(t, partition_rank_family(t.order))


def _slices(t: Tensor, C: Sequence[int]):
    Cc = tuple(a for a in range(t.order) if a not in C)
    ys = list(itertools.product(*[t.axes[a] for a in Cc]))
    return Cc, ys, {y: slice_tensor(t, C, y) for y in ys}


def separated_family_search(t: Tensor, C: Sequence[int], D: Sequence[int], l: int, skip_diagonal: bool = False):
    """Run the process with radii on the C-slices of t.

    Returns (family, table).  When the process completes l steps the table is
    None; otherwise the table writes every slice as a combination of the
    chosen ones up to partition rank below D(l'+1).
    """
    C = tuple(sorted(C))
    D = tuple(int(x) for x in D)
    if l < 1 or len(D) < l:
        raise ValueError("schedule must give a threshold for every step 1..l")
    if any(x < 1 for x in D[:l]) or any(b > a for a, b in zip(D[:l], D[1:l])):
        raise ValueError("schedule must be positive and non-increasing")
    if not C or any(not 0 <= a < t.order for a in C):
        raise ValueError("C must be a nonempty set of axes")
    p = t.p
    Cc, ys, sl = _slices(t, C)
    if skip_diagonal:
        ys = [y for y in ys if len(set(y)) == len(y)]
        if not ys:
            return SeparatedFamily(tuple(Cc), [], D[:l], l), ApproximationTable([], {}, D[0], {})
    fam = SeparatedFamily(tuple(Cc), [], D[:l], l)
    vals = {y: s.values for y, s in sl.items()}
    proto = next(iter(sl.values()))
    chosen: list[tuple[int, ...]] = []
    for j in range(l):
        if p**j > node_budget():
            raise ScaleExceeded("too many combinations to test")
        found = None
        for y in ys:
            ok = True
            for w in itertools.product(range(p), repeat=j):
                v = (vals[y] + _combine([vals[z] for z in chosen], w, p)) % p if j else vals[y]
                if not pr_at_least(proto.with_values(v), D[j]):
                    ok = False
                    break
            if ok:
                found = y
                break
        if found is None:
            break
        chosen.append(found)
    fam.points = chosen
    for a in _nonzero_vectors(len(chosen), p, normalized=True) if chosen else ():
        v = _combine([vals[z] for z in chosen], a, p)
        r = _pr(proto.with_values(v))
        fam.transcript.append((tuple(int(c) for c in a), r))
        if r < fam.threshold:
            raise VerificationFailed("separated family fails its threshold")
    if fam.complete:
        return fam, None
    bound = D[len(chosen)]
    coeffs: dict = {}
    residuals: dict = {}
    for y in ys:
        hit = None
        for w in itertools.product(range(p), repeat=len(chosen)):
            v = (vals[y] - _combine([vals[z] for z in chosen], w, p)) % p if chosen else vals[y]
            r = _pr(proto.with_values(v))
            if r < bound:
                hit = (w, r)
                break
        if hit is None:
            raise VerificationFailed(f"slice at {y} has no approximation below {bound}")
        coeffs[y] = tuple(int(c) for c in hit[0])
        residuals[y] = hit[1]
    return fam, ApproximationTable(list(chosen), coeffs, bound, residuals)


# equivalence transforms


def _slice_bound_check(t: Tensor, C, m: int):
    _, ys, sl = _slices(t, C)
    for y in ys:
        if pr_at_least(sl[y], m + 1):
            raise SliceBoundViolated(f"slice at {y} has partition rank above {m}")
    return ys, sl


def _term_slice(term: Term, C, Cc, ypos, shape, p):
    """Bipartition form (J, f, K, g) of the slice of a term whose partition avoids C."""
    scalar = 1
    pieces = []
    for part in term.partition:
        f = np.asarray(term.factors[part], dtype=np.int64)
        idx = tuple(ypos[a] if a in Cc else slice(None) for a in part)
        f = f[idx]
        inside = tuple(a for a in part if a in C)
        if inside:
            pieces.append((inside, f))
        else:
            scalar = scalar * int(f) % p
    J, f = pieces[0]
    K = tuple(a for a in C if a not in J)
    g = np.ones([shape[a] for a in K], dtype=np.int64) * scalar
    for axes, h in pieces[1:]:
        g = g * h.reshape([shape[a] if a in axes else 1 for a in K]) % p
    return J, f % p, K, g % p


def equivalence_transform(cert: RankCertificate, m: int) -> RankCertificate:
    """Rewrite an R-certificate as one for the down-shadow family R'.

    The C-part factors B_i of the terms containing C are recovered through a
    dual basis of the complementary factors A_i, then split with partition
    rank decompositions of the slices; the other terms already lie in R'.
    The output has at most l(lm + l^2 + 1) terms when every C-slice has
    partition rank at most m and the input has l terms.
    """
    R = cert.family.reindexed() if cert.family.ground != tuple(range(len(cert.axes))) else cert.family
    ds = down_shadow(R)
    C = ds.C
    p = cert.p
    shape = cert.shape
    t = cert.evaluate()
    out = RankCertificate(ds.R_prime, cert.axes, p, [], notion_name(ds.R_prime))
    if not cert.terms:
        return out
    ys, sl = _slice_bound_check(t, C, m)
    Cc = tuple(a for a in range(len(shape)) if a not in C)
    plus = [tm for tm in cert.terms if C in tm.partition]
    minus = [tm for tm in cert.terms if C not in tm.partition]
    # complementary factors A_i flattened over the C^c domain
    kept = []
    basis = EchelonBasis(len(ys), p)
    for tm in plus:
        comp = {part: f for part, f in tm.factors.items() if part != C}
        if comp:
            ordered = [a for part in sorted(comp) for a in part]
            arr = outer([comp[part] for part in sorted(comp)], p)
            arr = np.transpose(arr, np.argsort(ordered)).reshape(-1)
        else:
            arr = np.ones(1, dtype=np.int64)
        if basis.add(arr):
            kept.append((tm, comp, arr))
    duals = dual_basis([arr for _, _, arr in kept], p) if kept else None
    pr_family = partition_rank_family(len(C))
    slice_terms: dict = {}
    F_slices: dict = {}
    support = duals.support if duals is not None else ()
    for j in support:
        y = ys[j]
        ypos = {a: sl_pos for a, sl_pos in zip(Cc, (t.position(a, x) for a, x in zip(Cc, y)))}
        report = rrank_exact(sl[y], pr_family) if len(C) > 1 else None
        slice_terms[y] = report.certificate.terms if report else []
        F_slices[y] = [_term_slice(tm, C, Cc, ypos, shape, p) for tm in minus]
    for i, (tm, comp, _) in enumerate(kept):
        for j in support:
            c = int(duals.duals[i, j])
            if not c:
                continue
            y = ys[j]
            for st in slice_terms[y]:
                factors = dict(comp)
                parts = []
                for n, (part, f) in enumerate(sorted(st.factors.items())):
                    g_part = tuple(C[a] for a in part)
                    factors[g_part] = (f * c) % p if n == 0 else f % p
                    parts.append(g_part)
                out.terms.append(Term(canonical_partition(list(comp) + parts), factors))
            for J, f, K, g in F_slices[y]:
                factors = dict(comp)
                factors[J] = (-c * f) % p
                factors[K] = g
                out.terms.append(Term(canonical_partition(list(comp) + [J, K]), factors))
    out.terms.extend(Term(tm.partition, dict(tm.factors)) for tm in minus)
    l = cert.value
    if not out.verify(t):
        raise VerificationFailed("transformed certificate does not evaluate to the tensor")
    if out.value > l * (l * m + l * l + 1):
        raise VerificationFailed("transformed certificate exceeds its term bound")
    return out


def slice_to_tensor_transform(cert: RankCertificate, m: int) -> RankCertificate:
    """Order-3 slice-rank certificate to a tensor-rank one with at most m * sr^2 terms.

    Needs every slice, along every axis, to have rank at most m.
    """
    if len(cert.axes) != 3 or cert.family != slice_rank_family(3):
        raise ValueError("expects an order-3 slice-rank certificate")
    p = cert.p
    t = cert.evaluate()
    R = tensor_rank_family(3)
    out = RankCertificate(R, cert.axes, p, [], "tr")
    if not cert.terms:
        return out
    for axis in range(3):
        _slice_bound_check(t, [a for a in range(3) if a != axis], m)
    for axis in range(3):
        rest = tuple(a for a in range(3) if a != axis)
        group = [tm for tm in cert.terms if (axis,) in tm.partition]
        if not group:
            continue
        others = [tm for tm in cert.terms if (axis,) not in tm.partition]
        basis = EchelonBasis(t.shape[axis], p)
        kept = [tm for tm in group if basis.add(tm.factors[(axis,)])]
        duals = dual_basis([tm.factors[(axis,)] for tm in kept], p)
        other_vals = np.zeros(t.shape, dtype=np.int64)
        for tm in others:
            other_vals = (other_vals + tm.evaluate(t.shape, p)) % p
        diff = np.moveaxis((t.values - other_vals) % p, axis, 0)
        for i, tm in enumerate(kept):
            b = np.tensordot(duals.duals[i], diff, axes=([0], [0])) % p
            left, right = rank_factorization(b, p)
            for r in range(left.shape[1]):
                factors = {(axis,): np.asarray(tm.factors[(axis,)]) % p, (rest[0],): left[:, r] % p, (rest[1],): right[r] % p}
                out.terms.append(Term(((0,), (1,), (2,)), factors))
    if not out.verify(t):
        raise VerificationFailed("tensor-rank certificate does not evaluate to the tensor")
    if out.value > m * cert.value**2:
        raise VerificationFailed("tensor-rank certificate exceeds m * sr^2 terms")
    return out


# multidimensional R-rank minors


def multi_rrank_minor(tensors: Sequence[Tensor], R: PartitionFamily, lam, l: int,
                      trace: MinorTrace | None = None, _depth: int = 0) -> MinorSelection:
    """One selection on which every combination a.T, a in lam, keeps R-rank >= l.

    Each combination gets its own minor and the selection is their union;
    restriction to a larger selection never lowers the rank.
    """
    lam = [np.asarray(a, dtype=np.int64) for a in lam]
    d = tensors[0].order
    if not lam:
        return MinorSelection(tuple(() for _ in range(d)))
    p = tensors[0].p
    seen = set()
    parts = []
    for a in lam:
        a = a % p
        if not a.any():
            raise RankTooLow("the zero combination has rank 0")
        lead = int(a[np.flatnonzero(a)[0]])
        key = tuple(int(x) for x in a * pow(lead, p - 2, p) % p)
        if key in seen:
            continue
        seen.add(key)
        combo = tensors[0].with_values(_combine([t.values for t in tensors], a, p))
        parts.append((a, combo, general_minor_find(combo, R, l, trace, _depth=_depth)))
    sel = _union([s for _, _, s in parts], d)
    for a, combo, _ in parts:
        if not rank_at_least(restrict(combo, sel), R, l):
            raise VerificationFailed("combination lost rank on the union selection")
    return sel


# the general engine


def _log(trace, **kw):
    if trace is not None:
        trace.log(**kw)


def _case1(t, R, C, l, trace, depth):
    target = l * (l - 1) + 1
    fam, table = separated_family_search(t, C, [target] * l, l)
    if not fam.complete:
        return None
    Cc = fam.complement
    _, _, sl = _slices(t, C)
    slices = [sl[y] for y in fam.points]
    inner = multi_rrank_minor(slices, partition_rank_family(len(C)),
                              list(_nonzero_vectors(l, t.p, normalized=True)), target, trace, depth + 1)
    subsets: list = [None] * t.order
    for a, s in zip(C, inner.subsets):
        subsets[a] = s
    for j, a in enumerate(Cc):
        subsets[a] = sorted({y[j] for y in fam.points})
    return MinorSelection(subsets)


def _case2_schedule(l: int) -> list[int]:
    D = [0] * l
    D[l - 1] = l * (l - 1) + 1
    for j in range(l - 2, -1, -1):
        D[j] = l * D[j + 1] + l * l
    return D


def _case2(t, R, C, ds, l, trace, depth):
    D = _case2_schedule(l)
    fam, table = separated_family_search(t, C, D, l)
    if table is None or not table.points or ds.R_comp is None:
        return None, fam, table
    Cc = fam.complement
    comp_axes = [t.axes[a] for a in Cc]
    m = table.bound
    M = l * (m + l)
    if D[len(table.points) - 1] < M:
        raise VerificationFailed("schedule does not meet the case-2 hypothesis")
    for j in range(len(table.points)):
        A = table.coefficient_tensor(j, comp_axes, t.p)
        Rc = ds.R_comp.reindexed()
        if not rank_at_least(A, Rc, l):
            continue
        comp_sel = general_minor_find(A, Rc, l, trace, _depth=depth + 1)
        _, _, sl = _slices(t, C)
        slices = [sl[y] for y in table.points]
        inner = multi_rrank_minor(slices, partition_rank_family(len(C)),
                                  list(_nonzero_vectors(len(slices), t.p, normalized=True)), M, trace, depth + 1)
        subsets: list = [None] * t.order
        for a, s in zip(C, inner.subsets):
            subsets[a] = s
        for a, s in zip(Cc, comp_sel.subsets):
            subsets[a] = s
        return MinorSelection(subsets), fam, table
    return None, fam, table


def _case3(t, R, C, ds, l, table, trace, depth):
    """Recurse on U = T - S in the down-shadow family, keep the result if it verifies for T."""
    S = np.zeros(t.shape, dtype=np.int64)
    if table is not None and table.points:
        Cc = tuple(a for a in range(t.order) if a not in C)
        _, _, sl = _slices(t, C)
        for i, y in enumerate(table.points):
            A = table.coefficient_tensor(i, [t.axes[a] for a in Cc], t.p).values
            B = sl[y].values
            full = np.multiply.outer(A, B) % t.p
            S = (S + np.transpose(full, np.argsort(list(Cc) + list(C)))) % t.p
    U = t.with_values(t.values - S)
    if not rank_at_least(U, ds.R_prime, l):
        return None
    return general_minor_find(U, ds.R_prime, l, trace, _depth=depth + 1)


def general_minor_find(t: Tensor, R: PartitionFamily, l: int, trace: MinorTrace | None = None,
                       _depth: int = 0) -> MinorSelection:
    """A selection whose restriction has R-rank at least l, certified by the oracle."""
    R = _check_family(t, R)
    d = t.order
    if _depth > 2**d + 2 * d:
        raise VerificationFailed("minor recursion deeper than the down-shadow chain allows")
    if l <= 0:
        return MinorSelection(tuple((ax[0],) for ax in t.axes))
    if not rank_at_least(t, R, l):
        raise RankTooLow(f"{notion_name(R)}-rank is below {l}")
    name = notion_name(R)
    if d == 1 or has_trivial_partition(R):
        sel = _support_point(t)
        _log(trace, depth=_depth, notion=name, case="single term", sizes=sel.sizes)
        return sel
    if is_tensor_rank(R):
        sel = tr_minor_extract(t, l)
        _log(trace, depth=_depth, notion=name, case="tensor rank", sizes=sel.sizes)
        return sel
    if d == 2:
        sel = matrix_minor(t, l)
        _log(trace, depth=_depth, notion=name, case="matrix", sizes=sel.sizes)
        return sel
    ds = down_shadow(R)
    C = ds.C

    def accept(sel, case):
        if sel is not None and rank_at_least(restrict(t, sel), R, l):
            _log(trace, depth=_depth, notion=name, case=case, sizes=sel.sizes)
            return True
        return False

    sel = _case1(t, R, C, l, trace, _depth)
    if accept(sel, "separated slices"):
        return sel
    sel, fam, table = _case2(t, R, C, ds, l, trace, _depth)
    if accept(sel, "complementary coefficients"):
        return sel
    sel = _case3(t, R, C, ds, l, table, trace, _depth)
    if accept(sel, "down-shadow"):
        return sel
    sel = greedy_shrink(t, lambda r: rank_at_least(r, R, l))
    if not accept(sel, "shrink"):
        raise VerificationFailed("greedy shrink produced an invalid minor")
    return sel


# product families


def product_rank_minor(t: Tensor, R1: PartitionFamily, R2: PartitionFamily, l: int,
                       trace: MinorTrace | None = None) -> MinorSelection:
    """Minor with (R1 x R2)-rank >= l.

    If the flattening between the two axis blocks has rank >= l, an l x l
    nonsingular block of it gives the minor.  Otherwise T is a short sum of
    products T1_i (x) T2_i; a dual vector u on one block isolates a factor,
    and a minor of that factor plus the support of u gives the minor.
    """
    R1, R2 = R1.reindexed(), R2.reindexed()
    d1, d2 = R1.d, R2.d
    if d1 + d2 != t.order:
        raise ValueError("family orders do not add up to the tensor order")
    R = product_family(R1, R2)
    if l <= 0:
        return MinorSelection(tuple((ax[0],) for ax in t.axes))
    if not rank_at_least(t, R, l):
        raise RankTooLow(f"product rank is below {l}")
    p = t.p
    first = list(range(d1))
    shape1, shape2 = t.shape[:d1], t.shape[d1:]
    flat = flatten(t, first)
    matf = mat_rank(flat, p)
    if matf >= l:
        rows = independent_rows(flat, p, limit=l)
        cols = independent_rows(flat[rows].T, p, limit=l)
        subsets = [set() for _ in range(t.order)]
        for r in rows:
            for a, i in enumerate(np.unravel_index(r, shape1)):
                subsets[a].add(t.axes[a][i])
        for c in cols:
            for a, i in enumerate(np.unravel_index(c, shape2)):
                subsets[d1 + a].add(t.axes[d1 + a][i])
        sel = MinorSelection(tuple(sorted(s) for s in subsets))
        case = "flattening"
    else:
        left, right = rank_factorization(flat, p)
        # left columns are the block-1 factors, right rows the block-2 factors
        options = []
        for i in range(left.shape[1]):
            T1 = Tensor(left[:, i].reshape(shape1), p, t.axes[:d1])
            T2 = Tensor(right[i].reshape(shape2), p, t.axes[d1:])
            options.append((rrank(T1, R1), 0, i, T1))
            options.append((rrank(T2, R2), 1, i, T2))
        options.sort(key=lambda o: (-o[0], o[1], o[2]))
        sel = None
        for rk, side, i, factor in options:
            if rk < l:
                break
            # dual vectors on the other block pick out factor i
            other = right if side == 0 else left.T
            duals = dual_basis(other, p)
            other_shape = shape2 if side == 0 else shape1
            offset = d1 if side == 0 else 0
            Rf = R1 if side == 0 else R2
            inner = general_minor_find(factor, Rf, l, trace)
            subsets: list = [None] * t.order
            own = range(0, d1) if side == 0 else range(d1, t.order)
            for a, s in zip(own, inner.subsets):
                subsets[a] = s
            pick = [set() for _ in other_shape]
            for j in duals.support:
                for a, c in enumerate(np.unravel_index(j, other_shape)):
                    pick[a].add(t.axes[offset + a][c])
            for a, s in enumerate(pick):
                subsets[offset + a] = sorted(s)
            cand = MinorSelection(subsets)
            if rank_at_least(restrict(t, cand), R, l):
                sel = cand
                break
        case = "factor contraction"
        if sel is None:
            sel = greedy_shrink(t, lambda r: rank_at_least(r, R, l))
            case = "shrink"
    if not rank_at_least(restrict(t, sel), R, l):
        raise VerificationFailed("product-rank minor lost rank")
    _log(trace, notion="product", case=case, flattening_rank=matf, sizes=sel.sizes)
    return sel
