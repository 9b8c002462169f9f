"""Dense tensors over prime fields with labelled axes, and index bookkeeping.

Axes are numbered from 0.  Each axis carries a strictly increasing tuple of
natural-number labels, so restrictions keep their labels and disjointness of
label sets across axes is meaningful.  Order-1 tensors are allowed internally
(they show up as contractions of matrices); the JSON reader requires d >= 2.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AxisMismatch, BadAxisSet, BadPoint, EmptyAxis, NotSubset
from .field import check_field

MAX_ENTRIES = 2**20


class Tensor:
    __slots__ = ("p", "axes", "values", "_pos")

    def __init__(self, values, p: int, axes: Sequence[Sequence[int]] | None = None):
        check_field(p)
        a = np.array(values, dtype=np.int64) % p
        if a.ndim < 1:
            raise ValueError("tensor must have order at least 1")
        if axes is None:
            axes = [range(1, n + 1) for n in a.shape]
        axes = tuple(tuple(int(x) for x in ax) for ax in axes)
        if len(axes) != a.ndim:
            raise AxisMismatch("number of axes does not match the array order")
        for ax, n in zip(axes, a.shape):
            if len(ax) != n:
                raise AxisMismatch("axis label count does not match the array shape")
            if n == 0:
                raise EmptyAxis("empty axis")
            if any(x < 0 for x in ax) or any(b <= c for c, b in zip(ax, ax[1:])):
                raise ValueError("axis labels must be strictly increasing naturals")
        if a.size > MAX_ENTRIES:
            raise ValueError(f"tensor has {a.size} entries, more than {MAX_ENTRIES}")
        a.setflags(write=False)
        self.p = p
        self.axes = axes
        self.values = a
        self._pos = None

    # basic structure
    @property
    def order(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def position(self, axis: int, label: int) -> int:
        if self._pos is None:
            self._pos = [{x: i for i, x in enumerate(ax)} for ax in self.axes]
        try:
            return self._pos[axis][label]
        except KeyError:
            raise BadPoint(f"label {label} not on axis {axis}") from None

    def __getitem__(self, point: Sequence[int]) -> int:
        if len(point) != self.order:
            raise BadPoint("point has the wrong number of coordinates")
        return int(self.values[tuple(self.position(i, x) for i, x in enumerate(point))])

    def is_zero(self) -> bool:
        return not self.values.any()

    def support(self) -> list[tuple[int, ...]]:
        return [tuple(self.axes[i][j] for i, j in enumerate(idx)) for idx in zip(*np.nonzero(self.values))]

    def with_values(self, values) -> "Tensor":
        return Tensor(values, self.p, self.axes)

    def _check_compatible(self, other: "Tensor"):
        if self.p != other.p or self.axes != other.axes:
            raise AxisMismatch("tensors live on different domains")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def __neg__(self) -> "Tensor":
        return self.with_values(-self.values)

    def scale(self, c: int) -> "Tensor":
        return self.with_values(self.values * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.p == other.p and self.axes == other.axes and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Tensor(p={self.p}, shape={self.shape}, nnz={int(np.count_nonzero(self.values))})"

    @classmethod
    def zeros(cls, axes: Sequence[Sequence[int]], p: int) -> "Tensor":
        return cls(np.zeros([len(a) for a in axes], dtype=np.int64), p, axes)

    @classmethod
    def from_entries(cls, axes, p: int, entries: Iterable) -> "Tensor":
        t = np.zeros([len(a) for a in axes], dtype=np.int64)
        pos = [{x: i for i, x in enumerate(ax)} for ax in axes]
        for point, v in entries:
            try:
                idx = tuple(pos[i][x] for i, x in enumerate(point))
            except (KeyError, IndexError):
                raise BadPoint(f"point {point} outside the axes") from None
            t[idx] = v
        return cls(t, p, axes)

    # JSON
    def to_dict(self) -> dict:
        entries = [[list(pt), int(self[pt])] for pt in self.support()]
        return {"field_order": self.p, "axes": [list(a) for a in self.axes], "entries": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "Tensor":
        p = check_field(int(data["field_order"]))
        axes = [tuple(int(x) for x in a) for a in data["axes"]]
        if len(axes) < 2:
            raise ValueError("tensor order must be at least 2")
        entries = []
        for point, v in data.get("entries", []):
            if not 0 <= int(v) < p:
                raise ValueError("entry value outside [0, p)")
            entries.append((tuple(point), int(v)))
        return cls.from_entries(axes, p, entries)

    @classmethod
    def from_json(cls, text: str) -> "Tensor":
        return cls.from_dict(json.loads(text))


def outer(factors: Sequence[np.ndarray], p: int) -> np.ndarray:
    """Outer product of arrays; the result's axes are the factors' axes in order."""
    out = np.ones((), dtype=np.int64)
    for f in factors:
        out = np.multiply.outer(out, np.asarray(f, dtype=np.int64)) % p
    return out


@dataclass(frozen=True)
class MinorSelection:
    subsets: tuple[tuple[int, ...], ...]
    disjoint: bool = False

    def __post_init__(self):
        subs = tuple(tuple(sorted(set(int(x) for x in s))) for s in self.subsets)
        object.__setattr__(self, "subsets", subs)
        if self.disjoint and not labels_pairwise_disjoint(subs):
            raise ValueError("selection flagged disjoint but label sets overlap")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.subsets)

    def is_pairwise_disjoint(self) -> bool:
        return labels_pairwise_disjoint(self.subsets)

    def to_dict(self) -> dict:
        return {"subsets": [list(s) for s in self.subsets], "disjoint": self.disjoint}


def labels_pairwise_disjoint(subsets) -> bool:
    seen: set[int] = set()
    for s in subsets:
        s = set(s)
        if seen & s:
            return False
        seen |= s
    return True


def full_selection(t: Tensor) -> MinorSelection:
    return MinorSelection(t.axes)


def restrict(t: Tensor, sel) -> Tensor:
    subsets = sel.subsets if isinstance(sel, MinorSelection) else tuple(tuple(sorted(s)) for s in sel)
    if len(subsets) != t.order:
        raise AxisMismatch("selection order does not match the tensor")
    idx = []
    for axis, s in enumerate(subsets):
        if not s:
            raise EmptyAxis(f"axis {axis} restricted to the empty set")
        pos = []
        for x in s:
            try:
                pos.append(t.position(axis, x))
            except BadPoint:
                raise NotSubset(f"label {x} is not on axis {axis}") from None
        idx.append(pos)
    return Tensor(t.values[np.ix_(*idx)], t.p, subsets)


def slice_tensor(t: Tensor, keep: Sequence[int], y: Sequence[int]) -> Tensor:
    """The slice T_y on the kept axes; y lists labels of the other axes in axis order."""
    keep = tuple(sorted(keep))
    if not keep or any(not 0 <= a < t.order for a in keep) or len(set(keep)) != len(keep):
        raise BadAxisSet("kept axes must be a nonempty set of axes")
    rest = [a for a in range(t.order) if a not in keep]
    if len(y) != len(rest):
        raise BadPoint("slice point has the wrong number of coordinates")
    index: list = [slice(None)] * t.order
    for a, x in zip(rest, y):
        index[a] = t.position(a, x)
    return Tensor(t.values[tuple(index)], t.p, [t.axes[a] for a in keep])


def contract(u, t: Tensor, axis: int = 0) -> Tensor:
    """(u.T)(rest) = sum over the chosen axis of u(x) T(..., x, ...)."""
    u = np.asarray(u, dtype=np.int64).ravel() % t.p
    if u.size != t.shape[axis]:
        raise AxisMismatch("vector length does not match the contracted axis")
    if t.order < 2:
        raise AxisMismatch("cannot contract an order-1 tensor to a tensor")
    vals = np.tensordot(u, t.values, axes=([0], [axis])) % t.p
    return Tensor(vals, t.p, [ax for a, ax in enumerate(t.axes) if a != axis])


def contract_many(us: Sequence, t: Tensor) -> np.ndarray:
    """Contract vectors into the leading axes one after another; returns a raw array."""
    vals = t.values
    for u in us:
        vals = np.tensordot(np.asarray(u, dtype=np.int64), vals, axes=([0], [0])) % t.p
    return vals


def flatten(t: Tensor, rows: Sequence[int]) -> np.ndarray:
    """Matrix with rows indexed by the axes in `rows` and columns by the rest."""
    rows = tuple(sorted(rows))
    if not rows or len(rows) >= t.order or any(not 0 <= a < t.order for a in rows):
        raise BadAxisSet("row axes must be a nonempty proper subset")
    cols = tuple(a for a in range(t.order) if a not in rows)
    a = np.transpose(t.values, rows + cols)
    nrows = int(np.prod([t.shape[i] for i in rows]))
    return a.reshape(nrows, -1)


def permute(t: Tensor, order: Sequence[int]) -> Tensor:
    return Tensor(np.transpose(t.values, order), t.p, [t.axes[a] for a in order])


def diagonal_mask(axes: Sequence[Sequence[int]]) -> np.ndarray:
    """Boolean array over the product of the axes marking E: some two coordinates agree."""
    shape = [len(a) for a in axes]
    mask = np.zeros(shape, dtype=bool)
    for i, j in itertools.combinations(range(len(axes)), 2):
        li = np.asarray(axes[i]).reshape([-1 if k == i else 1 for k in range(len(axes))])
        lj = np.asarray(axes[j]).reshape([-1 if k == j else 1 for k in range(len(axes))])
        mask |= np.broadcast_to(li == lj, shape)
    return mask


def in_diagonal(point: Sequence[int]) -> bool:
    return len(set(point)) < len(point)


def supported_in_diagonal(t: Tensor) -> bool:
    return not np.any(t.values[~diagonal_mask(t.axes)])


def off_diagonal_support(t: Tensor) -> list[tuple[int, ...]]:
    return [x for x in t.support() if not in_diagonal(x)]


def points(axes: Sequence[Sequence[int]]):
    return itertools.product(*axes)


def greedy_shrink(t: Tensor, holds, start: Sequence[Sequence[int]] | None = None) -> MinorSelection:
    """Drop labels one at a time, in canonical order, while holds(restriction) stays true.

    The result is a minimal selection (no single label can be removed) inside
    `start`, which must itself satisfy the predicate.
    """
    current = [list(s) for s in (start if start is not None else t.axes)]
    changed = True
    while changed:
        changed = False
        for axis in range(t.order):
            for x in list(current[axis]):
                if len(current[axis]) == 1:
                    break
                trial = [list(s) for s in current]
                trial[axis].remove(x)
                if holds(restrict(t, trial)):
                    current = trial
                    changed = True
    return MinorSelection(current)
