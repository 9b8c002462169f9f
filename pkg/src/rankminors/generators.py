"""Seeded random and planted tensors for tests and the command line.

Every kind is a pure function of (params, seed); the generator is Philox so
the output does not depend on numpy's default bit generator.
"""
from __future__ import annotations

import json

import numpy as np

from .covering import gowers_tensor, is_antichain
from .errors import ParameterOutOfRange, UnknownKind
from .field import mat_rank
from .tensor import Tensor, diagonal_mask


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def _shape(params: dict) -> tuple[int, ...]:
    if "shape" in params:
        shape = tuple(int(n) for n in params["shape"])
    else:
        shape = (int(params.get("n", 3)),) * int(params.get("d", 3))
    if len(shape) < 2 or any(n < 1 for n in shape):
        raise ParameterOutOfRange("need order >= 2 and positive axis sizes")
    return shape


def diagonal(params: dict, seed: int = 0) -> Tensor:
    n, d, p = int(params.get("n", 3)), int(params.get("d", 3)), int(params.get("p", 2))
    vals = np.zeros((n,) * d, dtype=np.int64)
    for i in range(n):
        vals[(i,) * d] = 1
    return Tensor(vals, p)


def random_tensor(params: dict, seed: int = 0) -> Tensor:
    shape, p = _shape(params), int(params.get("p", 2))
    density = float(params.get("density", 1.0))
    rng = _rng(seed)
    vals = rng.integers(0, p, size=shape)
    if density < 1.0:
        vals = vals * (rng.random(shape) < density)
    return Tensor(vals, p)


def rank1sum(params: dict, seed: int = 0) -> Tensor:
    """Sum of k outer products, so tensor rank is at most k."""
    shape, p, k = _shape(params), int(params.get("p", 2)), int(params.get("k", 2))
    rng = _rng(seed)
    vals = np.zeros(shape, dtype=np.int64)
    for _ in range(k):
        term = np.ones((), dtype=np.int64)
        for n in shape:
            term = np.multiply.outer(term, rng.integers(0, p, size=n))
        vals = (vals + term) % p
    return Tensor(vals, p)


def antichain(params: dict, seed: int = 0) -> Tensor:
    """Order-3 tensor supported on an antichain: random points on x + y + z = const."""
    n, p = int(params.get("n", 4)), int(params.get("p", 2))
    size = int(params.get("size", n))
    rng = _rng(seed)
    level = n + 1
    cand = [(x, y, level - x - y) for x in range(n) for y in range(n) if 0 <= level - x - y < n]
    pick = rng.permutation(len(cand))[: min(size, len(cand))]
    vals = np.zeros((n, n, n), dtype=np.int64)
    for i in sorted(int(j) for j in pick):
        vals[cand[i]] = rng.integers(1, p)
    assert is_antichain([cand[i] for i in pick])
    return Tensor(vals, p)


def e_supported(params: dict, seed: int = 0) -> Tensor:
    """Random values on points with two equal labels, so the essential rank is 0."""
    shape, p = _shape(params), int(params.get("p", 2))
    rng = _rng(seed)
    t = Tensor(np.zeros(shape, dtype=np.int64), p)
    mask = diagonal_mask(t.axes)
    return Tensor(rng.integers(0, p, size=shape) * mask, p)


def example_pair(params: dict, seed: int = 0) -> list[Tensor]:
    """T1 = 1_{x=1} b1(y,z) and T2 = 1_{y=1} b2(x,z) with b1, b2 random invertible matrices.

    Each tensor alone has large disjoint rank but no single disjoint selection
    serves both combinations T1, T2 and T1 + T2.
    """
    n, p = int(params.get("n", 4)), int(params.get("p", 2))
    rng = _rng(seed)
    out = []
    for axis in (0, 1):
        b = rng.integers(0, p, size=(n, n))
        while mat_rank(b, p) < n:
            b = rng.integers(0, p, size=(n, n))
        vals = np.zeros((n, n, n), dtype=np.int64)
        if axis == 0:
            vals[0] = b
        else:
            vals[:, 0, :] = b
        out.append(Tensor(vals, p))
    return out


def gowers(params: dict, seed: int = 0) -> Tensor:
    return gowers_tensor(int(params.get("p", 2)))


KINDS = {
    "diagonal": diagonal,
    "random": random_tensor,
    "rank1sum": rank1sum,
    "antichain": antichain,
    "e_supported": e_supported,
    "example_pair": example_pair,
    "gowers": gowers,
}


def generate(kind: str, params: dict | None = None, seed: int = 0):
    if kind not in KINDS:
        raise UnknownKind(f"unknown kind {kind!r}; choose from {sorted(KINDS)}")
    return KINDS[kind](dict(params or {}), seed)


def to_json(obj) -> str:
    if isinstance(obj, Tensor):
        return obj.to_json()
    return json.dumps([t.to_dict() for t in obj], separators=(",", ":"))
