"""Exact linear algebra over the prime fields F_2, F_3, F_5 and F_7.

Matrices are plain 2-D integer numpy arrays with entries in [0, p).  Over F_2
the elimination kernels work on rows packed into Python integers, which keeps
the exhaustive searches in the oracle module cheap.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DependentInput, UnsupportedField

SUPPORTED_FIELDS = (2, 3, 5, 7)


def check_field(p: int) -> int:
    if p not in SUPPORTED_FIELDS:
        raise UnsupportedField(f"field order {p} not supported (use one of {SUPPORTED_FIELDS})")
    return p


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return pow(a, p - 2, p)


def as_matrix(m, p: int) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D array")
    return a % p


def pack_bits(v: np.ndarray) -> int:
    """Pack a 0/1 vector into an int, entry i going to bit i."""
    v = np.asarray(v, dtype=np.uint8).ravel()
    if v.size == 0:
        return 0
    return int.from_bytes(np.packbits(v, bitorder="little").tobytes(), "little")


def unpack_bits(x: int, n: int) -> np.ndarray:
    nbytes = (n + 7) // 8
    raw = np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(np.int64)


def _rank_f2(a: np.ndarray) -> int:
    pivots: dict[int, int] = {}
    for row in a:
        v = pack_bits(row)
        while v:
            h = v.bit_length() - 1
            b = pivots.get(h)
            if b is None:
                pivots[h] = v
                break
            v ^= b
    return len(pivots)


def rref(m, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns (first nonzero pivoting)."""
    a = as_matrix(m, p)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * inv(int(a[r, c]), p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


def mat_rank(m, p: int) -> int:
    a = as_matrix(m, p)
    if a.size == 0:
        return 0
    if p == 2:
        return _rank_f2(a)
    return len(rref(a, p)[1])


def right_nullspace(m, p: int) -> np.ndarray:
    """Basis (as rows) of {x : m x = 0}."""
    a = as_matrix(m, p)
    rows, cols = a.shape
    r, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r[i, f]) % p
    return basis


def nullspace_basis(m, p: int) -> np.ndarray:
    """Basis (as rows) of the left nullspace {b : b^T m = 0}."""
    return right_nullspace(as_matrix(m, p).T, p)


def independent_rows(m, p: int, limit: int | None = None) -> list[int]:
    """Indices of the first maximal independent set of rows, scanned in order."""
    a = as_matrix(m, p)
    basis = EchelonBasis(a.shape[1], p)
    out = []
    for i, row in enumerate(a):
        if limit is not None and len(out) >= limit:
            break
        if basis.add(row):
            out.append(i)
    return out


def mat_inverse(m, p: int) -> np.ndarray:
    a = as_matrix(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix is not square")
    r, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != tuple(range(n)) or len(pivots) < n or max(pivots[:n], default=-1) >= n:
        raise DependentInput("matrix is singular")
    return r[:, n:]


def solve_left(a, b, p: int) -> np.ndarray | None:
    """Some x with x @ a = b (mod p), or None when b is outside the row space."""
    a = as_matrix(a, p)
    b = np.asarray(b, dtype=np.int64).ravel() % p
    rows = a.shape[0]
    if rows == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    aug = np.hstack([a.T, b[:, None]])
    r, pivots = rref(aug, p)
    if rows in pivots:
        return None
    x = np.zeros(rows, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, rows]
    return x


def rank_factorization(m, p: int) -> tuple[np.ndarray, np.ndarray]:
    """m = left @ right with inner dimension rank(m); right holds the nonzero RREF rows."""
    a = as_matrix(m, p)
    r, pivots = rref(a, p)
    right = r[: len(pivots)]
    left = a[:, list(pivots)]
    return left, right


@dataclass(frozen=True)
class DualBasis:
    originals: np.ndarray
    duals: np.ndarray
    support: tuple[int, ...]
    p: int


def dual_basis(vectors, p: int) -> DualBasis:
    """Vectors a*_i supported on r coordinates with a*_i . a_j = delta_ij."""
    a = np.array(vectors, dtype=np.int64) % p
    if a.ndim == 1:
        a = a[None, :]
    r = a.shape[0]
    if r == 0:
        n = a.shape[1] if a.ndim == 2 else 0
        return DualBasis(a.reshape(0, n), a.reshape(0, n), (), p)
    _, pivots = rref(a, p)
    if len(pivots) < r:
        raise DependentInput("vectors are linearly dependent")
    support = tuple(pivots)
    block = a[:, list(support)]
    d = mat_inverse(block, p).T
    duals = np.zeros_like(a)
    duals[:, list(support)] = d
    return DualBasis(a, duals, support, p)


class EchelonBasis:
    """Incrementally maintained echelon basis of a subspace of F_p^n.

    The basis is kept fully reduced: each stored vector has a 1 at its own pivot
    and 0 at every other pivot.  Over F_2 vectors are packed ints keyed by their
    highest set bit; otherwise numpy vectors keyed by their first nonzero index.
    """

    __slots__ = ("n", "p", "piv")

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.piv: dict = {}

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis.__new__(EchelonBasis)
        other.n, other.p, other.piv = self.n, self.p, dict(self.piv)
        return other

    @property
    def dim(self) -> int:
        return len(self.piv)

    def encode(self, v):
        if self.p == 2:
            return v if isinstance(v, int) else pack_bits(np.asarray(v) % 2)
        return np.asarray(v, dtype=np.int64).ravel() % self.p

    def reduce(self, v):
        """Canonical residual of v modulo the subspace (zero at every pivot)."""
        v = self.encode(v)
        if self.p == 2:
            for h, b in self.piv.items():
                if (v >> h) & 1:
                    v ^= b
            return v
        v = v.copy()
        p = self.p
        for i, b in self.piv.items():
            if v[i]:
                v = (v - v[i] * b) % p
        return v

    def is_zero(self, v) -> bool:
        return (v == 0) if self.p == 2 else not np.any(v)

    def contains(self, v) -> bool:
        return self.is_zero(self.reduce(v))

    def add(self, v) -> bool:
        """Insert v; returns True when the dimension grew."""
        r = self.reduce(v)
        if self.p == 2:
            if r == 0:
                return False
            h = r.bit_length() - 1
            for k, b in self.piv.items():
                if (b >> h) & 1:
                    self.piv[k] = b ^ r
            self.piv[h] = r
            return True
        nz = np.flatnonzero(r)
        if nz.size == 0:
            return False
        i = int(nz[0])
        r = r * inv(int(r[i]), self.p) % self.p
        for k, b in self.piv.items():
            if b[i]:
                self.piv[k] = (b - b[i] * r) % self.p
        self.piv[i] = r
        return True

    def add_all(self, vs) -> int:
        return sum(1 for v in vs if self.add(v))
