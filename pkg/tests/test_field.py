import numpy as np
import pytest
from hypothesis import given

from rankminors.errors import DependentInput, UnsupportedField
from rankminors.field import (EchelonBasis, check_field, dual_basis, independent_rows, inv, mat_inverse,
                              mat_rank, nullspace_basis, rank_factorization, right_nullspace, rref, solve_left)
from reference import matrix_rank_f
from strategies import matrices


def test_supported_fields():
    for p in (2, 3, 5, 7):
        assert check_field(p) == p
    for p in (4, 6, 11, 1):
        with pytest.raises(UnsupportedField):
            check_field(p)


def test_inverses():
    for p in (2, 3, 5, 7):
        for a in range(1, p):
            assert a * inv(a, p) % p == 1
    with pytest.raises(ZeroDivisionError):
        inv(0, 5)


def test_known_ranks():
    assert mat_rank(np.eye(4, dtype=int), 2) == 4
    assert mat_rank(np.ones((3, 3), dtype=int), 3) == 1
    assert mat_rank(np.array([[1, 2], [2, 1]]), 3) == 1
    assert mat_rank(np.array([[1, 2], [2, 1]]), 5) == 2
    assert mat_rank(np.zeros((3, 4), dtype=int), 7) == 0


@given(matrices())
def test_rank_matches_reference(mp):
    a, p = mp
    assert mat_rank(a, p) == matrix_rank_f(a, p)


@given(matrices())
def test_rank_nullity(mp):
    a, p = mp
    ns = right_nullspace(a, p)
    assert ns.shape[0] + mat_rank(a, p) == a.shape[1]
    assert not (a @ ns.T % p).any()
    left = nullspace_basis(a, p)
    assert not (left @ a % p).any()


@given(matrices())
def test_rref_and_factorization(mp):
    a, p = mp
    r, piv = rref(a, p)
    assert len(piv) == mat_rank(a, p)
    for i, c in enumerate(piv):
        assert r[i, c] == 1 and np.count_nonzero(r[:, c]) == 1
    left, right = rank_factorization(a, p)
    assert np.array_equal(left @ right % p, a % p)


@given(matrices())
def test_independent_rows_are_first_witnesses(mp):
    a, p = mp
    rows = independent_rows(a, p)
    assert len(rows) == mat_rank(a, p)
    # each chosen row is independent of the rows before it
    for k, i in enumerate(rows):
        assert mat_rank(a[: i + 1], p) == k + 1


@given(matrices(max_n=5))
def test_solve_left(mp):
    a, p = mp
    b = np.arange(a.shape[0]) % p @ a % p
    x = solve_left(a, b, p)
    assert x is not None and np.array_equal(x @ a % p, b)


def test_solve_left_outside_row_space():
    assert solve_left(np.array([[1, 0]]), np.array([0, 1]), 2) is None


def test_inverse_and_singular():
    a = np.array([[2, 1], [1, 1]])
    assert np.array_equal(mat_inverse(a, 7) @ a % 7, np.eye(2, dtype=int))
    with pytest.raises(DependentInput):
        mat_inverse(np.array([[1, 1], [1, 1]]), 2)


@given(matrices(max_n=5))
def test_dual_basis(mp):
    a, p = mp
    rows = a[independent_rows(a, p)]
    if rows.shape[0] == 0:
        return
    db = dual_basis(rows, p)
    assert np.array_equal(db.duals @ rows.T % p, np.eye(rows.shape[0], dtype=int))
    off = [j for j in range(a.shape[1]) if j not in db.support]
    assert not db.duals[:, off].any()


def test_dual_basis_rejects_dependent():
    with pytest.raises(DependentInput):
        dual_basis([[1, 1], [2, 2]], 3)


@given(matrices(max_n=5))
def test_echelon_basis_dimension(mp):
    a, p = mp
    basis = EchelonBasis(a.shape[1], p)
    for row in a:
        basis.add(row)
    assert basis.dim == mat_rank(a, p)
