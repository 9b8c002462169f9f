import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from rankminors import Tensor, restrict
from rankminors.bias import (MinorTrace, analytic_rank, averaging_check, bias_exact, bias_mc, ff_pr_minor_find,
                             matrix_minor, multilinear_form, pr_at_least, separated_projections)
from rankminors.errors import RankTooLow, ScaleExceeded
from rankminors.families import partition_rank_family
from rankminors.field import mat_rank
from rankminors.oracles import BUDGET_ENV, rrank
from reference import matrix_rank_f
from strategies import matrices, tensors


def brute_bias(t):
    """Fraction of (u_1..u_{d-1}) for which u_d -> T(u_1..u_d) is identically zero."""
    p, d = t.p, t.order
    vecs = [list(itertools.product(range(p), repeat=n)) for n in t.shape[:-1]]
    hits = total = 0
    for us in itertools.product(*vecs):
        v = t.values
        for u in us:
            v = np.tensordot(np.array(u), v, axes=([0], [0])) % p
        hits += not v.any()
        total += 1
    return Fraction(hits, total)


def test_multilinear_form():
    t = Tensor(np.arange(8).reshape(2, 2, 2), 5)
    assert multilinear_form(t, [[1, 0], [0, 1], [1, 1]]) == (2 + 3) % 5
    with pytest.raises(ValueError):
        multilinear_form(t, [[1, 0]])


@given(matrices(max_n=4, fields=(2, 3)))
def test_matrix_bias_is_power_of_p(mp):
    a, p = mp
    b = bias_exact(Tensor(a, p)).exact
    assert b == Fraction(1, p ** matrix_rank_f(a, p))


@given(tensors(orders=(3,), sizes=(1, 2, 3), fields=(2, 3), max_entries=12))
def test_bias_matches_brute_force(t):
    assert bias_exact(t).exact == brute_bias(t)


@given(tensors(orders=(3,), sizes=(2,), fields=(2,)))
def test_averaging(t):
    assert averaging_check(t)


@given(tensors(orders=(3,), sizes=(2, 3), fields=(2,), max_entries=18))
def test_bias_at_least_p_to_minus_pr(t):
    pr = rrank(t, partition_rank_family(3))
    assert bias_exact(t).exact >= Fraction(1, 2 ** pr)


def test_zero_tensor_bias_is_one():
    assert bias_exact(Tensor(np.zeros((2, 2, 2), dtype=int), 3)).exact == 1


def test_analytic_rank():
    ar = analytic_rank(Tensor(np.eye(3, dtype=int), 2))
    assert ar.exact == 3 and ar.bracket == (3, 3)
    # diagonal [2]^3 over F_2: needs u1 v1 = u2 v2 = 0, probability (3/4)^2
    vals = np.zeros((2, 2, 2), dtype=int)
    vals[0, 0, 0] = vals[1, 1, 1] = 1
    ar = analytic_rank(Tensor(vals, 2))
    assert ar.bias == Fraction(9, 16) and ar.exact is None and ar.bracket == (0, 1)


def test_monte_carlo_close_and_reproducible():
    rng = np.random.default_rng(4)
    t = Tensor(rng.integers(0, 2, (3, 3, 3)), 2)
    exact = float(bias_exact(t).exact)
    a = bias_mc(t, 40000, seed=3)
    b = bias_mc(t, 40000, seed=3)
    assert a == b
    assert abs(a.estimate - exact) < 0.02
    with pytest.raises(ValueError):
        bias_mc(t, 0)


def test_bias_scale_exceeded(monkeypatch):
    monkeypatch.setenv(BUDGET_ENV, "100")
    with pytest.raises(ScaleExceeded):
        bias_exact(Tensor(np.ones((4, 4, 4, 2), dtype=int), 2))


def test_bias_report_format():
    d = bias_exact(Tensor(np.eye(2, dtype=int), 3)).to_dict()
    assert d == {"exact": "1/9"}


def test_matrix_minor():
    a = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    sel = matrix_minor(Tensor(a, 2), 2)
    assert sel.subsets == ((1, 3), (1, 3))
    with pytest.raises(RankTooLow):
        matrix_minor(Tensor(a, 2), 3)


def test_separated_projections():
    vals = np.zeros((3, 3, 3), dtype=int)
    for i in range(3):
        vals[i, i, i] = 1
    t = Tensor(vals, 2)
    us = separated_projections(t, 1, 2)
    for v in itertools.product(range(2), repeat=2):
        if any(v):
            comb = sum(c * u for c, u in zip(v, us)) % 2
            assert mat_rank(np.tensordot(comb, vals, axes=([0], [0])) % 2, 2) >= 1


@given(tensors(orders=(3,), sizes=(2, 3), fields=(2,), max_entries=27))
def test_pr_minor_find_is_certified(t):
    R = partition_rank_family(3)
    pr = rrank(t, R)
    for l in range(1, min(pr, 2) + 1):
        trace = MinorTrace()
        sel = ff_pr_minor_find(t, l, trace)
        assert pr_at_least(restrict(t, sel), l)
        assert trace.steps
