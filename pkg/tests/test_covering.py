import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankminors import Tensor
from rankminors.covering import (GOWERS_V, SupportSet, antichain_slice_rank, covers, gowers_tensor, is_antichain,
                                 lc3_exact, mu_map, scc_exact, verify_counterexample)
from rankminors.errors import ScaleExceeded
from rankminors.families import slice_rank_family
from rankminors.generators import generate
from rankminors.oracles import rrank_exact


def brute_cover(points, keys_of):
    keys = sorted({k for x in points for k in keys_of(x)}, key=str)
    for r in range(len(keys) + 1):
        for combo in itertools.combinations(keys, r):
            s = set(combo)
            if all(any(k in s for k in keys_of(x)) for x in points):
                return r


point_sets = st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)), max_size=7, unique=True)


@given(point_sets)
def test_scc_matches_brute_force(pts):
    sol = scc_exact(pts)
    assert covers(sol, pts)
    assert sol.size == brute_cover(pts, lambda x: [(a, c) for a, c in enumerate(x)])


@given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6)), max_size=7, unique=True))
def test_lc3_matches_brute_force(pts):
    sol = lc3_exact(pts)
    assert covers(sol, pts)
    assert sol.size == brute_cover(pts, lambda x: [("x", x[0]), ("y", x[1]), ("x+y", x[0] + x[1])])


def test_support_set_validation():
    assert len(SupportSet((2, 2), [(1, 2), (2, 1)])) == 2
    with pytest.raises(ValueError):
        SupportSet((2, 2), [(3, 1)])


def test_antichain():
    assert is_antichain([(1, 3), (2, 2), (3, 1)])
    assert not is_antichain([(1, 1), (2, 2)])


def test_mu_map():
    assert mu_map([1, 2], [1], [3]) == frozenset({(2, 1)})


def test_cover_size_limit():
    pts = [(x, y, z) for x in range(1, 5) for y in range(1, 5) for z in range(1, 6)]
    with pytest.raises(ScaleExceeded):
        scc_exact(pts)


def test_antichain_slice_rank_matches_search():
    for seed in range(6):
        t = generate("antichain", {"n": 3, "size": 4}, seed)
        rep = antichain_slice_rank(t)
        assert rep is not None and rep.certificate.verify(t)
        assert rep.value == rrank_exact(t, slice_rank_family(3), use_covering=False).value


def test_antichain_slice_rank_not_applicable():
    t = Tensor(np.ones((2, 2, 2), dtype=int), 2)
    assert antichain_slice_rank(t) is None


def test_gowers_tensor_shape():
    t = gowers_tensor()
    assert t.shape == (11, 4, 15)
    assert len(t.support()) == len(GOWERS_V) == 8


def test_counterexample_report():
    rep = verify_counterexample()
    assert rep["all_pass"]
    assert rep["sr_T"] == 4 and rep["lc3_V"] == 4 and rep["scc_U"] == 4
    assert rep["minors_checked"] == 450450
    assert rep["max_scc_over_minors"] == 3
    assert rep["x_plus_y_values"] == [3, 5, 7, 10, 12, 14]
