import json

import numpy as np
import pytest
from hypothesis import given

from rankminors import MinorSelection, Tensor, restrict
from rankminors.errors import AlreadyTensorRank, AxisMismatch, BadAxisSet, BadPoint, EmptyAxis, NotSubset, UnsupportedField
from rankminors.families import (PartitionFamily, bipartitions, down_shadow, down_shadow_chain, every_partition_isolates,
                                 flattening_family, induced_family, is_tensor_rank, partition_rank_family,
                                 product_family, set_partitions, slice_rank_family, tensor_rank_family)
from rankminors.tensor import (contract, diagonal_mask, flatten, greedy_shrink, in_diagonal, off_diagonal_support,
                               permute, slice_tensor, supported_in_diagonal)
from strategies import tensors


def test_construction_checks():
    with pytest.raises(UnsupportedField):
        Tensor(np.zeros((2, 2)), 4)
    with pytest.raises(AxisMismatch):
        Tensor(np.zeros((2, 2)), 2, [[1, 2]])
    with pytest.raises(AxisMismatch):
        Tensor(np.zeros((2, 2)), 2, [[1, 2], [1, 2, 3]])
    with pytest.raises(ValueError):
        Tensor(np.zeros((2, 2)), 2, [[2, 1], [1, 2]])


def test_entries_reduced_mod_p():
    t = Tensor([[5, -1], [7, 3]], 3)
    assert t.values.tolist() == [[2, 2], [1, 0]]


@given(tensors(orders=(2, 3), fields=(2, 3, 5)))
def test_json_round_trip(t):
    back = Tensor.from_json(t.to_json())
    assert back == t
    assert json.loads(t.to_json())["field_order"] == t.p


def test_json_rejects_bad_input():
    with pytest.raises(ValueError):
        Tensor.from_dict({"field_order": 2, "axes": [[1, 2]], "entries": []})
    with pytest.raises(ValueError):
        Tensor.from_dict({"field_order": 2, "axes": [[1], [1]], "entries": [[[1, 1], 2]]})
    with pytest.raises(BadPoint):
        Tensor.from_dict({"field_order": 2, "axes": [[1], [1]], "entries": [[[1, 3], 1]]})


def test_restrict_keeps_labels():
    t = Tensor(np.arange(27).reshape(3, 3, 3), 7)
    r = restrict(t, [[1, 3], [2], [1, 2, 3]])
    assert r.axes == ((1, 3), (2,), (1, 2, 3))
    assert r[(3, 2, 1)] == t[(3, 2, 1)]
    with pytest.raises(NotSubset):
        restrict(t, [[4], [1], [1]])
    with pytest.raises(EmptyAxis):
        restrict(t, [[], [1], [1]])


@given(tensors(orders=(3,), sizes=(2, 3)))
def test_restrict_is_composable(t):
    sel1 = [ax[:2] for ax in t.axes]
    sel2 = [ax[:1] for ax in t.axes]
    assert restrict(restrict(t, sel1), sel2) == restrict(t, sel2)


def test_slices_and_contraction():
    t = Tensor(np.arange(8).reshape(2, 2, 2), 5)
    s = slice_tensor(t, [1, 2], [2])
    assert np.array_equal(s.values, t.values[1])
    c = contract([1, 1], t)
    assert np.array_equal(c.values, (t.values[0] + t.values[1]) % 5)
    with pytest.raises(BadAxisSet):
        slice_tensor(t, [], [])
    with pytest.raises(AxisMismatch):
        contract([1, 1, 1], t)


def test_flatten_and_permute():
    t = Tensor(np.arange(24).reshape(2, 3, 4), 7)
    assert flatten(t, [0]).shape == (2, 12)
    assert flatten(t, [1, 2]).shape == (12, 2)
    assert permute(t, (2, 0, 1)).shape == (4, 2, 3)
    with pytest.raises(BadAxisSet):
        flatten(t, [0, 1, 2])


def test_diagonal():
    axes = [(1, 2), (2, 3), (1, 3)]
    mask = diagonal_mask(axes)
    for i, x in enumerate(axes[0]):
        for j, y in enumerate(axes[1]):
            for k, z in enumerate(axes[2]):
                assert mask[i, j, k] == in_diagonal((x, y, z))
    t = Tensor.from_entries(axes, 2, [((1, 3, 1), 1), ((2, 2, 3), 1)])
    assert supported_in_diagonal(t)
    t2 = Tensor.from_entries(axes, 2, [((1, 2, 3), 1)])
    assert off_diagonal_support(t2) == [(1, 2, 3)]


def test_minor_selection_disjoint_flag():
    sel = MinorSelection(([1, 2], [3], [4, 5]), disjoint=True)
    assert sel.is_pairwise_disjoint() and sel.sizes == (2, 1, 2)
    with pytest.raises(ValueError):
        MinorSelection(([1, 2], [2], [4]), disjoint=True)


def test_greedy_shrink_is_minimal():
    t = Tensor(np.eye(3, dtype=int), 2)
    sel = greedy_shrink(t, lambda r: not r.is_zero())
    assert sel.sizes == (1, 1)


# partition families


def test_family_sizes():
    # Bell numbers and bipartition counts
    assert [len(list(set_partitions(range(n)))) for n in range(1, 6)] == [1, 2, 5, 15, 52]
    assert [len(bipartitions(range(n))) for n in range(2, 6)] == [1, 3, 7, 15]
    assert len(slice_rank_family(4)) == 4
    assert len(partition_rank_family(4)) == 7
    assert is_tensor_rank(tensor_rank_family(3))
    assert slice_rank_family(3) == partition_rank_family(3)


def test_family_json_round_trip():
    R = PartitionFamily([[(0, 1), (2, 3)], [(0,), (1, 2, 3)]], 4)
    assert PartitionFamily.from_json(R.to_json()) == R


def test_bad_family():
    with pytest.raises(ValueError):
        PartitionFamily([[(0,), (0, 1)]], 2)
    with pytest.raises(ValueError):
        PartitionFamily([])


def test_down_shadow_slice_rank():
    ds = down_shadow(slice_rank_family(3))
    assert ds.C == (1, 2)
    assert ds.R_plus == (((0,), (1, 2)),)
    assert set(ds.R_prime) == {((0, 1), (2,)), ((0, 2), (1,)), ((0,), (1,), (2,))}
    with pytest.raises(AlreadyTensorRank):
        down_shadow(tensor_rank_family(3))


@pytest.mark.parametrize("R", [slice_rank_family(4), partition_rank_family(4),
                               PartitionFamily([[(0, 1), (2, 3)]], 4)])
def test_down_shadow_chain_terminates(R):
    chain = down_shadow_chain(R)
    assert is_tensor_rank(chain[-1])
    # each step refines: the largest part strictly shrinks or leaves fewer parts of that size
    sizes = [max(len(part) for P in F for part in P) for F in chain]
    assert sizes == sorted(sizes, reverse=True)
    assert len(chain) <= 2 ** 4


def test_down_shadow_order4_pr():
    ds = down_shadow(partition_rank_family(4))
    assert ds.C == (1, 2, 3)
    assert ds.R_comp == tensor_rank_family([0])
    # no partition of R' contains C
    assert all(ds.C not in P for P in ds.R_prime)


def test_product_and_induced():
    R = product_family(tensor_rank_family(2), slice_rank_family(2))
    assert R.d == 4 and len(R) == 1
    P = product_family(slice_rank_family(3), tensor_rank_family(2))
    assert len(P) == 3
    ind = induced_family(slice_rank_family(3), [0, 1])
    assert set(ind) == {((0,), (1,)), ((0, 1),)}
    assert every_partition_isolates(flattening_family(3, 1), 1)
    assert not every_partition_isolates(slice_rank_family(3), 0)
