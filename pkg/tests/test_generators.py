import numpy as np
import pytest

from rankminors.covering import is_antichain
from rankminors.errors import UnknownKind
from rankminors.families import slice_rank_family, tensor_rank_family
from rankminors.generators import KINDS, generate, to_json
from rankminors.oracles import essential_rank, rrank
from rankminors.tensor import supported_in_diagonal


@pytest.mark.parametrize("kind", sorted(KINDS))
def test_reproducible(kind):
    a = to_json(generate(kind, {"n": 3}, 11))
    b = to_json(generate(kind, {"n": 3}, 11))
    assert a == b


def test_seed_changes_output():
    assert to_json(generate("random", {"n": 3}, 1)) != to_json(generate("random", {"n": 3}, 2))


def test_diagonal():
    t = generate("diagonal", {"n": 3, "d": 3})
    assert t.support() == [(1, 1, 1), (2, 2, 2), (3, 3, 3)]


def test_rank1sum_bound():
    for seed in range(5):
        t = generate("rank1sum", {"n": 3, "k": 2}, seed)
        assert rrank(t, tensor_rank_family(3)) <= 2


def test_antichain_kind():
    t = generate("antichain", {"n": 4, "size": 5}, 3)
    assert is_antichain(t.support())


def test_e_supported_kind():
    t = generate("e_supported", {"n": 3}, 4)
    assert supported_in_diagonal(t)
    assert essential_rank(t, slice_rank_family(3)) == 0


def test_example_pair():
    T1, T2 = generate("example_pair", {"n": 3}, 0)
    assert np.array_equal(T1.values[1:], np.zeros((2, 3, 3)))
    assert not T2.values[:, 1:, :].any()


def test_gowers_kind():
    assert generate("gowers").shape == (11, 4, 15)


def test_unknown_kind():
    with pytest.raises(UnknownKind):
        generate("nope")
