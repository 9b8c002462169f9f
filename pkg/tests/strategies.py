"""Hypothesis strategies for small tensors over F_p."""
import numpy as np
from hypothesis import strategies as st

from rankminors import Tensor


@st.composite
def tensors(draw, orders=(3,), sizes=(1, 2, 3), fields=(2,), max_entries=27):
    d = draw(st.sampled_from(orders))
    p = draw(st.sampled_from(fields))
    shape = [draw(st.sampled_from(sizes)) for _ in range(d)]
    while int(np.prod(shape)) > max_entries:
        shape[shape.index(max(shape))] -= 1
    vals = draw(st.lists(st.integers(0, p - 1), min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
    return Tensor(np.array(vals, dtype=np.int64).reshape(shape), p)


@st.composite
def matrices(draw, max_n=6, fields=(2, 3, 5, 7)):
    p = draw(st.sampled_from(fields))
    r = draw(st.integers(1, max_n))
    c = draw(st.integers(1, max_n))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(vals, dtype=np.int64).reshape(r, c), p
