import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apnlab.bitlinear import BitMatrix, nullspace, rank, rref


def test_rref_rank_nullspace():
    rows = [0b110, 0b011, 0b101]
    assert rank(rows) == 2
    ns = nullspace(rows, 3)
    assert ns == [0b111]
    for r in rows:
        assert bin(r & ns[0]).count("1") % 2 == 0
    red, piv = rref(rows)
    assert len(piv) == 2
    assert nullspace([], 2) and len(nullspace([], 2)) == 2


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8), st.data())
def test_matrix_algebra(n, data):
    cols = data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    other = data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    A, B = BitMatrix(n, tuple(cols)), BitMatrix(n, tuple(other))
    x = data.draw(st.integers(0, (1 << n) - 1))
    assert (A @ B)(x) == A(B(x))
    assert (A + B)(x) == A(x) ^ B(x)
    assert A.apply(np.array([x]))[0] == A(x)
    assert BitMatrix.from_text(A.to_text()) == A
    if A.is_invertible():
        assert A.inverse() @ A == BitMatrix.identity(n)
    else:
        assert A.rank < n
        with pytest.raises(ValueError):
            A.inverse()


def test_from_function_and_table():
    M = BitMatrix.from_function(4, lambda v: ((v << 1) | (v >> 3)) & 0xF)
    assert np.array_equal(M.table(), [((v << 1) | (v >> 3)) & 0xF for v in range(16)])
    assert (M @ M @ M @ M) == BitMatrix.identity(4)
