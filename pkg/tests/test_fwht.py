import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from binweyl.errors import UsageError
from binweyl.fwht import fwht, fwht_batch


def dense_h(m):
    # Sylvester construction is the natural-order Hadamard matrix
    return scipy.linalg.hadamard(1 << m).astype(float) * 2.0 ** (-m / 2)


def test_examples():
    np.testing.assert_allclose(fwht([1, 1, 1, 1]), [2, 0, 0, 0])
    np.testing.assert_allclose(fwht([1, 0, 0, 0]), [0.5] * 4)
    np.testing.assert_allclose(fwht([2, 2, 12, 12]), [14, 0, -10, 0])
    np.testing.assert_allclose(dense_h(2) @ [2, 2, 12, 12], [14, 0, -10, 0])


def test_entrywise_definition(rng):
    for m in range(1, 7):
        n = 1 << m
        H = np.array([[(-1) ** bin(v & w).count("1") for w in range(n)] for v in range(n)]) * 2.0 ** (-m / 2)
        np.testing.assert_array_equal(H, dense_h(m))
        x = rng.normal(size=(5, n))
        np.testing.assert_allclose(fwht(x), x @ H.T, rtol=0, atol=1e-12 * np.abs(x).max() * n)


def test_non_power_of_two():
    with pytest.raises(UsageError):
        fwht(np.ones(6))
    with pytest.raises(UsageError):
        fwht(np.ones(0))


def test_involution_and_parseval_bulk(rng):
    # 10^4 signals spread over m = 1..10
    for m in range(1, 11):
        x = rng.normal(size=(1000, 1 << m))
        back = fwht(fwht(x))
        norms = np.linalg.norm(x, axis=1)
        assert (np.linalg.norm(back - x, axis=1) <= 1e-12 * norms).all()
        assert (np.abs(np.linalg.norm(fwht(x), axis=1) - norms) <= 1e-12 * norms).all()


@settings(max_examples=50)
@given(
    st.integers(1, 8).flatmap(lambda m: st.tuples(
        arrays(np.float64, 1 << m, elements=st.floats(-1e3, 1e3)),
        arrays(np.float64, 1 << m, elements=st.floats(-1e3, 1e3)),
    )),
    st.floats(-10, 10),
    st.floats(-10, 10),
)
def test_linearity(xy, alpha, beta):
    x, y = xy
    lhs = fwht(alpha * x + beta * y)
    rhs = alpha * fwht(x) + beta * fwht(y)
    scale = max(1.0, np.abs(alpha * x).sum() + np.abs(beta * y).sum())
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


def test_input_not_modified():
    x = np.arange(8.0)
    fwht(x)
    np.testing.assert_array_equal(x, np.arange(8.0))


def test_batch(rng):
    assert fwht_batch([]) == []
    x = rng.normal(size=8)
    (only,) = fwht_batch([x])
    np.testing.assert_array_equal(only, fwht(x))
    rows = rng.normal(size=(16, 16))
    out = fwht_batch(list(rows))
    assert len(out) == 16
    for r, o in zip(rows, out):
        np.testing.assert_allclose(o, fwht(r), rtol=0, atol=1e-14)
    with pytest.raises(UsageError):
        fwht_batch([np.ones(4), np.ones(8)])
