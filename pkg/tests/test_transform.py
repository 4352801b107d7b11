import numpy as np
import pytest

from binweyl.errors import ResourceError, UsageError
from binweyl.hw_group import SignedPermOp, d_apply, d_materialize, enumerate_symmetric_indices, parity
from binweyl.transform import (
    WeylSpectrum,
    autocorr_bands,
    eigenspace_energies,
    eigenspace_projectors,
    hadamard_of_bands,
    read_spectrum,
    reconstruct_covariance,
    weyl_fast,
    weyl_fast_grid,
    weyl_naive,
    weyl_naive_grid,
    weyl_of_matrix,
    write_spectrum,
)

Y4 = np.array([1.0, 2.0, 3.0, 4.0])


def trace_oracle(y):
    """Dense Tr[y y^T D(a,b)] / 2^(m/2) from Kronecker-built matrices."""
    y = np.asarray(y, float)
    m = len(y).bit_length() - 1
    n = 1 << m
    out = np.zeros((n, n))
    C = np.outer(y, y)
    for a in range(n):
        for b in range(n):
            out[a, b] = np.trace(C @ d_materialize(SignedPermOp(m, a, b))) * 2.0 ** (-m / 2)
    return out


def test_autocorr_examples():
    z = autocorr_bands(Y4)
    np.testing.assert_array_equal(z[0b00], [1, 4, 9, 16])
    np.testing.assert_array_equal(z[0b01], [2, 2, 12, 12])
    np.testing.assert_array_equal(z[0b11], [4, 6, 6, 4])


def test_autocorr_band_symmetry(rng):
    y = rng.normal(size=32)
    z = autocorr_bands(y)
    idx = np.arange(32)
    assert (z[0] >= 0).all()
    for a in range(32):
        np.testing.assert_array_equal(z[a], z[a][idx ^ a])


def test_fast_examples():
    s = weyl_fast(Y4)
    assert s[0b00, 0b00] == pytest.approx(15.0, abs=1e-12)
    assert s[0b01, 0b10] == pytest.approx(-10.0, abs=1e-12)
    assert weyl_fast([1.0, 1.0])[1, 0] == pytest.approx(np.sqrt(2), abs=1e-12)


def test_naive_examples():
    y = np.random.default_rng(3).normal(size=16)
    assert weyl_naive(y)[0, 0] == pytest.approx(0.25 * y @ y, rel=1e-14)
    np.testing.assert_allclose(weyl_naive([1.0, 0.0]).coeffs, [2**-0.5, 2**-0.5, 0, 0], atol=1e-15)
    assert weyl_naive(Y4)[0b11, 0b00] == pytest.approx(10.0, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_fast_and_naive_match_dense_trace(m, rng):
    for _ in range(5):
        y = rng.normal(size=1 << m)
        oracle = trace_oracle(y)
        scale = y @ y
        assert np.abs(weyl_fast(y).grid - oracle).max() <= 1e-12 * scale
        assert np.abs(weyl_naive(y).grid - oracle).max() <= 1e-12 * scale


def test_batched_grids_match_single(rng):
    Y = rng.normal(size=(7, 16))
    G = weyl_fast_grid(Y)
    N = weyl_naive_grid(Y)
    for i in range(7):
        np.testing.assert_array_equal(G[i], weyl_fast(Y[i]).grid)
        np.testing.assert_array_equal(N[i], weyl_naive(Y[i]).grid)


def test_structural_zeros_and_isometry(rng):
    for m in range(1, 7):
        y = rng.normal(size=1 << m)
        raw = hadamard_of_bands(y)
        s = weyl_fast(y)
        for a in range(1 << m):
            for b in range(1 << m):
                if parity(a & b):
                    assert abs(raw[a, b]) <= 1e-12 * (y @ y)
                    assert s[a, b] == 0.0
        assert np.sum(s.coeffs**2) == pytest.approx((y @ y) ** 2, rel=1e-9)
        assert len(s.symmetric_values()) == len(enumerate_symmetric_indices(m))


def test_invariance_and_sign_law(rng):
    m = 3
    y = rng.normal(size=8)
    base = weyl_fast(y).grid
    for a2 in range(8):
        for b2 in range(8):
            moved = weyl_fast(d_apply(SignedPermOp(m, a2, b2), y)).grid
            np.testing.assert_allclose(np.abs(moved), np.abs(base), rtol=0, atol=1e-12)
            for a in range(8):
                for b in range(8):
                    sign = -1 if parity(a & b2) ^ parity(a2 & b) else 1
                    assert moved[a, b] == pytest.approx(sign * base[a, b], abs=1e-12)


def test_of_matrix_examples():
    s = weyl_of_matrix(np.eye(2))
    np.testing.assert_allclose(s.coeffs, [np.sqrt(2), 0, 0, 0], atol=1e-15)
    s = weyl_of_matrix([[1, 1], [-1, -1]])
    assert s[0, 1] == pytest.approx(np.sqrt(2))
    assert s[0, 0] == pytest.approx(0) and s[1, 0] == pytest.approx(0)


def test_of_matrix_agrees_with_dense_trace(rng):
    m = 3
    M = rng.normal(size=(8, 8))  # deliberately asymmetric
    s = weyl_of_matrix(M)
    for a in range(8):
        for b in range(8):
            ref = np.trace(M @ d_materialize(SignedPermOp(m, a, b))) * 2 ** (-1.5)
            assert s[a, b] == pytest.approx(ref, abs=1e-12)
    y = rng.normal(size=8)
    mask = np.array([[not parity(a & b) for b in range(8)] for a in range(8)])
    np.testing.assert_allclose(weyl_of_matrix(np.outer(y, y)).grid[mask], weyl_naive(y).grid[mask], atol=1e-12)


def test_of_matrix_errors():
    with pytest.raises(UsageError):
        weyl_of_matrix(np.ones((2, 4)))
    with pytest.raises(UsageError):
        weyl_of_matrix(np.ones((3, 3)))


def test_reconstruction(rng):
    np.testing.assert_allclose(reconstruct_covariance(weyl_fast([1.0, 0.0])), [[1, 0], [0, 0]], atol=1e-15)
    np.testing.assert_array_equal(reconstruct_covariance(WeylSpectrum(2, np.zeros(16))), np.zeros((4, 4)))
    for m in range(1, 7):
        y = rng.normal(size=1 << m)
        R = reconstruct_covariance(weyl_fast(y))
        assert np.linalg.norm(R - np.outer(y, y)) <= 1e-10 * (y @ y)


def test_reconstruction_matches_dense_expansion(rng):
    m = 3
    s = weyl_fast(rng.normal(size=8))
    dense = sum(s[a, b] * 2 ** (-1.5) * d_materialize(SignedPermOp(m, a, b)) for a, b in enumerate_symmetric_indices(m))
    np.testing.assert_allclose(reconstruct_covariance(s), dense, atol=1e-13)


def test_eigenspace_examples():
    assert eigenspace_energies([1.0, 1.0], (1, 0)) == pytest.approx((2, 0))
    assert eigenspace_energies([1.0, -1.0], (1, 0)) == pytest.approx((0, 2))
    assert eigenspace_energies(Y4, (0b01, 0b10)) == pytest.approx((5, 25))
    with pytest.raises(UsageError):
        eigenspace_energies(Y4, (0, 0))
    with pytest.raises(UsageError):
        eigenspace_energies(Y4, (1, 1))


def test_eigenspace_identity(rng):
    for m in range(1, 6):
        y = rng.normal(size=1 << m)
        s = weyl_fast(y)
        for a, b in enumerate_symmetric_indices(m)[1:]:
            plus, minus = eigenspace_energies(y, (a, b))
            assert plus >= -1e-12 and minus >= -1e-12
            assert 2 ** (-m / 2) * (plus - minus) == pytest.approx(s[a, b], abs=1e-12)
            assert plus + minus == pytest.approx(y @ y, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_eigenspaces_have_half_dimension(m):
    # each nontrivial symmetric D(a,b) splits into two 2^(m-1)-dimensional eigenspaces
    for a, b in enumerate_symmetric_indices(m)[1:]:
        P, Q = eigenspace_projectors(m, (a, b))
        assert np.linalg.matrix_rank(P) == 1 << (m - 1)
        assert np.linalg.matrix_rank(Q) == 1 << (m - 1)
        np.testing.assert_allclose(P @ P, P, atol=1e-14)
        np.testing.assert_allclose(P - Q, d_materialize(SignedPermOp(m, a, b)), atol=1e-14)


def test_naive_limit():
    with pytest.raises(ResourceError):
        weyl_naive(np.ones(1 << 9))


def test_bad_length():
    with pytest.raises(UsageError):
        weyl_fast(np.ones(6))
    with pytest.raises(UsageError):
        autocorr_bands(np.ones(3))


@pytest.mark.parametrize("suffix", [".csv", ".bin"])
def test_spectrum_roundtrip(tmp_path, rng, suffix):
    s = weyl_fast(rng.normal(size=16))
    path = tmp_path / f"spectrum{suffix}"
    write_spectrum(path, s)
    back = read_spectrum(path)
    assert back.m == 4
    np.testing.assert_array_equal(back.coeffs, s.coeffs)
    if suffix == ".csv":
        lines = path.read_text().splitlines()
        assert lines[0] == "m=4" and lines[1] == "a,b,omega" and len(lines) == 2 + 256
