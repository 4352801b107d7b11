"""Orthonormal fast Walsh-Hadamard transform in natural (Hadamard) order.

``fwht(x)[w] = 2**(-m/2) * sum_v (-1)^(v.w) x[v]``. The matrix is symmetric
and orthogonal, so the transform is its own inverse.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import UsageError


def log2_length(n: int) -> int:
    """Return ``m`` with ``n == 2**m``; raise UsageError otherwise."""
    if n < 1 or n & (n - 1):
        raise UsageError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


def fwht(x) -> np.ndarray:
    """Transform along the last axis; leading axes are treated as a batch.

    Constant-geometry form: each of the ``m`` stages writes pairwise sums of
    neighbours to the first half and differences to the second half.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        raise UsageError("fwht needs at least one axis")
    n = x.shape[-1]
    m = log2_length(n)
    src = x.copy()
    if m == 0:
        return src
    dst = np.empty_like(src)
    half = n // 2
    for _ in range(m):
        even, odd = src[..., 0::2], src[..., 1::2]
        np.add(even, odd, out=dst[..., :half])
        np.subtract(even, odd, out=dst[..., half:])
        src, dst = dst, src
    src *= 2.0 ** (-m / 2)
    return src


def fwht_batch(rows: Sequence) -> list[np.ndarray]:
    """Transform each row; all rows must share one power-of-two length."""
    rows = [np.asarray(r, dtype=np.float64) for r in rows]
    if not rows:
        return []
    lengths = {r.shape for r in rows}
    if len(lengths) != 1 or rows[0].ndim != 1:
        raise UsageError(f"ragged or non-vector rows: {sorted(lengths)}")
    return list(fwht(np.stack(rows)))


def hadamard_matrix(m: int) -> np.ndarray:
    """Dense orthonormal ``H_{2^m}`` from its entrywise definition (oracle use)."""
    idx = np.arange(1 << m)
    bits = np.bitwise_count(idx[:, None] & idx[None, :]) & 1
    return (1.0 - 2.0 * bits) * 2.0 ** (-m / 2)
