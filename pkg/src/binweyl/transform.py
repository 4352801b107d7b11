"""Weyl transform of signals and matrices.

``omega[a, b](y) = 2**(-m/2) * y^T D(a, b) y``. The fast path computes each
row ``omega[a, :]`` as the Walsh-Hadamard transform of the dyadic
autocorrelation band ``z_a[v] = y[v] * y[v xor a]``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IntegrityError, ParseError, ResourceError, UsageError
from .fwht import fwht, log2_length
from .hw_group import (
    DENSE_LIMIT,
    CoeffIndex,
    SignedPermOp,
    d_apply,
    enumerate_symmetric_indices,
    parity,
    symmetric_mask,
)

ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeylSpectrum:
    """``2**(2m)`` coefficients in a-major, b-minor order."""

    m: int
    coeffs: np.ndarray
    source_norm_sq: float | None = None

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64).reshape(-1)
        if coeffs.size != 1 << (2 * self.m):
            raise UsageError(f"expected {1 << (2 * self.m)} coefficients, got {coeffs.size}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def grid(self) -> np.ndarray:
        """View as ``(2**m, 2**m)``; row ``a``, column ``b``."""
        return self.coeffs.reshape(1 << self.m, 1 << self.m)

    def __getitem__(self, idx) -> float:
        a, b = idx
        return float(self.grid[int(a), int(b)])

    def symmetric_values(self) -> np.ndarray:
        """Coefficients restricted to ``a.b = 0`` in canonical order."""
        return self.grid[symmetric_mask(self.m)]


def _as_signal(y) -> tuple[np.ndarray, int]:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 0:
        raise UsageError("signal must have at least one axis")
    return y, log2_length(y.shape[-1])


def autocorr_bands(y) -> np.ndarray:
    """``z[..., a, v] = y[..., v] * y[..., v xor a]``."""
    y, m = _as_signal(y)
    idx = np.arange(1 << m)
    return y[..., None, :] * y[..., idx[:, None] ^ idx[None, :]]


def hadamard_of_bands(y) -> np.ndarray:
    """Fast-path grid ``(..., 2**m, 2**m)`` before structural zeroing."""
    return fwht(autocorr_bands(y))


def weyl_fast_grid(y, check: bool = True) -> np.ndarray:
    """Batched fast transform; returns ``(..., 2**m, 2**m)`` grids.

    Entries with ``a.b = 1`` are verified to be at most ``1e-12 * |y|^2`` and
    then set to exactly zero.
    """
    y, m = _as_signal(y)
    grid = hadamard_of_bands(y)
    odd = ~symmetric_mask(m)
    if check:
        bound = ZERO_TOL * np.einsum("...i,...i->...", y, y)
        leak = np.abs(grid[..., odd]).max(axis=-1, initial=0.0)
        if np.any(leak > bound + 1e-300):
            raise IntegrityError(f"structural zeros leaked: max {leak.max():.3e}")
    grid[..., odd] = 0.0
    return grid


def weyl_fast(y, check: bool = True) -> WeylSpectrum:
    y, m = _as_signal(y)
    if y.ndim != 1:
        raise UsageError("weyl_fast takes one signal; use weyl_fast_grid for batches")
    return WeylSpectrum(m, weyl_fast_grid(y, check), float(y @ y))


def weyl_naive_grid(y, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """Coefficient by coefficient via the quadratic form ``y^T D(a,b) y``."""
    y, m = _as_signal(y)
    if m > dense_limit:
        raise ResourceError(f"m={m} exceeds naive limit {dense_limit}")
    n = 1 << m
    out = np.zeros(y.shape[:-1] + (n, n))
    scale = 2.0 ** (-m / 2)
    for a, b in enumerate_symmetric_indices(m):
        dy = d_apply(SignedPermOp(m, a, b), y)
        out[..., a, b] = scale * (y * dy).sum(axis=-1)
    return out


def weyl_naive(y, dense_limit: int = DENSE_LIMIT) -> WeylSpectrum:
    y, m = _as_signal(y)
    if y.ndim != 1:
        raise UsageError("weyl_naive takes one signal; use weyl_naive_grid for batches")
    return WeylSpectrum(m, weyl_naive_grid(y, dense_limit), float(y @ y))


def weyl_of_matrix(M, dense_limit: int = DENSE_LIMIT) -> WeylSpectrum:
    """``2**(-m/2) * Tr[M D(a,b)]`` for every ``(a, b)``; M need not be symmetric."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {M.shape}")
    m = log2_length(M.shape[0])
    if m > dense_limit:
        raise ResourceError(f"m={m} exceeds dense limit {dense_limit}")
    idx = np.arange(1 << m)
    # Tr[M D(a,b)] = sum_v M[v, v^a] (-1)^(b.v)
    diagonals = M[idx[None, :], idx[None, :] ^ idx[:, None]]
    return WeylSpectrum(m, fwht(diagonals))


def reconstruct_covariance(s: WeylSpectrum, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """Expand ``sum omega[a,b] 2**(-m/2) D(a,b)`` over ``a.b = 0``."""
    m = s.m
    if m > dense_limit:
        raise ResourceError(f"m={m} exceeds dense limit {dense_limit}")
    grid = np.where(symmetric_mask(m), s.grid, 0.0)
    # Row a of the expansion lives on the "dyadic diagonal" R[w ^ a, w].
    bands = fwht(grid)
    idx = np.arange(1 << m)
    R = np.zeros((1 << m, 1 << m))
    R[idx[None, :] ^ idx[:, None], idx[None, :]] = bands
    return R


def _check_split_index(m: int, idx: CoeffIndex) -> CoeffIndex:
    idx = CoeffIndex(int(idx[0]), int(idx[1]))
    if idx == (0, 0):
        raise UsageError("D(0,0) is the identity; it has no +/- eigenspace split")
    if parity(idx.a & idx.b):
        raise UsageError(f"D{idx.label(m)} is antisymmetric; no real eigenspaces")
    if max(idx) >= 1 << m:
        raise UsageError(f"index {idx} out of range for m={m}")
    return idx


def eigenspace_energies(y, idx: CoeffIndex) -> tuple[float, float]:
    """Energy of ``y`` in the +1 and -1 eigenspaces of ``D(a, b)``."""
    y, m = _as_signal(y)
    if y.ndim != 1:
        raise UsageError("eigenspace_energies takes one signal")
    a, b = _check_split_index(m, idx)
    total = float(y @ y)
    quad = float(y @ d_apply(SignedPermOp(m, a, b), y))
    return (total + quad) / 2, (total - quad) / 2


def eigenspace_projectors(m: int, idx: CoeffIndex) -> tuple[np.ndarray, np.ndarray]:
    """Dense orthogonal projectors ``(I + D)/2`` and ``(I - D)/2``."""
    a, b = _check_split_index(m, idx)
    D = d_apply(SignedPermOp(m, a, b), np.eye(1 << m)).T
    eye = np.eye(1 << m)
    return (eye + D) / 2, (eye - D) / 2


def write_spectrum(path, s: WeylSpectrum) -> None:
    """``.csv``: ``m=<int>`` line, header, one ``a,b,omega`` row per index.
    Anything else: raw little-endian float64 in canonical order."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        buf = io.StringIO()
        buf.write(f"m={s.m}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "omega"])
        n = 1 << s.m
        for flat, value in enumerate(s.coeffs):
            w.writerow([flat // n, flat % n, repr(float(value))])
        path.write_text(buf.getvalue())
    else:
        path.write_bytes(s.coeffs.astype("<f8").tobytes())


def read_spectrum(path) -> WeylSpectrum:
    path = Path(path)
    if path.suffix.lower() != ".csv":
        raw = path.read_bytes()
        if len(raw) % 8:
            raise ParseError("binary spectrum length is not a multiple of 8", len(raw))
        values = np.frombuffer(raw, dtype="<f8")
        m = (values.size.bit_length() - 1) // 2
        if values.size != 1 << (2 * m) or m < 1:
            raise ParseError(f"{values.size} coefficients is not 4**m")
        return WeylSpectrum(m, values.copy())
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("m="):
        raise ParseError("missing 'm=<int>' header line", 0)
    try:
        m = int(lines[0][2:])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}", 0) from None
    rows = list(csv.reader(lines[1:]))
    if not rows or rows[0] != ["a", "b", "omega"]:
        raise ParseError("missing 'a,b,omega' column header")
    n = 1 << m
    coeffs = np.zeros(n * n)
    seen = 0
    for row in rows[1:]:
        try:
            a, b, value = int(row[0]), int(row[1]), float(row[2])
        except (ValueError, IndexError):
            raise ParseError(f"bad row {row!r}") from None
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"index out of range in row {row!r}")
        coeffs[a * n + b] = value
        seen += 1
    if seen != n * n:
        raise ParseError(f"expected {n * n} rows, got {seen}")
    return WeylSpectrum(m, coeffs)
