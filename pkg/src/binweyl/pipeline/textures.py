"""Patch sampling, dihedral variants and synthetic periodic textures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from .imageio import GrayImage


@dataclass(frozen=True, eq=False)
class PatchSet:
    patches: np.ndarray  # (n, size, size)
    labels: np.ndarray  # (n,) texture ids
    positions: np.ndarray  # (n, 2) top-left (row, col)
    seed: int

    def __len__(self) -> int:
        return len(self.patches)


def _pixels(img) -> np.ndarray:
    return img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)


def sample_patches(img, n: int, size: int = 16, seed: int = 0, label: int = 0) -> PatchSet:
    """``n`` patches with uniform top-left corners, drawn with replacement."""
    px = _pixels(img)
    h, w = px.shape
    if size < 1 or h < size or w < size:
        raise UsageError(f"image {h}x{w} is smaller than a {size}x{size} patch")
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, h - size + 1, size=n)
    cols = rng.integers(0, w - size + 1, size=n)
    # windows[i, j] is the size x size block with top-left (i, j)
    windows = np.lib.stride_tricks.sliding_window_view(px, (size, size))
    patches = windows[rows, cols].copy()
    return PatchSet(
        patches.reshape(n, size, size),
        np.full(n, label),
        np.stack([rows, cols], axis=1).reshape(n, 2),
        seed,
    )


def dihedral_variants(img) -> list:
    """Rotations by 0, 90, 180, 270 degrees clockwise, then each mirrored left-right."""
    px = _pixels(img)
    if px.ndim != 2 or px.shape[0] != px.shape[1]:
        raise UsageError(f"dihedral variants need a square image, got shape {px.shape}")
    rots = [np.rot90(px, -k).copy() for k in range(4)]
    out = rots + [r[:, ::-1].copy() for r in rots]
    if isinstance(img, GrayImage):
        return [GrayImage(v) for v in out]
    return out


def synth_texture(
    period_x: int,
    period_y: int | None = None,
    pattern: str = "weave",
    size: int = 256,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> GrayImage:
    """Periodic base pattern plus seeded Gaussian noise, clipped to [0, 1].

    ``sine``: ``0.5 + 0.25 (cos(2 pi x / px) + cos(2 pi y / py))``.
    ``weave``: square-wave checker with levels 0.25 and 0.75.
    """
    period_y = period_x if period_y is None else period_y
    if period_x < 1 or period_y < 1:
        raise UsageError("periods must be >= 1")
    if size < 1:
        raise UsageError(f"size must be >= 1, got {size}")
    y, x = np.mgrid[0:size, 0:size]
    if pattern == "sine":
        base = 0.5 + 0.25 * (np.cos(2 * np.pi * x / period_x) + np.cos(2 * np.pi * y / period_y))
    elif pattern == "weave":
        base = 0.25 + 0.5 * (((2 * x) // period_x + (2 * y) // period_y) % 2)
    else:
        raise UsageError(f"unknown pattern {pattern!r}")
    if noise_sigma > 0:
        base = base + np.random.default_rng(seed).normal(0.0, noise_sigma, base.shape)
    return GrayImage(np.clip(base, 0.0, 1.0))
