"""Supervised choice of Weyl coordinates and nearest-neighbour classification.

Signals are passed as arrays of shape ``(n_points, 2**m)`` (one point per
row). The discriminability of coordinate ``(a, b)`` between two equally sized
classes is ``|omega[a, b](M)|`` with ``M = (Y+ - Y-)(Y+ + Y-)^T`` when the
points are the columns of ``Y+`` and ``Y-``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import UsageError
from .fwht import log2_length
from .hw_group import CoeffIndex, SignedPermOp, d_apply, enumerate_symmetric_indices, parity
from .transform import weyl_of_matrix


@dataclass(frozen=True, eq=False)
class LabeledSignalSet:
    signals: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        signals = np.asarray(self.signals, dtype=np.float64)
        labels = np.asarray(self.labels)
        if signals.ndim != 2 or len(signals) == 0:
            raise UsageError(f"expected a nonempty (n, 2**m) array, got {signals.shape}")
        log2_length(signals.shape[1])
        if labels.shape != (len(signals),):
            raise UsageError("one label per signal required")
        object.__setattr__(self, "signals", signals)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return log2_length(self.signals.shape[1])

    def classes(self) -> list:
        return sorted(set(self.labels.tolist()))

    def of_class(self, label) -> np.ndarray:
        return self.signals[self.labels == label]


@dataclass(frozen=True, eq=False)
class CoordRanking:
    coords: list[CoeffIndex]
    scores: np.ndarray

    def __len__(self) -> int:
        return len(self.coords)

    def write_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["a", "b", "score"])
            for ix, score in zip(self.coords, self.scores):
                w.writerow([ix.a, ix.b, repr(float(score))])


def selection_matrix(plus, minus) -> np.ndarray:
    """``(Y+ - Y-)(Y+ + Y-)^T`` for row-stacked points."""
    plus = np.atleast_2d(np.asarray(plus, dtype=np.float64))
    minus = np.atleast_2d(np.asarray(minus, dtype=np.float64))
    if plus.shape != minus.shape:
        raise UsageError(f"class sets must have equal shapes, got {plus.shape} vs {minus.shape}")
    return (plus - minus).T @ (plus + minus)


def discriminability_scores(plus, minus) -> dict[CoeffIndex, float]:
    """``|omega[a, b](M)|`` for every ``(a, b)`` with ``a.b = 0``."""
    M = selection_matrix(plus, minus)
    grid = np.abs(weyl_of_matrix(M).grid)
    m = log2_length(M.shape[0])
    return {ix: float(grid[ix]) for ix in enumerate_symmetric_indices(m)}


def rank_scores(scores: Mapping[CoeffIndex, float]) -> CoordRanking:
    """Descending score; ties go to the smaller ``(a, b)``."""
    order = sorted(scores, key=lambda ix: (-scores[ix], ix.a, ix.b))
    return CoordRanking(order, np.array([scores[ix] for ix in order]))


def select_top_k(scores: Mapping[CoeffIndex, float], K: int) -> CoordRanking:
    if not 1 <= K <= len(scores):
        raise UsageError(f"K must be in [1, {len(scores)}], got {K}")
    full = rank_scores(scores)
    return CoordRanking(full.coords[:K], full.scores[:K])


def one_vs_all_scores(data: LabeledSignalSet) -> dict:
    """Per-class scores: class mean covariance minus rest mean covariance.

    For two equal-sized classes this is the two-class score divided by the
    class size, so the ranking is unchanged.
    """
    out = {}
    for label in data.classes():
        inside = data.of_class(label)
        outside = data.signals[data.labels != label]
        if len(outside) == 0:
            raise UsageError("one-vs-all needs at least two classes")
        M = inside.T @ inside / len(inside) - outside.T @ outside / len(outside)
        grid = np.abs(weyl_of_matrix(M).grid)
        out[label] = {ix: float(grid[ix]) for ix in enumerate_symmetric_indices(data.m)}
    return out


def select_coords(data: LabeledSignalSet, K: int) -> CoordRanking:
    """Two classes: the pairwise score. More: union of per-class top-K, re-cut to K."""
    classes = data.classes()
    if len(classes) < 2:
        raise UsageError("need at least two classes")
    if len(classes) == 2:
        plus, minus = (data.of_class(c) for c in classes)
        if len(plus) != len(minus):
            raise UsageError(f"classes must be equally sized, got {len(plus)} and {len(minus)}")
        return select_top_k(discriminability_scores(plus, minus), K)
    per_class = one_vs_all_scores(data)
    merged: dict[CoeffIndex, float] = {}
    for scores in per_class.values():
        for ix in select_top_k(scores, K).coords:
            merged[ix] = max(merged.get(ix, 0.0), scores[ix])
    return select_top_k(merged, min(K, len(merged)))


def project_onto_coords(y, coords: Sequence[CoeffIndex], absolute: bool = False) -> np.ndarray:
    """Signed ``omega`` at the chosen coordinates only, ``O(2**m)`` each.

    ``y`` may be one signal or a batch ``(..., 2**m)``.
    """
    y = np.asarray(y, dtype=np.float64)
    m = log2_length(y.shape[-1])
    out = np.empty(y.shape[:-1] + (len(coords),))
    scale = 2.0 ** (-m / 2)
    for k, (a, b) in enumerate(coords):
        if parity(a & b):
            raise UsageError(f"coordinate ({a}, {b}) has a.b = 1 and is always zero")
        out[..., k] = scale * np.einsum("...i,...i->...", y, d_apply(SignedPermOp(m, a, b), y))
    return np.abs(out) if absolute else out


def nn_classify(train_x, train_labels, test_x, chunk: int = 1024) -> np.ndarray:
    """1-nearest-neighbour under Euclidean distance; ties go to the lowest training index."""
    train_x = np.atleast_2d(np.asarray(train_x, dtype=np.float64))
    train_labels = np.asarray(train_labels)
    test_x = np.atleast_2d(np.asarray(test_x, dtype=np.float64))
    if len(train_x) == 0:
        raise UsageError("empty training set")
    if len(train_labels) != len(train_x):
        raise UsageError("one label per training point required")
    if test_x.shape[1] != train_x.shape[1]:
        raise UsageError(f"feature length mismatch: {test_x.shape[1]} vs {train_x.shape[1]}")
    nearest = np.empty(len(test_x), dtype=np.intp)
    for start in range(0, len(test_x), chunk):
        block = test_x[start : start + chunk]
        d2 = ((block[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=-1)
        nearest[start : start + chunk] = np.argmin(d2, axis=1)
    return train_labels[nearest]
