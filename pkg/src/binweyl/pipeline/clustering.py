"""k-means, assignment-optimal accuracy, similarity matrices and 2-D PCA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import UsageError


@dataclass(frozen=True, eq=False)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)


def _farthest_point_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    chosen = [int(rng.integers(len(points)))]
    nearest = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        nearest = np.minimum(nearest, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def _lloyd(points, centers, max_iter):
    labels = np.argmin(_sq_dists(points, centers), axis=1)
    for it in range(1, max_iter + 1):
        for j in range(len(centers)):
            members = points[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the worst-served point
                worst = np.argmax(_sq_dists(points, centers).min(axis=1))
                centers[j] = points[worst]
        new = np.argmin(_sq_dists(points, centers), axis=1)
        if np.array_equal(new, labels):
            return labels, it
        labels = new
    return labels, max_iter


def kmeans_fit(points, k: int, seed: int = 0, max_iter: int = 100, n_init: int = 10) -> KMeansResult:
    """Lloyd's algorithm from greedy farthest-point starts; best inertia of ``n_init`` runs."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if not 1 <= k <= len(points):
        raise UsageError(f"k must be in [1, {len(points)}], got {k}")
    best = None
    for rng in (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_init)):
        centers = _farthest_point_init(points, k, rng)
        labels, n_iter = _lloyd(points, centers, max_iter)
        inertia = float(((points - centers[labels]) ** 2).sum())
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels, centers, inertia, n_iter)
    return best


def kmeans(points, k: int, seed: int = 0, max_iter: int = 100) -> np.ndarray:
    return kmeans_fit(points, k, seed, max_iter).labels


def clustering_accuracy(pred, truth) -> float:
    """Accuracy under the best one-to-one matching of clusters to classes."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise UsageError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise UsageError("empty labelings")
    p_ids, p_idx = np.unique(pred, return_inverse=True)
    t_ids, t_idx = np.unique(truth, return_inverse=True)
    confusion = np.zeros((len(p_ids), len(t_ids)), dtype=np.int64)
    np.add.at(confusion, (p_idx, t_idx), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum()) / pred.size


def pairwise_distances(points) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    return np.sqrt(np.maximum(_sq_dists(points, points), 0.0))


def similarity_matrix(descriptors) -> np.ndarray:
    """``max pairwise distance - distance``; the diagonal holds each row's maximum."""
    try:
        points = np.asarray(descriptors, dtype=np.float64)
    except ValueError:
        raise UsageError("ragged descriptors") from None
    if points.ndim != 2 or len(points) == 0:
        raise UsageError(f"expected a nonempty (n, d) array, got shape {points.shape}")
    dist = pairwise_distances(points)
    return dist.max() - dist


def pca2(points) -> np.ndarray:
    """Project centred points on the top two principal axes.

    Each axis is signed so that its largest-magnitude component is positive.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(points) < 2:
        raise UsageError("pca2 needs at least 2 points")
    centred = points - points.mean(axis=0)
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    axes = np.zeros((2, points.shape[1]))
    axes[: min(2, len(vt))] = vt[:2]
    for row in axes:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1
    out = centred @ axes.T
    if points.shape[1] < 2:
        out[:, 1] = 0.0
    return out
