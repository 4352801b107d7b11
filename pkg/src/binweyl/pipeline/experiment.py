"""End-to-end texture experiments: sampling, descriptors, clustering, selection."""

from __future__ import annotations

import contextlib
import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import UsageError, WeylError
from ..fwht import log2_length
from ..hw_group import CoeffIndex, symmetric_mask
from ..pooling import default_partition, patch_descriptors, split_subpatches, vectorize_columnwise
from ..selection import (
    CoordRanking,
    LabeledSignalSet,
    nn_classify,
    project_onto_coords,
    select_coords,
    select_top_k,
)
from ..transform import weyl_fast_grid
from .clustering import clustering_accuracy, kmeans_fit, pairwise_distances, pca2
from .imageio import GrayImage
from .textures import dihedral_variants, sample_patches

SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    mode: str = "cluster"  # "cluster" or "classify"
    patch_size: int = 16
    sub_m: int = 4
    patches_per_texture: int = 500
    seed: int = 0
    include_structural_zeros: bool = False
    remove_mean: bool = False
    unit_norm: bool = False
    dihedral: bool = False
    n_clusters: int | None = None  # defaults to the number of textures
    train_per_class: int = 20
    k_coeffs: int = 1
    k_sweep: list[int] = field(default_factory=list)
    selection_signal: str = "patch"  # "patch" (whole patch, m=8 at 16x16) or "subpatch"
    absolute: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("cluster", "classify"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.sub_m < 2 or self.sub_m % 2:
            raise UsageError(f"subpatch m must be even and >= 2, got {self.sub_m}")
        side = 1 << (self.sub_m // 2)
        if self.patch_size < side or self.patch_size % side:
            raise UsageError(f"patch size {self.patch_size} is not a multiple of {side}")
        if self.selection_signal not in ("patch", "subpatch"):
            raise UsageError(f"unknown selection signal {self.selection_signal!r}")
        if self.patches_per_texture < 0 or self.workers < 1:
            raise UsageError("patches_per_texture must be >= 0 and workers >= 1")


class _Stages:
    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextlib.contextmanager
    def __call__(self, name: str):
        start = time.perf_counter()
        try:
            yield
        except WeylError as exc:
            exc.args = (f"[{name}] {exc}",) + exc.args[1:]
            raise
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start


def _texture_seeds(seed: int, count: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_textures(images: Sequence[GrayImage], cfg: ExperimentConfig):
    """Patches and texture labels for every image, reproducible from ``cfg.seed``."""
    patches, labels = [], []
    for label, (img, seed) in enumerate(zip(images, _texture_seeds(cfg.seed, len(images)))):
        n = cfg.patches_per_texture
        if cfg.dihedral:
            rng = np.random.default_rng(seed)
            which = rng.integers(0, 8, size=n)
            block = np.empty((n, cfg.patch_size, cfg.patch_size))
            for v, variant in enumerate(dihedral_variants(img)):
                sel = np.flatnonzero(which == v)
                block[sel] = sample_patches(variant, len(sel), cfg.patch_size, seed + v + 1).patches
        else:
            block = sample_patches(img, n, cfg.patch_size, seed).patches
        patches.append(block)
        labels.append(np.full(n, label))
    return np.concatenate(patches), np.concatenate(labels)


def normalize_patches(patches: np.ndarray, remove_mean: bool, unit_norm: bool) -> np.ndarray:
    out = np.array(patches, dtype=np.float64)
    if remove_mean:
        out -= out.mean(axis=(-2, -1), keepdims=True)
    if unit_norm:
        norms = np.sqrt((out**2).sum(axis=(-2, -1), keepdims=True))
        out = np.divide(out, norms, out=np.zeros_like(out), where=norms > 0)
    return out


def extract_descriptors(patches, cfg: ExperimentConfig) -> np.ndarray:
    """Pooled descriptors, fanned out over ``cfg.workers`` threads in fixed chunk order."""
    p = default_partition(cfg.sub_m)
    if cfg.workers == 1 or len(patches) < 2 * cfg.workers:
        return patch_descriptors(patches, p, cfg.include_structural_zeros)
    chunks = np.array_split(patches, cfg.workers)
    with ThreadPoolExecutor(cfg.workers) as pool:
        parts = pool.map(lambda c: patch_descriptors(c, p, cfg.include_structural_zeros), chunks)
        return np.concatenate(list(parts))


def _block_means(matrix: np.ndarray, labels: np.ndarray) -> list[list[float]]:
    ids = np.unique(labels)
    return [
        [float(matrix[np.ix_(labels == i, labels == j)].mean()) for j in ids] for i in ids
    ]


def run_clustering(images, cfg: ExperimentConfig, stage: _Stages) -> tuple[dict, dict]:
    with stage("sample"):
        patches, truth = sample_textures(images, cfg)
        patches = normalize_patches(patches, cfg.remove_mean, cfg.unit_norm)
    with stage("describe"):
        desc = extract_descriptors(patches, cfg)
    k = cfg.n_clusters or len(images)
    with stage("cluster"):
        fit = kmeans_fit(desc, k, cfg.seed)
        accuracy = clustering_accuracy(fit.labels, truth)
    with stage("embed"):
        coords = pca2(desc)
        dist = pairwise_distances(desc)
        similarity = dist.max() - dist
    report = {
        "n_patches": int(len(patches)),
        "descriptor_length": int(desc.shape[1]),
        "partition_id": default_partition(cfg.sub_m).partition_id,
        "n_clusters": k,
        "accuracy": accuracy,
        "inertia": fit.inertia,
        "similarity_block_means": _block_means(similarity, truth),
    }
    artifacts = {
        "descriptors": (
            ["texture"] + [f"d{i}" for i in range(desc.shape[1])],
            [[int(t)] + [repr(float(x)) for x in row] for t, row in zip(truth, desc)],
        ),
        "pca": (
            ["pc1", "pc2", "texture", "cluster"],
            [
                [repr(float(x)), repr(float(y)), int(t), int(c)]
                for (x, y), t, c in zip(coords, truth, fit.labels)
            ],
        ),
    }
    return report, artifacts


def train_test_split(labels: np.ndarray, per_class: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """``per_class`` random training indices per label; everything else is test."""
    rng = np.random.default_rng(seed)
    train = []
    for label in np.unique(labels):
        idx = np.flatnonzero(labels == label)
        if per_class < 1 or per_class >= len(idx):
            raise UsageError(f"train_per_class={per_class} invalid for {len(idx)} patches")
        train.append(np.sort(rng.permutation(idx)[:per_class]))
    train = np.concatenate(train)
    test = np.setdiff1d(np.arange(len(labels)), train)
    return train, test


def subpatch_spectra(patches: np.ndarray, sub_m: int) -> np.ndarray:
    """Mean over subpatches of the signed ``(2**m, 2**m)`` Weyl grid, per patch."""
    tiles = split_subpatches(patches, 1 << (sub_m // 2))
    return weyl_fast_grid(vectorize_columnwise(tiles)).mean(axis=-3)


def _spectral_ranking(grids: np.ndarray, labels: np.ndarray, K: int) -> CoordRanking:
    """Score coordinates from per-point spectra (additive form of the matrix score)."""
    m = log2_length(grids.shape[-1])
    mask = symmetric_mask(m)
    coords = [CoeffIndex(int(a), int(b)) for a, b in zip(*np.nonzero(mask))]
    classes = np.unique(labels)
    if len(classes) == 2:
        plus, minus = (grids[labels == c] for c in classes)
        if len(plus) != len(minus):
            raise UsageError("classes must be equally sized")
        diff = np.abs(plus.sum(axis=0) - minus.sum(axis=0))[mask]
        return select_top_k(dict(zip(coords, diff.tolist())), K)
    merged: dict[CoeffIndex, float] = {}
    for c in classes:
        diff = np.abs(grids[labels == c].mean(axis=0) - grids[labels != c].mean(axis=0))[mask]
        scores = dict(zip(coords, diff.tolist()))
        for ix in select_top_k(scores, K).coords:
            merged[ix] = max(merged.get(ix, 0.0), scores[ix])
    return select_top_k(merged, min(K, len(merged)))


def run_classification(images, cfg: ExperimentConfig, stage: _Stages) -> tuple[dict, dict]:
    with stage("sample"):
        patches, truth = sample_textures(images, cfg)
        patches = normalize_patches(patches, cfg.remove_mean, cfg.unit_norm)
        train, test = train_test_split(truth, cfg.train_per_class, cfg.seed)
    ks = sorted(set(cfg.k_sweep) | {cfg.k_coeffs})
    results, rankings = {}, {}
    with stage("select"):
        if cfg.selection_signal == "patch":
            signals = vectorize_columnwise(patches)
            data = LabeledSignalSet(signals[train], truth[train])
            for K in ks:
                rankings[K] = select_coords(data, K)
        else:
            grids = subpatch_spectra(patches, cfg.sub_m)
            for K in ks:
                rankings[K] = _spectral_ranking(grids[train], truth[train], K)
    with stage("classify"):
        for K in ks:
            coords = rankings[K].coords
            if cfg.selection_signal == "patch":
                feats = project_onto_coords(signals, coords, cfg.absolute)
            else:
                feats = np.stack([grids[:, a, b] for a, b in coords], axis=-1)
                feats = np.abs(feats) if cfg.absolute else feats
            pred = nn_classify(feats[train], truth[train], feats[test])
            results[K] = float(np.mean(pred == truth[test]))
    chosen = rankings[cfg.k_coeffs]
    report = {
        "n_patches": int(len(patches)),
        "n_train": int(len(train)),
        "n_test": int(len(test)),
        "signal_m": int(
            2 * log2_length(cfg.patch_size) if cfg.selection_signal == "patch" else cfg.sub_m
        ),
        "k_coeffs": cfg.k_coeffs,
        "accuracy": results[cfg.k_coeffs],
        "selected": [
            {"a": ix.a, "b": ix.b, "score": float(s)} for ix, s in zip(chosen.coords, chosen.scores)
        ],
        "sweep": [{"K": K, "accuracy": results[K]} for K in ks],
    }
    artifacts = {
        "sweep": (["K", "accuracy"], [[K, repr(results[K])] for K in ks]),
        "ranking": (
            ["a", "b", "score"],
            [[ix.a, ix.b, repr(float(s))] for ix, s in zip(chosen.coords, chosen.scores)],
        ),
    }
    return report, artifacts


def run_experiment(
    cfg: ExperimentConfig,
    images: Sequence[GrayImage],
    names: Sequence[str] | None = None,
    report_path=None,
) -> dict:
    """Run one experiment; optionally write the JSON report plus CSV artifacts next to it.

    Everything except ``timings`` is a pure function of ``(images, cfg)``.
    """
    if not images:
        raise UsageError("no input images")
    names = list(names) if names is not None else [f"texture{i}" for i in range(len(images))]
    stage = _Stages()
    runner = run_clustering if cfg.mode == "cluster" else run_classification
    body, artifacts = runner(images, cfg, stage)
    report = {
        "schema": SCHEMA_VERSION,
        "mode": cfg.mode,
        "config": asdict(cfg),
        "inputs": names,
        **body,
        "timings": stage.timings,
    }
    if report_path is not None:
        report_path = Path(report_path)
        report["artifacts"] = {}
        for key, (header, rows) in artifacts.items():
            out = report_path.with_name(f"{report_path.stem}_{key}.csv")
            write_csv(out, header, rows)
            report["artifacts"][key] = out.name
        write_report(report_path, report)
    return report


def write_csv(path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_report(path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timings"}
