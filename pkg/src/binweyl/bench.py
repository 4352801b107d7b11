"""Timing of the fast (autocorrelation + FWHT) and naive (per-coefficient) transforms."""

from __future__ import annotations

import time

import numpy as np

from .transform import weyl_fast, weyl_naive


def _time(fn, y, reps: int) -> list[float]:
    out = []
    for _ in range(reps):
        start = time.perf_counter()
        fn(y)
        out.append(time.perf_counter() - start)
    return out


def benchmark(m: int, reps: int = 3, seed: int = 0) -> list[dict]:
    """One row per method: best and mean wall-clock seconds over ``reps`` runs."""
    y = np.random.default_rng(seed).normal(size=1 << m)
    weyl_fast(y)  # warm caches (parity tables, index arrays)
    rows = []
    for name, fn in (("fast", weyl_fast), ("naive", weyl_naive)):
        t = _time(fn, y, reps)
        rows.append({"method": name, "m": m, "reps": reps, "best_s": min(t), "mean_s": float(np.mean(t))})
    return rows


def speedup(rows: list[dict]) -> float:
    best = {r["method"]: r["best_s"] for r in rows}
    return best["naive"] / best["fast"]
