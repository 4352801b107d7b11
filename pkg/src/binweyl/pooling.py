"""Equivalence-class pooling of Weyl coefficient magnitudes.

An ``N x N`` image (``N = 2**r``) is vectorized column by column, so a pixel
index ``v = (v1 v2)`` has the column in its high ``r`` bits and the row in
its low ``r`` bits. Conjugating ``D(a, b)`` by a rotation or a cyclic
translation of the image yields ``+-D(a', b')``. The maps below give
``(a, b) -> (a', b')`` and the sign. Averaging ``|omega|`` over classes that
are closed under those maps gives features invariant to the image motions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import IntegrityError, UsageError
from .hw_group import CoeffIndex, parity
from .transform import WeylSpectrum, weyl_fast_grid

IntMap = Callable[[int], int]

# Expected orbits for m=4 under rotation plus vertical/horizontal translation,
# written MSB-first.
REFERENCE_A_CLASSES_M4 = [
    ["0000"],
    ["1010"],
    ["0010", "1000"],
    ["0001", "0011", "0100", "1100"],
    ["0101", "0111", "1101", "1111"],
    ["0110", "1001", "1011", "1110"],
]
REFERENCE_B_CLASSES_M4 = [
    ["0000"],
    ["0101"],
    ["0001", "0100"],
    ["0010", "0011", "1000", "1100"],
    ["1010", "1011", "1110", "1111"],
    ["1001", "0110", "0111", "1101"],
]


@dataclass(frozen=True)
class IndexMap:
    """``D(a, b) -> sign(a, b) * D(a_map(a), b_map(b))`` under conjugation."""

    name: str
    m: int
    a_map: IntMap
    b_map: IntMap
    sign: Callable[[int, int], int]

    def __call__(self, a: int, b: int) -> tuple[int, int, int]:
        return self.a_map(a), self.b_map(b), self.sign(a, b)


def _half_bits(m: int, min_r: int = 1) -> int:
    if m % 2 or m // 2 < min_r:
        raise UsageError(f"map needs even m with m/2 >= {min_r}, got m={m}")
    return m // 2


def _swap_halves(x: int, r: int) -> int:
    low = (1 << r) - 1
    return ((x & low) << r) | (x >> r)


def rot90_map(m: int) -> IndexMap:
    """90 degree clockwise rotation: swap halves, sign ``(-1)^|b1|``."""
    r = _half_bits(m)
    return IndexMap(
        "rot90",
        m,
        lambda a: _swap_halves(a, r),
        lambda b: _swap_halves(b, r),
        lambda a, b: -1 if parity(b >> r) else 1,
    )


def vtrans_map(m: int) -> IndexMap:
    """Cyclic vertical translation by N/4 rows.

    With ``a = (a1, j, k, a2)`` and ``b = (b1, l, mm, b2)``: ``j -> j + k``,
    ``mm -> l + mm``, sign ``(-1)^mm``.
    """
    r = _half_bits(m, min_r=2)
    j_bit = r - 1  # also l
    k_bit = r - 2  # also mm
    return IndexMap(
        "vtrans",
        m,
        lambda a: a ^ (((a >> k_bit) & 1) << j_bit),
        lambda b: b ^ (((b >> j_bit) & 1) << k_bit),
        lambda a, b: -1 if (b >> k_bit) & 1 else 1,
    )


def htrans_map(m: int) -> IndexMap:
    """Cyclic horizontal translation by N/4 columns (transpose-conjugated vtrans)."""
    r = _half_bits(m, min_r=2)
    v = vtrans_map(m)
    return IndexMap(
        "htrans",
        m,
        lambda a: _swap_halves(v.a_map(_swap_halves(a, r)), r),
        lambda b: _swap_halves(v.b_map(_swap_halves(b, r)), r),
        lambda a, b: v.sign(_swap_halves(a, r), _swap_halves(b, r)),
    )


def default_generators(m: int) -> list[IndexMap]:
    return [rot90_map(m), vtrans_map(m), htrans_map(m)]


def _check_bijective(f: IntMap, m: int, label: str) -> None:
    image = {f(x) for x in range(1 << m)}
    if image != set(range(1 << m)):
        raise IntegrityError(f"{label} is not a bijection on {m}-bit tuples")


def _orbits(m: int, maps: Sequence[IntMap]) -> list[list[int]]:
    parent = list(range(1 << m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in maps:
        for x in range(1 << m):
            rx, ry = find(x), find(f(x))
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    groups: dict[int, list[int]] = {}
    for x in range(1 << m):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values(), key=lambda g: g[0])


@dataclass(frozen=True, eq=False)
class ClassPartition:
    """Product partition ``(a-orbit) x (b-orbit)`` of all ``4**m`` indices."""

    m: int
    a_classes: list[list[int]]
    b_classes: list[list[int]]
    classes: list[list[CoeffIndex]]
    retained: list[bool]
    class_of: dict[CoeffIndex, int] = field(repr=False)

    @property
    def retained_ids(self) -> list[int]:
        return [i for i, keep in enumerate(self.retained) if keep]

    @cached_property
    def partition_id(self) -> str:
        return _partition_hash(self)

    @cached_property
    def _weight_cache(self) -> dict[bool, np.ndarray]:
        return {}

    def weights(self, include_structural_zeros: bool = False) -> np.ndarray:
        """``(n_retained, 4**m)`` averaging matrix over flat coefficient order."""
        cache = self._weight_cache
        if include_structural_zeros not in cache:
            W = _weights(self, include_structural_zeros)
            W.setflags(write=False)
            cache[include_structural_zeros] = W
        return cache[include_structural_zeros]

    def to_json(self) -> dict:
        def fmt(x: int) -> str:
            return format(x, f"0{self.m}b")

        return {
            "schema": 1,
            "m": self.m,
            "partition_id": self.partition_id,
            "a_classes": [[fmt(x) for x in c] for c in self.a_classes],
            "b_classes": [[fmt(x) for x in c] for c in self.b_classes],
            "n_classes": len(self.classes),
            "n_retained": sum(self.retained),
            "classes": [
                {
                    "id": i,
                    "retained": keep,
                    "all_structural_zero": all(ix.symmetric_type for ix in members),
                    "members": [[fmt(ix.a), fmt(ix.b)] for ix in members],
                }
                for i, (members, keep) in enumerate(zip(self.classes, self.retained))
            ],
        }


def build_partition(m: int, generators: Sequence[IndexMap]) -> ClassPartition:
    for g in generators:
        if g.m != m:
            raise UsageError(f"generator {g.name} has m={g.m}, expected {m}")
        _check_bijective(g.a_map, m, f"{g.name}.a_map")
        _check_bijective(g.b_map, m, f"{g.name}.b_map")
    a_classes = _orbits(m, [g.a_map for g in generators])
    b_classes = _orbits(m, [g.b_map for g in generators])
    products = [
        [CoeffIndex(a, b) for a in ac for b in bc] for ac in a_classes for bc in b_classes
    ]
    products.sort(key=lambda c: min(c))
    retained = [
        not all(ix.symmetric_type for ix in c) and not all(ix.a == 0 for ix in c)
        for c in products
    ]
    class_of = {ix: i for i, c in enumerate(products) for ix in c}
    return ClassPartition(m, a_classes, b_classes, products, retained, class_of)


@lru_cache(maxsize=None)
def default_partition(m: int = 4) -> ClassPartition:
    return build_partition(m, default_generators(m))


def _partition_hash(p: ClassPartition) -> str:
    payload = json.dumps(
        {
            "m": p.m,
            "classes": [[list(ix) for ix in c] for c in p.classes],
            "retained": p.retained,
        },
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _weights(p: ClassPartition, include_structural_zeros: bool) -> np.ndarray:
    ids = p.retained_ids
    W = np.zeros((len(ids), 1 << (2 * p.m)))
    for row, cid in enumerate(ids):
        members = [
            ix for ix in p.classes[cid] if include_structural_zeros or not ix.symmetric_type
        ]
        for ix in members:
            W[row, ix.flat(p.m)] = 1.0 / len(members)
    return W


@dataclass(frozen=True, eq=False)
class Descriptor:
    values: np.ndarray
    partition_id: str

    def __len__(self) -> int:
        return len(self.values)


def pooled_values(grids, p: ClassPartition, include_structural_zeros: bool = False) -> np.ndarray:
    """Class means of ``|omega|`` for a batch of ``(..., 2**m, 2**m)`` grids."""
    grids = np.asarray(grids, dtype=np.float64)
    n = 1 << p.m
    if grids.shape[-2:] != (n, n):
        raise UsageError(f"grid shape {grids.shape[-2:]} does not match m={p.m}")
    flat = np.abs(grids.reshape(*grids.shape[:-2], n * n))
    return flat @ p.weights(include_structural_zeros).T


def pooled_descriptor(
    s: WeylSpectrum, p: ClassPartition, include_structural_zeros: bool = False
) -> Descriptor:
    if s.m != p.m:
        raise UsageError(f"spectrum m={s.m} does not match partition m={p.m}")
    return Descriptor(pooled_values(s.grid, p, include_structural_zeros), p.partition_id)


def vectorize_columnwise(tiles: np.ndarray) -> np.ndarray:
    """``(..., N, N)`` tiles to ``(..., N*N)`` signals, ``y[c*N + r] = tile[r, c]``."""
    tiles = np.asarray(tiles)
    return np.swapaxes(tiles, -1, -2).reshape(*tiles.shape[:-2], -1)


def split_subpatches(patches: np.ndarray, side: int) -> np.ndarray:
    """``(..., S, S)`` to ``(..., (S/side)**2, side, side)``, tiles in row-major order."""
    patches = np.asarray(patches, dtype=np.float64)
    S = patches.shape[-1]
    if patches.ndim < 2 or patches.shape[-2] != S or S % side:
        raise UsageError(f"patch shape {patches.shape[-2:]} is not square in {side}-pixel tiles")
    k = S // side
    t = patches.reshape(*patches.shape[:-2], k, side, k, side)
    t = np.moveaxis(t, -3, -2)  # (..., row_tile, col_tile, side, side)
    return t.reshape(*patches.shape[:-2], k * k, side, side)


def patch_descriptors(
    patches, p: ClassPartition | None = None, include_structural_zeros: bool = False
) -> np.ndarray:
    """Batched descriptors: ``(..., S, S)`` patches to ``(..., n_retained)``."""
    p = p or default_partition()
    side = 1 << (p.m // 2)
    if p.m % 2:
        raise UsageError("patch descriptors need an even-m partition")
    tiles = split_subpatches(patches, side)
    grids = weyl_fast_grid(vectorize_columnwise(tiles))
    return pooled_values(grids, p, include_structural_zeros).mean(axis=-2)


def patch_descriptor(patch, p: ClassPartition | None = None, **kwargs) -> Descriptor:
    p = p or default_partition()
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim != 2 or patch.shape != (16, 16):
        raise UsageError(f"expected a 16x16 patch, got shape {patch.shape}")
    return Descriptor(patch_descriptors(patch, p, **kwargs), p.partition_id)
