"""Real signed subgroup of the binary Heisenberg-Weyl group.

Binary m-tuples are stored as Python ints. The written tuple
``(v_{m-1} ... v_1 v_0)`` encodes ``sum(v_i * 2**i)``, so bit ``m-1`` is the
coarsest scale and printing is MSB-first.

``D(a, b) = D(a, 0) D(0, b)`` acts on the canonical basis as
``D(a, b) e_v = (-1)^(b.v) e_(v xor a)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ResourceError, UsageError

DENSE_LIMIT = 8

_X = np.array([[0, 1], [1, 0]], dtype=np.int64)
_Z = np.array([[1, 0], [0, -1]], dtype=np.int64)


def parity(x: int) -> int:
    return x.bit_count() & 1


@lru_cache(maxsize=None)
def parity_table(m: int) -> np.ndarray:
    """``parity_table(m)[x] = popcount(x) mod 2`` for ``x < 2**m`` (read-only)."""
    t = (np.bitwise_count(np.arange(1 << m, dtype=np.uint32)) & 1).astype(np.int8)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=None)
def sign_table(m: int) -> np.ndarray:
    """``sign_table(m)[b, v] = (-1)^(b.v)`` as float64 (read-only)."""
    idx = np.arange(1 << m)
    t = 1.0 - 2.0 * parity_table(m)[idx[:, None] & idx[None, :]]
    t.setflags(write=False)
    return t


@dataclass(frozen=True, order=True)
class BitTuple:
    m: int
    value: int

    def __post_init__(self):
        if self.m < 1:
            raise UsageError(f"bit-width must be positive, got {self.m}")
        if not 0 <= self.value < (1 << self.m):
            raise UsageError(f"value {self.value} does not fit in {self.m} bits")

    @classmethod
    def parse(cls, bits: str) -> BitTuple:
        """Parse an MSB-first string such as ``"0010"`` or ``"(0 0 1 0)"``."""
        digits = "".join(ch for ch in bits if ch in "01")
        if not digits or any(ch not in "01() " for ch in bits):
            raise UsageError(f"not a binary tuple: {bits!r}")
        return cls(len(digits), int(digits, 2))

    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in reversed(range(self.m)))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return "(" + format(self.value, f"0{self.m}b") + ")"


def _check_width(u: BitTuple, v: BitTuple) -> None:
    if u.m != v.m:
        raise UsageError(f"bit-width mismatch: {u.m} vs {v.m}")


def bit_add(u: BitTuple, v: BitTuple) -> BitTuple:
    _check_width(u, v)
    return BitTuple(u.m, u.value ^ v.value)


def bit_dot(u: BitTuple, v: BitTuple) -> int:
    _check_width(u, v)
    return parity(u.value & v.value)


class CoeffIndex(NamedTuple):
    """Index ``(a, b)`` of a Weyl coefficient, both stored as ints."""

    a: int
    b: int

    @property
    def symmetric_type(self) -> int:
        """``a.b mod 2``; coefficients with value 1 vanish for symmetric input."""
        return parity(self.a & self.b)

    def flat(self, m: int) -> int:
        return (self.a << m) | self.b

    def label(self, m: int) -> str:
        return f"{BitTuple(m, self.a)},{BitTuple(m, self.b)}"


@dataclass(frozen=True)
class SignedPermOp:
    """Exact ``sign * D(a, b)``. ``a`` and ``b`` accept ints or BitTuples."""

    m: int
    a: BitTuple
    b: BitTuple
    sign: int = 1

    def __post_init__(self):
        a = self.a if isinstance(self.a, BitTuple) else BitTuple(self.m, int(self.a))
        b = self.b if isinstance(self.b, BitTuple) else BitTuple(self.m, int(self.b))
        if a.m != self.m or b.m != self.m:
            raise UsageError(f"operator width {self.m} does not match its indices")
        if self.sign not in (1, -1):
            raise UsageError(f"sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls, m: int) -> SignedPermOp:
        return cls(m, 0, 0)

    @property
    def index(self) -> CoeffIndex:
        return CoeffIndex(self.a.value, self.b.value)

    def __matmul__(self, other: SignedPermOp) -> SignedPermOp:
        return d_compose(self, other)

    def __str__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}D{self.a}{self.b}"


def d_apply(op: SignedPermOp, y) -> np.ndarray:
    """Apply ``op`` to ``y`` along its last axis (leading axes are batch axes)."""
    y = np.asarray(y)
    n = 1 << op.m
    if y.ndim == 0 or y.shape[-1] != n:
        raise UsageError(f"expected trailing length {n}, got shape {y.shape}")
    src = np.arange(n) ^ op.a.value
    # w[v ^ a] = sign * (-1)^(b.v) * y[v]  <=>  w[u] = sign * (-1)^(b.(u ^ a)) * y[u ^ a]
    signs = op.sign * (1 - 2 * parity_table(op.m)[src & op.b.value].astype(np.int64))
    return signs * y[..., src]


def d_compose(op1: SignedPermOp, op2: SignedPermOp) -> SignedPermOp:
    """Matrix product ``op1 @ op2``."""
    if op1.m != op2.m:
        raise UsageError(f"bit-width mismatch: {op1.m} vs {op2.m}")
    flip = parity(op2.a.value & op1.b.value)
    return SignedPermOp(
        op1.m,
        op1.a.value ^ op2.a.value,
        op1.b.value ^ op2.b.value,
        op1.sign * op2.sign * (-1 if flip else 1),
    )


def d_inverse(op: SignedPermOp) -> SignedPermOp:
    flip = parity(op.a.value & op.b.value)
    return SignedPermOp(op.m, op.a, op.b, -op.sign if flip else op.sign)


def d_materialize(op: SignedPermOp, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """Dense integer matrix of ``op`` built from Kronecker products of X and Z.

    Kept independent of :func:`d_apply` so the two can check each other.
    """
    if op.m > dense_limit:
        raise ResourceError(f"m={op.m} exceeds dense limit {dense_limit}")
    perm = np.ones((1, 1), dtype=np.int64)
    flips = np.ones((1, 1), dtype=np.int64)
    for a_i, b_i in zip(op.a.bits(), op.b.bits()):
        perm = np.kron(perm, _X if a_i else np.eye(2, dtype=np.int64))
        flips = np.kron(flips, _Z if b_i else np.eye(2, dtype=np.int64))
    return op.sign * (perm @ flips)


def enumerate_symmetric_indices(m: int) -> list[CoeffIndex]:
    """All ``(a, b)`` with ``a.b = 0``, a-major then b-minor."""
    if m < 1:
        raise UsageError(f"m must be >= 1, got {m}")
    n = 1 << m
    return [CoeffIndex(a, b) for a in range(n) for b in range(n) if not parity(a & b)]


@lru_cache(maxsize=None)
def symmetric_mask(m: int) -> np.ndarray:
    """Boolean ``(2**m, 2**m)`` mask, True where ``a.b = 0`` (read-only)."""
    idx = np.arange(1 << m)
    mask = parity_table(m)[idx[:, None] & idx[None, :]] == 0
    mask.setflags(write=False)
    return mask
