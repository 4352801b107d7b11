"""Binary PGM (P5) reading and writing."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ParseError, UsageError

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major intensities in [0, 1]; ``pixels.shape == (height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise UsageError(f"image must be a nonempty 2-D array, got shape {px.shape}")
        if px.min() < 0.0 or px.max() > 1.0:
            raise UsageError("intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _header_fields(buf: bytes, count: int, pos: int) -> tuple[list[int], list[int], int]:
    """``count`` decimal fields from ``pos``; returns values, start offsets and payload offset."""
    fields, starts = [], []
    while len(fields) < count:
        while pos < len(buf) and (buf[pos] in _WHITESPACE or buf[pos] == ord("#")):
            if buf[pos] == ord("#"):
                while pos < len(buf) and buf[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < len(buf) and buf[pos:pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise ParseError("expected a decimal header field", pos)
        fields.append(int(buf[start:pos]))
        starts.append(start)
    if pos >= len(buf) or buf[pos] not in _WHITESPACE:
        raise ParseError("header must end with a single whitespace byte", pos)
    return fields, starts, pos + 1


def parse_pgm(buf: bytes) -> GrayImage:
    if buf[:2] != b"P5":
        raise ParseError(f"unsupported magic {buf[:2]!r}; only binary P5 is read", 0)
    (width, height, maxval), starts, offset = _header_fields(buf, 3, 2)
    if width < 1 or height < 1:
        raise ParseError(f"bad dimensions {width}x{height}", starts[0])
    if not 1 <= maxval <= 65535:
        raise ParseError(f"maxval {maxval} outside [1, 65535]", starts[2])
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    need = width * height * dtype.itemsize
    if len(buf) - offset < need:
        raise ParseError(f"payload truncated: need {need} bytes, have {len(buf) - offset}", len(buf))
    raw = np.frombuffer(buf, dtype=dtype, count=width * height, offset=offset)
    if raw.max(initial=0) > maxval:
        raise ParseError(f"sample exceeds maxval {maxval}", offset)
    return GrayImage(raw.reshape(height, width).astype(np.float64) / maxval)


def load_pgm(path) -> GrayImage:
    return parse_pgm(Path(path).read_bytes())


def encode_pgm(img: GrayImage | np.ndarray, maxval: int = 255) -> bytes:
    px = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    if not 1 <= maxval <= 65535:
        raise UsageError(f"maxval {maxval} outside [1, 65535]")
    dtype = ">u2" if maxval > 255 else "u1"
    samples = np.rint(np.clip(px, 0.0, 1.0) * maxval).astype(dtype)
    header = f"P5\n{px.shape[1]} {px.shape[0]}\n{maxval}\n".encode()
    return header + samples.tobytes()


def save_pgm(path, img: GrayImage | np.ndarray, maxval: int = 255) -> None:
    Path(path).write_bytes(encode_pgm(img, maxval))
