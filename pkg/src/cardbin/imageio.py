"""Portable anymap (PGM/PPM/PBM) codec.

Gray images are ``(height, width)`` uint8 arrays, 0 = black, 255 = white.
Binary images are ``(height, width)`` uint8 arrays holding 0/1, 1 = ink.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np


class PNMError(ValueError):
    """Malformed or unsupported anymap data."""


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def rgb_to_gray(r, g, b):
    """Integer luma ``(299 r + 587 g + 114 b) // 1000``.

    Works on scalars and on integer arrays alike.
    """
    if isinstance(r, np.ndarray) or isinstance(g, np.ndarray) or isinstance(b, np.ndarray):
        r, g, b = (np.asarray(c, dtype=np.int32) for c in (r, g, b))
        return ((299 * r + 587 * g + 114 * b) // 1000).astype(np.uint8)
    return (299 * r + 587 * g + 114 * b) // 1000


def check_gray(image: np.ndarray) -> np.ndarray:
    if not isinstance(image, np.ndarray) or image.ndim != 2:
        raise ValueError("gray image must be a 2-D array")
    if image.dtype != np.uint8:
        raise ValueError(f"gray image must be uint8, got {image.dtype}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise ValueError("gray image must be at least 1x1")
    return image


def _read_header(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PNMError("truncated header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def _header_ints(tokens: list[bytes]) -> list[int]:
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise PNMError(f"non-numeric header field in {tokens!r}") from None
    if any(v < 1 for v in values):
        raise PNMError("header fields must be positive")
    return values


def _rescale(values: np.ndarray, maxval: int) -> np.ndarray:
    if np.any(values > maxval):
        raise PNMError("sample exceeds maxval")
    if maxval == 255:
        return values.astype(np.uint8)
    v = values.astype(np.int64)
    return ((v * 255 + maxval // 2) // maxval).astype(np.uint8)


def decode_pnm(data: bytes) -> np.ndarray:
    """Decode P2/P5 graymaps and P6 pixmaps into a gray image."""
    magic = data[:2]
    if magic not in (b"P2", b"P5", b"P6"):
        raise PNMError(f"unsupported magic number {magic!r}")
    tokens, pos = _read_header(data, 4)
    width, height, maxval = _header_ints(tokens[1:])
    if maxval > 65535:
        raise PNMError(f"maxval {maxval} exceeds 65535")
    channels = 3 if magic == b"P6" else 1
    n = width * height * channels

    if magic == b"P2":
        fields = data[pos:].split()
        if len(fields) < n:
            raise PNMError(f"expected {n} samples, found {len(fields)}")
        try:
            samples = np.array([int(f) for f in fields[:n]], dtype=np.int64)
        except ValueError:
            raise PNMError("non-numeric sample in ASCII graymap") from None
        if np.any(samples < 0):
            raise PNMError("negative sample")
    else:
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise PNMError("missing whitespace after header")
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        if len(data) - pos < n * dtype.itemsize:
            raise PNMError("truncated raster")
        samples = np.frombuffer(data, dtype=dtype, count=n, offset=pos)

    samples = _rescale(samples, maxval)
    if channels == 3:
        rgb = samples.reshape(height, width, 3)
        return rgb_to_gray(rgb[..., 0], rgb[..., 1], rgb[..., 2])
    return samples.reshape(height, width).copy()


def load_image(path) -> np.ndarray:
    return decode_pnm(Path(path).read_bytes())


def encode_pgm(image: np.ndarray) -> bytes:
    check_gray(image)
    h, w = image.shape
    return b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(image).tobytes()


def encode_pbm(image: np.ndarray) -> bytes:
    if image.ndim != 2:
        raise ValueError("binary image must be a 2-D array")
    h, w = image.shape
    # MSB first, rows padded to whole bytes
    packed = np.packbits(np.asarray(image) != 0, axis=1)
    return b"P4\n%d %d\n" % (w, h) + packed.tobytes()


def decode_pbm(data: bytes) -> np.ndarray:
    """Decode a raw P4 bitmap (used by tests and the CLI round-trip)."""
    if data[:2] != b"P4":
        raise PNMError(f"not a raw bitmap: {data[:2]!r}")
    tokens, pos = _read_header(data, 3)
    width, height = _header_ints(tokens[1:])
    pos += 1
    row_bytes = (width + 7) // 8
    raw = np.frombuffer(data, dtype=np.uint8, count=row_bytes * height, offset=pos)
    bits = np.unpackbits(raw.reshape(height, row_bytes), axis=1)
    return bits[:, :width].copy()


def save_gray(image: np.ndarray, path) -> None:
    Path(path).write_bytes(encode_pgm(image))


def save_binary(image: np.ndarray, path) -> None:
    Path(path).write_bytes(encode_pbm(image))


def resize_nearest(image: np.ndarray, width: int, height: int) -> np.ndarray:
    """Nearest-neighbour resample to ``width`` x ``height``."""
    h, w = image.shape
    rows = np.arange(height) * h // height
    cols = np.arange(width) * w // width
    return image[rows[:, None], cols[None, :]]
