"""Midpoint thresholding with 8-neighbour promotion.

Phase 1 marks every pixel darker than ``(g_min + g_max) // 2``. Phase 2
promotes an unmarked interior pixel when at least five of its eight
neighbours were marked in phase 1. Border pixels only take part in phase 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MIN_PROMOTING_NEIGHBOURS = 5

_OFFSETS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


@dataclass
class TextPatch:
    """A deskewed text region ready for binarization."""

    x: int
    y: int
    pixels: np.ndarray
    g_min: int
    g_max: int


def neighbour_counts(mask: np.ndarray) -> np.ndarray:
    """Number of marked 8-neighbours for each interior pixel (0 on the border)."""
    h, w = mask.shape
    counts = np.zeros((h, w), dtype=np.uint8)
    if h < 3 or w < 3:
        return counts
    m = mask.astype(np.uint8)
    inner = counts[1:-1, 1:-1]
    for dy, dx in _OFFSETS:
        inner += m[1 + dy:h - 1 + dy, 1 + dx:w - 1 + dx]
    return counts


def binarize_region(patch: np.ndarray, g_min: int, g_max: int,
                    visit_order: Sequence[int] | None = None) -> np.ndarray:
    """Binarize one region; returns a uint8 0/1 array of the patch's shape.

    With ``visit_order`` (a permutation of flat pixel indices) both phases
    run as explicit per-pixel loops in that order instead of vectorized.
    The result never depends on the order.
    """
    threshold = (int(g_min) + int(g_max)) // 2
    if visit_order is None:
        first = patch < threshold
        out = first.astype(np.uint8)
        out[neighbour_counts(first) >= MIN_PROMOTING_NEIGHBOURS] = 1
        return out

    h, w = patch.shape
    order = [int(i) for i in visit_order]
    if sorted(order) != list(range(h * w)):
        raise ValueError("visit_order must be a permutation of the pixel indices")
    values = patch.ravel().tolist()
    first = [False] * (h * w)
    for i in order:
        first[i] = values[i] < threshold
    out = [1 if f else 0 for f in first]
    neighbours = [dy * w + dx for dy, dx in _OFFSETS]
    for i in order:
        y, x = divmod(i, w)
        if first[i] or y == 0 or x == 0 or y == h - 1 or x == w - 1:
            continue
        if sum(first[i + d] for d in neighbours) >= MIN_PROMOTING_NEIGHBOURS:
            out[i] = 1
    return np.array(out, dtype=np.uint8).reshape(h, w)


def binarize_card(patches: Iterable[TextPatch], shape) -> np.ndarray:
    """Paste binarized patches into an all-background image, OR-ing overlaps."""
    h, w = shape
    out = np.zeros((h, w), dtype=np.uint8)
    for p in patches:
        ph, pw = p.pixels.shape
        # clip to the canvas; patches normally lie fully inside
        y0, x0 = max(p.y, 0), max(p.x, 0)
        y1, x1 = min(p.y + ph, h), min(p.x + pw, w)
        if y0 >= y1 or x0 >= x1:
            continue
        bits = binarize_region(p.pixels, p.g_min, p.g_max)
        out[y0:y1, x0:x1] |= bits[y0 - p.y:y1 - p.y, x0 - p.x:x1 - p.x]
    return out
