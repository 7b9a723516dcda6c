"""Block-level background elimination.

The image is tiled into ``max(1, W // 64)`` x 2 blocks. A block is
background when its darkest pixel is brighter than ``t_min`` and its
intensity spread is below the dynamic tolerance ``T_sigma``; background
blocks are painted white (255).
"""
from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

import numpy as np

from .config import PipelineConfig
from .imageio import check_gray

# rows of blocks processed at once; bounds the per-pixel temporaries
_BAND_BLOCK_ROWS = 8


class Block(NamedTuple):
    x: int
    y: int
    w: int
    h: int


class BlockStats(NamedTuple):
    g_min: int
    g_max: int
    spread: int


class BlockClass(Enum):
    BACKGROUND = "background"
    INFORMATION = "information"


def _edges(length: int, step: int) -> np.ndarray:
    return np.arange(0, length, step)


def split_blocks(width: int, height: int, config: PipelineConfig | None = None) -> list[Block]:
    """Tile a ``width`` x ``height`` image; right and bottom blocks are clipped."""
    config = config or PipelineConfig()
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be >= 1")
    bw = config.block_width(width)
    bh = config.block_height
    return [
        Block(x, y, min(bw, width - x), min(bh, height - y))
        for y in range(0, height, bh)
        for x in range(0, width, bw)
    ]


def _spread(total_abs_or_sq: int, n: int, mode: str) -> int:
    if mode == "mad":
        return total_abs_or_sq // n
    var = total_abs_or_sq // n
    return var if mode == "variance" else math.isqrt(var)


def block_stats(image: np.ndarray, block: Block, config: PipelineConfig | None = None) -> BlockStats:
    config = config or PipelineConfig()
    pixels = [int(v) for v in image[block.y:block.y + block.h, block.x:block.x + block.w].ravel()]
    n = len(pixels)
    mu = sum(pixels) // n
    if config.variance_mode == "mad":
        spread = sum(abs(p - mu) for p in pixels) // n
    else:
        # exact population variance, floored: (n*sum(x^2) - sum(x)^2) / n^2
        s, s2 = sum(pixels), sum(p * p for p in pixels)
        var = (n * s2 - s * s) // (n * n)
        spread = var if config.variance_mode == "variance" else math.isqrt(var)
    return BlockStats(min(pixels), max(pixels), spread)


def dynamic_threshold(g_min, config: PipelineConfig | None = None):
    """Tolerance ``T_sigma = t_fixed + T_var`` for a block's minimum intensity.

    ``T_var = ((g_min - t_min) - min(t_fixed, g_min - t_min)) * 2``, evaluated
    in signed integers. Accepts scalars or integer arrays.
    """
    config = config or PipelineConfig()
    if isinstance(g_min, np.ndarray):
        excess = g_min.astype(np.int32) - config.t_min
        return config.t_fixed + (excess - np.minimum(config.t_fixed, excess)) * 2
    excess = int(g_min) - config.t_min
    return config.t_fixed + (excess - min(config.t_fixed, excess)) * 2


def classify_block(stats: BlockStats, config: PipelineConfig | None = None) -> BlockClass:
    config = config or PipelineConfig()
    if stats.g_min > config.t_min and stats.spread < dynamic_threshold(stats.g_min, config):
        return BlockClass.BACKGROUND
    return BlockClass.INFORMATION


def _band_background(band: np.ndarray, bw: int, bh: int, mode: str) -> np.ndarray:
    """Per-block ``g_min`` and spread for one horizontal band of block rows."""
    h, w = band.shape
    rows, cols = _edges(h, bh), _edges(w, bw)
    heights = np.diff(np.append(rows, h))
    widths = np.diff(np.append(cols, w))
    counts = np.outer(heights, widths)

    g_min = np.minimum.reduceat(np.minimum.reduceat(band, rows, axis=0), cols, axis=1)
    wide = band.astype(np.int32)
    sums = np.add.reduceat(np.add.reduceat(wide, rows, axis=0), cols, axis=1)
    if mode == "mad":
        mu = sums // counts
        dev = np.abs(wide - np.repeat(np.repeat(mu, heights, axis=0), widths, axis=1))
        spread = np.add.reduceat(np.add.reduceat(dev, rows, axis=0), cols, axis=1) // counts
    else:
        sq = np.add.reduceat(np.add.reduceat(wide * wide, rows, axis=0), cols, axis=1)
        s, s2, n = sums.astype(np.int64), sq.astype(np.int64), counts.astype(np.int64)
        spread = (n * s2 - s * s) // (n * n)
        if mode == "stddev":
            # exact for the small integers involved (variance <= 255**2)
            spread = np.floor(np.sqrt(spread)).astype(np.int64)
    return g_min, spread, heights, widths


def background_mask(image: np.ndarray, config: PipelineConfig | None = None) -> np.ndarray:
    """Per-block background flags, shape ``(ceil(H/bh), ceil(W/bw))``."""
    config = config or PipelineConfig()
    check_gray(image)
    h, w = image.shape
    bw, bh = config.block_width(w), config.block_height
    band_rows = bh * _BAND_BLOCK_ROWS
    out = []
    for y0 in range(0, h, band_rows):
        g_min, spread, _, _ = _band_background(image[y0:y0 + band_rows], bw, bh, config.variance_mode)
        out.append((g_min > config.t_min) & (spread < dynamic_threshold(g_min, config)))
    return np.concatenate(out, axis=0)


def eliminate_background(image: np.ndarray, config: PipelineConfig | None = None,
                         *, inplace: bool = False) -> np.ndarray:
    """Paint every background block white.

    Returns a new image unless ``inplace`` is set, in which case ``image`` is
    modified and returned.
    """
    config = config or PipelineConfig()
    check_gray(image)
    out = image if inplace else image.copy()
    h, w = out.shape
    bw, bh = config.block_width(w), config.block_height
    band_rows = bh * _BAND_BLOCK_ROWS
    for y0 in range(0, h, band_rows):
        band = out[y0:y0 + band_rows]
        g_min, spread, heights, widths = _band_background(band, bw, bh, config.variance_mode)
        flags = (g_min > config.t_min) & (spread < dynamic_threshold(g_min, config))
        if flags.any():
            pixel_flags = np.repeat(np.repeat(flags, heights, axis=0), widths, axis=1)
            band[pixel_flags] = 255
    return out
