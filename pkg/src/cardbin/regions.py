"""Connected components of non-white pixels and their text/non-text rules.

Components are found on horizontal runs of sub-255 pixels: runs on
adjacent rows that touch (including diagonally) are joined, so the result
is 8-connected. A component keeps its runs rather than a full-image label
raster, which keeps memory proportional to the ink, not the image.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import PipelineConfig
from .imageio import check_gray

_BAND_ROWS = 64
_COUNT_CHUNK = 1 << 13


class RegionClass(Enum):
    TEXT = "text"
    NOISE = "noise"
    HORIZONTAL_LINE = "hline"
    VERTICAL_LINE = "vline"
    NONTEXT = "nontext"


OVERLAY_LEVELS = {
    RegionClass.TEXT: 0,
    RegionClass.HORIZONTAL_LINE: 96,
    RegionClass.VERTICAL_LINE: 96,
    RegionClass.NOISE: 160,
    RegionClass.NONTEXT: 192,
}


@dataclass(eq=False)
class ConnectedComponent:
    label: int
    x: int
    y: int
    width: int
    height: int
    area: int
    g_min: int
    g_max: int
    fill_ratio_pct: int
    # (n, 3) int array of (row, start, end) with end exclusive, absolute coords
    runs: np.ndarray = field(repr=False)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        return self.x, self.y, self.width, self.height

    @property
    def midpoint(self) -> int:
        return (self.g_min + self.g_max) // 2

    def mask(self) -> np.ndarray:
        """Member pixels as a boolean array over the bounding box."""
        m = np.zeros((self.height, self.width), dtype=bool)
        for row, start, end in self.runs:
            m[row - self.y, start - self.x:end - self.x] = True
        return m

    def pixel_values(self, image: np.ndarray) -> np.ndarray:
        return np.concatenate([image[r, s:e] for r, s, e in self.runs])


def find_runs(image: np.ndarray) -> np.ndarray:
    """All maximal horizontal runs of pixels < 255, in raster order.

    Returns an ``(n, 3)`` int64 array of ``(row, start, end)``.
    """
    h, w = image.shape
    out = []
    for y0 in range(0, h, _BAND_ROWS):
        band = image[y0:y0 + _BAND_ROWS] < 255
        padded = np.zeros((band.shape[0], w + 2), dtype=np.int8)
        padded[:, 1:-1] = band
        d = np.diff(padded, axis=1)
        srow, scol = np.nonzero(d == 1)
        _, ecol = np.nonzero(d == -1)
        # nonzero is row-major, so starts and ends pair up in order
        out.append(np.column_stack([srow + y0, scol, ecol]))
    if not out:
        return np.zeros((0, 3), dtype=np.int64)
    return np.concatenate(out).astype(np.int64)


def label_runs(runs: np.ndarray, width: int) -> np.ndarray:
    """Component label per run, numbered by first appearance in raster order."""
    n = len(runs)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    stride = width + 2
    rows, starts, ends = runs[:, 0], runs[:, 1], runs[:, 2]
    start_key = rows * stride + starts
    end_key = rows * stride + ends
    # runs on row r-1 touching [s, e) under 8-connectivity: end >= s and start <= e
    prev = (rows - 1) * stride
    lo = np.searchsorted(end_key, prev + starts, side="left")
    hi = np.searchsorted(start_key, prev + ends, side="right")
    counts = np.clip(hi - lo, 0, None)
    src = np.repeat(np.arange(n), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    dst = np.repeat(lo, counts) + offsets
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    # renumber so label order follows each component's first run
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    return remap[labels]


def _run_reduce(ufunc, flat: np.ndarray, flat_starts: np.ndarray, flat_ends: np.ndarray) -> np.ndarray:
    idx = np.empty(2 * len(flat_starts), dtype=np.int64)
    idx[0::2] = flat_starts
    idx[1::2] = flat_ends
    if idx[-1] == len(flat):
        idx = idx[:-1]
    return ufunc.reduceat(flat, idx)[0::2]


def _count_below(flat: np.ndarray, flat_starts: np.ndarray, lengths: np.ndarray,
                 thresholds: np.ndarray) -> np.ndarray:
    """Per-run count of pixels strictly below that run's threshold."""
    out = np.empty(len(lengths), dtype=np.int64)
    ends = np.cumsum(lengths)
    i = 0
    while i < len(lengths):
        # chunk runs so the gathered pixel indices stay small
        done = ends[i - 1] if i else 0
        j = max(i + 1, int(np.searchsorted(ends, done + _COUNT_CHUNK, side="right")))
        lens = lengths[i:j]
        base = np.repeat(flat_starts[i:j] - (np.cumsum(lens) - lens), lens)
        pos = np.arange(lens.sum()) + base
        below = flat[pos] < np.repeat(thresholds[i:j], lens)
        out[i:j] = np.add.reduceat(below.astype(np.int32), np.cumsum(lens) - lens)
        i = j
    return out


def extract_components(image: np.ndarray) -> list[ConnectedComponent]:
    """Maximal 8-connected sets of pixels with intensity < 255."""
    check_gray(image)
    h, w = image.shape
    runs = find_runs(image)
    if len(runs) == 0:
        return []
    labels = label_runs(runs, w)
    k = int(labels.max()) + 1

    flat = np.ascontiguousarray(image).reshape(-1)
    rows, starts, ends = runs[:, 0], runs[:, 1], runs[:, 2]
    lengths = ends - starts
    flat_starts = rows * w + starts
    run_min = _run_reduce(np.minimum, flat, flat_starts, flat_starts + lengths)
    run_max = _run_reduce(np.maximum, flat, flat_starts, flat_starts + lengths)

    g_min = np.full(k, 255, dtype=np.int64)
    g_max = np.zeros(k, dtype=np.int64)
    np.minimum.at(g_min, labels, run_min)
    np.maximum.at(g_max, labels, run_max)
    area = np.bincount(labels, weights=lengths, minlength=k).astype(np.int64)
    x0 = np.full(k, w, dtype=np.int64)
    x1 = np.zeros(k, dtype=np.int64)
    y1 = np.zeros(k, dtype=np.int64)
    np.minimum.at(x0, labels, starts)
    np.maximum.at(x1, labels, ends)
    np.maximum.at(y1, labels, rows)
    y0 = np.full(k, h, dtype=np.int64)
    np.minimum.at(y0, labels, rows)

    midpoint = (g_min + g_max) // 2
    below = np.bincount(labels, weights=_count_below(flat, flat_starts, lengths, midpoint[labels]),
                        minlength=k).astype(np.int64)
    fill = (100 * below + area // 2) // area

    order = np.argsort(labels, kind="stable")
    bounds = np.cumsum(np.bincount(labels, minlength=k))[:-1]
    groups = np.split(runs[order], bounds)
    return [
        ConnectedComponent(
            label=i, x=int(x0[i]), y=int(y0[i]), width=int(x1[i] - x0[i]),
            height=int(y1[i] - y0[i] + 1), area=int(area[i]), g_min=int(g_min[i]),
            g_max=int(g_max[i]), fill_ratio_pct=int(fill[i]), runs=groups[i],
        )
        for i in range(k)
    ]


def component_fill_ratio(cc: ConnectedComponent, image: np.ndarray) -> int:
    """Percentage of member pixels darker than the component's midpoint, rounded."""
    values = cc.pixel_values(image).astype(np.int64)
    below = int(np.count_nonzero(values < cc.midpoint))
    return (100 * below + cc.area // 2) // cc.area


def classify_component(cc: ConnectedComponent, image_w: int, image_h: int,
                       config: PipelineConfig | None = None) -> RegionClass:
    """Apply the line, noise and text rules in a fixed order."""
    config = config or PipelineConfig()
    th = config.thresholds(image_w, image_h)
    w, h = cc.width, cc.height
    if h < th.b_th and w > th.l_th:
        return RegionClass.HORIZONTAL_LINE
    if w < th.b_th and h > th.l_th:
        return RegionClass.VERTICAL_LINE
    if h < th.h_th or w < th.w_th or cc.area < th.a_th:
        return RegionClass.NOISE
    # r_min < w/h < r_max, compared as exact rationals
    lo, hi = config.r_min_ratio, config.r_max_ratio
    aspect_ok = lo.numerator * h < lo.denominator * w and hi.denominator * w < hi.numerator * h
    if aspect_ok and config.ra_min < cc.fill_ratio_pct < config.ra_max:
        return RegionClass.TEXT
    return RegionClass.NONTEXT


def classify_components(components, image_w: int, image_h: int,
                        config: PipelineConfig | None = None) -> list[RegionClass]:
    return [classify_component(cc, image_w, image_h, config) for cc in components]


def remove_nontext(image: np.ndarray, components, classes, *, inplace: bool = False):
    """White out every non-text component.

    Returns ``(image, text_components)``.
    """
    components, classes = list(components), list(classes)
    if len(components) != len(classes):
        raise ValueError("components and classes must align")
    out = image if inplace else image.copy()
    text = []
    for cc, cls in zip(components, classes):
        if cls is RegionClass.TEXT:
            text.append(cc)
            continue
        for r, s, e in cc.runs:
            out[r, s:e] = 255
    return out, text


def class_overlay(shape, components, classes) -> np.ndarray:
    """Gray rendering with one intensity per class, background 255."""
    out = np.full(shape, 255, dtype=np.uint8)
    for cc, cls in zip(components, classes):
        level = OVERLAY_LEVELS[cls]
        for r, s, e in cc.runs:
            out[r, s:e] = level
    return out
