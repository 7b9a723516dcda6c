"""Per-region skew estimation from gray-shade profiles, and deskewing.

Angles are radians; positive means the text rises from left to right as
seen on screen (image rows grow downward).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np

from .config import PipelineConfig

_ROTATE_CHUNK = 4096


class EmptyProfile(ValueError):
    """No column of the region qualified for the profile."""


class DegenerateProfile(ValueError):
    """Fewer than three profile entries; no angle can be measured."""


class Side(Enum):
    BOTTOM = "bottom"
    TOP = "top"


class SkewSource(Enum):
    BOTTOM = "bottom"
    TOP = "top"
    SMALLER_OF_BOTH = "smaller"
    NONE = "none"


@dataclass(frozen=True)
class Profile:
    columns: np.ndarray  # absolute x, strictly increasing
    heights: np.ndarray
    side: Side

    @property
    def n(self) -> int:
        return len(self.heights)

    def __post_init__(self):
        if len(self.columns) != len(self.heights):
            raise ValueError("columns and heights must have equal length")


class ProfileStats(NamedTuple):
    mu: int
    tau: int


Angles = tuple[float, float, float]


@dataclass(frozen=True)
class SkewEstimate:
    angle: float
    source: SkewSource
    bottom: Optional[Angles] = None
    top: Optional[Angles] = None

    @property
    def alpha(self) -> Optional[float]:
        return self.bottom[0] if self.bottom else None

    @property
    def beta(self) -> Optional[float]:
        return self.bottom[1] if self.bottom else None

    @property
    def gamma(self) -> Optional[float]:
        return self.bottom[2] if self.bottom else None


def compute_profile(image: np.ndarray, bbox, side: Side = Side.BOTTOM,
                    config: PipelineConfig | None = None, mask: np.ndarray | None = None) -> Profile:
    """Per-column distance from the box edge to the first non-white pixel.

    ``bbox`` is ``(x, y, w, h)``. If ``mask`` (shape ``(h, w)``) is given,
    only pixels inside it count as shade. Columns whose shade run, starting
    at that first pixel, is shorter than ``min_shade_extent`` pixels or than
    ``min_shade_pct`` percent of the median run are dropped.
    """
    config = config or PipelineConfig()
    x, y, w, h = bbox
    shade = image[y:y + h, x:x + w] < 255
    if mask is not None:
        shade = shade & mask
    if side is Side.BOTTOM:
        shade = shade[::-1]
    has = shade.any(axis=0)
    first = shade.argmax(axis=0)
    rows = np.arange(h)[:, None]
    gap = ~shade & (rows > first)
    run_end = np.where(gap.any(axis=0), gap.argmax(axis=0), h)
    run = run_end - first
    keep = has & (run >= config.min_shade_extent)
    if keep.any() and config.min_shade_pct:
        # short runs relative to the region's typical column are end caps or slivers
        typical = int(np.median(run[keep]))
        keep &= run * 100 >= config.min_shade_pct * typical
    if not keep.any():
        raise EmptyProfile(f"no qualifying column in region {tuple(bbox)}")
    cols = np.nonzero(keep)[0]
    return Profile(columns=cols + x, heights=first[cols].astype(np.int64), side=side)


def profile_stats(profile: Profile) -> ProfileStats:
    """Integer mean height and integer mean absolute deviation."""
    n = profile.n
    if n < 1:
        raise EmptyProfile("empty profile")
    heights = [int(v) for v in profile.heights]
    mu = sum(heights) // n
    tau = sum(abs(mu - v) for v in heights) // n
    return ProfileStats(mu, tau)


def filter_profile(profile: Profile, stats: ProfileStats | None = None) -> Profile:
    """Keep entries whose height is within ``tau`` of ``mu`` (inclusive)."""
    stats = stats or profile_stats(profile)
    keep = np.abs(profile.heights - stats.mu) <= stats.tau
    if not keep.any():
        raise EmptyProfile("no entry within the deviation band")
    return Profile(profile.columns[keep], profile.heights[keep], profile.side)


def three_point_angles(profile: Profile) -> Angles:
    """Angles of the left-right, left-middle and middle-right chords.

    Heights of a top profile grow downward, so their slopes are negated to
    keep one sign convention for both sides.
    """
    n = profile.n
    if n < 3:
        raise DegenerateProfile(f"need at least 3 entries, got {n}")
    c, hts = profile.columns, profile.heights
    c1, c2, c3 = int(c[0]), int(c[-1]), int(c[n // 2])
    h1, h2, h3 = int(hts[0]), int(hts[-1]), int(hts[n // 2])
    sign = -1 if profile.side is Side.TOP else 1
    alpha = math.atan(sign * (h2 - h1) / (c2 - c1))
    beta = math.atan(sign * (h3 - h1) / (c3 - c1))
    gamma = math.atan(sign * (h2 - h3) / (c2 - c3))
    return alpha, beta, gamma


def _agree(angles: Angles, epsilon: float) -> bool:
    a, b, g = angles
    return max(abs(a - b), abs(a - g), abs(b - g)) <= epsilon


def _mean(angles: Angles) -> float:
    return sum(angles) / 3


def choose_skew(bottom: Optional[Angles], top: Optional[Angles] | Callable[[], Optional[Angles]],
                epsilon: float) -> SkewEstimate:
    """Arbitrate between bottom- and top-profile angles.

    ``top`` may be a callable so it is only evaluated when the bottom
    angles disagree. ``None`` marks a side with no usable profile.
    """
    if bottom is not None and _agree(bottom, epsilon):
        return SkewEstimate(_mean(bottom), SkewSource.BOTTOM, bottom)
    if callable(top):
        top = top()
    if top is not None and _agree(top, epsilon):
        return SkewEstimate(_mean(top), SkewSource.TOP, bottom, top)
    if bottom is not None and top is not None:
        angle = min(_mean(bottom), _mean(top), key=abs)
        return SkewEstimate(angle, SkewSource.SMALLER_OF_BOTH, bottom, top)
    if bottom is not None:
        return SkewEstimate(_mean(bottom), SkewSource.BOTTOM, bottom)
    if top is not None:
        return SkewEstimate(_mean(top), SkewSource.TOP, None, top)
    return SkewEstimate(0.0, SkewSource.NONE)


def side_angles(image: np.ndarray, bbox, side: Side, config: PipelineConfig,
                mask: np.ndarray | None = None) -> Optional[Angles]:
    try:
        profile = compute_profile(image, bbox, side, config, mask)
        return three_point_angles(filter_profile(profile))
    except (EmptyProfile, DegenerateProfile):
        return None


def estimate_skew(image: np.ndarray, region, config: PipelineConfig | None = None,
                  mask: np.ndarray | None = None) -> SkewEstimate:
    """Skew of one text region.

    ``region`` is a component (its member mask is used) or a bare
    ``(x, y, w, h)`` box.
    """
    config = config or PipelineConfig()
    if hasattr(region, "bbox"):
        bbox = region.bbox
        if mask is None:
            mask = region.mask()
    else:
        bbox = tuple(region)
    bottom = side_angles(image, bbox, Side.BOTTOM, config, mask)
    return choose_skew(bottom, lambda: side_angles(image, bbox, Side.TOP, config, mask),
                       config.epsilon)


def rotate_region(image: np.ndarray, bbox, angle: float, *, mask: np.ndarray | None = None,
                  fill: int = 255) -> np.ndarray:
    """Rotate the ``bbox`` patch about its center to undo a skew of ``angle``.

    Inverse mapping with nearest-neighbour sampling; output has the patch's
    shape and cells mapping outside the patch (or outside ``mask``) get
    ``fill``.
    """
    x, y, w, h = bbox
    patch = image[y:y + h, x:x + w]
    if mask is not None:
        patch = np.where(mask, patch, np.uint8(fill))
    if angle == 0:
        return patch.copy()
    cx, cy = (w - 1) / 2, (h - 1) / 2
    cos, sin = math.cos(angle), math.sin(angle)
    out = np.full((h, w), fill, dtype=np.uint8)
    dx = np.arange(w) - cx
    # a few destination rows at a time keeps the coordinate temporaries small
    step = max(1, _ROTATE_CHUNK // w)
    for r0 in range(0, h, step):
        dy = (np.arange(r0, min(h, r0 + step)) - cy)[:, None]
        sx = np.rint(cx + cos * dx + sin * dy).astype(np.intp)
        sy = np.rint(cy - sin * dx + cos * dy).astype(np.intp)
        inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
        rows = out[r0:r0 + step]
        rows[inside] = patch[sy[inside], sx[inside]]
    return out
