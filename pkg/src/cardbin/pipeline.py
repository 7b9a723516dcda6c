"""End-to-end card processing with per-stage timing and memory accounting.

Memory is measured with :mod:`tracemalloc`, which also sees numpy buffers.
The reported peak for a stage is the highest traced allocation above the
level at which :func:`process_card` started, so it covers every live
intermediate (working copy, run tables, patches, output raster).
"""
from __future__ import annotations

import time
import tracemalloc
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .background import eliminate_background
from .binarize import TextPatch, binarize_card
from .config import PipelineConfig
from .imageio import check_gray
from .regions import (ConnectedComponent, RegionClass, classify_components,
                      extract_components, remove_nontext)
from .skew import SkewEstimate, estimate_skew, rotate_region

STAGES = ("background", "regions", "skew", "binarize")


@dataclass(frozen=True)
class StageReport:
    stage: str
    wall_ms: float
    peak_bytes: int

    def line(self) -> str:
        return f"{self.stage} {self.wall_ms:.3f} {self.peak_bytes}"


@dataclass
class RegionRecord:
    component: ConnectedComponent
    region_class: RegionClass
    skew: Optional[SkewEstimate] = None


@dataclass
class CardResult:
    binary: np.ndarray
    regions: list[RegionRecord]
    reports: list[StageReport] = field(default_factory=list)

    @property
    def text_regions(self) -> list[RegionRecord]:
        return [r for r in self.regions if r.region_class is RegionClass.TEXT]

    @property
    def peak_bytes(self) -> int:
        return max((r.peak_bytes for r in self.reports), default=0)

    @property
    def components(self) -> list[ConnectedComponent]:
        return [r.component for r in self.regions]

    @property
    def classes(self) -> list[RegionClass]:
        return [r.region_class for r in self.regions]


class _Meter:
    def __init__(self, trace_memory: bool):
        self.trace = trace_memory
        self.reports: list[StageReport] = []
        self._owns = False
        self._base = 0

    def __enter__(self):
        if self.trace:
            if not tracemalloc.is_tracing():
                tracemalloc.start()
                self._owns = True
            self._base = tracemalloc.get_traced_memory()[0]
        return self

    def __exit__(self, *exc):
        if self._owns:
            tracemalloc.stop()

    @contextmanager
    def stage(self, name: str):
        if self.trace:
            tracemalloc.reset_peak()
        t0 = time.perf_counter()
        yield
        ms = (time.perf_counter() - t0) * 1000.0
        peak = max(0, tracemalloc.get_traced_memory()[1] - self._base) if self.trace else 0
        self.reports.append(StageReport(name, ms, peak))


def process_card(image: np.ndarray, config: PipelineConfig | None = None, *,
                 trace_memory: bool = True) -> CardResult:
    """Background removal, non-text removal, deskew, binarization.

    Deterministic in ``(image, config)``; the stage reports are not.
    With ``trace_memory=False`` the reports carry timings and zero bytes.
    """
    config = config or PipelineConfig()
    check_gray(image)
    h, w = image.shape

    with _Meter(trace_memory) as meter:
        with meter.stage("background"):
            work = eliminate_background(image, config)

        with meter.stage("regions"):
            components = extract_components(work)
            classes = classify_components(components, w, h, config)
            remove_nontext(work, components, classes, inplace=True)
            records = [RegionRecord(cc, cls) for cc, cls in zip(components, classes)]

        with meter.stage("skew"):
            patches = []
            for rec in records:
                if rec.region_class is not RegionClass.TEXT:
                    continue
                cc = rec.component
                mask = cc.mask()
                rec.skew = estimate_skew(work, cc, config, mask=mask)
                rotated = rotate_region(work, cc.bbox, rec.skew.angle, mask=mask)
                patches.append(TextPatch(cc.x, cc.y, rotated, cc.g_min, cc.g_max))
            del work

        with meter.stage("binarize"):
            binary = binarize_card(patches, (h, w))
            del patches

    return CardResult(binary, records, meter.reports)
