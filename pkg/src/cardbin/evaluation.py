"""Region-classification scoring against box annotations.

A component counts as text in the ground truth when more than half of its
pixels fall inside the union of the ``text`` boxes. Predicted text means the
pipeline classified it as :attr:`RegionClass.TEXT`.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .regions import ConnectedComponent, RegionClass

KINDS = ("text", "nontext")


class AnnotationError(ValueError):
    pass


class EmptyScore(ValueError):
    """Accuracy of an empty set of components is undefined."""


class Annotation(NamedTuple):
    kind: str
    x: int
    y: int
    w: int
    h: int

    @property
    def box(self) -> tuple[int, int, int, int]:
        return self.x, self.y, self.w, self.h

    def line(self) -> str:
        return f"{self.kind} {self.x} {self.y} {self.w} {self.h}"


@dataclass
class ConfusionCounts:
    bb: int = 0
    bt: int = 0
    tb: int = 0
    tt: int = 0

    @property
    def total(self) -> int:
        return self.bb + self.bt + self.tb + self.tt

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.bb + other.bb, self.bt + other.bt,
                               self.tb + other.tb, self.tt + other.tt)


def parse_annotations(text: str, source: str = "<string>") -> list[Annotation]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise AnnotationError(f"{source}:{lineno}: expected '<kind> <x> <y> <w> <h>'")
        kind = parts[0]
        if kind not in KINDS:
            raise AnnotationError(f"{source}:{lineno}: unknown kind {kind!r}")
        try:
            x, y, w, h = (int(p) for p in parts[1:])
        except ValueError:
            raise AnnotationError(f"{source}:{lineno}: non-integer field") from None
        if x < 0 or y < 0 or w < 1 or h < 1:
            raise AnnotationError(f"{source}:{lineno}: invalid box {x} {y} {w} {h}")
        out.append(Annotation(kind, x, y, w, h))
    return out


def load_annotations(path) -> list[Annotation]:
    path = Path(path)
    return parse_annotations(path.read_text(encoding="utf-8"), source=str(path))


def save_annotations(annotations: Iterable[Annotation], path) -> None:
    Path(path).write_text("".join(a.line() + "\n" for a in annotations), encoding="utf-8")


def text_pixels_inside(cc: ConnectedComponent, boxes) -> int:
    """Member pixels of ``cc`` covered by the union of ``boxes``."""
    covered = np.zeros((cc.height, cc.width), dtype=bool)
    for x, y, w, h in boxes:
        x0, y0 = max(x, cc.x) - cc.x, max(y, cc.y) - cc.y
        x1, y1 = min(x + w, cc.x + cc.width) - cc.x, min(y + h, cc.y + cc.height) - cc.y
        if x0 < x1 and y0 < y1:
            covered[y0:y1, x0:x1] = True
    return int(np.count_nonzero(covered & cc.mask()))


def score(components, classes, annotations) -> ConfusionCounts:
    text_boxes = [a.box for a in annotations if a.kind == "text"]
    counts = ConfusionCounts()
    for cc, cls in zip(components, classes, strict=True):
        truth_text = 2 * text_pixels_inside(cc, text_boxes) > cc.area
        pred_text = cls is RegionClass.TEXT
        if truth_text and pred_text:
            counts.tt += 1
        elif truth_text:
            counts.tb += 1
        elif pred_text:
            counts.bt += 1
        else:
            counts.bb += 1
    return counts


def accuracy(counts: ConfusionCounts) -> float:
    """Percentage of true classifications (BB and TT) among all components."""
    if counts.total == 0:
        raise EmptyScore("no components were scored")
    return 100.0 * (counts.bb + counts.tt) / counts.total
