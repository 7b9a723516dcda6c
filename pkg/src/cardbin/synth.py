"""Synthetic business cards with box annotations.

A card is a bright (optionally graded, optionally noisy) background with
stroke-built text bars, rules, solid logos and speckle. Everything is drawn
from a :class:`CardSpec` and a seed, so the same pair always gives the same
image.

Spec files are JSON::

    {"width": 1024, "height": 768,
     "background": {"level": 200, "gradient": 40, "noise": 3},
     "speckle": 20,
     "elements": [
        {"kind": "text", "box": [100, 100, 480, 24], "skew_deg": 5},
        {"kind": "hrule", "box": [80, 300, 600, 2]},
        {"kind": "vrule", "box": [900, 80, 2, 500]},
        {"kind": "logo", "box": [760, 90, 90, 90]}
     ]}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .evaluation import Annotation

ELEMENT_KINDS = ("text", "hrule", "vrule", "logo")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class Element:
    kind: str
    box: tuple[int, int, int, int]
    skew_deg: float = 0.0


@dataclass(frozen=True)
class CardSpec:
    width: int = 1024
    height: int = 768
    level: int = 200
    gradient: int = 0
    noise: float = 0.0
    speckle: int = 0
    ink: int = 40
    elements: tuple[Element, ...] = field(default_factory=tuple)

    @classmethod
    def from_dict(cls, d: dict) -> "CardSpec":
        bg = d.get("background", {})
        elements = []
        for i, e in enumerate(d.get("elements", [])):
            kind = e.get("kind")
            if kind not in ELEMENT_KINDS:
                raise SpecError(f"element {i}: unknown kind {kind!r}")
            box = e.get("box")
            if not isinstance(box, (list, tuple)) or len(box) != 4:
                raise SpecError(f"element {i}: box must be [x, y, w, h]")
            elements.append(Element(kind, tuple(int(v) for v in box), float(e.get("skew_deg", 0.0))))
        return cls(
            width=int(d.get("width", 1024)), height=int(d.get("height", 768)),
            level=int(bg.get("level", 200)), gradient=int(bg.get("gradient", 0)),
            noise=float(bg.get("noise", 0.0)), speckle=int(d.get("speckle", 0)),
            ink=int(d.get("ink", 40)), elements=tuple(elements),
        )

    def to_dict(self) -> dict:
        return {
            "width": self.width, "height": self.height,
            "background": {"level": self.level, "gradient": self.gradient, "noise": self.noise},
            "speckle": self.speckle, "ink": self.ink,
            "elements": [{"kind": e.kind, "box": list(e.box), "skew_deg": e.skew_deg}
                         for e in self.elements],
        }


def load_spec(path) -> CardSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from None
    return CardSpec.from_dict(data)


def rotated_extent(box, skew_deg: float) -> tuple[int, int, int, int]:
    """Integer bounding box of ``box`` rotated about its center."""
    x, y, w, h = box
    t = math.radians(skew_deg)
    c, s = abs(math.cos(t)), abs(math.sin(t))
    rw, rh = w * c + h * s, w * s + h * c
    cx, cy = x + w / 2, y + h / 2
    x0, y0 = math.floor(cx - rw / 2), math.floor(cy - rh / 2)
    return x0, y0, math.ceil(cx + rw / 2) - x0, math.ceil(cy + rh / 2) - y0


def _glyph_strip(w: int, h: int, rng: np.random.Generator) -> np.ndarray:
    """Row of blocky glyphs filling an ``h`` x ``w`` box."""
    strip = np.zeros((h, w), dtype=bool)
    stroke = max(2, round(h / 7))
    cell = max(3 * stroke, round(0.6 * h))
    gap = max(2, h // 8)
    x = 0
    while x < w:
        cw = min(cell, w - x)
        g = strip[:, x:x + cw]
        # every glyph has a full-height stem so the line's top and bottom stay straight
        if rng.random() < 0.5:
            g[:, :stroke] = True
        else:
            g[:, max(0, cw - stroke):] = True
        for part in ("top", "mid", "bottom", "other_stem", "diag"):
            if rng.random() < 0.45:
                if part == "top":
                    g[:stroke] = True
                elif part == "mid":
                    m = h // 2 - stroke // 2
                    g[m:m + stroke] = True
                elif part == "bottom":
                    g[h - stroke:] = True
                elif part == "other_stem":
                    g[:, :stroke] = True
                    g[:, max(0, cw - stroke):] = True
                else:
                    for r in range(h):
                        c = round(r * (cw - stroke) / max(1, h - 1))
                        g[r, c:c + stroke] = True
        x += cw + gap
    return strip


def _paste_rotated(canvas: np.ndarray, ink_mask: np.ndarray, local: np.ndarray,
                   box, skew_deg: float) -> None:
    """Draw the bar-local bitmap ``local`` rotated counterclockwise by ``skew_deg``."""
    x, y, w, h = box
    ex, ey, ew, eh = rotated_extent(box, skew_deg)
    t = math.radians(skew_deg)
    cx, cy = x + w / 2, y + h / 2
    ys, xs = np.mgrid[ey:ey + eh, ex:ex + ew]
    u = xs + 0.5 - cx
    v = cy - (ys + 0.5)
    # card point -> bar frame: rotate back by -t in visual (y-up) coordinates
    bu = math.cos(t) * u + math.sin(t) * v
    bv = -math.sin(t) * u + math.cos(t) * v
    col = np.floor(bu + w / 2).astype(np.int64)
    row = np.floor(h / 2 - bv).astype(np.int64)
    inside = (col >= 0) & (col < w) & (row >= 0) & (row < h)
    hit = np.zeros_like(inside)
    hit[inside] = local[row[inside], col[inside]]
    ink_mask[ey:ey + eh, ex:ex + ew] |= hit


def _check_inside(spec: CardSpec, extent, i: int) -> None:
    x, y, w, h = extent
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > spec.width or y + h > spec.height:
        raise SpecError(f"element {i}: box {extent} outside the {spec.width}x{spec.height} canvas")


def generate_card(spec: CardSpec, seed: int, config: PipelineConfig | None = None):
    """Render ``spec``; returns ``(image, annotations)``.

    Text annotations are the tight boxes of the rendered ink. Raises
    :class:`SpecError` for elements outside the canvas or text bars whose
    aspect ratio falls outside the text range of ``config``.
    """
    config = config or PipelineConfig()
    if spec.width < 128 or spec.height < 96:
        raise SpecError("card must be at least 128x96")
    rng = np.random.default_rng(seed)
    W, H = spec.width, spec.height

    bg = np.full((H, W), float(spec.level))
    if spec.gradient:
        bg += np.linspace(-spec.gradient / 2, spec.gradient / 2, W)[None, :]
    if spec.noise:
        bg += rng.normal(0.0, spec.noise, size=(H, W))
    image = np.clip(np.rint(bg), 0, 254).astype(np.uint8)

    annotations: list[Annotation] = []
    occupied = []
    for i, el in enumerate(spec.elements):
        extent = rotated_extent(el.box, el.skew_deg) if el.kind == "text" else el.box
        _check_inside(spec, extent, i)
        ink = np.zeros((H, W), dtype=bool)
        x, y, w, h = el.box
        if el.kind == "text":
            ratio = Fraction(w, h)
            if not config.r_min_ratio < ratio < config.r_max_ratio:
                raise SpecError(f"element {i}: text aspect {w}/{h} outside ({config.r_min}, {config.r_max})")
            _paste_rotated(image, ink, _glyph_strip(w, h, rng), el.box, el.skew_deg)
        elif el.kind == "logo":
            yy, xx = np.mgrid[0:h, 0:w]
            disc = ((xx - (w - 1) / 2) / (w / 2)) ** 2 + ((yy - (h - 1) / 2) / (h / 2)) ** 2 <= 1.0
            ink[y:y + h, x:x + w] = disc
        else:
            ink[y:y + h, x:x + w] = True
        level = rng.integers(max(0, spec.ink - 15), spec.ink + 16, size=int(ink.sum()))
        image[ink] = np.clip(level, 0, 254).astype(np.uint8)
        ys, xs = np.nonzero(ink)
        if len(ys):
            box = (int(xs.min()), int(ys.min()), int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1))
            annotations.append(Annotation("text" if el.kind == "text" else "nontext", *box))
        occupied.append(extent)

    # speckle keeps clear of every element so it never merges with one
    margin = 2 * config.block_width(W) + 4
    placed = 0
    attempts = 0
    while placed < spec.speckle and attempts < 50 * max(1, spec.speckle):
        attempts += 1
        size = int(rng.integers(1, 3))
        sx, sy = int(rng.integers(0, W - size)), int(rng.integers(0, H - size))
        if any(ox - margin <= sx <= ox + ow + margin and oy - margin <= sy <= oy + oh + margin
               for ox, oy, ow, oh in occupied):
            continue
        image[sy:sy + size, sx:sx + size] = np.uint8(max(0, spec.ink - 10))
        occupied.append((sx, sy, size, size))
        placed += 1
    return image, annotations


def random_spec(rng: np.random.Generator, width: int = 1024, height: int = 768,
                max_skew_deg: float = 10.0) -> CardSpec:
    """Random card layout: text bars in rows, plus rules, logos and speckle."""
    bw = max(1, width // 64)
    gap = 3 * bw
    elements: list[Element] = []
    taken: list[tuple[int, int, int, int]] = []

    def free(ext):
        x, y, w, h = ext
        if x < 4 or y < 4 or x + w > width - 4 or y + h > height - 4:
            return False
        return all(x + w + gap <= ox or ox + ow + gap <= x or y + h + gap <= oy or oy + oh + gap <= y
                   for ox, oy, ow, oh in taken)

    def place(kind, w, h, skew=0.0, tries=200):
        for _ in range(tries):
            x = int(rng.integers(0, max(1, width - w)))
            y = int(rng.integers(0, max(1, height - h)))
            ext = rotated_extent((x, y, w, h), skew) if kind == "text" else (x, y, w, h)
            if free(ext):
                taken.append(ext)
                elements.append(Element(kind, (x, y, w, h), skew))
                return True
        return False

    scale = height / 768
    for _ in range(int(rng.integers(0, 2))):
        side = int(rng.integers(60, 120) * scale)
        place("logo", side, side)
    for _ in range(int(rng.integers(0, 3))):
        place("hrule", int(rng.integers(width // 4, width // 2)), int(rng.integers(1, 3)))
    for _ in range(int(rng.integers(0, 2))):
        place("vrule", int(rng.integers(1, 3)), int(rng.integers(height // 4, height // 2)))
    for _ in range(int(rng.integers(3, 8))):
        h = int(rng.integers(max(14, height // 40), max(15, height // 22)))
        w = int(rng.integers(6 * h, 20 * h))
        w = min(w, width // 2)
        skew = float(rng.uniform(-max_skew_deg, max_skew_deg))
        place("text", w, h, skew)
    return CardSpec(
        width=width, height=height,
        level=int(rng.integers(150, 225)), gradient=int(rng.integers(0, 50)),
        noise=float(rng.uniform(0.0, 3.0)), speckle=int(rng.integers(0, 40)),
        ink=int(rng.integers(25, 70)), elements=tuple(elements),
    )
