"""Tunable thresholds for the card binarization pipeline.

Size thresholds that scale with the image are stored as divisors
(``h_th_divisor = 60`` means a minimum component height of ``H // 60``), so a
single config serves every input resolution.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

VARIANCE_MODES = ("mad", "variance", "stddev")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration."""


class SizeThresholds(NamedTuple):
    """Resolution-dependent thresholds instantiated for one image."""

    h_th: int
    w_th: int
    a_th: int
    b_th: int
    l_th: int


@dataclass(frozen=True)
class PipelineConfig:
    # background elimination
    t_fixed: int = 20
    t_min: int = 100
    block_width_divisor: int = 64
    block_height: int = 2
    variance_mode: str = "mad"
    # component rules
    h_th_divisor: int = 60
    w_th_divisor: int = 40
    a_th_divisor: int = 1500
    b_th_divisor: int = 100
    l_th_divisor: int = 40
    r_min: float = 1.2
    r_max: float = 32.0
    ra_min: int = 5
    ra_max: int = 90
    # skew
    epsilon: float = 0.035
    min_shade_extent: int = 2
    min_shade_pct: int = 50

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "variance_mode":
                if value not in VARIANCE_MODES:
                    raise ConfigError(
                        f"variance_mode must be one of {VARIANCE_MODES}, got {value!r}"
                    )
            elif value < 0:
                raise ConfigError(f"{f.name} must be nonnegative, got {value}")
        for name in ("block_width_divisor", "block_height", "h_th_divisor",
                     "w_th_divisor", "a_th_divisor", "b_th_divisor", "l_th_divisor"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not self.r_min < self.r_max:
            raise ConfigError("r_min must be < r_max")
        if not self.ra_min < self.ra_max:
            raise ConfigError("ra_min must be < ra_max")

    def thresholds(self, width: int, height: int) -> SizeThresholds:
        return SizeThresholds(
            h_th=height // self.h_th_divisor,
            w_th=width // self.w_th_divisor,
            a_th=width * height // self.a_th_divisor,
            b_th=height // self.b_th_divisor,
            l_th=width // self.l_th_divisor,
        )

    def block_width(self, width: int) -> int:
        return max(1, width // self.block_width_divisor)

    @property
    def r_min_ratio(self) -> Fraction:
        return Fraction(str(self.r_min))

    @property
    def r_max_ratio(self) -> Fraction:
        return Fraction(str(self.r_max))

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "PipelineConfig":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep or not key or not value:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
            if key not in types:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
            try:
                if types[key] == "int":
                    values[key] = int(value)
                elif types[key] == "float":
                    values[key] = float(value)
                else:
                    values[key] = value
            except ValueError:
                raise ConfigError(
                    f"{source}:{lineno}: bad value {value!r} for {key}"
                ) from None
        return cls(**values)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    return PipelineConfig.from_text(path.read_text(encoding="utf-8"), source=str(path))


def save_config(config: PipelineConfig, path) -> None:
    Path(path).write_text(config.to_text(), encoding="utf-8")
