"""Named example targets used by the CLI and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .geometry import (ALL_SPACE, Disk, DisjointUnion, HalfPlane,
                       IntervalUnion, Polygon, Region, unit_box)
from .raster import RasterSet, ZRaster


def _square(cx: float, cy: float, side: float) -> Polygon:
    h = side / 2.0
    return Polygon(((cx - h, cy - h), (cx + h, cy - h),
                    (cx + h, cy + h), (cx - h, cy + h)))


def _checkerboard64() -> RasterSet:
    n = 64
    idx = np.arange(n)
    bits = ((idx[:, None] + idx[None, :]) % 2 == 0)
    return RasterSet((0.0, 0.0), 1.0 / n, (n, n), bits)


def _zdisks() -> ZRaster:
    # nested disks: value 2 inside r = 0.15, 1 in the annulus up to r = 0.3
    n = 400
    cell = 1.0 / n
    c = (np.arange(n) + 0.5) * cell - 0.5
    xx, yy = np.meshgrid(c, c, indexing="ij")
    rr = np.sqrt(xx * xx + yy * yy)
    values = (rr < 0.3).astype(np.int64) + (rr < 0.15).astype(np.int64)
    return ZRaster((0.0, 0.0), cell, (n, n), values)


@dataclass(frozen=True)
class Preset:
    name: str
    target: object
    region: Region
    reference_perimeter: Optional[float]
    note: str


def get_preset(name: str) -> Preset:
    key = name.strip().lower()
    if key == "empty":
        return Preset(key, DisjointUnion((), dim_hint=2), ALL_SPACE, 0.0,
                      "empty set; every functional vanishes")
    if key == "halfplane":
        return Preset(key, HalfPlane((1.0, 0.0), 0.5), unit_box(2), 1.0,
                      "half plane x <= 1/2; relative perimeter 1 in the unit window")
    if key == "square01":
        return Preset(key, _square(0.5, 0.5, 0.1), ALL_SPACE, 0.4,
                      "axis square of side 0.1; perimeter 0.4 < 1")
    if key == "disk05":
        return Preset(key, Disk((0.5, 0.5), 0.5), ALL_SPACE, math.pi,
                      "disk of radius 1/2; perimeter pi > 1")
    if key == "interval1d":
        return Preset(key, IntervalUnion(((0.2, 0.5),)), ALL_SPACE, 2.0,
                      "single interval (0.2, 0.5); two endpoints")
    if key == "twosquares":
        parts = (_square(0.3, 0.3, 0.1), _square(0.7, 0.7, 0.1))
        return Preset(key, DisjointUnion(parts), ALL_SPACE, 0.8,
                      "two separated axis squares of side 0.1; total perimeter 0.8")
    if key == "checkerboard64":
        return Preset(key, _checkerboard64(), unit_box(2), None,
                      "64x64 checkerboard raster; perimeter grows with resolution")
    if key == "zdisks":
        return Preset(key, _zdisks(), unit_box(2), None,
                      "integer raster of nested disks at radii 0.3 and 0.15, "
                      "values 1 and 2; total variation 2 pi (0.3 + 0.15)")
    raise InputError(f"unknown preset {name!r}")


PRESET_NAMES = ("empty", "halfplane", "square01", "disk05", "interval1d",
                "twosquares", "checkerboard64", "zdisks")
