"""Target functions that cubes are scored against.

Three kinds of target are supported: an indicator of an exact shape, an
indicator of a rasterized set, and an integer-valued raster field.  The
per-cube score used everywhere in the package is the mean absolute
deviation from the cube average,

    osc(Q', f) = avg_{Q'} |f - avg_{Q'} f|,

which for an indicator equals 2 t (1 - t) with t the covered volume
fraction, and is bounded by 1/2.  The companion pairwise form
avg avg |f(x) - f(y)| coincides with osc for indicators and satisfies
osc <= pairwise <= 2 osc in general; both are exposed for diagnostics.

Raster overlaps are computed exactly: covered cells are weighted by the
exact cell/cube overlap area (separable interval products for axis
cubes, polygon clipping for rotated ones), never by point sampling.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import ContractError, InputError, InvariantViolation
from .geometry import Cube, Shape
from .raster import RasterSet, ZRaster, box_sum_index, level_sets

_WEIGHT_RTOL = 1e-9


class TargetFunction:
    """Common interface for everything a cube can be scored against."""

    dim: int
    is_indicator: bool

    def oscillation(self, cube: Cube) -> float:
        raise NotImplementedError

    def osc_forms(self, cube: Cube) -> Tuple[float, float]:
        """(mean absolute deviation, mean pairwise absolute difference)."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def scaled(self, factor: float) -> "TargetFunction":
        raise NotImplementedError

    def bbox(self):
        raise NotImplementedError


def _indicator_osc(t: float) -> float:
    return 2.0 * t * (1.0 - t)


@dataclass
class IndicatorShape(TargetFunction):
    """Indicator of an exact geometric set."""

    shape: Shape

    def __post_init__(self):
        self.dim = self.shape.dim
        self.is_indicator = True

    def fraction(self, cube: Cube) -> float:
        from .geometry import volume_fraction
        return volume_fraction(cube, self.shape)

    def oscillation(self, cube: Cube) -> float:
        return _indicator_osc(self.fraction(cube))

    def osc_forms(self, cube: Cube) -> Tuple[float, float]:
        o = self.oscillation(cube)
        return o, o

    def describe(self) -> dict:
        return {"target": "indicator_shape", "shape": self.shape.to_json()}

    def scaled(self, factor: float) -> "IndicatorShape":
        return IndicatorShape(self.shape.scaled(factor))

    def bbox(self):
        return self.shape.bbox()

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        return self.shape.boundary_distance(pts)


# ---------------------------------------------------------------------------
# raster overlap machinery
# ---------------------------------------------------------------------------

def _require_inside_window(grid, cube: Cube) -> None:
    win = grid.window()
    if not win.contains_cube(cube):
        raise ContractError("cube must lie inside the raster window")


def _axis_overlap(lo: float, hi: float, origin: float, cell: float,
                  i0: int, i1: int) -> np.ndarray:
    """Overlap lengths of [lo, hi] with cells i0..i1-1 along one axis."""
    idx = np.arange(i0, i1)
    a = origin + idx * cell
    b = a + cell
    return np.clip(np.minimum(b, hi) - np.maximum(a, lo), 0.0, None)


def _convex_cell_coverage(verts: np.ndarray, ox: float, oy: float, h: float,
                          i0: int, i1: int, j0: int, j1: int) -> np.ndarray:
    """Exact intersection areas of a CCW convex polygon with grid cells.

    One Green's-theorem pass per edge: the edge is split at every grid
    line, each piece adds its trapezoid against its cell's left border
    locally, and its signed height spills a full cell width into every
    cell on its left (folded in afterwards by a reversed running sum per
    row).  Trapezoids of straight edges are exact, so the only error is
    float rounding.
    """
    ni, nj = i1 - i0, j1 - j0
    # scalar accumulation: segment counts are tiny, array dispatch would cost
    # more than the arithmetic
    area = [[0.0] * nj for _ in range(ni)]
    cover = [[0.0] * nj for _ in range(ni)]
    m = len(verts)
    vx = [float(v[0]) for v in verts]
    vy = [float(v[1]) for v in verts]
    for k in range(m):
        x0, y0 = vx[k], vy[k]
        x1, y1 = vx[(k + 1) % m], vy[(k + 1) % m]
        if y1 == y0:
            continue  # horizontal edges carry no x dy mass
        cuts = [1.0]
        if x1 != x0:
            lo_i = math.ceil((min(x0, x1) - ox) / h)
            hi_i = math.floor((max(x0, x1) - ox) / h)
            inv = 1.0 / (x1 - x0)
            for i in range(lo_i, hi_i + 1):
                t = (ox + i * h - x0) * inv
                if 0.0 < t < 1.0:
                    cuts.append(t)
        lo_j = math.ceil((min(y0, y1) - oy) / h)
        hi_j = math.floor((max(y0, y1) - oy) / h)
        inv = 1.0 / (y1 - y0)
        for j in range(lo_j, hi_j + 1):
            t = (oy + j * h - y0) * inv
            if 0.0 < t < 1.0:
                cuts.append(t)
        cuts.sort()
        px, py = x0, y0
        prev = 0.0
        for t in cuts:
            if t <= prev:
                continue
            qx = x0 + t * (x1 - x0)
            qy = y0 + t * (y1 - y0)
            dy = qy - py
            if dy != 0.0:
                xm = 0.5 * (px + qx)
                ym = 0.5 * (py + qy)
                ci = int(math.floor((xm - ox) / h)) - i0
                cj = int(math.floor((ym - oy) / h)) - j0
                if ci < 0:
                    ci = 0
                elif ci >= ni:
                    ci = ni - 1
                if cj < 0:
                    cj = 0
                elif cj >= nj:
                    cj = nj - 1
                area[ci][cj] += dy * (xm - (ox + (ci + i0) * h))
                cover[ci][cj] += dy
            px, py, prev = qx, qy, t
    out = np.asarray(area)
    cov = np.asarray(cover)
    spill = np.cumsum(cov[::-1, :], axis=0)[::-1, :] - cov
    return out + h * spill


def _cell_weights_2d(grid, cube: Cube) -> Tuple[np.ndarray, Tuple[slice, slice]]:
    """Exact overlap areas between the cube and every grid cell in its bbox.

    Returns a (K, L) weight array and the index slices it covers.  Total
    weight equals the cube area (checked), assuming the cube is inside the
    window.
    """
    _require_inside_window(grid, cube)
    lo, hi = cube.bbox()
    (i0, j0), (i1, j1) = grid.index_bounds_for_bbox(lo, hi)
    if i1 <= i0 or j1 <= j0:
        raise ContractError("cube does not overlap the raster window")
    h = grid.cell
    if cube.angle == 0.0:
        wx = _axis_overlap(lo[0], hi[0], grid.origin[0], h, i0, i1)
        wy = _axis_overlap(lo[1], hi[1], grid.origin[1], h, j0, j1)
        weights = wx[:, None] * wy[None, :]
    else:
        weights = _convex_cell_coverage(cube.vertices(), grid.origin[0],
                                        grid.origin[1], h, i0, i1, j0, j1)
    total = float(weights.sum())
    area = cube.side * cube.side
    if abs(total - area) > _WEIGHT_RTOL * area:
        raise InvariantViolation(
            f"cell weights sum to {total}, expected cube area {area}")
    return weights, (slice(i0, i1), slice(j0, j1))


def _cell_weights_1d(grid, cube: Cube) -> Tuple[np.ndarray, Tuple[slice]]:
    _require_inside_window(grid, cube)
    lo, hi = cube.interval()
    (i0,), (i1,) = grid.index_bounds_for_bbox(np.array([lo]), np.array([hi]))
    w = _axis_overlap(lo, hi, grid.origin[0], grid.cell, i0, i1)
    if abs(float(w.sum()) - cube.side) > _WEIGHT_RTOL * cube.side:
        raise InvariantViolation("cell weights do not sum to the cube length")
    return w, (slice(i0, i1),)


def _cell_weights(grid, cube: Cube):
    if grid.dim == 1:
        return _cell_weights_1d(grid, cube)
    if grid.dim == 2:
        return _cell_weights_2d(grid, cube)
    raise InputError("cube scoring on rasters supports n = 1 and 2")


def _grid_digest(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()[:16]


@dataclass
class IndicatorRaster(TargetFunction):
    """Indicator of a rasterized set (the union of its set cells, exactly)."""

    raster: RasterSet

    def __post_init__(self):
        self.dim = self.raster.dim
        self.is_indicator = True

    def fraction(self, cube: Cube) -> float:
        grid = self.raster
        if cube.angle == 0.0 and grid.dim == 2:
            # snapped cubes reduce to an integer box count
            lo, hi = cube.bbox()
            try:
                i0 = grid.snap_index(lo)
                i1 = grid.snap_index(hi)
            except ContractError:
                pass
            else:
                _require_inside_window(grid, cube)
                count = box_sum_index(grid.sat, i0, i1)
                return count * grid.cell ** 2 / (cube.side ** 2)
        weights, slices = _cell_weights(grid, cube)
        covered = float((weights * grid.bits[slices]).sum())
        return min(1.0, covered / cube.side ** grid.dim)

    def oscillation(self, cube: Cube) -> float:
        return _indicator_osc(self.fraction(cube))

    def osc_forms(self, cube: Cube) -> Tuple[float, float]:
        o = self.oscillation(cube)
        return o, o

    def describe(self) -> dict:
        return {"target": "indicator_raster", "origin": list(self.raster.origin),
                "cell": self.raster.cell, "dims": list(self.raster.dims),
                "digest": _grid_digest(self.raster.bits)}

    def scaled(self, factor: float) -> "IndicatorRaster":
        r = self.raster
        return IndicatorRaster(RasterSet(tuple(o * factor for o in r.origin),
                                         r.cell * factor, r.dims, r.bits.copy()))

    def bbox(self):
        win = self.raster.window()
        return np.asarray(win.mins), np.asarray(win.maxs)


def _weighted_forms(values: np.ndarray, weights: np.ndarray) -> Tuple[float, float]:
    """Exact MAD and mean pairwise |difference| of a weighted discrete field."""
    W = float(weights.sum())
    if W <= 0.0:
        return 0.0, 0.0
    mean = float((weights * values).sum()) / W
    mad = float((weights * np.abs(values - mean)).sum()) / W
    order = np.argsort(values, kind="stable")
    v = values[order].astype(float)
    w = weights[order]
    prefix_w = np.concatenate([[0.0], np.cumsum(w)])[:-1]
    prefix_vw = np.concatenate([[0.0], np.cumsum(v * w)])[:-1]
    pair = 2.0 * float((w * (v * prefix_w - prefix_vw)).sum()) / (W * W)
    return mad, pair


@dataclass
class IntegerRaster(TargetFunction):
    """Integer-valued raster field; scores are exact weighted deviations."""

    zraster: ZRaster

    def __post_init__(self):
        self.dim = self.zraster.dim
        self.is_indicator = False

    def osc_forms(self, cube: Cube) -> Tuple[float, float]:
        weights, slices = _cell_weights(self.zraster, cube)
        values = self.zraster.values[slices]
        return _weighted_forms(values.reshape(-1), weights.reshape(-1))

    def oscillation(self, cube: Cube) -> float:
        return self.osc_forms(cube)[0]

    def level_targets(self) -> List[Tuple[int, IndicatorRaster]]:
        """Indicator targets of the threshold sets, for boundary-adapted pools."""
        return [(k, IndicatorRaster(r)) for k, r in level_sets(self.zraster)]

    def describe(self) -> dict:
        return {"target": "integer_raster", "origin": list(self.zraster.origin),
                "cell": self.zraster.cell, "dims": list(self.zraster.dims),
                "digest": _grid_digest(self.zraster.values)}

    def scaled(self, factor: float) -> "IntegerRaster":
        z = self.zraster
        return IntegerRaster(ZRaster(tuple(o * factor for o in z.origin),
                                     z.cell * factor, z.dims, z.values.copy()))

    def bbox(self):
        win = self.zraster.window()
        return np.asarray(win.mins), np.asarray(win.maxs)


def oscillation(cube: Cube, target: TargetFunction) -> float:
    """Mean absolute deviation of the target over the cube (the per-cube score)."""
    if cube.dim != target.dim:
        raise InputError("cube and target dimensions differ")
    return target.oscillation(cube)


def make_target(obj) -> TargetFunction:
    """Wrap a Shape, RasterSet, or ZRaster in its target adapter."""
    if isinstance(obj, TargetFunction):
        return obj
    if isinstance(obj, Shape):
        return IndicatorShape(obj)
    if isinstance(obj, RasterSet):
        return IndicatorRaster(obj)
    if isinstance(obj, ZRaster):
        return IntegerRaster(obj)
    raise InputError(f"cannot interpret {type(obj)} as a target function")
