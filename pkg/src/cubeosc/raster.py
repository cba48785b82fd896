"""Rasterized sets and integer fields on uniform grids.

A raster is a uniform grid over an axis box: ``origin`` is the lower
corner, ``cell`` the edge length of one grid cell, ``dims`` the cell
count per axis.  Cell ``(i0, .., ik)`` covers the half-open box
``[origin + i*cell, origin + (i+1)*cell)`` and membership is decided at
the cell center.  Box sums are backed by an exact integer summed-area
table, so counting queries are O(2^n) regardless of box size.

Supported dimensions are 1, 2, and 3.  The perimeter of a rasterized set
is the (n-1)-measure of its cell-boundary faces, counting faces against
both unset neighbors and the outside of the grid window.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ContractError, InputError, ResourceLimitError
from .geometry import AxisBox, Shape

MAX_CELLS = 100_000_000
_SNAP_TOL = 1e-9


def _summed_table(values: np.ndarray) -> np.ndarray:
    """Zero-padded cumulative table; corner gathers give box sums in O(1)."""
    sat = values.astype(np.int64)
    for axis in range(values.ndim):
        sat = np.cumsum(sat, axis=axis)
    padded = np.zeros(tuple(d + 1 for d in values.shape), dtype=np.int64)
    padded[tuple(slice(1, None) for _ in range(values.ndim))] = sat
    return padded


def _box_sum_from_table(sat: np.ndarray, lo: Sequence[int], hi: Sequence[int]) -> int:
    n = sat.ndim
    total = 0
    for corner in itertools.product(*[(0, 1)] * n):
        idx = tuple(hi[k] if corner[k] else lo[k] for k in range(n))
        sign = (-1) ** (n - sum(corner))
        total += sign * int(sat[idx])
    return total


class _GridBase:
    """Shared geometry plumbing for binary and integer rasters."""

    origin: Tuple[float, ...]
    cell: float
    dims: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.dims)

    def window(self) -> AxisBox:
        mins = tuple(self.origin)
        maxs = tuple(o + d * self.cell for o, d in zip(self.origin, self.dims))
        return AxisBox(mins, maxs)

    def snap_index(self, coord: Sequence[float]) -> Tuple[int, ...]:
        """Map a lattice-snapped world point onto grid indices, or fail."""
        idx = []
        for k, x in enumerate(coord):
            raw = (x - self.origin[k]) / self.cell
            i = int(round(raw))
            if abs(raw - i) > _SNAP_TOL * max(1.0, abs(raw)):
                raise ContractError(
                    f"coordinate {x} along axis {k} is not snapped to the cell lattice")
            idx.append(min(max(i, 0), self.dims[k]))
        return tuple(idx)

    def index_bounds_for_bbox(self, lo: np.ndarray, hi: np.ndarray) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Smallest index box covering a world bbox, clamped to the grid."""
        los, his = [], []
        for k in range(self.dim):
            a = int(math.floor((lo[k] - self.origin[k]) / self.cell))
            b = int(math.ceil((hi[k] - self.origin[k]) / self.cell))
            los.append(max(0, a))
            his.append(min(self.dims[k], b))
        return tuple(los), tuple(his)


@dataclass
class RasterSet(_GridBase):
    """Binary raster: a set given as a union of grid cells."""

    origin: Tuple[float, ...]
    cell: float
    dims: Tuple[int, ...]
    bits: np.ndarray

    def __post_init__(self):
        if self.cell <= 0.0:
            raise InputError("cell size must be positive")
        if len(self.dims) not in (1, 2, 3):
            raise InputError("raster dimension must be 1, 2, or 3")
        self.bits = np.ascontiguousarray(self.bits, dtype=bool)
        if self.bits.shape != tuple(self.dims):
            raise InputError(f"bits shape {self.bits.shape} != dims {self.dims}")
        self._sat: Optional[np.ndarray] = None
        self._boundary_sat: Optional[np.ndarray] = None

    @property
    def sat(self) -> np.ndarray:
        if self._sat is None:
            self._sat = _summed_table(self.bits)
        return self._sat

    def count(self) -> int:
        return int(self.bits.sum())

    def volume(self) -> float:
        return self.count() * self.cell ** self.dim

    def complement(self) -> "RasterSet":
        return RasterSet(self.origin, self.cell, self.dims, ~self.bits)

    def boundary_cell_mask(self) -> np.ndarray:
        """Cells having at least one axis neighbor with a different bit."""
        mask = np.zeros_like(self.bits)
        for axis in range(self.dim):
            sl_a = [slice(None)] * self.dim
            sl_b = [slice(None)] * self.dim
            sl_a[axis] = slice(1, None)
            sl_b[axis] = slice(None, -1)
            diff = self.bits[tuple(sl_a)] != self.bits[tuple(sl_b)]
            mask[tuple(sl_a)] |= diff
            mask[tuple(sl_b)] |= diff
        return mask

    @property
    def boundary_sat(self) -> np.ndarray:
        if self._boundary_sat is None:
            self._boundary_sat = _summed_table(self.boundary_cell_mask())
        return self._boundary_sat


@dataclass
class ZRaster(_GridBase):
    """Integer-valued field on a grid (used for coarea experiments)."""

    origin: Tuple[float, ...]
    cell: float
    dims: Tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.cell <= 0.0:
            raise InputError("cell size must be positive")
        if len(self.dims) not in (1, 2, 3):
            raise InputError("raster dimension must be 1, 2, or 3")
        self.values = np.ascontiguousarray(self.values, dtype=np.int64)
        if self.values.shape != tuple(self.dims):
            raise InputError(f"values shape {self.values.shape} != dims {self.dims}")
        self._boundary_sat: Optional[np.ndarray] = None

    def boundary_cell_mask(self) -> np.ndarray:
        mask = np.zeros(self.values.shape, dtype=bool)
        for axis in range(self.dim):
            sl_a = [slice(None)] * self.dim
            sl_b = [slice(None)] * self.dim
            sl_a[axis] = slice(1, None)
            sl_b[axis] = slice(None, -1)
            diff = self.values[tuple(sl_a)] != self.values[tuple(sl_b)]
            mask[tuple(sl_a)] |= diff
            mask[tuple(sl_b)] |= diff
        return mask

    @property
    def boundary_sat(self) -> np.ndarray:
        if self._boundary_sat is None:
            self._boundary_sat = _summed_table(self.boundary_cell_mask())
        return self._boundary_sat

    def value_range(self) -> Tuple[int, int]:
        return int(self.values.min()), int(self.values.max())


def rasterize(shape: Shape, window: AxisBox, cell: float) -> RasterSet:
    """Sample a shape on cell centers over the window.

    The window extent must be an integer number of cells per axis (within
    1e-9 relative); more than ``MAX_CELLS`` total cells is a resource error.
    """
    if cell <= 0.0:
        raise InputError("cell size must be positive")
    dims = []
    for lo, hi in zip(window.mins, window.maxs):
        raw = (hi - lo) / cell
        d = int(round(raw))
        if d <= 0 or abs(raw - d) > 1e-9 * max(1.0, raw):
            raise InputError(f"window extent {hi - lo} is not an integer multiple of cell {cell}")
        dims.append(d)
    total = 1
    for d in dims:
        total *= d
    if total > MAX_CELLS:
        raise ResourceLimitError(f"raster would need {total} cells (limit {MAX_CELLS})")
    axes = [window.mins[k] + (np.arange(dims[k]) + 0.5) * cell for k in range(len(dims))]
    if len(dims) == 1:
        pts = axes[0]
        bits = shape.contains_points(pts).reshape(dims)
    else:
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        bits = shape.contains_points(pts).reshape(dims)
    return RasterSet(tuple(window.mins), cell, tuple(dims), bits)


def box_sum(raster: RasterSet, mins: Sequence[float], maxs: Sequence[float]) -> int:
    """Number of set cells in a world-coordinate box with lattice-snapped corners."""
    lo = raster.snap_index(mins)
    hi = raster.snap_index(maxs)
    if any(h < l for l, h in zip(lo, hi)):
        raise InputError("box has negative extent")
    return _box_sum_from_table(raster.sat, lo, hi)


def box_sum_index(sat: np.ndarray, lo: Sequence[int], hi: Sequence[int]) -> int:
    """Box sum straight from a padded table with index bounds [lo, hi)."""
    return _box_sum_from_table(sat, lo, hi)


def box_sums_2d(sat: np.ndarray, lo0, lo1, hi0, hi1) -> np.ndarray:
    """Vectorized 2-d box sums for arrays of index bounds."""
    return (sat[hi0, hi1] - sat[lo0, hi1] - sat[hi0, lo1] + sat[lo0, lo1])


@dataclass
class DyadicDecomposition:
    """Classification of the 2^(level*n) dyadic cubes of the unit window.

    ``interior`` holds flat C-order indices of cubes with occupied fraction
    strictly above 3/4, ``exterior`` those strictly below 1/4, ``boundary``
    the rest (fractions of exactly 1/4 or 3/4 land in the boundary class).
    """

    level: int
    grid_shape: Tuple[int, ...]
    counts: np.ndarray
    cells_per_cube: int
    cube_side: float
    origin: Tuple[float, ...]
    interior: np.ndarray
    exterior: np.ndarray
    boundary: np.ndarray

    def cube_bounds(self, flat_index: int) -> Tuple[np.ndarray, np.ndarray]:
        idx = np.unravel_index(flat_index, self.grid_shape)
        lo = np.asarray(self.origin) + np.asarray(idx) * self.cube_side
        return lo, lo + self.cube_side

    def fraction(self, flat_index: int) -> float:
        return float(self.counts.reshape(-1)[flat_index]) / self.cells_per_cube


def dyadic_decompose(raster: RasterSet, level: int) -> DyadicDecomposition:
    """Split the unit window into 2^level per-axis dyadic cubes and classify them.

    Requires the raster window to be the unit cube and 2^level to divide the
    cell count per axis, so every fraction is an exact integer ratio.
    """
    if level < 0:
        raise InputError("level must be nonnegative")
    win = raster.window()
    for lo, hi in zip(win.mins, win.maxs):
        if abs(lo) > 1e-9 or abs(hi - 1.0) > 1e-9:
            raise ContractError("dyadic decomposition requires the unit window")
    m = 2 ** level
    per = []
    for d in raster.dims:
        if d % m != 0:
            raise ContractError(f"2^{level} does not divide grid dimension {d}")
        per.append(d // m)
    cells_per_cube = 1
    for p in per:
        cells_per_cube *= p
    # reshape into (m, per, m, per, ...) blocks and sum within blocks
    shape = []
    for k in range(raster.dim):
        shape.extend([m, per[k]])
    blocks = raster.bits.astype(np.int64).reshape(shape)
    sum_axes = tuple(2 * k + 1 for k in range(raster.dim))
    counts = blocks.sum(axis=sum_axes)
    flat = counts.reshape(-1)
    interior = np.flatnonzero(4 * flat > 3 * cells_per_cube)
    exterior = np.flatnonzero(4 * flat < cells_per_cube)
    both = np.concatenate([interior, exterior])
    boundary = np.setdiff1d(np.arange(flat.size), both)
    return DyadicDecomposition(
        level=level,
        grid_shape=tuple(m for _ in range(raster.dim)),
        counts=counts,
        cells_per_cube=cells_per_cube,
        cube_side=1.0 / m,
        origin=tuple(win.mins),
        interior=interior,
        exterior=exterior,
        boundary=boundary,
    )


def level_sets(zr: ZRaster) -> List[Tuple[int, RasterSet]]:
    """Threshold rasters whose signed sum reconstructs the field.

    Positive thresholds k give {f >= k} for k = 1..max(f); negative entries
    (-k, raster) give {f <= -k} for k = 1..-min(f).  Summing bits of the
    positive entries minus bits of the negative entries recovers f.
    """
    vmin, vmax = zr.value_range()
    out: List[Tuple[int, RasterSet]] = []
    for k in range(1, vmax + 1):
        out.append((k, RasterSet(zr.origin, zr.cell, zr.dims, zr.values >= k)))
    for k in range(1, -vmin + 1):
        out.append((-k, RasterSet(zr.origin, zr.cell, zr.dims, zr.values <= -k)))
    return out


def raster_perimeter(raster: RasterSet, include_window_boundary: bool = True) -> float:
    """(n-1)-measure of the set's cell-face boundary.

    With ``include_window_boundary`` the set is treated as a subset of the
    whole space (occupied cells on the window edge contribute their outer
    faces); without it only faces interior to the window count, which is the
    relative perimeter in the open window.
    """
    bits = raster.bits
    n = raster.dim
    faces = 0
    for axis in range(n):
        if include_window_boundary:
            pad = [(0, 0)] * n
            pad[axis] = (1, 1)
            arr = np.pad(bits, pad, constant_values=False)
        else:
            arr = bits
        sl_a = [slice(None)] * n
        sl_b = [slice(None)] * n
        sl_a[axis] = slice(1, None)
        sl_b[axis] = slice(None, -1)
        faces += int((arr[tuple(sl_a)] != arr[tuple(sl_b)]).sum())
    return faces * raster.cell ** (n - 1)


def total_variation(zr: ZRaster) -> float:
    """Sum of level-set perimeters; the grid coarea count."""
    return float(sum(raster_perimeter(r) for _, r in level_sets(zr)))


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def write_pgm(raster: RasterSet, path) -> None:
    """Binary PGM (P5) export for 2-d rasters plus a JSON sidecar with geometry."""
    if raster.dim != 2:
        raise InputError("PGM export is 2-d only")
    path = Path(path)
    nx, ny = raster.dims
    # image rows top-down: row 0 is the highest y index
    img = (raster.bits.T[::-1, :] * np.uint8(255))
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())
    sidecar = {"origin": list(raster.origin), "cell": raster.cell,
               "dims": list(raster.dims)}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True) + "\n")


def read_pgm(path) -> RasterSet:
    path = Path(path)
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise InputError("not a binary PGM (P5) file")
    # header: magic, width, height, maxval, single whitespace, then raster
    fields: List[bytes] = []
    i = 2
    while len(fields) < 3:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        fields.append(data[i:j])
        i = j
    i += 1
    nx, ny, maxval = int(fields[0]), int(fields[1]), int(fields[2])
    if maxval != 255:
        raise InputError("expected maxval 255")
    img = np.frombuffer(data[i:i + nx * ny], dtype=np.uint8).reshape(ny, nx)
    bits = (img[::-1, :].T > 127)
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text())
        origin = tuple(meta["origin"])
        cell = float(meta["cell"])
    else:
        origin, cell = (0.0, 0.0), 1.0 / max(nx, ny)
    return RasterSet(origin, cell, (nx, ny), bits)


def write_zraster_csv(zr: ZRaster, path) -> None:
    """Matrix CSV export (one text row per y index, top-down) plus JSON sidecar."""
    if zr.dim != 2:
        raise InputError("CSV export is 2-d only")
    path = Path(path)
    rows = []
    vals = zr.values.T[::-1, :]
    for r in vals:
        rows.append(",".join(str(int(v)) for v in r))
    path.write_text("\n".join(rows) + "\n")
    sidecar = {"origin": list(zr.origin), "cell": zr.cell, "dims": list(zr.dims)}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True) + "\n")


def read_zraster_csv(path) -> ZRaster:
    path = Path(path)
    rows = [r for r in path.read_text().strip().splitlines() if r]
    img = np.array([[int(v) for v in r.split(",")] for r in rows], dtype=np.int64)
    values = img[::-1, :].T
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text())
        origin = tuple(meta["origin"])
        cell = float(meta["cell"])
    else:
        origin, cell = (0.0, 0.0), 1.0 / max(values.shape)
    return ZRaster(origin, cell, values.shape, values)
