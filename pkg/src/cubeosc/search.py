"""Candidate generation and packing for disjoint cube families.

The supremum over disjoint cube families is realized as a packing
problem over a finite, deterministically ordered candidate pool:

* shifted lattices of cubes for a set of orientations,
* boundary-adapted cubes placed along the target's boundary and slid to
  half density along the boundary normal (so each is worth close to the
  per-cube maximum of 1/2),
* for rasters on the unit window at dyadic side, the boundary class of
  the dyadic decomposition,
* for 1-d targets, the exact breakpoint argmax interval.

Greedy packing admits candidates in order of (score, position) and keeps
a feasible family at all times; an exhaustive branch-and-bound packer is
available for small pools as an oracle.  All ordering is deterministic
so reruns reproduce byte-identical families.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (BracketError, ContractError, InputError,
                     InvariantViolation, ResourceLimitError)
from .geometry import (AllSpace, AxisBox, Cube, PolygonRegion,
                       Region, boundary_components, cubes_disjoint,
                       normalize_angle)
from .raster import RasterSet, box_sum_index, box_sums_2d, dyadic_decompose
from .targets import (IndicatorRaster, IndicatorShape, IntegerRaster,
                      TargetFunction, make_target)

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# configuration and pool containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityThresholds:
    """Constants of the low/high density cube construction in the plane.

    ``core_fraction`` is the occupancy threshold defining dense cells,
    ``min_fraction`` the guaranteed open two-sided occupancy bound of the
    emitted double cells (2^-(n+1) at n = 2), ``separation_factor`` the
    required center separation in units of the half cell, and
    ``enlargement_factor`` the covering multiplicity of the selection step.
    """

    core_fraction: float = 0.5
    interior_mean: float = 0.75
    min_fraction: float = 0.125
    separation_factor: float = 3.5
    enlargement_factor: int = 8


DENSITY = DensityThresholds()


def _uniform_angles(k: int) -> Tuple[float, ...]:
    return tuple(i * (math.pi / 2.0) / k for i in range(k))


@dataclass(frozen=True)
class PackingConfig:
    """Knobs of pool generation and packing; defaults suit desk-scale runs.

    ``orientations`` is either a count of uniform angles in [0, pi/2) or an
    explicit angle tuple.  ``boundary_samples`` of None picks the adaptive
    default of about four boundary-length/side chains; an integer fixes the
    total sample budget.  ``tangential_steps`` controls sub-cell placement
    granularity along rasterized boundaries.
    """

    orientations: object = 16
    offsets_per_orientation: int = 4
    boundary_samples: Optional[int] = None
    tangential_steps: int = 4
    seed: int = 0
    score_floor: float = 1e-4
    slide_tol: float = 1e-9
    max_pool: int = 2_000_000

    def angle_tuple(self) -> Tuple[float, ...]:
        if isinstance(self.orientations, int):
            if self.orientations <= 0:
                raise InputError("need at least one orientation")
            return _uniform_angles(self.orientations)
        return tuple(normalize_angle(a) for a in self.orientations)

    def describe(self) -> dict:
        return {
            "orientations": list(self.angle_tuple()),
            "offsets_per_orientation": self.offsets_per_orientation,
            "boundary_samples": self.boundary_samples,
            "tangential_steps": self.tangential_steps,
            "seed": self.seed,
            "score_floor": self.score_floor,
            "slide_tol": self.slide_tol,
        }


@dataclass(frozen=True)
class Candidate:
    cube: Cube
    score: float
    tag: str = ""

    def sort_key(self):
        return (-self.score,) + tuple(self.cube.center) + (self.cube.angle,)


@dataclass
class CandidatePool:
    """Deterministically ordered candidates, all with the same side."""

    side: float
    candidates: List[Candidate]

    def __post_init__(self):
        for c in self.candidates:
            if abs(c.cube.side - self.side) > 1e-12 * self.side:
                raise InputError("pool contains a cube with a different side")
        self.candidates = sorted(self.candidates, key=Candidate.sort_key)

    def __len__(self):
        return len(self.candidates)

    def restricted(self, keep) -> "CandidatePool":
        return CandidatePool(self.side, [c for c in self.candidates if keep(c)])

    def to_json(self) -> dict:
        return {"side": self.side, "candidates": [
            {"center": list(c.cube.center), "side": c.cube.side,
             "angle": c.cube.angle, "score": c.score, "tag": c.tag}
            for c in self.candidates]}

    @staticmethod
    def from_json(obj) -> "CandidatePool":
        if isinstance(obj, str):
            obj = json.loads(obj)
        cands = [Candidate(Cube(tuple(e["center"]), e["side"], e.get("angle", 0.0)),
                           float(e["score"]), e.get("tag", ""))
                 for e in obj["candidates"]]
        return CandidatePool(float(obj["side"]), cands)


# ---------------------------------------------------------------------------
# half-density slide
# ---------------------------------------------------------------------------

def half_density_slide(cube: Cube, direction: Sequence[float],
                       target: TargetFunction, tol: float = 1e-9,
                       span: Optional[float] = None, max_steps: int = 80) -> Cube:
    """Translate a cube along a direction until its covered fraction is 1/2.

    The fractions at the two ends of the slide span must bracket 1/2
    (BracketError otherwise); bisection then converges unconditionally
    because the fraction is continuous in the translation.
    """
    if not getattr(target, "is_indicator", False):
        raise InputError("half-density slides require an indicator target")
    span = cube.side if span is None else span
    d = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise InputError("slide direction must be nonzero")
    d = d / norm

    def cube_at(t: float) -> Cube:
        center = tuple(np.asarray(cube.center) + t * span * d)
        return Cube(center, cube.side, cube.angle)

    def frac(t: float) -> float:
        return target.fraction(cube_at(t))

    f0 = frac(0.0)
    if abs(f0 - 0.5) <= tol:
        return cube
    f1 = frac(1.0)
    if abs(f1 - 0.5) <= tol:
        return cube_at(1.0)
    if (f0 - 0.5) * (f1 - 0.5) > 0.0:
        raise BracketError(f"fractions {f0:.6f} and {f1:.6f} do not bracket 1/2")
    lo, hi, flo = 0.0, 1.0, f0
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        fm = frac(mid)
        if abs(fm - 0.5) <= tol:
            return cube_at(mid)
        if (flo - 0.5) * (fm - 0.5) <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return cube_at(0.5 * (lo + hi))


# ---------------------------------------------------------------------------
# exact 1-d supremum over a single sliding interval
# ---------------------------------------------------------------------------

def exact_1d_argmax(intervals: Sequence[Tuple[float, float]], eps: float
                    ) -> Tuple[float, float]:
    """Exact sup of the interval oscillation over all positions, with argmax.

    The covered fraction t(x) of [x, x + eps] is piecewise linear with
    breakpoints where either end crosses a set endpoint, so the supremum of
    2 t (1 - t) is attained at a breakpoint or at a t = 1/2 crossing.
    Returns (sup oscillation, center of a maximizing interval).
    """
    if eps <= 0.0:
        raise InputError("interval length must be positive")
    if not intervals:
        return 0.0, 0.0
    ends = sorted({x for a, b in intervals for x in (a, b, a - eps, b - eps)})

    def coverage(x: float) -> float:
        lo, hi = x, x + eps
        tot = 0.0
        for a, b in intervals:
            tot += max(0.0, min(hi, b) - max(lo, a))
        return tot / eps

    def osc(t: float) -> float:
        return 2.0 * t * (1.0 - t)

    best_val, best_x = 0.0, ends[0]
    ts = [coverage(x) for x in ends]
    for x, t in zip(ends, ts):
        if osc(t) > best_val + 1e-15:
            best_val, best_x = osc(t), x
    for (x0, t0), (x1, t1) in zip(zip(ends, ts), zip(ends[1:], ts[1:])):
        if (t0 - 0.5) * (t1 - 0.5) < 0.0 and t1 != t0:
            xs = x0 + (0.5 - t0) / (t1 - t0) * (x1 - x0)
            if osc(0.5) > best_val + 1e-15:
                best_val, best_x = 0.5, xs
    return best_val, best_x + eps / 2.0


# ---------------------------------------------------------------------------
# candidate generation
# ---------------------------------------------------------------------------

def _region_box(region: Region, target: TargetFunction, eps: float) -> AxisBox:
    """Bounded working window for lattice enumeration."""
    if isinstance(region, AxisBox):
        return region
    if isinstance(region, PolygonRegion):
        v = region._verts
        return AxisBox(tuple(v.min(axis=0)), tuple(v.max(axis=0)))
    bb = target.bbox()
    if bb is None:
        raise InputError(
            "unbounded target needs a bounded region for candidate generation")
    lo, hi = bb
    pad = 2.0 * eps
    return AxisBox(tuple(np.asarray(lo) - pad), tuple(np.asarray(hi) + pad))


def _cube_centers_in_box(box: AxisBox, eps: float, angle: float,
                         shift: np.ndarray) -> np.ndarray:
    """Centers of a rotated eps-lattice intersecting the box (2-d)."""
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([(c, -s), (s, c)])
    corners = np.array([(box.mins[0], box.mins[1]), (box.maxs[0], box.mins[1]),
                        (box.maxs[0], box.maxs[1]), (box.mins[0], box.maxs[1])])
    ucorners = corners @ rot  # = R^T x per row
    ulo = ucorners.min(axis=0) - eps
    uhi = ucorners.max(axis=0) + eps
    k0 = np.arange(math.floor((ulo[0] - shift[0]) / eps),
                   math.ceil((uhi[0] - shift[0]) / eps) + 1)
    k1 = np.arange(math.floor((ulo[1] - shift[1]) / eps),
                   math.ceil((uhi[1] - shift[1]) / eps) + 1)
    uu, vv = np.meshgrid(k0 * eps + shift[0] + eps / 2.0,
                         k1 * eps + shift[1] + eps / 2.0, indexing="ij")
    centers_u = np.stack([uu.reshape(-1), vv.reshape(-1)], axis=1)
    return centers_u @ rot.T


def _inside_box_mask(centers: np.ndarray, box: AxisBox, eps: float,
                     angle: float) -> np.ndarray:
    c, s = abs(math.cos(angle)), abs(math.sin(angle))
    e = (eps / 2.0) * (c + s)
    tol = 1e-9 * eps
    mask = np.ones(len(centers), dtype=bool)
    for k in range(2):
        mask &= centers[:, k] >= box.mins[k] + e - tol
        mask &= centers[:, k] <= box.maxs[k] - e + tol
    return mask


def _raster_straddle_mask(grid, centers: np.ndarray, half_extent: float) -> np.ndarray:
    """True where the cube's bbox contains at least one boundary cell."""
    sat = grid.boundary_sat
    h = grid.cell
    lo0 = np.clip(np.floor((centers[:, 0] - half_extent - grid.origin[0]) / h
                           ).astype(int), 0, grid.dims[0])
    hi0 = np.clip(np.ceil((centers[:, 0] + half_extent - grid.origin[0]) / h
                          ).astype(int), 0, grid.dims[0])
    lo1 = np.clip(np.floor((centers[:, 1] - half_extent - grid.origin[1]) / h
                           ).astype(int), 0, grid.dims[1])
    hi1 = np.clip(np.ceil((centers[:, 1] + half_extent - grid.origin[1]) / h
                          ).astype(int), 0, grid.dims[1])
    counts = box_sums_2d(sat, lo0, lo1, hi0, hi1)
    return counts > 0


def _target_grid(target: TargetFunction):
    if isinstance(target, IndicatorRaster):
        return target.raster
    if isinstance(target, IntegerRaster):
        return target.zraster
    return None


def _lattice_candidates_2d(target: TargetFunction, region: Region, eps: float,
                           config: PackingConfig, box: AxisBox) -> List[Candidate]:
    grid = _target_grid(target)
    angles = config.angle_tuple()
    m = config.offsets_per_orientation
    out: List[Candidate] = []
    for angle in angles:
        for a in range(m):
            for b in range(m):
                shift = np.array([a, b]) * (eps / m)
                centers = _cube_centers_in_box(box, eps, angle, shift)
                keep = _inside_box_mask(centers, box, eps, angle)
                if grid is not None:
                    win = grid.window()
                    keep &= _inside_box_mask(centers, win, eps, angle)
                centers = centers[keep]
                if len(centers) == 0:
                    continue
                c, s = abs(math.cos(angle)), abs(math.sin(angle))
                half_extent = (eps / 2.0) * (c + s)
                if grid is not None:
                    centers = centers[_raster_straddle_mask(grid, centers, half_extent)]
                elif hasattr(target, "boundary_distance"):
                    dist = target.boundary_distance(centers)
                    centers = centers[dist <= eps * SQRT2 / 2.0 + 1e-12]
                if len(out) + len(centers) > config.max_pool:
                    raise ResourceLimitError("candidate pool exceeds max_pool")
                for cx, cy in centers:
                    cube = Cube((float(cx), float(cy)), eps, angle)
                    if not isinstance(region, (AllSpace, AxisBox)):
                        if not region.contains_cube(cube):
                            continue
                    score = target.oscillation(cube)
                    if score > config.score_floor:
                        out.append(Candidate(cube, score, "lattice"))
    return out


def _lattice_candidates_1d(target: TargetFunction, region: Region, eps: float,
                           config: PackingConfig, box: AxisBox) -> List[Candidate]:
    m = config.offsets_per_orientation
    lo, hi = box.mins[0], box.maxs[0]
    out: List[Candidate] = []
    for a in range(m):
        shift = a * eps / m
        k0 = math.floor((lo - shift) / eps)
        k1 = math.ceil((hi - shift) / eps)
        for k in range(k0, k1 + 1):
            c = k * eps + shift + eps / 2.0
            if c - eps / 2.0 < lo - 1e-9 * eps or c + eps / 2.0 > hi + 1e-9 * eps:
                continue
            cube = Cube((float(c),), eps)
            score = target.oscillation(cube)
            if score > config.score_floor:
                out.append(Candidate(cube, score, "lattice"))
    if isinstance(target, IndicatorShape) and hasattr(target.shape, "intervals"):
        val, center = exact_1d_argmax(target.shape.intervals, eps)
        if val > config.score_floor:
            cube = Cube((float(center),), eps)
            if (cube.interval()[0] >= lo - 1e-9 and cube.interval()[1] <= hi + 1e-9):
                out.append(Candidate(cube, target.oscillation(cube), "argmax"))
    return out


def _try_slide(cube: Cube, normal, target: TargetFunction, tol: float) -> Optional[Cube]:
    try:
        return half_density_slide(cube, normal, target, tol=tol)
    except (BracketError, ContractError):
        # no half-density crossing, or a probe left a raster window
        return None


def _adapted_shape_candidates(target: IndicatorShape, region: Region, eps: float,
                              config: PackingConfig, box: AxisBox,
                              score_target: Optional[TargetFunction] = None
                              ) -> List[Candidate]:
    """Boundary chains: cubes straddling the boundary at side spacing, slid to 1/2."""
    score_target = score_target or target
    try:
        comps = boundary_components(target.shape, box)
    except InputError:
        return []
    total = sum(c.length for c in comps)
    if total <= 0.0:
        return []
    phases = (0.0, 0.5, 0.25, 0.75)
    budget = config.boundary_samples
    if budget is None:
        budget = min(int(math.ceil(len(phases) * total / eps)), 200_000)
    per_phase = max(1, budget // len(phases))
    out: List[Candidate] = []
    grid = _target_grid(score_target)
    axis_only = config.angle_tuple() == (0.0,)
    for comp in comps:
        n_here = max(1, int(round(per_phase * comp.length / total)))
        spacing = max(eps, comp.length / n_here)
        for phase in phases:
            s = phase * eps + 0.5 * spacing
            while s < comp.length + 0.25 * spacing:
                if comp.closed or (eps / 2.0 - 1e-12 <= s <= comp.length - eps / 2.0 + 1e-12):
                    s_eval = min(s % comp.length if comp.closed else s,
                                 comp.length * (1.0 - 1e-15))
                    p = comp.point_at(s_eval)
                    nu = comp.normal_at(s_eval)
                    angle = 0.0 if axis_only else normalize_angle(
                        math.atan2(nu[1], nu[0]))
                    start = (p[0] - (eps / 2.0) * nu[0], p[1] - (eps / 2.0) * nu[1])
                    cube = Cube(start, eps, angle)
                    slid = _try_slide(cube, nu, target, config.slide_tol)
                    for cand_cube in ([slid] if slid is not None else [Cube(p, eps, angle)]):
                        if not region.contains_cube(cand_cube):
                            continue
                        if grid is not None and not grid.window().contains_cube(cand_cube):
                            continue
                        score = score_target.oscillation(cand_cube)
                        if score > config.score_floor:
                            out.append(Candidate(cand_cube, score, "boundary"))
                s += spacing
    return out


def _raster_boundary_cells(grid) -> np.ndarray:
    mask = grid.boundary_cell_mask()
    return np.argwhere(mask)


def _estimate_outward_normal(level: IndicatorRaster, idx: np.ndarray, eps: float
                             ) -> Optional[np.ndarray]:
    """Occupancy-gradient normal around a boundary cell, from box counts.

    Central difference of the window count under a one-cell shift; the
    smoothing keeps the direction stable against staircase quantization,
    which matters because packed neighbors only sit side to side when
    their angles agree with the local boundary direction.
    """
    grid = level.raster
    r = max(1, int(round(2.0 * eps / grid.cell)))
    g = np.zeros(2)
    for axis in range(2):
        lo = [max(0, idx[0] - r), max(0, idx[1] - r)]
        hi = [min(grid.dims[0], idx[0] + r + 1), min(grid.dims[1], idx[1] + r + 1)]
        lo_m, hi_m = list(lo), list(hi)
        lo_p, hi_p = list(lo), list(hi)
        lo_m[axis] = max(0, lo_m[axis] - 1)
        hi_m[axis] = max(0, hi_m[axis] - 1)
        lo_p[axis] = min(grid.dims[axis], lo_p[axis] + 1)
        hi_p[axis] = min(grid.dims[axis], hi_p[axis] + 1)
        minus = box_sum_index(grid.sat, tuple(lo_m), tuple(hi_m))
        plus = box_sum_index(grid.sat, tuple(lo_p), tuple(hi_p))
        g[axis] = minus - plus
    norm = float(np.linalg.norm(g))
    if norm == 0.0:
        return None
    return g / norm


def _adapted_raster_candidates(level: IndicatorRaster, region: Region, eps: float,
                               config: PackingConfig,
                               score_target: TargetFunction) -> List[Candidate]:
    """Normal-aligned cubes along a rasterized boundary, slid to half density.

    Tangential sub-cell offsets refine placement so admitted cubes can sit
    nearly side-to-side despite the cell quantization of the boundary.
    """
    grid = level.raster
    cells = _raster_boundary_cells(grid)
    if len(cells) == 0:
        return []
    steps = max(1, config.tangential_steps)
    budget = config.boundary_samples
    if budget is not None and len(cells) * steps > budget:
        stride = int(math.ceil(len(cells) * steps / budget))
        cells = cells[::stride]
    h = grid.cell
    out: List[Candidate] = []
    win = grid.window()
    axis_only = config.angle_tuple() == (0.0,)
    for idx in cells:
        nu = _estimate_outward_normal(level, idx, eps)
        if nu is None:
            continue
        center = np.asarray(grid.origin) + (idx + 0.5) * h
        angle = 0.0 if axis_only else normalize_angle(math.atan2(nu[1], nu[0]))
        tangent = np.array([-nu[1], nu[0]])
        for j in range(steps):
            offset = (j - (steps - 1) / 2.0) * (h / steps)
            p = center + offset * tangent
            start = Cube((float(p[0] - eps / 2.0 * nu[0]),
                          float(p[1] - eps / 2.0 * nu[1])), eps, angle)
            end = Cube((float(p[0] + eps / 2.0 * nu[0]),
                        float(p[1] + eps / 2.0 * nu[1])), eps, angle)
            lo0, hi0 = start.bbox()
            lo1, hi1 = end.bbox()
            # every probed position lies between start and end, so keeping
            # both bboxes inside the window keeps every probe scoreable
            if (min(lo0[0], lo1[0]) < win.mins[0]
                    or min(lo0[1], lo1[1]) < win.mins[1]
                    or max(hi0[0], hi1[0]) > win.maxs[0]
                    or max(hi0[1], hi1[1]) > win.maxs[1]):
                continue
            slid = _try_slide(start, nu, level, config.slide_tol)
            if slid is None:
                continue
            if not win.contains_cube(slid) or not region.contains_cube(slid):
                continue
            score = score_target.oscillation(slid)
            if score > config.score_floor:
                out.append(Candidate(slid, score, "boundary"))
    return out


def dyadic_candidates(raster: RasterSet, level: int,
                      score_target: Optional[TargetFunction] = None) -> List[Candidate]:
    """Axis cubes of the dyadic boundary class, scored from exact box counts.

    Every returned candidate has occupancy in [1/4, 3/4], hence score
    2 t (1 - t) at least 3/8; in particular at least 1/4.
    """
    decomp = dyadic_decompose(raster, level)
    side = decomp.cube_side
    out: List[Candidate] = []
    flat_counts = decomp.counts.reshape(-1)
    for flat in decomp.boundary:
        t = flat_counts[flat] / decomp.cells_per_cube
        lo, hi = decomp.cube_bounds(int(flat))
        center = tuple((lo + hi) / 2.0)
        cube = Cube(center, side)
        score = (2.0 * t * (1.0 - t) if score_target is None
                 else score_target.oscillation(cube))
        out.append(Candidate(cube, float(score), "dyadic"))
    return out


def generate_pool(target, region: Region, eps: float,
                  config: Optional[PackingConfig] = None) -> CandidatePool:
    """Build the deterministic candidate pool for one evaluation.

    Combines shifted lattices over the configured orientations with
    boundary-adapted half-density cubes (per level set for integer
    targets) and, for unit-window rasters at an exactly dyadic side, the
    dyadic boundary class.  Candidates scoring at or below the floor are
    dropped; duplicates are merged.
    """
    target = make_target(target)
    config = config or PackingConfig()
    if eps <= 0.0:
        raise InputError("cube side must be positive")
    if (isinstance(target, IndicatorShape) and target.bbox() is None
            and target.shape.volume() == 0.0):
        return CandidatePool(eps, [])  # empty set oscillates nowhere
    box = _region_box(region, target, eps)
    out: List[Candidate] = []
    if target.dim == 1:
        out.extend(_lattice_candidates_1d(target, region, eps, config, box))
    else:
        out.extend(_lattice_candidates_2d(target, region, eps, config, box))
        if isinstance(target, IndicatorShape):
            out.extend(_adapted_shape_candidates(target, region, eps, config, box))
        elif isinstance(target, IndicatorRaster):
            out.extend(_adapted_raster_candidates(target, region, eps, config, target))
        elif isinstance(target, IntegerRaster):
            for _, level in target.level_targets():
                out.extend(_adapted_raster_candidates(level, region, eps, config, target))
        grid = _target_grid(target)
        if grid is not None:
            win = grid.window()
            log = math.log2(1.0 / eps)
            lvl = int(round(log))
            unit = all(abs(lo) < 1e-9 and abs(hi - 1.0) < 1e-9
                       for lo, hi in zip(win.mins, win.maxs))
            dims_ok = all(d % (2 ** lvl) == 0 for d in grid.dims) if lvl >= 0 else False
            if unit and abs(log - lvl) < 1e-12 and dims_ok:
                base = grid if isinstance(target, IndicatorRaster) else None
                if base is not None:
                    cands = dyadic_candidates(base, lvl, target)
                    out.extend(c for c in cands if c.score > config.score_floor)
    # dedup identical cubes, keeping the first (generation order is fixed)
    seen: Dict[Tuple, Candidate] = {}
    for c in out:
        key = (round(c.cube.center[0], 12),
               round(c.cube.center[-1], 12),
               round(c.cube.angle, 12))
        if key not in seen:
            seen[key] = c
    return CandidatePool(eps, list(seen.values()))


# ---------------------------------------------------------------------------
# packing
# ---------------------------------------------------------------------------

class _SpatialHash:
    """Constant-radius conflict lookup for equal-side cubes."""

    def __init__(self, side: float, dim: int):
        self.side = side
        self.dim = dim
        self.buckets: Dict[Tuple[int, ...], List[Cube]] = {}

    def _key(self, center) -> Tuple[int, ...]:
        return tuple(int(math.floor(c / self.side)) for c in center)

    def conflicts(self, cube: Cube) -> bool:
        key = self._key(cube.center)
        rng = range(-2, 3)
        for delta in itertools.product(*[rng] * self.dim):
            other = self.buckets.get(tuple(k + d for k, d in zip(key, delta)))
            if other:
                for b in other:
                    if not cubes_disjoint(cube, b):
                        return True
        return False

    def add(self, cube: Cube) -> None:
        self.buckets.setdefault(self._key(cube.center), []).append(cube)


def _greedy_over(ordered: Sequence[Candidate], side: float,
                 cap: Optional[int]) -> List[Candidate]:
    if cap is not None and cap <= 0:
        return []
    chosen: List[Candidate] = []
    grid = _SpatialHash(side, ordered[0].cube.dim if ordered else 1)
    for cand in ordered:
        if cap is not None and len(chosen) >= cap:
            break
        if not grid.conflicts(cand.cube):
            chosen.append(cand)
            grid.add(cand.cube)
    return chosen


def greedy_pack(pool: CandidatePool, cap: Optional[int]) -> List[Candidate]:
    """Admit candidates by descending score (position-lex tie-break) while
    pairwise disjoint, stopping at the cardinality cap."""
    return _greedy_over(pool.candidates, pool.side, cap)


# more unique angles than this means a continuously adapted pool, where
# one-orientation subpools degenerate to single candidates
_MAX_ANGLE_STARTS = 12


def multi_start_greedy(pool: CandidatePool, cap: Optional[int]) -> List[Candidate]:
    """Best greedy run over several deterministic candidate orders.

    Starts: descending score on the full pool; descending score on each
    fixed-orientation subpool (which makes the axis-restricted functional a
    true lower bound for the rotating one on the same pool, and is skipped
    when the pool carries continuously many angles); and a position sweep
    that ignores score jitter, which packs dense near-equal-score boundary
    runs far tighter than score order (score-ordered admission on a jittery
    one-dimensional run degenerates to random sequential adsorption at
    roughly three-quarters density).
    """
    best = greedy_pack(pool, cap)
    best_val = sum(c.score for c in best)
    angles = sorted({c.cube.angle for c in pool.candidates})
    if 1 < len(angles) <= _MAX_ANGLE_STARTS:
        for angle in angles:
            sub = pool.restricted(lambda c, a=angle: c.cube.angle == a)
            fam = greedy_pack(sub, cap)
            val = sum(c.score for c in fam)
            if val > best_val + 1e-15:
                best, best_val = fam, val
    if pool.candidates:
        top = pool.candidates[0].score
        near_top = [c for c in pool.candidates if c.score >= 0.9 * top]
        sweep = sorted(near_top,
                       key=lambda c: tuple(c.cube.center) + (c.cube.angle,
                                                             -c.score))
        fam = _greedy_over(sweep, pool.side, cap)
        val = sum(c.score for c in fam)
        if val > best_val + 1e-15:
            best, best_val = fam, val
    return best


def exhaustive_pack(pool: CandidatePool, cap: Optional[int],
                    max_candidates: int = 30, max_cap: int = 6) -> List[Candidate]:
    """Provably optimal packing by branch and bound, for small pools only.

    Candidate permutations cannot change the result: ties in total score are
    broken toward the lexicographically smallest sorted cube key sequence.
    """
    cands = sorted(pool.candidates, key=Candidate.sort_key)
    n = len(cands)
    if n > max_candidates:
        raise ResourceLimitError(
            f"exhaustive packing capped at {max_candidates} candidates, got {n}")
    eff_cap = min(cap if cap is not None else max_cap, max_cap)
    conflict = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if not cubes_disjoint(cands[i].cube, cands[j].cube):
                conflict[i] |= 1 << j
                conflict[j] |= 1 << i
    scores = [c.score for c in cands]
    best_val = -1.0
    best_keys: Optional[Tuple] = None
    best_set: List[int] = []

    def key_of(idxs: List[int]) -> Tuple:
        return tuple(sorted(cands[i].sort_key() for i in idxs))

    def bound(i: int, room: int) -> float:
        # scores are sorted descending, so the next `room` are the best left
        return sum(scores[i:i + room])

    def dfs(i: int, blocked: int, val: float, picked: List[int]):
        nonlocal best_val, best_keys, best_set
        if val > best_val + 1e-15:
            best_val, best_keys, best_set = val, key_of(picked), list(picked)
        elif abs(val - best_val) <= 1e-15 and best_keys is not None:
            key = key_of(picked)
            if key < best_keys:
                best_keys, best_set = key, list(picked)
        room = eff_cap - len(picked)
        if i >= n or room == 0:
            return
        if val + bound(i, room) < best_val - 1e-15:
            return
        if not (blocked >> i) & 1:
            picked.append(i)
            dfs(i + 1, blocked | conflict[i], val + scores[i], picked)
            picked.pop()
        dfs(i + 1, blocked, val, picked)

    dfs(0, 0, 0.0, [])
    return [cands[i] for i in best_set]


# ---------------------------------------------------------------------------
# density cell construction (n = 2)
# ---------------------------------------------------------------------------

def _axis_box_fraction(target: TargetFunction, lo: np.ndarray, hi: np.ndarray) -> float:
    """Occupied fraction of an axis box, tolerating boxes beyond raster windows."""
    if isinstance(target, IndicatorShape):
        side = float(hi[0] - lo[0])
        center = tuple((lo + hi) / 2.0)
        from .geometry import volume_fraction
        return volume_fraction(Cube(center, side), target.shape)
    if isinstance(target, IndicatorRaster):
        grid = target.raster
        (i0, j0), (i1, j1) = grid.index_bounds_for_bbox(lo, hi)
        if i1 <= i0 or j1 <= j0:
            return 0.0
        h = grid.cell
        idx = np.arange(i0, i1)
        ax = grid.origin[0] + idx * h
        wx = np.clip(np.minimum(ax + h, hi[0]) - np.maximum(ax, lo[0]), 0.0, None)
        jdx = np.arange(j0, j1)
        ay = grid.origin[1] + jdx * h
        wy = np.clip(np.minimum(ay + h, hi[1]) - np.maximum(ay, lo[1]), 0.0, None)
        covered = float((wx[:, None] * wy[None, :] * grid.bits[i0:i1, j0:j1]).sum())
        return covered / float((hi[0] - lo[0]) * (hi[1] - lo[1]))
    raise InputError("density construction needs an indicator target")


def density_cube_family(target, delta: float,
                        thresholds: DensityThresholds = DENSITY,
                        window: Optional[AxisBox] = None) -> List[Cube]:
    """Axis cubes of side delta straddling the target's occupancy interface.

    Partitions the plane into half-side cells, marks cells more than half
    occupied, walks the marked cells that touch an unmarked face neighbor,
    keeps a maximal subfamily whose centers differ by at least 3.5 delta in
    some coordinate, and emits for each survivor a delta cube containing the
    cell and its unmarked neighbor.  Each emitted cube has occupancy
    strictly above 1/8 and at most 7/8, and the concentric double cubes are
    pairwise disjoint; both facts are re-checked and violations raise.

    Unbounded targets (a half plane, say) need an explicit window; the grid
    then covers the window plus a margin, and cells beyond the grid are
    treated like their nearest edge cell, which can only under-select
    interface cells and never breaks the occupancy guarantees.
    """
    target = make_target(target)
    if target.dim != 2:
        raise InputError("density construction is 2-d only")
    if delta <= 0.0:
        raise InputError("delta must be positive")
    half = delta / 2.0
    if window is not None:
        lo_w = np.asarray(window.mins, dtype=float)
        hi_w = np.asarray(window.maxs, dtype=float)
    else:
        bb = target.bbox()
        if bb is None:
            raise InputError(
                "density construction needs a bounded target or a window")
        lo_w, hi_w = np.asarray(bb[0], dtype=float), np.asarray(bb[1], dtype=float)
    i0 = math.floor(lo_w[0] / half) - 1
    j0 = math.floor(lo_w[1] / half) - 1
    ni = math.ceil(hi_w[0] / half) - i0 + 2
    nj = math.ceil(hi_w[1] / half) - j0 + 2
    if ni * nj > 4_000_000:
        raise ResourceLimitError("density cell grid too large")
    frac = np.zeros((ni, nj))
    for a in range(ni):
        x0 = (i0 + a) * half
        for b in range(nj):
            y0 = (j0 + b) * half
            frac[a, b] = _axis_box_fraction(target, np.array([x0, y0]),
                                            np.array([x0 + half, y0 + half]))
    dense = frac > thresholds.core_fraction
    padded = np.pad(dense, 1, mode="edge")
    nbr_out = (~padded[:-2, 1:-1] | ~padded[2:, 1:-1]
               | ~padded[1:-1, :-2] | ~padded[1:-1, 2:])
    interface = dense & nbr_out
    cells = np.argwhere(interface)
    sep = thresholds.separation_factor * delta
    kept: List[np.ndarray] = []
    for ab in cells:  # lexicographic order; maximal by greedy admission
        center = np.array([(i0 + ab[0] + 0.5) * half, (j0 + ab[1] + 0.5) * half])
        ok = True
        for other in kept:
            if np.max(np.abs(center - other)) < sep - 1e-12:
                ok = False
                break
        if ok:
            kept.append(center)
    cubes: List[Cube] = []
    for center in kept:
        a = int(round(center[0] / half - 0.5)) - i0
        b = int(round(center[1] / half - 0.5)) - j0
        for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            na, nb = a + da, b + db
            outside = (0 <= na < ni and 0 <= nb < nj) and not dense[na, nb]
            if not outside:
                continue
            # delta cube covering the cell pair, centered across the pair axis
            if da != 0:
                x_lo = (i0 + min(a, na)) * half
                y_lo = (j0 + b) * half - delta / 4.0
            else:
                x_lo = (i0 + a) * half - delta / 4.0
                y_lo = (j0 + min(b, nb)) * half
            cube = Cube((x_lo + delta / 2.0, y_lo + delta / 2.0), delta)
            t = _axis_box_fraction(target, np.array([x_lo, y_lo]),
                                   np.array([x_lo + delta, y_lo + delta]))
            if not (thresholds.min_fraction - 1e-12 < t < 1.0 - thresholds.min_fraction + 1e-12):
                raise InvariantViolation(
                    f"density cube occupancy {t:.6f} outside the guaranteed bounds")
            cubes.append(cube)
            break
    for i in range(len(cubes)):
        for j in range(i + 1, len(cubes)):
            big_i = Cube(cubes[i].center, 2.0 * delta)
            big_j = Cube(cubes[j].center, 2.0 * delta)
            if not cubes_disjoint(big_i, big_j):
                raise InvariantViolation("doubled density cubes overlap")
    return cubes
