"""Named verification suites shared by the CLI `check` command and the tests.

Each suite returns a CheckResult whose ``ok`` flag aggregates hard
assertions; margins and residuals are kept for the report so a failure
shows where the inequality broke, not only that it broke.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from .errors import InputError
from .functionals import evaluate
from .geometry import (ALL_SPACE, Cube, Polygon, unit_box)
from .isoperimetry import (SQRT_2PI, bobkov_check, gauss_cdf, gauss_iso,
                           gauss_quantile, hadwiger_check, k_function,
                           relative_iso_check, t_critical)
from .presets import get_preset
from .raster import RasterSet, ZRaster, raster_perimeter
from .search import (Candidate, CandidatePool, PackingConfig, DENSITY,
                     density_cube_family, dyadic_candidates)
from .targets import IndicatorRaster, IntegerRaster, make_target


@dataclass
class CheckResult:
    suite: str
    ok: bool
    lines: List[str] = field(default_factory=list)
    stats: Dict[str, float] = field(default_factory=dict)

    def merge(self, name: str, passed: bool, detail: str) -> None:
        self.ok = self.ok and passed
        flag = "ok" if passed else "FAIL"
        self.lines.append(f"[{flag}] {name}: {detail}")


# ---------------------------------------------------------------------------
# random inputs shared by several suites
# ---------------------------------------------------------------------------

def random_rectangle(rng: np.random.Generator, margin: float = 0.0) -> Polygon:
    lo = margin
    hi = 1.0 - margin
    x = np.sort(rng.uniform(lo, hi, 2))
    y = np.sort(rng.uniform(lo, hi, 2))
    while x[1] - x[0] < 1e-3 or y[1] - y[0] < 1e-3:
        x = np.sort(rng.uniform(lo, hi, 2))
        y = np.sort(rng.uniform(lo, hi, 2))
    return Polygon(((x[0], y[0]), (x[1], y[0]), (x[1], y[1]), (x[0], y[1])))


def random_star_polygon(rng: np.random.Generator, k_min: int = 5,
                        k_max: int = 10) -> Polygon:
    """Simple polygon star-shaped around a random center, inside the unit box."""
    k = int(rng.integers(k_min, k_max + 1))
    center = rng.uniform(0.35, 0.65, 2)
    while True:
        angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, k))
        gaps = np.diff(angles)
        wrap = 2.0 * math.pi - angles[-1] + angles[0]
        # every gap below pi keeps the center interior, hence the
        # angle-sorted vertex ring simple
        if gaps.min() >= 1e-3 and max(gaps.max(), wrap) < math.pi - 0.05:
            break
    radii = rng.uniform(0.05, 0.25, k)
    verts = center[None, :] + radii[:, None] * np.stack(
        [np.cos(angles), np.sin(angles)], axis=1)
    verts = np.clip(verts, 0.02, 0.98)
    return Polygon(tuple(map(tuple, verts)))


def random_blob_raster(rng: np.random.Generator, n: int = 64) -> RasterSet:
    """Thresholded box-blurred noise: organic boundaries, roughly half full."""
    field_ = rng.random((n + 8, n + 8))
    sat = np.pad(field_, ((1, 0), (1, 0))).cumsum(axis=0).cumsum(axis=1)
    r = 4
    sm = (sat[2 * r + 1:, 2 * r + 1:] + sat[:-2 * r - 1, :-2 * r - 1]
          - sat[2 * r + 1:, :-2 * r - 1] - sat[:-2 * r - 1, 2 * r + 1:])
    sm = sm[:n, :n]
    bits = sm > np.median(sm)
    return RasterSet((0.0, 0.0), 1.0 / n, (n, n), bits)


def random_zraster(rng: np.random.Generator, n: int = 16,
                   vmax: int = 2) -> ZRaster:
    values = rng.integers(-vmax, vmax + 1, size=(n, n)).astype(np.int64)
    return ZRaster((0.0, 0.0), 1.0 / n, (n, n), values)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def gauss_suite() -> CheckResult:
    res = CheckResult("gauss", True)
    iso_half = gauss_iso(0.5)
    err = abs(iso_half - 1.0 / SQRT_2PI)
    res.merge("profile-at-half", err <= 1e-9,
              f"I(1/2) = {iso_half:.12f}, error {err:.3e}")
    ts = np.linspace(1e-6, 1.0 - 1e-6, 1000)
    sym = max(abs(gauss_iso(float(t)) - gauss_iso(float(1.0 - t))) for t in ts)
    res.merge("profile-symmetry", sym <= 1e-12, f"max asymmetry {sym:.3e}")
    grid = np.linspace(0.0, 1.0, 10001)
    kvals = np.array([k_function(float(t)) for t in grid])
    kmin = float(kvals.min())
    res.merge("k-nonnegative", kmin >= -1e-12, f"min K = {kmin:.3e}")
    dist = np.minimum(np.minimum(np.abs(grid), np.abs(grid - 0.5)),
                      np.abs(grid - 1.0))
    away = dist > 1e-3 * (1.0 + 1e-9)  # closed neighborhoods, fp-safe
    kaway = float(np.abs(kvals[away]).min()) if away.any() else math.inf
    res.merge("k-root-isolation", kaway > 1e-6,
              f"min |K| off the roots = {kaway:.3e}")
    h = 1e-5
    worst = 0.0
    for t in np.linspace(0.05, 0.95, 91):
        t = float(t)
        second = (gauss_iso(t + h) - 2.0 * gauss_iso(t) + gauss_iso(t - h)) / h ** 2
        worst = max(worst, abs(second * gauss_iso(t) + 1.0))
    res.merge("second-derivative-identity", worst <= 1e-5,
              f"max |I''*I + 1| = {worst:.3e}")
    rt = max(abs(gauss_cdf(gauss_quantile(float(t))) - float(t))
             for t in np.concatenate([np.array([1e-10, 1 - 1e-10]),
                                      np.linspace(0.001, 0.999, 199)]))
    res.merge("quantile-roundtrip", rt <= 1e-12, f"max roundtrip error {rt:.3e}")
    t0 = t_critical()
    resid = abs(gauss_iso(t0) - SQRT_2PI / 8.0)
    res.merge("profile-eighth-root", resid <= 1e-12,
              f"t0 = {t0:.12f}, residual {resid:.3e}")
    res.stats.update({"iso_half": iso_half, "k_min": kmin, "t0": t0})
    return res


def hadwiger_suite(seed: int = 0, rect_count: int = 10000,
                   poly_count: int = 1000) -> CheckResult:
    res = CheckResult("hadwiger", True)
    box = unit_box(2)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(rect_count):
        rep = hadwiger_check(random_rectangle(rng), box)
        worst = min(worst, rep.margin)
    res.merge("random-rectangles", worst >= -1e-12,
              f"{rect_count} rectangles, min margin {worst:.3e}")
    worst_p = math.inf
    for _ in range(poly_count):
        rep = hadwiger_check(random_star_polygon(rng), box)
        worst_p = min(worst_p, rep.margin)
    res.merge("random-polygons", worst_p >= -1e-12,
              f"{poly_count} polygons, min margin {worst_p:.3e}")
    half = Polygon(((0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)))
    rep = hadwiger_check(half, box)
    res.merge("half-split-equality", abs(rep.margin) <= 1e-12,
              f"lhs {rep.lhs:.12f} rhs {rep.rhs:.12f}")
    res.stats.update({"min_margin_rect": worst, "min_margin_poly": worst_p})
    return res


def relative_iso_suite(seed: int = 0, count: int = 2000) -> CheckResult:
    res = CheckResult("relative-iso", True)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(count):
        side = float(rng.uniform(0.2, 1.0))
        cx, cy = rng.uniform(-0.5, 0.5, 2)
        cube = Cube((float(cx), float(cy)), side)
        lo, hi = cube.bbox()
        x = np.sort(rng.uniform(lo[0], hi[0], 2))
        y = np.sort(rng.uniform(lo[1], hi[1], 2))
        if x[1] - x[0] < 1e-3 or y[1] - y[0] < 1e-3:
            continue
        rect = Polygon(((x[0], y[0]), (x[1], y[0]), (x[1], y[1]), (x[0], y[1])))
        rep = relative_iso_check(rect, cube)
        worst = min(worst, rep.margin)
    res.merge("random-rectangles-in-cubes", worst >= -1e-12,
              f"min margin {worst:.3e}")
    slab = Polygon(((0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)))
    rep = relative_iso_check(slab, Cube((0.5, 0.5), 1.0))
    res.merge("halving-slab-equality", abs(rep.margin) <= 1e-12,
              f"lhs {rep.lhs:.12f} rhs {rep.rhs:.12f}")
    res.stats["min_margin"] = worst
    return res


def scaling_suite(seed: int = 0, instances: int = 20) -> CheckResult:
    """Exact commutation of the capped functional with dilation.

    The multiplier is a power of two, so scaling the shape, the side, and
    every pool cube multiplies all coordinates by an exactly representable
    factor and the packed value must reproduce bit for bit.
    """
    res = CheckResult("scaling", True)
    rng = np.random.default_rng(seed)
    eps = 0.05
    config = PackingConfig(orientations=3, offsets_per_orientation=2,
                           boundary_samples=64)
    worst = 0.0
    for i in range(instances):
        poly = random_star_polygon(rng)
        m = 4.0 if i % 2 == 0 else 0.25
        rho = 1.0 / m
        pool = None
        try:
            from .search import generate_pool
            pool = generate_pool(poly, ALL_SPACE, eps, config)
        except InputError:
            continue
        est_m = evaluate(poly, "M", eps, m_value=m, config=config, pool=pool)
        scaled_pool = CandidatePool(
            rho * eps,
            [Candidate(c.cube.scaled(rho), c.score, c.tag)
             for c in pool.candidates])
        est_i = evaluate(poly.scaled(rho), "I", rho * eps, config=config,
                         pool=scaled_pool)
        resid = abs(est_m.value - m * est_i.value)
        worst = max(worst, resid)
    res.merge("dilation-identity", worst <= 1e-12,
              f"{instances} instances, max residual {worst:.3e}")
    res.stats["max_residual"] = worst
    return res


def lemma43_suite(seed: int = 0, instances: int = 50, cells: int = 64
                  ) -> CheckResult:
    """Axis-restricted value never exceeds the rotating value on nested pools,
    plus the per-cube two-sided relation between the deviation forms."""
    res = CheckResult("lemma43", True)
    rng = np.random.default_rng(seed)
    eps = 1.0 / 16.0
    # margins only need nested pools, not a dense one; budget the slides
    config = PackingConfig(orientations=4, offsets_per_orientation=2,
                           tangential_steps=1, boundary_samples=400,
                           slide_tol=1e-6)
    from .search import generate_pool
    worst = math.inf
    for _ in range(instances):
        raster = random_blob_raster(rng, cells)
        target = make_target(raster)
        pool_full = generate_pool(target, raster.window(), eps, config)
        pool_axis = pool_full.restricted(lambda c: c.cube.angle == 0.0)
        est_i = evaluate(target, "I", eps, raster.window(), pool=pool_full,
                         config=config)
        est_axis = evaluate(target, "AxisB", eps, raster.window(),
                            pool=pool_axis, config=config)
        worst = min(worst, est_i.value - est_axis.value)
    res.merge("axis-dominated", worst >= -1e-12,
              f"{instances} rasters, min (rotating - axis) = {worst:.3e}")
    worst_lo, worst_hi = math.inf, math.inf
    for _ in range(10):
        z = random_zraster(rng, 16)
        target = IntegerRaster(z)
        for _ in range(20):
            side = float(rng.uniform(0.1, 0.4))
            c = rng.uniform(side, 1.0 - side, 2)
            cube = Cube((float(c[0]), float(c[1])), side,
                        float(rng.uniform(0.0, math.pi / 2.0)))
            mad, pair = target.osc_forms(cube)
            worst_lo = min(worst_lo, pair - mad)
            worst_hi = min(worst_hi, 2.0 * mad - pair)
    res.merge("deviation-forms-two-sided",
              worst_lo >= -1e-12 and worst_hi >= -1e-12,
              f"min(pair - mad) = {worst_lo:.3e}, "
              f"min(2 mad - pair) = {worst_hi:.3e}")
    res.stats.update({"min_axis_margin": worst})
    return res


def coarea_suite(seed: int = 0, instances: int = 10) -> CheckResult:
    """Unbounded-cardinality value against the level-set perimeter sum."""
    res = CheckResult("coarea", True)
    rng = np.random.default_rng(seed)
    # the bound holds for every feasible family, so a light pool suffices
    config = PackingConfig(orientations=2, offsets_per_orientation=1,
                           tangential_steps=1, slide_tol=1e-6)
    worst = math.inf
    for _ in range(instances):
        z = random_zraster(rng, 16)
        target = IntegerRaster(z)
        tv_full = sum(raster_perimeter(lvl.raster) for _, lvl in
                      target.level_targets())
        est = evaluate(target, "K", 1.0 / 8.0, config=config)
        worst = min(worst, tv_full - est.value)
    res.merge("level-set-sum-bound", worst >= -1e-9,
              f"{instances} integer rasters, min (TV - value) = {worst:.3e}")
    res.stats["min_tv_margin"] = worst
    return res


def dyadic_suite(seed: int = 0, instances: int = 5) -> CheckResult:
    res = CheckResult("dyadic", True)
    rng = np.random.default_rng(seed)
    worst_score = math.inf
    worst_resid = 0.0
    for _ in range(instances):
        raster = random_blob_raster(rng, 64)
        target = IndicatorRaster(raster)
        for level in (3, 4):
            cands = dyadic_candidates(raster, level)
            for cand in cands:
                worst_score = min(worst_score, cand.score)
            for cand in cands[:10]:
                resid = abs(cand.score - target.oscillation(cand.cube))
                worst_resid = max(worst_resid, resid)
    res.merge("boundary-class-score", worst_score >= 0.25,
              f"min score {worst_score:.6f} (class guarantees >= 3/8)")
    res.merge("score-consistency", worst_resid <= 1e-12,
              f"max |tabulated - recomputed| = {worst_resid:.3e}")
    res.stats["min_score"] = worst_score
    return res


def density_suite() -> CheckResult:
    res = CheckResult("density", True)
    hp = get_preset("halfplane")
    cubes_hp = density_cube_family(hp.target, 1.0 / 8.0, window=hp.region)
    res.merge("halfplane-family", len(cubes_hp) > 0,
              f"{len(cubes_hp)} cubes at delta = 1/8")
    cb = get_preset("checkerboard64")
    cubes_cb = density_cube_family(cb.target, 5.0 / 64.0, window=cb.region)
    res.merge("checkerboard-family", len(cubes_cb) > 0,
              f"{len(cubes_cb)} cubes at delta = 5/64")
    # occupancy strictly inside the open bounds, re-derived from the target
    from .search import _axis_box_fraction
    strict = True
    lo_b = DENSITY.min_fraction
    for preset, cubes in ((hp, cubes_hp), (cb, cubes_cb)):
        target = make_target(preset.target)
        for cube in cubes:
            lo, hi = cube.bbox()
            t = _axis_box_fraction(target, np.asarray(lo), np.asarray(hi))
            if not (lo_b < t < 1.0 - lo_b):
                strict = False
    res.merge("open-occupancy-bounds", strict,
              f"all fractions inside ({lo_b}, {1 - lo_b}) strictly")
    return res


def bobkov_suite() -> CheckResult:
    res = CheckResult("bobkov", True)
    const = np.full((32, 32), 0.37)
    rep = bobkov_check(const)
    res.merge("constant-equality", abs(rep.margin) <= 1e-12,
              f"margin {rep.margin:.3e}")
    n = 64
    x = (np.arange(n) + 0.5) / n
    ramp = np.clip((x - 0.25) / 0.5, 0.0, 1.0)
    rep = bobkov_check(np.tile(ramp, (n, 1)))
    res.merge("clamped-ramp", rep.ok(), f"margin {rep.margin:.3e}, "
              f"slack {rep.slack:.3e}")
    xx, yy = np.meshgrid(x, x, indexing="ij")
    smooth = 1.0 / (1.0 + np.exp(-(0.5 - np.maximum(np.abs(xx - 0.5),
                                                    np.abs(yy - 0.5)) - 0.25)
                                 * 40.0))
    rep = bobkov_check(smooth)
    res.merge("smoothed-half-square", rep.ok(),
              f"margin {rep.margin:.3e}, slack {rep.slack:.3e}")
    return res


SUITES: Dict[str, Callable[[], CheckResult]] = {
    "gauss": gauss_suite,
    "hadwiger": hadwiger_suite,
    "relative-iso": relative_iso_suite,
    "scaling": scaling_suite,
    "coarea": coarea_suite,
    "lemma43": lemma43_suite,
    "dyadic": dyadic_suite,
    "density": density_suite,
    "bobkov": bobkov_suite,
}


def run_suite(name: str) -> CheckResult:
    if name not in SUITES:
        raise InputError(f"unknown check suite {name!r}; "
                         f"pick one of {', '.join(sorted(SUITES))}")
    return SUITES[name]()
