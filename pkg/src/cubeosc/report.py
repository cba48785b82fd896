"""Result rows and file emission (CSV, JSON, SVG).

Output is byte-reproducible for a fixed spec and seed: floats are written
in shortest round-trip form, rows keep spec order, and the SVG renderer
pins matplotlib's hash salt and strips the date metadata.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .functionals import FunctionalEstimate

CSV_SCHEMA = "cubeosc-csv v1"
JSON_SCHEMA = "cubeosc-json v1"

SWEEP_COLUMNS = (
    "epsilon", "value", "doubled_value", "cap", "cubes_used",
    "upper_bound_half", "upper_bound_per", "target_limit", "gap_to_target",
    "quadrature_slack", "runtime_ms",
)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    value: float
    doubled_value: float
    cap: Optional[int]
    cubes_used: int
    upper_bound_half: Optional[float]
    upper_bound_per: Optional[float]
    target_limit: Optional[float]
    gap_to_target: Optional[float]
    quadrature_slack: float
    runtime_ms: int

    def as_list(self) -> list:
        return [getattr(self, c) for c in SWEEP_COLUMNS]

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in SWEEP_COLUMNS}


def row_from_estimate(est: FunctionalEstimate,
                      target_limit: Optional[float] = None,
                      runtime_ms: int = 0) -> SweepRow:
    """Flatten an estimate, attaching the asymptotic reference value.

    ``target_limit`` is the undoubled limit the sweep is tracking (for the
    capped indicator functional, half of min{1, Per}); the gap column is
    limit minus value, so it shrinks toward 0 from above as the bracket
    tightens.
    """
    return SweepRow(
        epsilon=est.epsilon,
        value=est.value,
        doubled_value=est.doubled_value,
        cap=est.cap,
        cubes_used=est.n_cubes,
        upper_bound_half=est.upper_bounds.get("half_cap"),
        upper_bound_per=est.upper_bounds.get("half_perimeter"),
        target_limit=target_limit,
        gap_to_target=(target_limit - est.value
                       if target_limit is not None else None),
        quadrature_slack=est.quadrature_slack,
        runtime_ms=runtime_ms,
    )


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {CSV_SCHEMA}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([_cell(v) for v in row.as_list()])


def read_sweep_csv(path) -> List[dict]:
    path = Path(path)
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != f"# {CSV_SCHEMA}":
            raise ValueError(f"unexpected CSV schema line {header!r}")
        out = []
        for rec in csv.DictReader(fh):
            row = {}
            for key, raw in rec.items():
                if raw == "":
                    row[key] = None
                elif key in ("cap", "cubes_used", "runtime_ms"):
                    row[key] = int(raw)
                else:
                    row[key] = float(raw)
            out.append(row)
        return out


def write_sweep_json(rows: Sequence[SweepRow],
                     estimates: Sequence[FunctionalEstimate],
                     meta: dict, path) -> None:
    payload = {
        "schema": JSON_SCHEMA,
        "meta": meta,
        "rows": [r.as_dict() for r in rows],
        "estimates": [e.to_json() for e in estimates],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def write_estimate_json(est: FunctionalEstimate, meta: dict, path) -> None:
    payload = {"schema": JSON_SCHEMA, "meta": meta, "estimate": est.to_json()}
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def render_sweep_svg(rows: Sequence[SweepRow], path,
                     reference: Optional[float] = None,
                     title: str = "") -> None:
    """Line chart of the doubled values against the side length.

    The reference line is the doubled limit (min{1, Per} for the capped
    indicator functional).  Deterministic output: fixed hash salt, no date
    metadata, linear axes with the side decreasing to the right.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "cubeosc"
    eps = [r.epsilon for r in rows]
    doubled = [r.doubled_value for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(eps, doubled, marker="o", color="#1f6f8b", label="2 x value")
    uppers = [r.upper_bound_half for r in rows]
    if all(u is not None for u in uppers):
        ax.plot(eps, [2 * u for u in uppers], linestyle=":", color="#888888",
                label="2 x cap bound")
    if reference is not None and math.isfinite(reference):
        ax.axhline(reference, linestyle="--", color="#c0392b",
                   label="limit")
    ax.set_xlabel("cube side")
    ax.set_ylabel("doubled value")
    ax.invert_xaxis()  # reads left to right as the side shrinks
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_family_svg(est: FunctionalEstimate, path, target=None,
                      title: str = "") -> None:
    """Draw the packed cube family, optionally over the target's outline.

    Shapes contribute their boundary polylines, rasters a light occupancy
    image; cubes are drawn as outlined squares, rotated where packed so.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "cubeosc"
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    if target is not None:
        _draw_target(ax, target)
    for cube in est.family.cubes:
        vx = [list(v) for v in cube.vertices()]
        vx.append(vx[0])
        xs = [v[0] for v in vx]
        ys = [v[1] if len(v) > 1 else 0.0 for v in vx]
        ax.plot(xs, ys, color="#1f6f8b", linewidth=0.7)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.2)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _draw_target(ax, target) -> None:
    from .targets import IndicatorRaster, IndicatorShape, make_target
    target = make_target(target)
    if isinstance(target, IndicatorShape):
        from .geometry import boundary_components
        if target.dim == 1:
            for a, b in target.shape.intervals:
                ax.plot([a, b], [0.0, 0.0], color="#c0392b", linewidth=2.0)
            return
        from .geometry import unit_box
        try:
            comps = boundary_components(target.shape)
        except Exception:
            comps = boundary_components(target.shape, unit_box(2))
        for comp in comps:
            n = max(2, min(512, int(comp.length / 1e-3)))
            ss = [comp.length * i / n for i in range(n + 1)]
            pts = [comp.point_at(s) for s in ss]
            if comp.closed:
                pts.append(pts[0])
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    color="#c0392b", linewidth=1.0)
        return
    grid = target.raster if isinstance(target, IndicatorRaster) else target.zraster
    win = grid.window()
    img = grid.bits.T[::-1, :] if isinstance(target, IndicatorRaster) \
        else grid.values.T[::-1, :]
    ax.imshow(img, extent=(win.mins[0], win.maxs[0], win.mins[1], win.maxs[1]),
              cmap="Greys", alpha=0.35, interpolation="nearest")
