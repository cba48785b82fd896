"""Command line front end.

Exit codes: 0 success, 2 a verified invariant failed, 3 bad input,
4 a resource limit tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .checks import SUITES, run_suite
from .errors import (BracketError, ContractError, InputError,
                     InvalidShapeError, InvariantViolation,
                     ResourceLimitError)
from .functionals import (canonical_kind, evaluate, evaluate_1d_exact,
                          _default_region, _perimeter_bound)
from .geometry import (Shape, region_from_spec, shape_from_json)
from .presets import PRESET_NAMES, get_preset
from .raster import rasterize, read_pgm, read_zraster_csv, write_pgm
from .report import (render_family_svg, render_sweep_svg, row_from_estimate,
                     write_estimate_json, write_sweep_csv, write_sweep_json)
from .search import (Candidate, CandidatePool, PackingConfig, exhaustive_pack,
                     greedy_pack)
from .targets import make_target

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4

KIND_FLAGS = ("i", "axis", "j", "k", "m", "local")


class _Parser(argparse.ArgumentParser):
    # argparse's default error path exits with code 2, which this tool
    # reserves for invariant failures; route usage errors to the input code
    def error(self, message):
        raise InputError(message)


def _load_target(spec: str):
    """Resolve a --shape value: preset name, shape JSON, PGM, or matrix CSV."""
    if spec in PRESET_NAMES:
        preset = get_preset(spec)
        return preset.target, preset
    path = Path(spec)
    if not path.exists():
        raise InputError(f"--shape {spec!r} is neither a preset "
                         f"({', '.join(PRESET_NAMES)}) nor a file")
    suffix = path.suffix.lower()
    if suffix == ".json":
        return shape_from_json(json.loads(path.read_text())), None
    if suffix == ".pgm":
        return read_pgm(path), None
    if suffix == ".csv":
        return read_zraster_csv(path), None
    raise InputError(f"unsupported shape file type {suffix!r} "
                     "(use .json, .pgm, or .csv)")


def _parse_ladder(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError("--eps-ladder wants a:b:steps")
    try:
        a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"bad --eps-ladder value: {exc}")
    if a <= 0 or b <= 0 or steps < 1:
        raise InputError("--eps-ladder needs positive endpoints and steps >= 1")
    if steps == 1:
        return [a]
    ratio = (b / a) ** (1.0 / (steps - 1))
    return [a * ratio ** i for i in range(steps)]


def _config_from_args(args) -> PackingConfig:
    kw = {"seed": args.seed}
    if args.orientations is not None:
        kw["orientations"] = args.orientations
    if args.offsets is not None:
        kw["offsets_per_orientation"] = args.offsets
    if args.boundary_samples is not None:
        kw["boundary_samples"] = args.boundary_samples
    if args.tangential_steps is not None:
        kw["tangential_steps"] = args.tangential_steps
    return PackingConfig(**kw)


def _target_limit(kind: str, target, region, m_value):
    """Expected small-side limit of the doubled value, halved to value scale."""
    per = _perimeter_bound(target, region)
    if per is None:
        return None
    if kind in ("I", "AxisB", "I_localized"):
        return min(1.0, per) / 2.0
    if kind == "M":
        return min(float(m_value), per) / 2.0
    return per / 2.0


def _print_estimate(est, limit) -> None:
    print(f"kind {est.kind}  side {est.epsilon!r}")
    print(f"value {est.value!r}  doubled {est.doubled_value!r}")
    cap = "unbounded" if est.cap is None else str(est.cap)
    print(f"cubes {est.n_cubes}  cap {cap}")
    for name in sorted(est.upper_bounds):
        print(f"upper[{name}] {est.upper_bounds[name]!r}")
    if limit is not None:
        print(f"target_limit {limit!r}  gap {limit - est.value!r}")
    for w in est.warnings:
        print(f"warning: {w}")


def _cmd_eval(args) -> int:
    raw, _preset = _load_target(args.shape)
    target = make_target(raw)
    kind = canonical_kind(args.kind)
    region = (region_from_spec(args.region, target.dim)
              if args.region else None)
    if args.eps is None:
        raise InputError("eval needs --eps")
    config = _config_from_args(args)
    t0 = time.perf_counter()
    est = evaluate(target, kind, args.eps, region, m_value=args.M,
                   config=config, packer=args.packer)
    runtime_ms = int(round((time.perf_counter() - t0) * 1000)) \
        if args.timings else 0
    region_eff = region if region is not None else _default_region(target, kind)
    limit = _target_limit(kind, target, region_eff, args.M)
    _print_estimate(est, limit)
    if args.exact_1d:
        exact = evaluate_1d_exact(target, args.eps)
        print(f"exact_1d {exact!r}  packed {est.value!r}  "
              f"difference {exact - est.value!r}")
    meta = {"shape": args.shape, "kind": kind, "config": config.describe()}
    if args.out_json:
        write_estimate_json(est, meta, args.out_json)
    if args.out_csv:
        write_sweep_csv([row_from_estimate(est, limit, runtime_ms)],
                        args.out_csv)
    if args.out_svg:
        render_family_svg(est, args.out_svg, target=target,
                          title=f"{args.shape}: {est.n_cubes} cubes of side "
                                f"{est.epsilon:g}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    raw, _preset = _load_target(args.shape)
    target = make_target(raw)
    kind = canonical_kind(args.kind)
    region = (region_from_spec(args.region, target.dim)
              if args.region else None)
    if args.eps_ladder:
        ladder = _parse_ladder(args.eps_ladder)
    elif args.eps is not None:
        ladder = [args.eps]
    else:
        raise InputError("sweep needs --eps-ladder (or --eps for one step)")
    config = _config_from_args(args)
    region_eff = region if region is not None else _default_region(target, kind)
    limit = _target_limit(kind, target, region_eff, args.M)
    rows, ests = [], []
    for eps in ladder:
        t0 = time.perf_counter()
        est = evaluate(target, kind, eps, region, m_value=args.M,
                       config=config, packer=args.packer)
        runtime_ms = int(round((time.perf_counter() - t0) * 1000)) \
            if args.timings else 0
        rows.append(row_from_estimate(est, limit, runtime_ms))
        ests.append(est)
        print(f"side {eps!r}  value {est.value!r}  "
              f"doubled {est.doubled_value!r}  cubes {est.n_cubes}")
    meta = {"shape": args.shape, "kind": kind, "config": config.describe(),
            "ladder": [float(e) for e in ladder]}
    if args.out_csv:
        write_sweep_csv(rows, args.out_csv)
    if args.out_json:
        write_sweep_json(rows, ests, meta, args.out_json)
    if args.out_svg:
        ref = None if limit is None else 2.0 * limit
        render_sweep_svg(rows, args.out_svg, reference=ref,
                         title=f"{args.shape} ({kind})")
    return EXIT_OK


def _cmd_check(args) -> int:
    names = args.suites or ["all"]
    if names == ["all"]:
        names = list(SUITES)
    failed = False
    for name in names:
        result = run_suite(name)
        status = "PASS" if result.ok else "FAIL"
        print(f"== {result.suite}: {status}")
        for line in result.lines:
            print("   " + line)
        failed = failed or not result.ok
    return EXIT_INVARIANT if failed else EXIT_OK


def _pinned_pools():
    from .geometry import Cube
    disjoint = CandidatePool(0.1, [
        Candidate(Cube((0.2, 0.2), 0.1), 1.0, "a"),
        Candidate(Cube((0.5, 0.5), 0.1), 2.0, "b"),
        Candidate(Cube((0.8, 0.8), 0.1), 3.0, "c"),
    ])
    conflict = CandidatePool(0.1, [
        Candidate(Cube((0.0, 0.0), 0.1), 3.0, "mid"),
        Candidate(Cube((0.095, 0.0), 0.1), 2.0, "right"),
        Candidate(Cube((-0.095, 0.0), 0.1), 2.0, "left"),
    ])
    return (("disjoint-triple", disjoint, 2),
            ("greedy-trap", conflict, 2))


def _cmd_oracle_compare(args) -> int:
    print("pool                 greedy  optimal  gap")
    worst = 0.0
    for name, pool, cap in _pinned_pools():
        g = sum(c.score for c in greedy_pack(pool, cap))
        e = sum(c.score for c in exhaustive_pack(pool, cap))
        worst = max(worst, e - g)
        print(f"{name:<20} {g!r:>7} {e!r:>8}  {e - g!r}")
    rng = np.random.default_rng(args.seed)
    from .geometry import Cube
    for i in range(args.pools):
        count = int(rng.integers(5, 26))
        side = 0.08
        cands = [Candidate(Cube((float(x), float(y)), side), float(s))
                 for x, y, s in zip(rng.uniform(0, 0.4, count),
                                    rng.uniform(0, 0.4, count),
                                    rng.uniform(0.1, 1.0, count))]
        pool = CandidatePool(side, cands)
        g = sum(c.score for c in greedy_pack(pool, 5))
        e = sum(c.score for c in exhaustive_pack(pool, 5))
        if e - g < -1e-12:
            raise InvariantViolation("greedy exceeded the exhaustive optimum")
        worst = max(worst, e - g)
        print(f"random-{i:<13} {g:.6f} {e:.6f}  {e - g:.6f}")
    print(f"max greedy gap {worst:.6f}")
    return EXIT_OK


def _cmd_gauss_table(args) -> int:
    from .isoperimetry import GaussTables
    pts = args.points
    if pts < 2:
        raise InputError("--points must be at least 2")
    ts = [i / (pts - 1) for i in range(pts)]
    rows = GaussTables().table(ts)
    lines = ["# cubeosc-gauss v1", "t,iso,k"]
    lines += [f"{t!r},{i!r},{k!r}" for t, i, k in rows]
    text = "\n".join(lines) + "\n"
    if args.out_csv:
        Path(args.out_csv).write_text(text)
        print(f"wrote {len(rows)} rows to {args.out_csv}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_rasterize(args) -> int:
    raw, _preset = _load_target(args.shape)
    if not isinstance(raw, Shape):
        raise InputError("rasterize needs a geometric shape, not a raster")
    window = region_from_spec(args.region or "unit", 2)
    raster = rasterize(raw, window, args.cell)
    write_pgm(raster, args.out)
    filled = int(raster.bits.sum())
    print(f"wrote {raster.dims[0]}x{raster.dims[1]} cells "
          f"({filled} set) to {args.out}")
    return EXIT_OK


def _add_common(p) -> None:
    p.add_argument("--shape", required=True,
                   help="preset name or path to .json/.pgm/.csv")
    p.add_argument("--kind", default="i", choices=KIND_FLAGS)
    p.add_argument("--eps", type=float, default=None, help="cube side")
    p.add_argument("--M", type=float, default=None,
                   help="mass parameter for --kind m")
    p.add_argument("--region", default=None,
                   help="'all', 'unit', or box:x0,y0,x1,y1")
    p.add_argument("--orientations", type=int, default=None)
    p.add_argument("--offsets", type=int, default=None,
                   help="lattice offsets per axis and orientation")
    p.add_argument("--boundary-samples", type=int, default=None)
    p.add_argument("--tangential-steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--packer", default="greedy",
                   choices=("greedy", "exhaustive"))
    p.add_argument("--timings", action="store_true",
                   help="record wall time per row (off keeps output "
                        "byte-stable)")
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    p.add_argument("--out-svg", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cubeosc",
                     description="cube-oscillation functionals on exact "
                                 "shapes and rasters")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one functional at one side")
    _add_common(p_eval)
    p_eval.add_argument("--exact-1d", action="store_true",
                        help="also report the exact 1-d sliding optimum")
    p_eval.set_defaults(func=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="evaluate along a ladder of sides")
    _add_common(p_sweep)
    p_sweep.add_argument("--eps-ladder", default=None, metavar="A:B:STEPS",
                         help="geometric ladder from A to B")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check", help="run named verification suites")
    p_check.add_argument("suites", nargs="*",
                         help=f"suite names ({', '.join(SUITES)}) or 'all'")
    p_check.set_defaults(func=_cmd_check)

    p_oc = sub.add_parser("oracle-compare",
                          help="greedy packing against the exhaustive optimum")
    p_oc.add_argument("--seed", type=int, default=7)
    p_oc.add_argument("--pools", type=int, default=20)
    p_oc.set_defaults(func=_cmd_oracle_compare)

    p_gt = sub.add_parser("gauss-table",
                          help="tabulate the isoperimetric profile and the "
                               "deficit function")
    p_gt.add_argument("--points", type=int, default=101)
    p_gt.add_argument("--out-csv", default=None)
    p_gt.set_defaults(func=_cmd_gauss_table)

    p_rz = sub.add_parser("rasterize", help="sample a shape onto a cell grid")
    p_rz.add_argument("--shape", required=True)
    p_rz.add_argument("--cell", type=float, required=True)
    p_rz.add_argument("--region", default=None,
                      help="window to sample (default the unit box)")
    p_rz.add_argument("--out", required=True, help="output PGM path")
    p_rz.set_defaults(func=_cmd_rasterize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (InputError, InvalidShapeError, ContractError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
