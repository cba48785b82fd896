"""Cube-oscillation functionals on exact shapes and rasters.

Per-cube scores are mean absolute deviations from the cube average; a
family value is the score sum times side^(n-1) over a pairwise disjoint
family chosen by packing, with certified upper bounds alongside every
lower bound.
"""

from .errors import (BracketError, ContractError, CubeOscError, InputError,
                     InvalidShapeError, InvariantViolation,
                     ResourceLimitError)
from .geometry import (ALL_SPACE, AxisBox, Cube, Disk, DisjointUnion,
                       HalfPlane, IntervalUnion, Polygon, PolygonRegion,
                       Region, Shape, boundary_components, boundary_sample,
                       cubes_disjoint, perimeter, region_from_spec,
                       shape_from_json, unit_box, volume_fraction)
from .raster import (DyadicDecomposition, RasterSet, ZRaster,
                     dyadic_decompose, level_sets, raster_perimeter,
                     rasterize, read_pgm, read_zraster_csv, total_variation,
                     write_pgm, write_zraster_csv)
from .targets import (IndicatorRaster, IndicatorShape, IntegerRaster,
                      TargetFunction, make_target, oscillation)
from .search import (Candidate, CandidatePool, PackingConfig,
                     density_cube_family, dyadic_candidates, exact_1d_argmax,
                     exhaustive_pack, generate_pool, greedy_pack,
                     half_density_slide, multi_start_greedy)
from .functionals import (KINDS, CubeFamily, FunctionalEstimate,
                          ModulusReport, canonical_kind, evaluate,
                          evaluate_1d_exact, modulus_gap)
from .isoperimetry import (GaussTables, MarginReport, bobkov_check, gauss_cdf,
                           gauss_iso, gauss_pdf, gauss_quantile,
                           hadwiger_check, k_function, k_derivatives,
                           relative_iso_check, t_critical)
from .presets import PRESET_NAMES, Preset, get_preset
from .report import (SweepRow, read_sweep_csv, render_family_svg,
                     render_sweep_svg, row_from_estimate, write_estimate_json,
                     write_sweep_csv, write_sweep_json)
from .checks import CheckResult, SUITES, run_suite

__version__ = "0.1.0"

__all__ = [
    "ALL_SPACE", "AxisBox", "BracketError", "Candidate", "CandidatePool",
    "CheckResult", "ContractError", "Cube", "CubeFamily", "CubeOscError",
    "Disk", "DisjointUnion", "DyadicDecomposition", "FunctionalEstimate",
    "GaussTables", "HalfPlane", "IndicatorRaster", "IndicatorShape",
    "InputError", "IntegerRaster", "IntervalUnion", "InvalidShapeError",
    "InvariantViolation", "KINDS", "MarginReport", "ModulusReport",
    "PackingConfig", "Polygon", "PolygonRegion", "Preset", "PRESET_NAMES",
    "RasterSet", "Region", "ResourceLimitError", "Shape", "SUITES",
    "SweepRow", "TargetFunction", "ZRaster", "bobkov_check",
    "boundary_components", "boundary_sample", "canonical_kind",
    "cubes_disjoint", "density_cube_family", "dyadic_candidates",
    "dyadic_decompose", "evaluate", "evaluate_1d_exact", "exact_1d_argmax",
    "exhaustive_pack", "gauss_cdf", "gauss_iso", "gauss_pdf",
    "gauss_quantile", "generate_pool", "get_preset", "greedy_pack",
    "hadwiger_check", "half_density_slide", "k_derivatives", "k_function",
    "level_sets", "make_target", "modulus_gap", "multi_start_greedy",
    "oscillation", "perimeter", "raster_perimeter", "rasterize",
    "read_pgm", "read_sweep_csv", "read_zraster_csv", "region_from_spec",
    "relative_iso_check", "render_family_svg", "render_sweep_svg",
    "row_from_estimate", "run_suite", "shape_from_json", "t_critical",
    "total_variation", "unit_box", "volume_fraction", "write_estimate_json",
    "write_pgm", "write_sweep_csv", "write_sweep_json", "write_zraster_csv",
]
