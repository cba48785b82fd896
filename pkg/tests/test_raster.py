import math

import numpy as np
import pytest

from cubeosc import (Cube, Disk, IndicatorRaster, Polygon, RasterSet,
                     ResourceLimitError, ZRaster, level_sets, raster_perimeter,
                     rasterize, read_pgm, read_zraster_csv, total_variation,
                     unit_box, write_pgm, write_zraster_csv)
from cubeosc.raster import box_sum_index


def _random_raster(rng, n=16):
    bits = rng.random((n, n)) < 0.5
    return RasterSet((0.0, 0.0), 1.0 / n, (n, n), bits)


def test_box_sums_match_direct_sums():
    rng = np.random.default_rng(21)
    for _ in range(20):
        r = _random_raster(rng)
        sat = r.sat
        for _ in range(25):
            i0, j0 = rng.integers(0, 16, 2)
            i1 = rng.integers(i0, 17)
            j1 = rng.integers(j0, 17)
            want = int(r.bits[i0:i1, j0:j1].sum())
            assert box_sum_index(sat, (i0, j0), (i1, j1)) == want


def test_rasterize_disk_volume_converges():
    disk = Disk((0.5, 0.5), 0.3)
    vol = math.pi * 0.09
    for n in (64, 256):
        r = rasterize(disk, unit_box(2), 1.0 / n)
        assert r.volume() == pytest.approx(vol, abs=4.0 * 0.3 / n)


def test_rasterize_respects_cell_budget():
    with pytest.raises(ResourceLimitError):
        rasterize(Disk((0.5, 0.5), 0.3), unit_box(2), 1e-6)


def test_raster_perimeter_hand_cases():
    one = np.zeros((8, 8), dtype=bool)
    one[3, 4] = True
    r = RasterSet((0.0, 0.0), 0.125, (8, 8), one)
    assert raster_perimeter(r) == pytest.approx(4 * 0.125)
    one[3, 5] = True      # domino: shared face cancels
    r = RasterSet((0.0, 0.0), 0.125, (8, 8), one)
    assert raster_perimeter(r) == pytest.approx(6 * 0.125)


def test_raster_perimeter_window_boundary_flag():
    full_row = np.zeros((4, 4), dtype=bool)
    full_row[:, 0] = True
    r = RasterSet((0.0, 0.0), 0.25, (4, 4), full_row)
    # strip along the window edge: 3 exposed sides when the window edge
    # counts, 1 interior side otherwise
    assert raster_perimeter(r, include_window_boundary=True) \
        == pytest.approx(0.25 * (4 + 4 + 2))
    assert raster_perimeter(r, include_window_boundary=False) \
        == pytest.approx(0.25 * 4)


def test_raster_perimeter_matches_polygon_for_axis_shapes():
    box = Polygon([(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)])
    r = rasterize(box, unit_box(2), 1.0 / 32)
    assert raster_perimeter(r) == pytest.approx(2.0)


def test_boundary_cell_mask_single_cell():
    bits = np.zeros((5, 5), dtype=bool)
    bits[2, 2] = True
    r = RasterSet((0.0, 0.0), 0.2, (5, 5), bits)
    mask = r.boundary_cell_mask()
    # the interface is marked from both sides: the cell plus its 4 neighbors
    assert mask[2, 2]
    assert mask.sum() == 5
    filled = RasterSet((0.0, 0.0), 0.2, (5, 5), np.ones((5, 5), dtype=bool))
    # interior-only mask: a raster touching the window edge everywhere
    # only exposes faces at the window, which the mask leaves out
    assert filled.boundary_cell_mask().sum() == 0


def test_level_sets_reconstruct_values():
    rng = np.random.default_rng(22)
    for _ in range(10):
        vals = rng.integers(0, 4, (12, 12))
        zr = ZRaster((0.0, 0.0), 1.0 / 12, (12, 12), vals)
        levels = level_sets(zr)
        recon = np.zeros_like(vals)
        for k, raster in levels:
            assert k >= 1
            recon += raster.bits.astype(int)
        assert np.array_equal(recon, vals)


def test_total_variation_coarea_identity():
    """Face-jump total variation equals the sum of level set perimeters."""
    rng = np.random.default_rng(23)
    for _ in range(10):
        vals = rng.integers(0, 4, (10, 10))
        zr = ZRaster((0.0, 0.0), 0.1, (10, 10), vals)
        tv = total_variation(zr)
        per_sum = sum(raster_perimeter(r) for _, r in level_sets(zr))
        assert tv == pytest.approx(per_sum, abs=1e-12)


def test_total_variation_hand_case():
    vals = np.zeros((4, 4), dtype=int)
    vals[1:3, 1:3] = 2
    zr = ZRaster((0.0, 0.0), 0.25, (4, 4), vals)
    # 2x2 block of height 2: 8 faces, jump 2 each, cell 0.25
    assert total_variation(zr) == pytest.approx(8 * 2 * 0.25)


def test_pgm_roundtrip(tmp_path):
    rng = np.random.default_rng(24)
    r = _random_raster(rng, 16)
    p = tmp_path / "bits.pgm"
    write_pgm(r, p)
    assert p.read_bytes().startswith(b"P5")
    back = read_pgm(p)
    assert np.array_equal(back.bits, r.bits)
    assert back.cell == pytest.approx(r.cell)
    assert back.origin == pytest.approx(r.origin)


def test_zraster_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(25)
    vals = rng.integers(-2, 3, (9, 7))
    zr = ZRaster((0.25, 0.5), 0.05, (9, 7), vals)
    p = tmp_path / "z.csv"
    write_zraster_csv(zr, p)
    back = read_zraster_csv(p)
    assert np.array_equal(back.values, zr.values)
    assert back.cell == pytest.approx(zr.cell)
    assert back.origin == pytest.approx(zr.origin)
    write_zraster_csv(back, tmp_path / "z2.csv")
    assert (tmp_path / "z2.csv").read_bytes() == p.read_bytes()


def test_indicator_raster_fraction_against_supersampling():
    rng = np.random.default_rng(26)
    bits = rng.random((32, 32)) < 0.5
    raster = RasterSet((0.0, 0.0), 1.0 / 32, (32, 32), bits)
    target = IndicatorRaster(raster)
    n = 300
    ts = (np.arange(n) + 0.5) / n - 0.5
    for _ in range(25):
        side = rng.uniform(0.05, 0.25)
        ang = rng.uniform(0, math.pi) if rng.random() < 0.7 else 0.0
        lim = side          # keep the cube inside the window
        cx, cy = rng.uniform(lim, 1 - lim, 2)
        cube = Cube((cx, cy), side, ang)
        gx, gy = np.meshgrid(ts * side, ts * side)
        ca, sa = math.cos(ang), math.sin(ang)
        px = cx + ca * gx - sa * gy
        py = cy + sa * gx + ca * gy
        ii = np.clip((px * 32).astype(int), 0, 31)
        jj = np.clip((py * 32).astype(int), 0, 31)
        mc = bits[ii, jj].mean()
        assert target.fraction(cube) == pytest.approx(mc, abs=5.0 / n)


def test_indicator_raster_fraction_axis_exact():
    bits = np.zeros((4, 4), dtype=bool)
    bits[0:2, :] = True       # left half occupied
    raster = RasterSet((0.0, 0.0), 0.25, (4, 4), bits)
    target = IndicatorRaster(raster)
    assert target.fraction(Cube((0.5, 0.5), 0.5)) == pytest.approx(0.5)
    assert target.fraction(Cube((0.25, 0.5), 0.3)) == pytest.approx(1.0)
    # quarter-cell overlap: cube [0.4, 0.6]^2 against left half [0, 0.5]
    assert target.fraction(Cube((0.5, 0.5), 0.2)) == pytest.approx(0.5)
