import math

import numpy as np
import pytest

from cubeosc import (AxisBox, Cube, Disk, DisjointUnion, HalfPlane,
                     IndicatorShape, IntervalUnion, InvalidShapeError, Polygon,
                     boundary_components, cubes_disjoint, perimeter,
                     region_from_spec, shape_from_json, unit_box,
                     volume_fraction)
from cubeosc.errors import InputError
from cubeosc.geometry import clip_polygon_to_cube, shoelace_area


def test_cube_vertices_match_rotation():
    rng = np.random.default_rng(11)
    for _ in range(50):
        cx, cy = rng.uniform(-1, 1, 2)
        side = rng.uniform(0.1, 2.0)
        ang = rng.uniform(0, math.pi)
        cube = Cube((cx, cy), side, ang)
        c, s = math.cos(ang), math.sin(ang)
        rot = np.array([[c, -s], [s, c]])
        corners = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]]) * side / 2.0
        expected = corners @ rot.T + (cx, cy)
        got = cube.vertices()
        # vertex order may differ by cyclic shift; compare as sets
        for v in expected:
            assert np.min(np.linalg.norm(got - v, axis=1)) < 1e-12


def test_cube_bbox_envelopes_vertices():
    rng = np.random.default_rng(12)
    for _ in range(100):
        cube = Cube(tuple(rng.uniform(-1, 1, 2)), rng.uniform(0.1, 1.0),
                    rng.uniform(0, math.pi))
        lo, hi = cube.bbox()
        v = cube.vertices()
        assert np.all(v.min(axis=0) >= np.asarray(lo) - 1e-12)
        assert np.all(v.max(axis=0) <= np.asarray(hi) + 1e-12)


def test_cube_scaled_and_interval():
    cube = Cube((0.3, 0.4), 0.2, 0.1)
    big = cube.scaled(3.0)
    assert big.side == pytest.approx(0.6)
    assert big.center == pytest.approx((0.9, 1.2))
    assert big.angle == cube.angle
    one = Cube((0.5,), 0.2)
    assert one.interval() == pytest.approx((0.4, 0.6))


def _overlap_oracle(a: Cube, b: Cube, n: int = 60) -> bool:
    """Supersampled interior-overlap test: sample points inside a, map into b."""
    ts = (np.arange(n) + 0.5) / n - 0.5
    gx, gy = np.meshgrid(ts * a.side, ts * a.side)
    ca, sa = math.cos(a.angle), math.sin(a.angle)
    px = a.center[0] + ca * gx - sa * gy
    py = a.center[1] + sa * gx + ca * gy
    cb, sb = math.cos(-b.angle), math.sin(-b.angle)
    qx = cb * (px - b.center[0]) - sb * (py - b.center[1])
    qy = sb * (px - b.center[0]) + cb * (py - b.center[1])
    half = b.side / 2.0
    return bool(np.any((np.abs(qx) < half) & (np.abs(qy) < half)))


def test_cubes_disjoint_against_sampling_oracle():
    rng = np.random.default_rng(13)
    checked = 0
    for _ in range(400):
        a = Cube(tuple(rng.uniform(0, 1, 2)), rng.uniform(0.1, 0.4),
                 rng.uniform(0, math.pi))
        b = Cube(tuple(a.center + rng.uniform(-0.4, 0.4, 2)),
                 rng.uniform(0.1, 0.4), rng.uniform(0, math.pi))
        # skip near-touching pairs the oracle cannot resolve; the guard
        # margin must stay coarser than the oracle's sampling pitch
        margin = 0.08 * min(a.side, b.side)
        grown = Cube(a.center, a.side + margin, a.angle)
        shrunk = Cube(a.center, max(a.side - margin, 1e-6), a.angle)
        if _overlap_oracle(grown, b) != _overlap_oracle(shrunk, b):
            continue
        checked += 1
        assert cubes_disjoint(a, b) == (not _overlap_oracle(a, b))
    assert checked > 300


def test_cubes_disjoint_touching_and_tilings():
    a = Cube((0.0, 0.0), 1.0)
    assert cubes_disjoint(a, Cube((1.0, 0.0), 1.0))
    assert cubes_disjoint(a, Cube((1.0, 1.0), 1.0))
    assert not cubes_disjoint(a, Cube((0.999, 0.0), 1.0))
    # rotated corner resting on a face counts as touching
    r = Cube((0.0, 0.0), 1.0, math.pi / 4)
    assert cubes_disjoint(r, Cube((math.sqrt(2) / 2 + 0.5, 0.0), 1.0))
    # 1-d touching intervals
    assert cubes_disjoint(Cube((0.1,), 0.2), Cube((0.3,), 0.2))
    assert not cubes_disjoint(Cube((0.1,), 0.2), Cube((0.25,), 0.2))
    with pytest.raises(InputError):
        cubes_disjoint(Cube((0.0,), 1.0), Cube((0.0, 0.0), 1.0))


def test_clip_polygon_area_against_sampling():
    rng = np.random.default_rng(14)
    for _ in range(40):
        k = rng.integers(3, 7)
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        rad = rng.uniform(0.2, 0.6, k)
        verts = np.c_[0.5 + rad * np.cos(ang), 0.5 + rad * np.sin(ang)]
        cube = Cube(tuple(rng.uniform(0.2, 0.8, 2)), rng.uniform(0.2, 0.6),
                    rng.uniform(0, math.pi))
        clipped = np.asarray(clip_polygon_to_cube(verts, cube))
        area = abs(shoelace_area(clipped)) if len(clipped) >= 3 else 0.0
        n = 400
        ts = (np.arange(n) + 0.5) / n - 0.5
        gx, gy = np.meshgrid(ts * cube.side, ts * cube.side)
        ca, sa = math.cos(cube.angle), math.sin(cube.angle)
        px = cube.center[0] + ca * gx - sa * gy
        py = cube.center[1] + sa * gx + ca * gy
        # point-in-polygon by winding over edges
        inside = np.zeros(px.shape, dtype=bool)
        x0, y0 = verts[:, 0], verts[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        for i in range(k):
            cond = (y0[i] <= py) != (y1[i] <= py)
            t = (py - y0[i]) / (y1[i] - y0[i] + 1e-300)
            inside ^= cond & (px < x0[i] + t * (x1[i] - x0[i]))
        mc = inside.mean() * cube.side ** 2
        assert area == pytest.approx(mc, abs=4.0 * cube.side ** 2 / n)


def test_polygon_rejects_self_intersection():
    bow = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]
    with pytest.raises(InvalidShapeError):
        Polygon(bow)
    with pytest.raises(InvalidShapeError):
        Polygon([(0.0, 0.0), (1.0, 0.0)])


def test_perimeter_reference_values():
    sq = Polygon([(0.45, 0.45), (0.55, 0.45), (0.55, 0.55), (0.45, 0.55)])
    assert perimeter(sq) == pytest.approx(0.4)
    assert perimeter(Disk((0.5, 0.5), 0.5)) == pytest.approx(math.pi)
    assert perimeter(HalfPlane((1.0, 0.0), 0.5), unit_box(2)) \
        == pytest.approx(1.0)
    two = DisjointUnion([
        Polygon([(0.1, 0.1), (0.2, 0.1), (0.2, 0.2), (0.1, 0.2)]),
        Polygon([(0.6, 0.6), (0.7, 0.6), (0.7, 0.7), (0.6, 0.7)])])
    assert perimeter(two) == pytest.approx(0.8)
    assert perimeter(IntervalUnion([(0.2, 0.4), (0.6, 0.7)])) == 4.0


def test_volume_fraction_halfplane_analytic():
    """Axis cube against a vertical half plane: fraction is linear in offset."""
    hp = HalfPlane((1.0, 0.0), 0.5)
    rng = np.random.default_rng(15)
    for _ in range(50):
        cx = rng.uniform(0.3, 0.7)
        side = rng.uniform(0.05, 0.3)
        cube = Cube((cx, 0.5), side)
        t = (0.5 - (cx - side / 2.0)) / side
        assert volume_fraction(cube, hp) == pytest.approx(
            min(1.0, max(0.0, t)), abs=1e-12)


def test_volume_fraction_rotated_cube_on_halfplane():
    # rotating the cube about a center on the line keeps the fraction at 1/2
    hp = HalfPlane((1.0, 0.0), 0.5)
    rng = np.random.default_rng(16)
    for _ in range(30):
        cube = Cube((0.5, rng.uniform(0.2, 0.8)), rng.uniform(0.05, 0.2),
                    rng.uniform(0, math.pi))
        assert volume_fraction(cube, hp) == pytest.approx(0.5, abs=1e-12)


def test_boundary_components_geometry():
    comps = boundary_components(Disk((0.5, 0.5), 0.3))
    assert len(comps) == 1
    comp = comps[0]
    assert comp.closed
    assert comp.length == pytest.approx(2 * math.pi * 0.3)
    for s in np.linspace(0.0, comp.length, 17):
        p = np.asarray(comp.point_at(float(s)))
        nu = np.asarray(comp.normal_at(float(s)))
        assert np.linalg.norm(p - (0.5, 0.5)) == pytest.approx(0.3, abs=1e-9)
        # outward normal points along the radius
        assert float(nu @ (p - (0.5, 0.5))) == pytest.approx(0.3, abs=1e-9)


def test_boundary_normal_is_perpendicular_to_tangent():
    poly = Polygon([(0.2, 0.2), (0.8, 0.3), (0.7, 0.8), (0.3, 0.7)])
    comp = boundary_components(poly)[0]
    h = 1e-7
    for s in np.linspace(0.1, comp.length - 0.1, 23):
        p0 = np.asarray(comp.point_at(float(s - h)))
        p1 = np.asarray(comp.point_at(float(s + h)))
        tang = (p1 - p0) / (2 * h)
        if np.linalg.norm(tang) < 0.5:
            continue    # stepped across a vertex
        nu = np.asarray(comp.normal_at(float(s)))
        assert abs(float(tang @ nu)) < 1e-5


def test_shape_from_json_roundtrip_and_errors():
    spec = {"type": "polygon",
            "vertices": [[0.1, 0.1], [0.9, 0.1], [0.5, 0.8]]}
    shape = shape_from_json(spec)
    assert isinstance(shape, Polygon)
    assert perimeter(shape) > 0
    disk = shape_from_json({"type": "disk", "center": [0.5, 0.5],
                            "radius": 0.25})
    assert perimeter(disk) == pytest.approx(math.pi / 2)
    ivs = shape_from_json({"type": "interval_union",
                           "intervals": [[0.1, 0.2], [0.5, 0.9]]})
    assert isinstance(ivs, IntervalUnion)
    with pytest.raises(InputError):
        shape_from_json({"type": "nonsense"})
    with pytest.raises((InputError, InvalidShapeError)):
        shape_from_json({"type": "disk", "center": [0.5, 0.5],
                         "radius": -1.0})


def test_region_from_spec():
    assert region_from_spec("unit").contains_cube(Cube((0.5, 0.5), 0.2))
    assert not region_from_spec("unit").contains_cube(Cube((0.01, 0.5), 0.2))
    box = region_from_spec("box:0,0,2,1")
    assert isinstance(box, AxisBox)
    assert box.contains_cube(Cube((1.5, 0.5), 0.4))
    assert region_from_spec("all").contains_cube(Cube((9.0, 9.0), 1.0))
    with pytest.raises(InputError):
        region_from_spec("sphere:1")
    with pytest.raises(InputError):
        region_from_spec("box:1,2,3")


def test_indicator_shape_dim_and_contains():
    t = IndicatorShape(IntervalUnion([(0.2, 0.6)]))
    assert t.dim == 1
    assert volume_fraction(Cube((0.4,), 0.2), t.shape) == pytest.approx(1.0)
    assert volume_fraction(Cube((0.2,), 0.1), t.shape) == pytest.approx(0.5)
