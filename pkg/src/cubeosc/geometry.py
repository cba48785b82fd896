"""Exact geometry kernel: shapes, cubes, regions, and their measures.

Conventions used throughout the package:

* Dimension n is 1 or 2 for exact shapes.  A "cube" is an interval in
  n = 1 and a (possibly rotated) square in n = 2.  Cube orientation is
  the rotation angle of its sides, normalized to [0, pi/2) because a
  square has 4-fold symmetry.
* All area and length computations on exact shapes are closed form, no
  sampling: polygon clipping for polygons and half-planes, circular
  chord/sector decomposition for disks.
* Disjointness of cubes is tested on open interiors, so cubes that share
  a face are disjoint.  A relative tolerance of ``DISJOINT_RTOL`` times
  the side guards against round-off when lattice cubes share faces that
  are not exactly representable in binary.
* Relative perimeter of a shape in a region is the boundary length that
  falls strictly inside the open region; pieces lying on the region
  boundary contribute zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, InvalidShapeError

DISJOINT_RTOL = 1e-9
_GOLDEN = 0.6180339887498949


# ---------------------------------------------------------------------------
# cubes
# ---------------------------------------------------------------------------

def normalize_angle(angle: float) -> float:
    """Reduce a square's orientation angle to the fundamental range [0, pi/2)."""
    a = math.fmod(angle, math.pi / 2.0)
    if a < 0.0:
        a += math.pi / 2.0
    if a >= math.pi / 2.0:  # fmod round-off at the top end
        a = 0.0
    return a


@dataclass(frozen=True)
class Cube:
    """Axis cube in n = 1 or square in n = 2, described by center, side, angle."""

    center: Tuple[float, ...]
    side: float
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "side", float(self.side))
        if self.side <= 0.0:
            raise InputError("cube side must be positive")
        n = len(self.center)
        if n not in (1, 2):
            raise InputError("cube dimension must be 1 or 2")
        if n == 1 and self.angle != 0.0:
            raise InputError("1-d cubes carry no orientation")
        object.__setattr__(self, "angle", normalize_angle(float(self.angle)))

    @property
    def dim(self) -> int:
        return len(self.center)

    def interval(self) -> Tuple[float, float]:
        if self.dim != 1:
            raise InputError("interval() requires a 1-d cube")
        c = self.center[0]
        return (c - self.side / 2.0, c + self.side / 2.0)

    def vertices(self) -> np.ndarray:
        """CCW corner coordinates, shape (4, 2)."""
        if self.dim != 2:
            raise InputError("vertices() requires a 2-d cube")
        h = self.side / 2.0
        c, s = math.cos(self.angle), math.sin(self.angle)
        corners = np.array([(-h, -h), (h, -h), (h, h), (-h, h)])
        rot = np.array([(c, -s), (s, c)])
        return corners @ rot.T + np.asarray(self.center)

    def axes(self) -> np.ndarray:
        """The two face-normal directions of the square, shape (2, 2)."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([(c, s), (-s, c)])

    def bbox(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.dim == 1:
            lo, hi = self.interval()
            return np.array([lo]), np.array([hi])
        v = self.vertices()
        return v.min(axis=0), v.max(axis=0)

    def scaled(self, factor: float) -> "Cube":
        """Cube mapped by x -> factor * x (center and side scale together)."""
        return Cube(tuple(c * factor for c in self.center), self.side * factor, self.angle)


def cubes_disjoint(a: Cube, b: Cube) -> bool:
    """True when the open interiors of two cubes do not meet.

    Touching boundaries count as disjoint.  Exact separating-axis test in
    n = 2; overlap smaller than ``DISJOINT_RTOL`` times the side is treated
    as touching to keep exact lattice tilings packable.
    """
    if a.dim != b.dim:
        raise InputError("cubes live in different dimensions")
    tol = DISJOINT_RTOL * min(a.side, b.side)
    if a.dim == 1:
        return abs(a.center[0] - b.center[0]) >= (a.side + b.side) / 2.0 - tol
    va, vb = a.vertices(), b.vertices()
    for axis in np.vstack([a.axes(), b.axes()]):
        pa = va @ axis
        pb = vb @ axis
        if pa.max() <= pb.min() + tol or pb.max() <= pa.min() + tol:
            return True
    return False


# ---------------------------------------------------------------------------
# polygon primitives
# ---------------------------------------------------------------------------

def shoelace_area(verts: np.ndarray) -> float:
    """Signed area of a closed polygon given as an (m, 2) vertex array."""
    if len(verts) < 3:
        return 0.0
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_polygon_halfplane(verts: Sequence[Sequence[float]],
                           normal: Tuple[float, float],
                           offset: float) -> List[Tuple[float, float]]:
    """Keep the part of a polygon with normal . x <= offset (Sutherland-Hodgman pass).

    The subject polygon may be non-convex; the output can contain degenerate
    bridge edges along the clip line, which contribute zero signed area.
    """
    nx, ny = normal
    out: List[Tuple[float, float]] = []
    m = len(verts)
    if m == 0:
        return out
    for i in range(m):
        sx, sy = verts[i]
        ex, ey = verts[(i + 1) % m]
        sin = nx * sx + ny * sy <= offset
        ein = nx * ex + ny * ey <= offset
        if sin:
            out.append((sx, sy))
        if sin != ein:
            denom = nx * (ex - sx) + ny * (ey - sy)
            # straddling endpoints force denom != 0 exactly, but a nearly
            # parallel edge can round it to zero; drop the point then and
            # clamp t so rounding never throws the point off the segment
            if denom != 0.0:
                t = (offset - nx * sx - ny * sy) / denom
                t = min(1.0, max(0.0, t))
                out.append((sx + t * (ex - sx), sy + t * (ey - sy)))
    return out


def clip_polygon_to_cube(verts: np.ndarray, cube: Cube) -> List[Tuple[float, float]]:
    """Clip a polygon against a square via four half-plane passes."""
    cx, cy = cube.center
    h = cube.side / 2.0
    poly: List[Tuple[float, float]] = [tuple(v) for v in verts]
    for axis in cube.axes():
        ax, ay = float(axis[0]), float(axis[1])
        mid = ax * cx + ay * cy
        poly = clip_polygon_halfplane(poly, (ax, ay), mid + h)
        if not poly:
            return poly
        poly = clip_polygon_halfplane(poly, (-ax, -ay), -(mid - h))
        if not poly:
            return poly
    return poly


def polygon_is_simple(verts: np.ndarray, tol: float = 1e-12) -> bool:
    """Check that no two non-adjacent edges intersect."""
    m = len(verts)
    edges = [(verts[i], verts[(i + 1) % m]) for i in range(m)]

    def seg_intersect(p1, p2, q1, q2) -> bool:
        d1 = np.asarray(p2) - np.asarray(p1)
        d2 = np.asarray(q2) - np.asarray(q1)
        denom = d1[0] * d2[1] - d1[1] * d2[0]
        dq = np.asarray(q1) - np.asarray(p1)
        if abs(denom) < tol * (np.linalg.norm(d1) * np.linalg.norm(d2) + tol):
            # parallel: overlap iff collinear with overlapping spans
            cross = d1[0] * dq[1] - d1[1] * dq[0]
            if abs(cross) > tol * (np.linalg.norm(d1) + 1.0):
                return False
            t0 = float(np.dot(dq, d1) / np.dot(d1, d1))
            t1 = t0 + float(np.dot(d2, d1) / np.dot(d1, d1))
            lo, hi = min(t0, t1), max(t0, t1)
            return hi > tol and lo < 1.0 - tol
        t = (dq[0] * d2[1] - dq[1] * d2[0]) / denom
        u = (dq[0] * d1[1] - dq[1] * d1[0]) / denom
        return tol < t < 1.0 - tol and tol < u < 1.0 - tol

    for i in range(m):
        for j in range(i + 1, m):
            if j == i or (j - i) % m == 1 or (i - j) % m == 1:
                continue
            if seg_intersect(*edges[i], *edges[j]):
                return False
    return True


def points_in_polygon(points: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Even-odd point-in-polygon test, vectorized over an (m, 2) point array."""
    pts = np.atleast_2d(points)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    m = len(verts)
    for i in range(m):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % m]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        hit = crosses & (x < np.where(crosses, xi, 0.0))
        inside ^= hit
    return inside


def _point_segment_distance(points: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    d = q - p
    L2 = float(np.dot(d, d))
    if L2 == 0.0:
        return np.linalg.norm(points - p, axis=1)
    t = np.clip(((points - p) @ d) / L2, 0.0, 1.0)
    proj = p + t[:, None] * d
    return np.linalg.norm(points - proj, axis=1)


def ear_clip_triangulate(verts: np.ndarray) -> List[np.ndarray]:
    """Triangulate a simple CCW polygon by ear clipping (validation paths only)."""
    idx = list(range(len(verts)))
    tris: List[np.ndarray] = []
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        m = len(idx)
        clipped = False
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 1e-15:
                continue
            others = np.array([verts[j] for j in idx if j not in (i0, i1, i2)])
            if len(others) and points_in_polygon(others, np.array([a, b, c])).any():
                continue
            tris.append(np.array([a, b, c]))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            break
    if len(idx) == 3:
        tris.append(verts[idx])
    return tris


def disk_polygon_area(radius: float, verts: np.ndarray) -> float:
    """Exact area of (disk centered at origin) intersect (simple CCW polygon).

    Walks the polygon edges, adding triangle contributions for chords inside
    the disk and circular-sector contributions for portions outside.
    """
    r2 = radius * radius
    total = 0.0
    m = len(verts)
    for i in range(m):
        a = verts[i]
        b = verts[(i + 1) % m]
        d = b - a
        dd = float(np.dot(d, d))
        if dd == 0.0:
            continue
        # |a + t d|^2 = r^2
        ad = float(np.dot(a, d))
        aa = float(np.dot(a, a))
        disc = ad * ad - dd * (aa - r2)
        ts = [0.0, 1.0]
        if disc > 0.0:
            root = math.sqrt(disc)
            for t in ((-ad - root) / dd, (-ad + root) / dd):
                if 0.0 < t < 1.0:
                    ts.append(t)
        ts.sort()
        for u, v in zip(ts[:-1], ts[1:]):
            if v - u <= 0.0:
                continue
            p = a + u * d
            q = a + v * d
            mmid = a + 0.5 * (u + v) * d
            if float(np.dot(mmid, mmid)) <= r2:
                total += 0.5 * (p[0] * q[1] - p[1] * q[0])
            else:
                ang = math.atan2(p[0] * q[1] - p[1] * q[0], float(np.dot(p, q)))
                total += 0.5 * r2 * ang
    return total


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

class Region:
    """Open evaluation window for localized functionals and relative perimeter."""

    def contains_cube(self, cube: Cube) -> bool:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class AllSpace(Region):
    def contains_cube(self, cube: Cube) -> bool:
        return True

    def describe(self) -> dict:
        return {"region": "all"}

    def __repr__(self):
        return "AllSpace()"


ALL_SPACE = AllSpace()


@dataclass(frozen=True)
class AxisBox(Region):
    mins: Tuple[float, ...]
    maxs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.mins) != len(self.maxs):
            raise InputError("box bounds disagree in dimension")
        if any(hi <= lo for lo, hi in zip(self.mins, self.maxs)):
            raise InputError("box must have positive extent per axis")

    @property
    def dim(self) -> int:
        return len(self.mins)

    def inradius(self) -> float:
        return min(hi - lo for lo, hi in zip(self.mins, self.maxs)) / 2.0

    def contains_cube(self, cube: Cube) -> bool:
        tol = DISJOINT_RTOL * cube.side
        lo, hi = cube.bbox()
        return bool(np.all(lo >= np.asarray(self.mins) - tol)
                    and np.all(hi <= np.asarray(self.maxs) + tol))

    def contains_points(self, pts: np.ndarray, strict: bool = True) -> np.ndarray:
        pts = np.atleast_2d(pts)
        ok = np.ones(len(pts), dtype=bool)
        for k, (lo, hi) in enumerate(zip(self.mins, self.maxs)):
            if strict:
                ok &= (pts[:, k] > lo) & (pts[:, k] < hi)
            else:
                ok &= (pts[:, k] >= lo) & (pts[:, k] <= hi)
        return ok

    def describe(self) -> dict:
        return {"region": "box", "mins": list(self.mins), "maxs": list(self.maxs)}


@dataclass(frozen=True)
class PolygonRegion(Region):
    vertices: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        poly = Polygon(self.vertices)  # reuse validation
        object.__setattr__(self, "_verts", poly.verts)

    @property
    def dim(self) -> int:
        return 2

    def contains_cube(self, cube: Cube) -> bool:
        verts = cube.vertices()
        if not points_in_polygon(verts, self._verts).all():
            return False
        # vertex containment is not enough for non-convex regions
        rv = self._verts
        m = len(rv)
        for i in range(4):
            p1, p2 = verts[i], verts[(i + 1) % 4]
            for j in range(m):
                q1, q2 = rv[j], rv[(j + 1) % m]
                if _segments_properly_cross(p1, p2, q1, q2):
                    return False
        return True

    def describe(self) -> dict:
        return {"region": "polygon", "vertices": [list(v) for v in self.vertices]}


def _segments_properly_cross(p1, p2, q1, q2, tol: float = 1e-14) -> bool:
    d1 = np.asarray(p2, dtype=float) - p1
    d2 = np.asarray(q2, dtype=float) - q1
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < tol:
        return False
    dq = np.asarray(q1, dtype=float) - p1
    t = (dq[0] * d2[1] - dq[1] * d2[0]) / denom
    u = (dq[0] * d1[1] - dq[1] * d1[0]) / denom
    return tol < t < 1.0 - tol and tol < u < 1.0 - tol


def unit_box(dim: int) -> AxisBox:
    return AxisBox(tuple(0.0 for _ in range(dim)), tuple(1.0 for _ in range(dim)))


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------

class Shape:
    """Tagged union of exact set descriptions; see the concrete subclasses."""

    dim: int

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        """Unsigned distance to the topological boundary (used as a pool prefilter)."""
        raise NotImplementedError

    def bbox(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Bounding box of the set, or None when unbounded / empty."""
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def scaled(self, factor: float) -> "Shape":
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IntervalUnion(Shape):
    """Finite union of disjoint closed intervals on the line."""

    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in iv:
            if b <= a:
                raise InvalidShapeError("interval with non-positive length")
        for (a1, b1), (a2, b2) in zip(iv[:-1], iv[1:]):
            if a2 <= b1:
                raise InvalidShapeError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", iv)

    dim = 1

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        x = np.atleast_1d(np.asarray(pts, dtype=float)).reshape(-1)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (x >= a) & (x <= b)
        return inside

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        x = np.atleast_1d(np.asarray(pts, dtype=float)).reshape(-1)
        if not self.intervals:
            return np.full(x.shape, np.inf)
        ends = np.array([e for iv in self.intervals for e in iv])
        return np.abs(x[:, None] - ends[None, :]).min(axis=1)

    def bbox(self):
        if not self.intervals:
            return None
        return (np.array([self.intervals[0][0]]), np.array([self.intervals[-1][1]]))

    def volume(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def endpoints(self) -> List[Tuple[float, float]]:
        """Boundary points with outward unit normals (-1 left ends, +1 right ends)."""
        out = []
        for a, b in self.intervals:
            out.append((a, -1.0))
            out.append((b, 1.0))
        return out

    def scaled(self, factor: float) -> "IntervalUnion":
        iv = [(a * factor, b * factor) for a, b in self.intervals]
        if factor < 0:
            iv = sorted((min(p), max(p)) for p in iv)
        return IntervalUnion(tuple(iv))

    def to_json(self) -> dict:
        return {"type": "interval_union", "intervals": [list(iv) for iv in self.intervals]}


@dataclass(frozen=True)
class Polygon(Shape):
    """Simple polygon with positive area, stored CCW."""

    vertices: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if len(verts) < 3:
            raise InvalidShapeError("polygon needs at least 3 vertices")
        area = shoelace_area(verts)
        if abs(area) < 1e-14:
            raise InvalidShapeError("degenerate polygon (zero area)")
        if area < 0.0:
            verts = verts[::-1].copy()
        if not polygon_is_simple(verts):
            raise InvalidShapeError("polygon is self-intersecting")
        object.__setattr__(self, "verts", verts)
        object.__setattr__(self, "vertices", tuple(map(tuple, verts)))

    dim = 2

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        return points_in_polygon(pts, self.verts)

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        dist = np.full(len(pts), np.inf)
        m = len(self.verts)
        for i in range(m):
            np.minimum(dist,
                       _point_segment_distance(pts, self.verts[i], self.verts[(i + 1) % m]),
                       out=dist)
        return dist

    def bbox(self):
        return self.verts.min(axis=0), self.verts.max(axis=0)

    def volume(self) -> float:
        return abs(shoelace_area(self.verts))

    def edges(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        m = len(self.verts)
        return [(self.verts[i], self.verts[(i + 1) % m]) for i in range(m)]

    def scaled(self, factor: float) -> "Polygon":
        return Polygon(tuple((x * factor, y * factor) for x, y in self.vertices))

    def to_json(self) -> dict:
        return {"type": "polygon", "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class Disk(Shape):
    center: Tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise InvalidShapeError("disk radius must be positive")

    dim = 2

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        d2 = (pts[:, 0] - self.center[0]) ** 2 + (pts[:, 1] - self.center[1]) ** 2
        return d2 <= self.radius * self.radius

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return np.abs(d - self.radius)

    def bbox(self):
        c = np.asarray(self.center)
        r = self.radius
        return c - r, c + r

    def volume(self) -> float:
        return math.pi * self.radius ** 2

    def scaled(self, factor: float) -> "Disk":
        return Disk((self.center[0] * factor, self.center[1] * factor),
                    self.radius * abs(factor))

    def to_json(self) -> dict:
        return {"type": "disk", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class HalfPlane(Shape):
    """Set {x : normal . x <= offset}; the stored normal is outward and unit."""

    normal: Tuple[float, float]
    offset: float

    def __post_init__(self):
        norm = math.hypot(*self.normal)
        if norm == 0.0:
            raise InvalidShapeError("half-plane normal must be nonzero")
        object.__setattr__(self, "normal",
                           (self.normal[0] / norm, self.normal[1] / norm))
        object.__setattr__(self, "offset", self.offset / norm)

    dim = 2

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return pts @ np.asarray(self.normal) <= self.offset

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.abs(pts @ np.asarray(self.normal) - self.offset)

    def bbox(self):
        return None

    def volume(self) -> float:
        return math.inf

    def scaled(self, factor: float) -> "HalfPlane":
        if factor > 0:
            return HalfPlane(self.normal, self.offset * factor)
        return HalfPlane((-self.normal[0], -self.normal[1]), self.offset * factor)

    def to_json(self) -> dict:
        return {"type": "halfplane", "normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class DisjointUnion(Shape):
    """Union of shapes whose pairwise intersections have zero volume (checked)."""

    parts: Tuple[Shape, ...]
    dim_hint: Optional[int] = None

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            if self.dim_hint not in (1, 2):
                raise InputError("empty union needs an explicit dim_hint of 1 or 2")
            object.__setattr__(self, "dim", self.dim_hint)
            return
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise InvalidShapeError("union members disagree in dimension")
        object.__setattr__(self, "dim", dims.pop())
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                inter = _pairwise_intersection_volume(parts[i], parts[j])
                vmin = min(parts[i].volume(), parts[j].volume())
                if inter > 1e-12 * max(vmin, 1e-30):
                    raise InvalidShapeError(
                        f"union members {i} and {j} overlap (volume {inter:.3e})")

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        if not self.parts:
            m = len(np.atleast_2d(pts)) if self.dim == 2 else np.atleast_1d(pts).size
            return np.zeros(m, dtype=bool)
        acc = self.parts[0].contains_points(pts)
        for p in self.parts[1:]:
            acc = acc | p.contains_points(pts)
        return acc

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        if not self.parts:
            m = len(np.atleast_2d(pts)) if self.dim == 2 else np.atleast_1d(pts).size
            return np.full(m, np.inf)
        acc = self.parts[0].boundary_distance(pts)
        for p in self.parts[1:]:
            acc = np.minimum(acc, p.boundary_distance(pts))
        return acc

    def bbox(self):
        boxes = [p.bbox() for p in self.parts]
        if not boxes or any(b is None for b in boxes):
            return None
        los = np.vstack([b[0] for b in boxes]).min(axis=0)
        his = np.vstack([b[1] for b in boxes]).max(axis=0)
        return los, his

    def volume(self) -> float:
        return sum(p.volume() for p in self.parts)

    def scaled(self, factor: float) -> "DisjointUnion":
        return DisjointUnion(tuple(p.scaled(factor) for p in self.parts),
                             dim_hint=self.dim_hint)

    def to_json(self) -> dict:
        return {"type": "union", "parts": [p.to_json() for p in self.parts],
                "dim": getattr(self, "dim", self.dim_hint)}


def _pairwise_intersection_volume(s1: Shape, s2: Shape) -> float:
    """Exact volume of s1 intersect s2, for union validation."""
    if isinstance(s1, DisjointUnion):
        return sum(_pairwise_intersection_volume(p, s2) for p in s1.parts)
    if isinstance(s2, DisjointUnion):
        return sum(_pairwise_intersection_volume(s1, p) for p in s2.parts)
    if isinstance(s1, IntervalUnion) and isinstance(s2, IntervalUnion):
        total = 0.0
        for a1, b1 in s1.intervals:
            for a2, b2 in s2.intervals:
                total += max(0.0, min(b1, b2) - max(a1, a2))
        return total
    # bounding-box quick reject for the bounded 2-d cases
    b1, b2 = s1.bbox(), s2.bbox()
    if b1 is not None and b2 is not None:
        if np.any(b1[1] < b2[0]) or np.any(b2[1] < b1[0]):
            return 0.0
    if isinstance(s1, HalfPlane) and isinstance(s2, HalfPlane):
        n1, n2 = np.asarray(s1.normal), np.asarray(s2.normal)
        if np.allclose(n1, -n2) and s1.offset <= -s2.offset:
            return 0.0
        return math.inf
    if isinstance(s2, HalfPlane):
        s1, s2 = s2, s1
    if isinstance(s1, HalfPlane):
        if isinstance(s2, Polygon):
            clipped = clip_polygon_halfplane([tuple(v) for v in s2.verts],
                                             s1.normal, s1.offset)
            return abs(shoelace_area(np.array(clipped))) if len(clipped) >= 3 else 0.0
        if isinstance(s2, Disk):
            # signed distance of disk center to the boundary line
            d = float(np.dot(s2.center, s1.normal)) - s1.offset
            r = s2.radius
            if d >= r:
                return 0.0
            if d <= -r:
                return math.pi * r * r
            # circular segment kept on the normal's far side
            return r * r * math.acos(d / r) - d * math.sqrt(r * r - d * d)
    if isinstance(s2, Disk) and isinstance(s1, Polygon):
        s1, s2 = s2, s1
    if isinstance(s1, Disk) and isinstance(s2, Polygon):
        verts = s2.verts - np.asarray(s1.center)
        return max(0.0, disk_polygon_area(s1.radius, verts))
    if isinstance(s1, Disk) and isinstance(s2, Disk):
        d = math.hypot(s1.center[0] - s2.center[0], s1.center[1] - s2.center[1])
        r1, r2 = s1.radius, s2.radius
        if d >= r1 + r2:
            return 0.0
        if d <= abs(r1 - r2):
            rmin = min(r1, r2)
            return math.pi * rmin * rmin
        a1 = math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
        a2 = math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
        return (r1 * r1 * (a1 - math.sin(2 * a1) / 2)
                + r2 * r2 * (a2 - math.sin(2 * a2) / 2))
    if isinstance(s1, Polygon) and isinstance(s2, Polygon):
        total = 0.0
        for tri in ear_clip_triangulate(s2.verts):
            poly = [tuple(v) for v in s1.verts]
            m = len(tri)
            for i in range(m):
                p, q = tri[i], tri[(i + 1) % m]
                d = q - p
                # CCW triangle keeps the left side of each edge: cross(d, x - p) >= 0
                nx, ny = -d[1], d[0]
                off = nx * p[0] + ny * p[1]
                poly = clip_polygon_halfplane(poly, (-nx, -ny), -off)
                if not poly:
                    break
            if len(poly) >= 3:
                total += abs(shoelace_area(np.array(poly)))
        return total
    raise InputError(f"unsupported intersection pair {type(s1)}/{type(s2)}")


# ---------------------------------------------------------------------------
# volume fraction
# ---------------------------------------------------------------------------

def volume_fraction(cube: Cube, shape: Shape) -> float:
    """|cube intersect shape| / |cube|, exactly, for every shape kind.

    Disks are handled in closed form for any cube orientation: the square is
    expressed in the disk-centered frame, where a chord/sector decomposition
    of its edges gives the exact overlap.
    """
    if cube.dim != shape.dim:
        raise InputError("cube and shape dimensions differ")
    if cube.dim == 1:
        lo, hi = cube.interval()
        if not isinstance(shape, (IntervalUnion, DisjointUnion)):
            raise InputError("1-d fractions require interval-union shapes")
        if isinstance(shape, DisjointUnion):
            return min(1.0, sum(volume_fraction(cube, p) for p in shape.parts))
        total = 0.0
        for a, b in shape.intervals:
            total += max(0.0, min(hi, b) - max(lo, a))
        return min(1.0, total / cube.side)

    area = cube.side * cube.side
    if isinstance(shape, DisjointUnion):
        t = sum(volume_fraction(cube, p) for p in shape.parts)
        return min(1.0, t)
    if isinstance(shape, Polygon):
        clipped = clip_polygon_to_cube(shape.verts, cube)
        if len(clipped) < 3:
            return 0.0
        return min(1.0, max(0.0, shoelace_area(np.array(clipped)) / area))
    if isinstance(shape, HalfPlane):
        poly = [tuple(v) for v in cube.vertices()]
        kept = clip_polygon_halfplane(poly, shape.normal, shape.offset)
        if len(kept) < 3:
            return 0.0
        return min(1.0, max(0.0, shoelace_area(np.array(kept)) / area))
    if isinstance(shape, Disk):
        verts = cube.vertices() - np.asarray(shape.center)
        return min(1.0, max(0.0, disk_polygon_area(shape.radius, verts) / area))
    raise InputError(f"unsupported shape {type(shape)}")


# ---------------------------------------------------------------------------
# relative perimeter
# ---------------------------------------------------------------------------

def _segment_open_box_length(p: np.ndarray, q: np.ndarray, box: AxisBox) -> float:
    """Length of the open-box part of segment pq; on-boundary runs count zero."""
    t0, t1 = 0.0, 1.0
    for k in range(box.dim):
        x0, dx = p[k], q[k] - p[k]
        lo, hi = box.mins[k], box.maxs[k]
        if dx == 0.0:
            if not (lo < x0 < hi):
                return 0.0
            continue
        ta, tb = (lo - x0) / dx, (hi - x0) / dx
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 >= t1:
            return 0.0
    return float(np.linalg.norm(q - p)) * (t1 - t0)


def _segment_region_length(p: np.ndarray, q: np.ndarray, region: Region) -> float:
    if isinstance(region, AllSpace):
        return float(np.linalg.norm(q - p))
    if isinstance(region, AxisBox):
        return _segment_open_box_length(p, q, region)
    if isinstance(region, PolygonRegion):
        rv = region._verts
        seg = q - p
        L = float(np.linalg.norm(seg))
        if L == 0.0:
            return 0.0
        ts = {0.0, 1.0}
        m = len(rv)
        for j in range(m):
            a, b = rv[j], rv[(j + 1) % m]
            d2 = b - a
            denom = seg[0] * d2[1] - seg[1] * d2[0]
            dq = a - p
            if abs(denom) > 1e-14:
                t = (dq[0] * d2[1] - dq[1] * d2[0]) / denom
                u = (dq[0] * seg[1] - dq[1] * seg[0]) / denom
                if 0.0 <= u <= 1.0 and 0.0 < t < 1.0:
                    ts.add(float(t))
            else:
                # parallel; collinear overlaps handled by midpoint rejection below
                pass
        ts = sorted(ts)
        total = 0.0
        bdist_tol = 1e-12 * (L + 1.0)
        for u, v in zip(ts[:-1], ts[1:]):
            if v - u <= 0.0:
                continue
            mid = p + 0.5 * (u + v) * seg
            mind = np.inf
            for j in range(m):
                mind = min(mind, float(_point_segment_distance(
                    mid[None, :], rv[j], rv[(j + 1) % m])[0]))
            if mind <= bdist_tol:
                continue  # runs along the region boundary: open region excludes it
            if points_in_polygon(mid[None, :], rv)[0]:
                total += (v - u) * L
        return total
    raise InputError(f"unsupported region {type(region)}")


def _circle_region_arclength(center: Tuple[float, float], r: float, region: Region) -> float:
    """Arc length of a circle inside an open region, via angle breakpoints."""
    if isinstance(region, AllSpace):
        return 2.0 * math.pi * r
    cx, cy = center
    angles: List[float] = []
    if isinstance(region, AxisBox):
        (x0, y0), (x1, y1) = region.mins, region.maxs

        def add_cos(val):  # cos(theta) = val
            if -1.0 <= val <= 1.0:
                a = math.acos(val)
                angles.extend([a, 2.0 * math.pi - a])

        def add_sin(val):
            if -1.0 <= val <= 1.0:
                a = math.asin(val)
                angles.extend([a % (2 * math.pi), (math.pi - a) % (2 * math.pi)])

        add_cos((x0 - cx) / r)
        add_cos((x1 - cx) / r)
        add_sin((y0 - cy) / r)
        add_sin((y1 - cy) / r)

        def inside(pt):
            return (x0 < pt[0] < x1) and (y0 < pt[1] < y1)
    elif isinstance(region, PolygonRegion):
        rv = region._verts
        m = len(rv)
        for j in range(m):
            a, b = rv[j], rv[(j + 1) % m]
            d = b - a
            f = a - np.array([cx, cy])
            A = float(np.dot(d, d))
            B = 2.0 * float(np.dot(f, d))
            C = float(np.dot(f, f)) - r * r
            disc = B * B - 4 * A * C
            if disc <= 0.0 or A == 0.0:
                continue
            root = math.sqrt(disc)
            for t in ((-B - root) / (2 * A), (-B + root) / (2 * A)):
                if 0.0 <= t <= 1.0:
                    pt = a + t * d
                    angles.append(math.atan2(pt[1] - cy, pt[0] - cx) % (2 * math.pi))

        def inside(pt):
            return bool(points_in_polygon(np.array([pt]), rv)[0])
    else:
        raise InputError(f"unsupported region {type(region)}")

    if not angles:
        probe = (cx + r, cy)
        return 2.0 * math.pi * r if inside(probe) else 0.0
    angles = sorted(a % (2.0 * math.pi) for a in angles)
    total = 0.0
    for i in range(len(angles)):
        a0 = angles[i]
        a1 = angles[(i + 1) % len(angles)]
        span = (a1 - a0) % (2.0 * math.pi)
        if span == 0.0:
            continue
        mid = (a0 + span / 2.0) % (2.0 * math.pi)
        if inside((cx + r * math.cos(mid), cy + r * math.sin(mid))):
            total += span * r
    return total


def perimeter(shape: Shape, region: Region = ALL_SPACE) -> float:
    """Boundary measure of the shape inside the open region.

    Returns +inf for a half-plane measured over all of space (its boundary
    line is unbounded); every bounded case is exact.
    """
    if isinstance(shape, IntervalUnion):
        if isinstance(region, AllSpace):
            return float(2 * len(shape.intervals))
        if isinstance(region, AxisBox) and region.dim == 1:
            lo, hi = region.mins[0], region.maxs[0]
            return float(sum(1 for x, _ in shape.endpoints() if lo < x < hi))
        raise InputError("1-d perimeter supports AllSpace or 1-d boxes")
    if isinstance(shape, Polygon):
        if isinstance(region, AllSpace):
            return float(sum(np.linalg.norm(q - p) for p, q in shape.edges()))
        return float(sum(_segment_region_length(p, q, region) for p, q in shape.edges()))
    if isinstance(shape, Disk):
        return _circle_region_arclength(shape.center, shape.radius, region)
    if isinstance(shape, HalfPlane):
        if isinstance(region, AllSpace):
            return math.inf
        # clip the boundary line to the region via a long chord
        if isinstance(region, AxisBox):
            span = float(np.linalg.norm(np.asarray(region.maxs) - np.asarray(region.mins)))
            anchor = np.asarray(region.mins) + (np.asarray(region.maxs) - np.asarray(region.mins)) / 2.0
        elif isinstance(region, PolygonRegion):
            rv = region._verts
            span = float(np.linalg.norm(rv.max(axis=0) - rv.min(axis=0)))
            anchor = rv.mean(axis=0)
        else:
            raise InputError(f"unsupported region {type(region)}")
        u = np.asarray(shape.normal)
        base = anchor + (shape.offset - float(anchor @ u)) * u
        tangent = np.array([-u[1], u[0]])
        p = base - 2.0 * span * tangent
        q = base + 2.0 * span * tangent
        return _segment_region_length(p, q, region)
    if isinstance(shape, DisjointUnion):
        return float(sum(perimeter(p, region) for p in shape.parts))
    raise InputError(f"unsupported shape {type(shape)}")


# ---------------------------------------------------------------------------
# boundary parameterization and sampling
# ---------------------------------------------------------------------------

@dataclass
class BoundaryComponent:
    """One arc-length-parameterized connected piece of a shape boundary."""

    length: float
    point_at: Callable[[float], Tuple[float, float]]
    normal_at: Callable[[float], Tuple[float, float]]
    closed: bool = True


def boundary_components(shape: Shape, window: Optional[Region] = None) -> List[BoundaryComponent]:
    """Arc-length parameterizations of the boundary, one entry per edge or circle.

    Half-planes are unbounded, so they require a bounded window to clip the
    boundary line into a finite chord.
    """
    if isinstance(shape, Polygon):
        comps = []
        for p, q in shape.edges():
            d = q - p
            L = float(np.linalg.norm(d))
            tang = d / L
            nrm = (float(tang[1]), float(-tang[0]))  # outward for CCW orientation

            def mk(p=p, tang=tang, nrm=nrm):
                return (lambda s: (float(p[0] + s * tang[0]), float(p[1] + s * tang[1])),
                        lambda s: nrm)

            pa, na = mk()
            comps.append(BoundaryComponent(L, pa, na, closed=False))
        return comps
    if isinstance(shape, Disk):
        cx, cy = shape.center
        r = shape.radius

        def pa(s, cx=cx, cy=cy, r=r):
            a = s / r
            return (cx + r * math.cos(a), cy + r * math.sin(a))

        def na(s, r=r):
            a = s / r
            return (math.cos(a), math.sin(a))

        return [BoundaryComponent(2.0 * math.pi * r, pa, na, closed=True)]
    if isinstance(shape, HalfPlane):
        if window is None or isinstance(window, AllSpace):
            raise InputError("half-plane boundary sampling requires a bounded window")
        if not isinstance(window, AxisBox):
            raise InputError("half-plane boundary sampling supports AxisBox windows")
        u = np.asarray(shape.normal)
        tangent = np.array([-u[1], u[0]])
        anchor = (np.asarray(window.mins) + np.asarray(window.maxs)) / 2.0
        base = anchor + (shape.offset - float(anchor @ u)) * u
        span = float(np.linalg.norm(np.asarray(window.maxs) - np.asarray(window.mins)))
        p = base - 2.0 * span * tangent
        q = base + 2.0 * span * tangent
        # clip chord to the closed window
        t0, t1 = 0.0, 1.0
        for k in range(2):
            x0, dx = p[k], q[k] - p[k]
            lo, hi = window.mins[k], window.maxs[k]
            if dx == 0.0:
                if not (lo <= x0 <= hi):
                    return []
                continue
            ta, tb = (lo - x0) / dx, (hi - x0) / dx
            if ta > tb:
                ta, tb = tb, ta
            t0, t1 = max(t0, ta), min(t1, tb)
        if t0 >= t1:
            return []
        a = p + t0 * (q - p)
        b = p + t1 * (q - p)
        L = float(np.linalg.norm(b - a))
        tang = (b - a) / L
        nrm = (float(u[0]), float(u[1]))
        return [BoundaryComponent(
            L,
            lambda s, a=a, tang=tang: (float(a[0] + s * tang[0]), float(a[1] + s * tang[1])),
            lambda s, nrm=nrm: nrm,
            closed=False)]
    if isinstance(shape, DisjointUnion):
        comps = []
        for p in shape.parts:
            comps.extend(boundary_components(p, window))
        return comps
    raise InputError(f"no boundary parameterization for {type(shape)}")


def boundary_sample(shape: Shape, count: int, seed: int = 0,
                    window: Optional[Region] = None) -> List[Tuple[Tuple[float, ...], Tuple[float, ...]]]:
    """Deterministic arc-length-uniform boundary samples with outward unit normals.

    For interval unions the boundary is the finite endpoint set, which is
    returned in full with signs.  For 2-d shapes, ``count`` samples are
    placed at midpoint-uniform arc positions over the total boundary length;
    ``seed`` rotates the phase deterministically (seed 0 means midpoints).
    """
    if count <= 0:
        raise InputError("sample count must be positive")
    if isinstance(shape, IntervalUnion):
        return [((x,), (s,)) for x, s in shape.endpoints()]
    if isinstance(shape, DisjointUnion) and shape.dim == 1:
        out = []
        for p in shape.parts:
            out.extend(boundary_sample(p, count, seed, window))
        return out
    comps = boundary_components(shape, window)
    total = sum(c.length for c in comps)
    if total == 0.0:
        return []
    spacing = total / count
    phase = math.modf(seed * _GOLDEN)[0] * spacing
    samples = []
    for j in range(count):
        s = phase + (j + 0.5) * spacing
        s = s % total
        for c in comps:
            if s < c.length or c is comps[-1]:
                s_here = min(s, c.length * (1.0 - 1e-15))
                samples.append((c.point_at(s_here), c.normal_at(s_here)))
                break
            s -= c.length
    return samples


# ---------------------------------------------------------------------------
# shape (de)serialization
# ---------------------------------------------------------------------------

def shape_from_json(obj) -> Shape:
    """Build a shape from the documented JSON schema (see README)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "type" not in obj:
        raise InputError("shape JSON must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "polygon":
            return Polygon(tuple(map(tuple, obj["vertices"])))
        if kind == "disk":
            return Disk(tuple(obj["center"]), float(obj["radius"]))
        if kind == "interval_union":
            return IntervalUnion(tuple(map(tuple, obj["intervals"])))
        if kind == "halfplane":
            return HalfPlane(tuple(obj["normal"]), float(obj["offset"]))
        if kind == "union":
            parts = tuple(shape_from_json(p) for p in obj["parts"])
            return DisjointUnion(parts, dim_hint=obj.get("dim"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed shape JSON: {exc}") from exc
    raise InputError(f"unknown shape type {kind!r}")


def region_from_spec(text: str, dim: int = 2) -> Region:
    """Parse a region flag value: 'all', 'unit', or 'box:x0,y0,x1,y1'."""
    if text == "all":
        return ALL_SPACE
    if text == "unit":
        return unit_box(dim)
    if text.startswith("box:"):
        vals = [float(v) for v in text[4:].split(",")]
        if len(vals) == 2 and dim == 1:
            return AxisBox((vals[0],), (vals[1],))
        if len(vals) == 4:
            return AxisBox((vals[0], vals[1]), (vals[2], vals[3]))
        raise InputError("box region expects 'box:lo,hi' (1-d) or 'box:x0,y0,x1,y1'")
    raise InputError(f"unknown region spec {text!r}")
