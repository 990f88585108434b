"""Boundary geometry: contour tracing, resampling, normals, curvature,
segment predicates, and Delaunay triangulation of seed points.

Conventions used throughout the package:

* Points are (x, y) pixel coordinates; raster arrays are indexed [y, x].
* Closed boundaries are simple polylines with roughly unit arc spacing,
  oriented counter-clockwise (positive signed area) so the interior lies
  on the left of the direction of travel.
* Inward normals are the left rotation of the local tangent.
* Curvature is signed concave-positive: indentations of the region have
  positive curvature, and a disk boundary of radius r has curvature close
  to -1/r everywhere. Turning rates are measured on a Gaussian-smoothed
  copy of the boundary because raw pixel contours are dominated by
  quantization noise.

All operations are pure functions of their inputs and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import (
    AmbiguousRegion,
    BoundaryTooShort,
    DegenerateVertex,
    DuplicateSeed,
    InvalidBoundary,
    NotFound,
    TooSmall,
)

#: Minimum number of vertices for a usable closed boundary.
MIN_VERTICES = 8

#: Largest spacing treated as "adjacent" on an 8-connected contour.
#: Diagonal contour neighbors are sqrt(2) apart and must not count as gaps.
ADJACENT_GAP = math.sqrt(2.0)


# --------------------------------------------------------------------------
# boundary container


@dataclass
class ClosedBoundary:
    """Closed, unit-spaced, CCW-oriented boundary with per-vertex data.

    Attributes
    ----------
    vertices : ndarray, shape (n, 2)
        Vertex positions in pixels.
    normals : ndarray, shape (n, 2)
        Inward unit normals.
    curvatures : ndarray, shape (n,)
        Signed curvature in 1/pixels, concave-positive.
    arc : ndarray, shape (n + 1,)
        Cumulative arc length; ``arc[0] == 0`` and ``arc[-1]`` is the
        perimeter.

    Instances are treated as immutable once built.
    """

    vertices: np.ndarray
    normals: np.ndarray
    curvatures: np.ndarray
    arc: np.ndarray

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def perimeter(self) -> float:
        return float(self.arc[-1])

    def inside(self, points) -> np.ndarray:
        """Vectorized point-in-polygon test against this boundary."""
        return points_in_polygon(points, self.vertices)


def prepare_boundary(polygon, curvature_window: float = 5.0,
                     smooth_sigma: float = 2.0,
                     spacing: float = 1.0) -> ClosedBoundary:
    """Resample, orient, and annotate a raw closed polygon.

    Convenience wrapper chaining :func:`resample_and_orient`,
    :func:`compute_normals`, and :func:`compute_curvature`.
    """
    verts = resample_and_orient(polygon, spacing=spacing)
    normals = compute_normals(verts)
    curv = compute_curvature(verts, window=curvature_window,
                             smooth_sigma=smooth_sigma)
    seg = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    return ClosedBoundary(vertices=verts, normals=normals, curvatures=curv,
                          arc=arc)


def boundary_from_mask(mask, label: int = 1, **kwargs) -> ClosedBoundary:
    """Trace one labeled region and prepare its boundary."""
    return prepare_boundary(trace_boundary(mask, label), **kwargs)


# --------------------------------------------------------------------------
# contour tracing

# Moore neighborhood in (dy, dx), clockwise in raster coordinates.
_MOORE = ((0, 1), (1, 1), (1, 0), (1, -1),
          (0, -1), (-1, -1), (-1, 0), (-1, 1))


def trace_boundary(mask, label: int) -> np.ndarray:
    """Trace the outer contour of one labeled region.

    Runs a Moore-neighbor walk around the 8-connected component carrying
    ``label``. Interior holes are ignored; the walk follows the outer
    contour only.

    Parameters
    ----------
    mask : ndarray
        Labeled raster indexed [y, x].
    label : int
        Value identifying the region to trace.

    Returns
    -------
    ndarray, shape (n, 2)
        Ordered (x, y) pixel coordinates of the contour. Consecutive
        points are 8-neighbors (1 or sqrt(2) apart).

    Raises
    ------
    NotFound
        If no pixel carries ``label``.
    AmbiguousRegion
        If the label splits into several 8-connected components.
    TooSmall
        If the contour has fewer than :data:`MIN_VERTICES` points.
    """
    fg = np.asarray(mask) == label
    if not fg.any():
        raise NotFound(f"label {label} not present in mask")
    _, count = ndimage.label(fg, structure=np.ones((3, 3), bool))
    if count > 1:
        raise AmbiguousRegion(
            f"label {label} splits into {count} disconnected components")

    grid = np.pad(fg, 1)
    ys, xs = np.nonzero(grid)
    start = (int(ys[0]), int(xs[0]))  # topmost, then leftmost

    # Walk states are (pixel, backtrack); the walk is deterministic, so the
    # first repeated state closes the contour loop.
    state = (start, (start[0], start[1] - 1))
    seen: dict = {}
    path: list = []
    cycle = None
    limit = 4 * len(ys) + 16
    for _ in range(limit):
        if state in seen:
            cycle = path[seen[state]:]
            break
        seen[state] = len(path)
        pix, back = state
        path.append(pix)
        k0 = _MOORE.index((back[0] - pix[0], back[1] - pix[1]))
        nxt = None
        for t in range(1, 9):
            off = _MOORE[(k0 + t) % 8]
            cand = (pix[0] + off[0], pix[1] + off[1])
            if grid[cand]:
                prev = _MOORE[(k0 + t - 1) % 8]
                nxt = (cand, (pix[0] + prev[0], pix[1] + prev[1]))
                break
        if nxt is None:  # isolated pixel
            cycle = path
            break
        state = nxt
    if cycle is None:
        raise InvalidBoundary("contour walk failed to close")
    if len(cycle) < MIN_VERTICES:
        raise TooSmall(
            f"contour has {len(cycle)} pixels, need >= {MIN_VERTICES}")
    # unpad and convert (y, x) -> (x, y)
    return np.array([(x - 1.0, y - 1.0) for (y, x) in cycle])


# --------------------------------------------------------------------------
# resampling and per-vertex quantities


def signed_area(vertices) -> float:
    """Shoelace signed area; positive for counter-clockwise polygons."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def resample_and_orient(polygon, spacing: float = 1.0) -> np.ndarray:
    """Resample a closed polygon to ~unit arc spacing, oriented CCW.

    Parameters
    ----------
    polygon : array-like, shape (n, 2)
        Closed polygon; an explicitly repeated last vertex is accepted.
    spacing : float
        Target arc spacing in pixels.

    Returns
    -------
    ndarray, shape (m, 2)
        Evenly spaced vertices with positive signed area. An input that is
        already CCW and evenly spaced comes back unchanged up to a cyclic
        start index.

    Raises
    ------
    TooSmall
        Fewer than :data:`MIN_VERTICES` input vertices.
    InvalidBoundary
        Self-intersecting or degenerate input.
    """
    pts = np.asarray(polygon, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidBoundary("polygon must be an (n, 2) point array")
    if len(pts) > 1 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) < MIN_VERTICES:
        raise TooSmall(f"polygon has {len(pts)} vertices, need >= {MIN_VERTICES}")
    if _polygon_self_intersects(pts):
        raise InvalidBoundary("polygon is self-intersecting")

    closed = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(arc[-1])
    if total <= 0.0:
        raise InvalidBoundary("polygon has zero perimeter")

    count = max(MIN_VERTICES, int(round(total / spacing)))
    targets = np.arange(count) * (total / count)
    out = np.column_stack([
        np.interp(targets, arc, closed[:, 0]),
        np.interp(targets, arc, closed[:, 1]),
    ])
    area = signed_area(out)
    if area == 0.0:
        raise InvalidBoundary("polygon has zero area")
    if area < 0.0:
        out = out[::-1].copy()
    return out


def compute_normals(vertices) -> np.ndarray:
    """Inward unit normals from central-difference tangents.

    The tangent at vertex i is ``v[i+1] - v[i-1]`` (cyclic); the normal is
    its left rotation, which points into the region for a CCW boundary.
    Coincident neighbors fall back to a wider stencil.
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    tang = np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)
    norm = np.linalg.norm(tang, axis=1)
    bad = norm < 1e-12
    width = 2
    while bad.any() and width <= 4:
        idx = np.nonzero(bad)[0]
        tang[idx] = v[(idx + width) % n] - v[(idx - width) % n]
        norm[idx] = np.linalg.norm(tang[idx], axis=1)
        bad = norm < 1e-12
        width += 1
    if bad.any():
        vid = int(np.nonzero(bad)[0][0])
        raise DegenerateVertex(f"no usable tangent at vertex {vid}")
    return np.column_stack([-tang[:, 1], tang[:, 0]]) / norm[:, None]


def compute_curvature(vertices, window: float = 5.0,
                      smooth_sigma: float = 2.0) -> np.ndarray:
    """Signed curvature as the negated turning rate of the tangent angle.

    The boundary coordinates are smoothed with a cyclic Gaussian of
    ``smooth_sigma`` pixels, tangent angles come from central differences,
    and the turning rate is averaged over an arc window of +-``window``
    pixels. The negation makes indentations positive per the package
    convention.

    Raises
    ------
    BoundaryTooShort
        If the boundary has fewer than ``2 * window + 3`` vertices.
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    w = max(1, int(round(window)))
    if n < 2 * w + 3:
        raise BoundaryTooShort(
            f"boundary has {n} vertices, need >= {2 * w + 3}")
    sm = v
    if smooth_sigma > 0.0:
        kernel = _gaussian_kernel1d(smooth_sigma)
        sm = np.column_stack([
            ndimage.convolve1d(v[:, 0], kernel, mode="wrap"),
            ndimage.convolve1d(v[:, 1], kernel, mode="wrap"),
        ])
    tang = np.roll(sm, -1, axis=0) - np.roll(sm, 1, axis=0)
    theta = np.arctan2(tang[:, 1], tang[:, 0])
    dtheta = np.roll(theta, -1) - theta
    dtheta = (dtheta + np.pi) % (2.0 * np.pi) - np.pi
    # span over the unsmoothed vertices: curvature then integrates to the
    # total turning against the boundary's own arc metric
    seglen = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
    turn = _cyclic_window_sum(dtheta, w)
    span = np.maximum(_cyclic_window_sum(seglen, w), 1e-9)
    return -turn / span


def _gaussian_kernel1d(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    k = np.arange(-radius, radius + 1, dtype=float)
    weights = np.exp(-0.5 * (k / sigma) ** 2)
    return weights / weights.sum()


def _cyclic_window_sum(x: np.ndarray, w: int) -> np.ndarray:
    """Cyclic sums over windows [i - w, i + w) of a length-n sequence."""
    n = len(x)
    reps = (2 * w) // n + 2
    ext = np.tile(x, reps)
    cs = np.concatenate([[0.0], np.cumsum(ext)])
    start = (np.arange(n) - w) % n
    return cs[start + 2 * w] - cs[start]


def arc_distances(arc: np.ndarray, i: int) -> np.ndarray:
    """Cyclic arc distance from vertex i to every vertex."""
    n = len(arc) - 1
    total = arc[-1]
    d = np.abs(arc[:n] - arc[i])
    return np.minimum(d, total - d)


def indices_within_arc(arc: np.ndarray, i: int, radius: float) -> np.ndarray:
    """Boundary indices within cyclic arc distance ``radius`` of vertex i."""
    return np.nonzero(arc_distances(arc, i) <= radius + 1e-9)[0]


# --------------------------------------------------------------------------
# segment predicates


def _orient(a, b, c):
    """Twice the signed area of triangle (a, b, c); broadcasts."""
    return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))


def segments_properly_intersect(p0, p1, q0, q1) -> bool:
    """True iff the open interiors of two segments cross.

    Shared endpoints, touching, and collinear overlap do not count.
    Degenerate zero-length segments never intersect.
    """
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    d1 = _orient(p0, p1, q0)
    d2 = _orient(p0, p1, q1)
    d3 = _orient(q0, q1, p0)
    d4 = _orient(q0, q1, p1)
    return bool(d1 * d2 < 0.0 and d3 * d4 < 0.0)


def proper_intersection_matrix(p0, p1, q0=None, q1=None,
                               chunk: int = 256) -> np.ndarray:
    """Pairwise proper-crossing matrix between two segment families.

    With one family, tests the family against itself (diagonal is False).
    Returns an (N, M) boolean array.
    """
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    if q0 is None:
        q0, q1 = p0, p1
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    n, m = len(p0), len(q0)
    out = np.zeros((n, m), dtype=bool)
    b0 = q0[None, :, :]
    b1 = q1[None, :, :]
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        a0 = p0[lo:hi, None, :]
        a1 = p1[lo:hi, None, :]
        d1 = _orient(a0, a1, b0)
        d2 = _orient(a0, a1, b1)
        d3 = _orient(b0, b1, a0)
        d4 = _orient(b0, b1, a1)
        out[lo:hi] = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)
    return out


def segment_intersects_boundary(vertices, seg_start, seg_end,
                                skip=()) -> bool:
    """True iff a segment properly crosses any boundary edge.

    ``skip`` lists boundary vertex indices whose incident edges are
    ignored, so a cut anchored at a vertex does not report its own anchor.
    """
    v = np.asarray(vertices, float)
    n = len(v)
    keep = np.ones(n, dtype=bool)
    for s in skip:
        s = int(s) % n
        keep[s] = False
        keep[(s - 1) % n] = False
    a = v
    b = np.roll(v, -1, axis=0)
    p0 = np.asarray(seg_start, float)
    p1 = np.asarray(seg_end, float)
    d1 = _orient(p0, p1, a)
    d2 = _orient(p0, p1, b)
    d3 = _orient(a, b, p0)
    d4 = _orient(a, b, p1)
    hit = (d1 * d2 < 0.0) & (d3 * d4 < 0.0) & keep
    return bool(hit.any())


def segments_cross_boundary(vertices, starts, ends, skip_a=None, skip_b=None,
                            chunk: int = 128) -> np.ndarray:
    """Batched boundary-crossing test for many segments.

    ``skip_a``/``skip_b`` optionally give one boundary vertex index per
    segment whose incident edges are ignored (the segment's anchors).
    Returns a boolean array of length ``len(starts)``.
    """
    v = np.asarray(vertices, float)
    n = len(v)
    starts = np.asarray(starts, float)
    ends = np.asarray(ends, float)
    a = v[None, :, :]
    b = np.roll(v, -1, axis=0)[None, :, :]
    edge_idx = np.arange(n)[None, :]
    out = np.zeros(len(starts), dtype=bool)
    for lo in range(0, len(starts), chunk):
        hi = min(len(starts), lo + chunk)
        p0 = starts[lo:hi, None, :]
        p1 = ends[lo:hi, None, :]
        d1 = _orient(p0, p1, a)
        d2 = _orient(p0, p1, b)
        d3 = _orient(a, b, p0)
        d4 = _orient(a, b, p1)
        hit = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)
        for skip in (skip_a, skip_b):
            if skip is not None:
                s = np.asarray(skip[lo:hi], dtype=int)[:, None] % n
                hit &= ~((edge_idx == s) | (edge_idx == (s - 1) % n))
        out[lo:hi] = hit.any(axis=1)
    return out


def _polygon_self_intersects(pts: np.ndarray) -> bool:
    starts = pts
    ends = np.roll(pts, -1, axis=0)
    return bool(proper_intersection_matrix(starts, ends).any())


# --------------------------------------------------------------------------
# point containment and rasterization


def points_in_polygon(points, vertices, chunk: int = 4096) -> np.ndarray:
    """Crossing-number containment test for many points at once."""
    pts = np.atleast_2d(np.asarray(points, float))
    v = np.asarray(vertices, float)
    x1 = v[None, :, 0]
    y1 = v[None, :, 1]
    x2 = np.roll(v[:, 0], -1)[None, :]
    y2 = np.roll(v[:, 1], -1)[None, :]
    out = np.zeros(len(pts), dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for lo in range(0, len(pts), chunk):
            hi = min(len(pts), lo + chunk)
            x = pts[lo:hi, 0][:, None]
            y = pts[lo:hi, 1][:, None]
            straddle = (y1 > y) != (y2 > y)
            xin = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            cross = straddle & (x < xin)
            out[lo:hi] = (cross.sum(axis=1) % 2) == 1
    return out


def fill_polygon(vertices, shape) -> np.ndarray:
    """Rasterize polygon interior over pixel centers (even-odd rule)."""
    h, w = shape
    v = np.asarray(vertices, float)
    x1, y1 = v[:, 0], v[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    cols = np.arange(w, dtype=float)
    out = np.zeros((h, w), dtype=bool)
    for row in range(h):
        y = float(row)
        straddle = (y1 > y) != (y2 > y)
        if not straddle.any():
            continue
        xs = np.sort(x1[straddle] + (y - y1[straddle])
                     * (x2[straddle] - x1[straddle])
                     / (y2[straddle] - y1[straddle]))
        # pixel is inside iff an odd number of crossings lie to its right
        out[row] = (len(xs) - np.searchsorted(xs, cols, side="right")) % 2 == 1
    return out


def rasterize_region(vertices, shape) -> np.ndarray:
    """Pixels belonging to the closed boundary: interior fill plus the
    pixels under the boundary polyline itself."""
    h, w = shape
    region = fill_polygon(vertices, shape)
    ring = np.round(np.asarray(vertices, float)).astype(int)
    ok = ((ring[:, 0] >= 0) & (ring[:, 0] < w)
          & (ring[:, 1] >= 0) & (ring[:, 1] < h))
    region[ring[ok, 1], ring[ok, 0]] = True
    return region


def supercover_line(p, q) -> np.ndarray:
    """Integer pixels whose unit cells the segment passes through.

    The returned chain is 4-connected (no diagonal steps), so burning it
    into a raster separates 4-connected regions on either side.
    """
    x0, y0 = float(p[0]), float(p[1])
    x1, y1 = float(q[0]), float(q[1])
    ix, iy = int(round(x0)), int(round(y0))
    jx, jy = int(round(x1)), int(round(y1))
    cells = [(ix, iy)]
    dx, dy = x1 - x0, y1 - y0
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    tx = ((ix + 0.5 * sx) - x0) / dx if dx != 0.0 else math.inf
    ty = ((iy + 0.5 * sy) - y0) / dy if dy != 0.0 else math.inf
    dtx = abs(1.0 / dx) if dx != 0.0 else math.inf
    dty = abs(1.0 / dy) if dy != 0.0 else math.inf
    limit = 4 * (abs(jx - ix) + abs(jy - iy) + 2)
    for _ in range(limit):
        if ix == jx and iy == jy:
            break
        if tx <= ty:
            ix += sx
            tx += dtx
        else:
            iy += sy
            ty += dty
        cells.append((ix, iy))
    return np.array(cells, dtype=int)


# --------------------------------------------------------------------------
# Delaunay triangulation


@dataclass(frozen=True)
class Triangle:
    """One triangle of a seed-point triangulation."""

    indices: tuple
    circumcenter: np.ndarray
    circumradius: float
    centroid: np.ndarray


@dataclass
class TriangleSet:
    """Triangulation of seed points (triangles sorted by vertex indices)."""

    points: np.ndarray
    triangles: list

    def __len__(self) -> int:
        return len(self.triangles)


def delaunay(points) -> TriangleSet:
    """Delaunay triangulation by incremental insertion (Bowyer-Watson).

    Points are inserted in index order, which makes cocircular ties
    resolve deterministically in favor of earlier indices. Collinear or
    undersized inputs yield an empty (still valid) triangulation.

    Raises
    ------
    DuplicateSeed
        If two input points coincide exactly.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    seen: dict = {}
    for i, key in enumerate(map(tuple, pts)):
        if key in seen:
            raise DuplicateSeed(f"seeds {seen[key]} and {i} coincide")
        seen[key] = i
    if len(pts) < 3 or _all_collinear(pts):
        return TriangleSet(points=pts.copy(), triangles=[])

    center = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
    radius = max(float(np.linalg.norm(pts - center, axis=1).max()), 1.0)
    m = 50.0 * radius
    aux = np.array([
        center + (0.0, 2.0 * m),
        center + (-2.0 * m, -m),
        center + (2.0 * m, -m),
    ])
    work = np.vstack([pts, aux])
    ns = len(pts)
    tris: list = [(ns, ns + 1, ns + 2)]
    for i in range(ns):
        bad, good = [], []
        for t in tris:
            (bad if _in_circumcircle(work, t, work[i]) else good).append(t)
        edge_count: dict = {}
        for t in bad:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
                key = (min(e), max(e))
                edge_count[key] = edge_count.get(key, 0) + 1
        tris = good
        for u, w in sorted(k for k, c in edge_count.items() if c == 1):
            tris.append(tuple(sorted((i, u, w))))

    triangles = []
    for t in sorted(t for t in tris if max(t) < ns):
        cc, r = _circumcircle(work[t[0]], work[t[1]], work[t[2]])
        if not math.isfinite(r):
            continue
        triangles.append(Triangle(indices=t, circumcenter=cc, circumradius=r,
                                  centroid=pts[list(t)].mean(axis=0)))
    return TriangleSet(points=pts.copy(), triangles=triangles)


def _all_collinear(pts: np.ndarray) -> bool:
    base = pts[0]
    rel = pts - base
    anchor = None
    for r in rel[1:]:
        if np.linalg.norm(r) > 0.0:
            anchor = r
            break
    if anchor is None:
        return True
    cross = rel[:, 0] * anchor[1] - rel[:, 1] * anchor[0]
    scale = max(float(np.abs(rel).max()) ** 2, 1.0)
    return bool(np.all(np.abs(cross) <= 1e-12 * scale))


def _in_circumcircle(work: np.ndarray, tri, p) -> bool:
    a, b, c = work[tri[0]], work[tri[1]], work[tri[2]]
    if _orient(a, b, c) < 0.0:
        b, c = c, b
    m = np.array([a - p, b - p, c - p])
    wsq = m[:, 0] ** 2 + m[:, 1] ** 2
    det = (m[0, 0] * (m[1, 1] * wsq[2] - m[2, 1] * wsq[1])
           - m[0, 1] * (m[1, 0] * wsq[2] - m[2, 0] * wsq[1])
           + wsq[0] * (m[1, 0] * m[2, 1] - m[2, 0] * m[1, 1]))
    perm = (abs(m[0, 0]) * (abs(m[1, 1]) * wsq[2] + abs(m[2, 1]) * wsq[1])
            + abs(m[0, 1]) * (abs(m[1, 0]) * wsq[2] + abs(m[2, 0]) * wsq[1])
            + wsq[0] * (abs(m[1, 0] * m[2, 1]) + abs(m[2, 0] * m[1, 1])))
    return bool(det > 1e-12 * perm)


def _circumcircle(a, b, c):
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0:
        return np.array([math.nan, math.nan]), math.inf
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return np.array([a[0] + ux, a[1] + uy]), math.hypot(ux, uy)
