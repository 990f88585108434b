"""Vertex-center cuts for seeds that form triangles.

Delaunay triangles of the seed points are filtered by boundary overlap
and interior angle, gathered into edge-sharing groups, and each triangle
contributes one added interior vertex (initially its centroid). Cuts run
from boundary vertices near unshared-edge midpoints to that added vertex,
plus center-center cuts across shared edges. Cut vertices and the added
vertices are then refined locally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geom
from .vvcut import Cut, scaled_curvature


@dataclass(frozen=True)
class AngleFilterParams:
    """Interior-angle window for acceptable triangles, in degrees."""

    angle_min_deg: float = 20.0
    angle_max_deg: float = 110.0

    def __post_init__(self):
        if not 0.0 < self.angle_min_deg < self.angle_max_deg < 180.0:
            raise ValueError("need 0 < angle_min < angle_max < 180")


@dataclass
class TriangleGroup:
    """Edge-sharing connected set of accepted triangles.

    ``triangles`` maps triangle id (index into the filtered set) to the
    geometry triangle; ``centers`` holds the current added-vertex position
    per triangle (centroid until optimized). ``vc_anchors`` lists
    (boundary vertex index, triangle id) pairs; ``cc_pairs`` lists
    triangle-id pairs across shared edges.
    """

    gid: int
    points: np.ndarray
    triangles: dict
    centers: dict
    unshared_edges: dict
    shared_edges: list
    vc_anchors: list = field(default_factory=list)
    degenerate: bool = False

    @property
    def cc_pairs(self):
        return [(t1, t2) for (_, t1, t2) in self.shared_edges]

    def shared_midpoints(self, tid: int):
        """Midpoints of this triangle's shared edges."""
        mids = []
        for edge, t1, t2 in self.shared_edges:
            if tid in (t1, t2):
                a, b = edge
                mids.append(0.5 * (self.points[a] + self.points[b]))
        return mids

    def triangle_points(self, tid: int) -> np.ndarray:
        return self.points[list(self.triangles[tid].indices)]


def _interior_angles(pts: np.ndarray) -> np.ndarray:
    angles = []
    for k in range(3):
        a = pts[k]
        u = pts[(k + 1) % 3] - a
        v = pts[(k + 2) % 3] - a
        cosang = float(u @ v) / max(
            float(np.linalg.norm(u) * np.linalg.norm(v)), 1e-12)
        angles.append(math.degrees(math.acos(max(-1.0, min(1.0, cosang)))))
    return np.array(angles)


def filter_triangles(tri_set: geom.TriangleSet, boundary: geom.ClosedBoundary,
                     params: AngleFilterParams = AngleFilterParams()
                     ) -> geom.TriangleSet:
    """Remove triangles with boundary-crossing edges or bad angles."""
    kept = []
    verts = boundary.vertices
    for tri in tri_set.triangles:
        pts = tri_set.points[list(tri.indices)]
        angles = _interior_angles(pts)
        if angles.min() < params.angle_min_deg:
            continue
        if angles.max() > params.angle_max_deg:
            continue
        crossed = any(
            geom.segment_intersects_boundary(verts, pts[a], pts[b])
            for a, b in ((0, 1), (1, 2), (0, 2)))
        if crossed:
            continue
        kept.append(tri)
    return geom.TriangleSet(points=tri_set.points, triangles=kept)


def group_triangles(tri_set: geom.TriangleSet):
    """Connected components of triangles under the shared-edge relation."""
    tris = tri_set.triangles
    edge_map: dict = {}
    for tid, tri in enumerate(tris):
        a, b, c = tri.indices
        for e in ((a, b), (b, c), (a, c)):
            edge_map.setdefault((min(e), max(e)), []).append(tid)

    parent = list(range(len(tris)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for owners in edge_map.values():
        for other in owners[1:]:
            ra, rb = find(owners[0]), find(other)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    members: dict = {}
    for tid in range(len(tris)):
        members.setdefault(find(tid), []).append(tid)

    groups = []
    for gid, root in enumerate(sorted(members)):
        tids = sorted(members[root])
        shared = []
        unshared = {tid: [] for tid in tids}
        for edge, owners in sorted(edge_map.items()):
            owners_in = [t for t in owners if find(t) == root]
            if not owners_in:
                continue
            if len(owners_in) == 2:
                shared.append((edge, owners_in[0], owners_in[1]))
            else:
                unshared[owners_in[0]].append(edge)
        groups.append(TriangleGroup(
            gid=gid,
            points=tri_set.points,
            triangles={tid: tris[tid] for tid in tids},
            centers={tid: tris[tid].centroid.copy() for tid in tids},
            unshared_edges=unshared,
            shared_edges=shared,
        ))
    return groups


def create_vc_cuts(group: TriangleGroup, boundary: geom.ClosedBoundary):
    """Anchor cuts for one group and return the materialized cut list.

    For each unshared edge, the anchor vertex is the boundary vertex
    nearest to the edge midpoint among vertices on the outward side of
    the edge (away from the triangle center). An unshared edge whose
    outward side holds no boundary vertex contributes no cut and flags
    the group degenerate. Each shared edge yields one center-center cut.
    """
    verts = boundary.vertices
    group.vc_anchors = []
    for tid in sorted(group.triangles):
        center = group.centers[tid]
        for a, b in group.unshared_edges[tid]:
            pa, pb = group.points[a], group.points[b]
            mid = 0.5 * (pa + pb)
            edge = pb - pa
            normal = np.array([-edge[1], edge[0]])
            norm = np.linalg.norm(normal)
            if norm < 1e-12:
                group.degenerate = True
                continue
            normal = normal / norm
            if float(normal @ (mid - center)) < 0.0:
                normal = -normal
            outward = (verts - mid) @ normal > 0.0
            if not outward.any():
                group.degenerate = True
                continue
            idx = np.nonzero(outward)[0]
            dist = np.linalg.norm(verts[idx] - mid, axis=1)
            anchor = int(idx[int(np.argmin(dist))])
            group.vc_anchors.append((anchor, tid))
    return group_cuts(group, boundary)


def group_cuts(group: TriangleGroup, boundary: geom.ClosedBoundary):
    """Materialize the group's cuts from its current anchors and centers."""
    verts = boundary.vertices
    cuts = [Cut("vc", verts[idx].copy(), group.centers[tid].copy(),
                idx_p=idx, owner=group.gid, tri_q=tid)
            for idx, tid in group.vc_anchors]
    cuts += [Cut("cc", group.centers[t1].copy(), group.centers[t2].copy(),
                 owner=group.gid, tri_p=t1, tri_q=t2)
             for t1, t2 in group.cc_pairs]
    return cuts


def optimize_vc_vertex(vertex_idx: int, center, boundary: geom.ClosedBoundary,
                       radius: float = 7.0, neg_factor: float = 5.0) -> int:
    """Refine one cut vertex over its arc neighborhood.

    Maximizes ``(n_i . l_hat + k'_i) / |l|`` with ``l`` running from the
    candidate vertex to the triangle center; candidates whose segment
    crosses the boundary are infeasible. Returns the (possibly unchanged)
    boundary index.
    """
    verts = boundary.vertices
    normals = boundary.normals
    kappa = scaled_curvature(boundary.curvatures, neg_factor)
    center = np.asarray(center, dtype=float)
    cand = geom.indices_within_arc(boundary.arc, vertex_idx, radius)
    link = center[None, :] - verts[cand]
    dist = np.linalg.norm(link, axis=1)
    ok = dist > 1e-9
    unit = link / np.maximum(dist, 1e-12)[:, None]
    score = np.where(
        ok,
        (np.einsum("ak,ak->a", unit, normals[cand]) + kappa[cand])
        / np.maximum(dist, 1e-12),
        -np.inf)
    finite = np.isfinite(score)
    if finite.any():
        crossing = geom.segments_cross_boundary(
            verts, verts[cand[finite]],
            np.broadcast_to(center, (int(finite.sum()), 2)),
            skip_a=cand[finite])
        tmp = score[finite]
        tmp[crossing] = -np.inf
        score[finite] = tmp
    if not np.isfinite(score).any():
        return int(vertex_idx)
    return int(cand[int(np.argmax(score))])


def vc_objective(boundary: geom.ClosedBoundary, vertex_idx: int, center,
                 neg_factor: float = 5.0) -> float:
    """Evaluate the vc-vertex objective for one candidate."""
    kappa = scaled_curvature(boundary.curvatures, neg_factor)
    link = np.asarray(center, float) - boundary.vertices[vertex_idx]
    dist = float(np.linalg.norm(link))
    if dist < 1e-9:
        return -np.inf
    return (float(boundary.normals[vertex_idx] @ (link / dist))
            + float(kappa[vertex_idx])) / dist


def medial_lattice(tri_pts: np.ndarray) -> np.ndarray:
    """Integer pixel positions strictly inside the medial triangle."""
    mids = np.array([0.5 * (tri_pts[k] + tri_pts[(k + 1) % 3])
                     for k in range(3)])
    if geom.signed_area(mids) < 0.0:
        mids = mids[::-1]
    x0, y0 = np.floor(mids.min(axis=0)).astype(int)
    x1, y1 = np.ceil(mids.max(axis=0)).astype(int)
    xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
    pts = np.column_stack([xs.ravel(), ys.ravel()]).astype(float)
    inside = np.ones(len(pts), dtype=bool)
    for k in range(3):
        a, b = mids[k], mids[(k + 1) % 3]
        inside &= geom._orient(a, b, pts) > 1e-9
    return pts[inside]


def optimize_vc_center(tri_pts, current_center, cut_vertices, cut_normals,
                       shared_midpoints) -> np.ndarray:
    """Relocate a triangle's added vertex inside the medial triangle.

    Maximizes the summed direction agreement of the attached cuts divided
    by total cut length plus distance to the shared-edge midpoints. The
    candidate set is the integer lattice inside the medial triangle plus
    the current center, so the move never loses to staying put.
    """
    current = np.asarray(current_center, dtype=float)
    cut_vertices = np.asarray(cut_vertices, dtype=float).reshape(-1, 2)
    cut_normals = np.asarray(cut_normals, dtype=float).reshape(-1, 2)
    if len(cut_vertices) == 0:
        return current.copy()
    lattice = medial_lattice(np.asarray(tri_pts, dtype=float))
    cands = (np.vstack([lattice, current[None, :]])
             if len(lattice) else current[None, :])
    link = cands[:, None, :] - cut_vertices[None, :, :]
    dist = np.linalg.norm(link, axis=2)
    unit = link / np.maximum(dist, 1e-12)[..., None]
    num = np.einsum("cak,ak->ca", unit, cut_normals).sum(axis=1)
    den = dist.sum(axis=1)
    for mid in shared_midpoints:
        den = den + np.linalg.norm(cands - np.asarray(mid, float), axis=1)
    score = num / np.maximum(den, 1e-12)
    return cands[int(np.argmax(score))].copy()
