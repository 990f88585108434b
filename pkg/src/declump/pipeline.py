"""End-to-end partitioning of one clump and rasterization of the result."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage

from . import assign, geom, imaging, select, vccut, vvcut
from .errors import DuplicateSeed, EmptySeeds, SeedOutsideBoundary

#: Seedless regions whose inscribed radius stays below this are treated as
#: cut debris (slivers pinched between near-parallel surviving cuts) and
#: merged away. Wide seedless regions are legitimate output: a lobe whose
#: seed was never supplied must survive. The bound matches the cut
#: optimization neighborhood, the scale of cut-placement wobble.
DEBRIS_DEPTH = 7.0


@dataclass(frozen=True)
class Config:
    """Tunable parameters of the partitioning pipeline.

    Distances are in pixels, angles in degrees. ``iou_threshold`` only
    affects evaluation against ground truth, not partitioning itself.
    """

    r_max: float = 35.0
    theta_min: float = 0.5
    angle_min_deg: float = 20.0
    angle_max_deg: float = 110.0
    neighborhood_radius: float = 7.0
    negative_curvature_factor: float = 5.0
    blur_sigma: float = 1.0
    closing_radius: float = 3.0
    curvature_window: float = 5.0
    curvature_smooth_sigma: float = 2.0
    iou_threshold: float = 0.7

    def __post_init__(self):
        positive = ("r_max", "neighborhood_radius", "negative_curvature_factor",
                    "blur_sigma", "closing_radius", "curvature_window",
                    "curvature_smooth_sigma", "iou_threshold")
        for name in positive:
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not -1.0 <= self.theta_min <= 1.0:
            raise ValueError("theta_min must lie in [-1, 1]")
        if not 0.0 < self.angle_min_deg < self.angle_max_deg < 180.0:
            raise ValueError("need 0 < angle_min_deg < angle_max_deg < 180")

    def assign_params(self) -> assign.AssignParams:
        return assign.AssignParams(r_max=self.r_max, theta_min=self.theta_min)

    def angle_params(self) -> vccut.AngleFilterParams:
        return vccut.AngleFilterParams(angle_min_deg=self.angle_min_deg,
                                       angle_max_deg=self.angle_max_deg)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PartitionResult:
    """Everything produced by partitioning one clump."""

    cuts: list
    added_vertices: np.ndarray
    region_map: np.ndarray
    seed_labels: np.ndarray
    region_count: int
    votes: list
    diagnostics: dict = field(default_factory=dict)


def partition_clump(boundary: geom.ClosedBoundary, seeds,
                    image: imaging.ScalarField | None = None,
                    config: Config = Config(),
                    shape=None) -> PartitionResult:
    """Partition one closed boundary into one region per seed point.

    Runs assignment, vertex-vertex cut creation and optimization, then
    (for three or more seeds) triangulation, vertex-center cuts, and the
    vote between competing cut sets, and finally rasterizes the surviving
    cuts into a labeled region map. Deterministic for fixed inputs.

    Parameters
    ----------
    boundary : ClosedBoundary
        Prepared boundary (see :func:`declump.geom.prepare_boundary`).
    seeds : array-like, shape (m, 2)
        Seed positions, strictly inside the boundary.
    image : ScalarField, optional
        Intensity raster; enables the gradient and inverted-image vote
        categories.
    config : Config
        Pipeline parameters.
    shape : tuple, optional
        (height, width) of the output label raster; derived from the
        boundary when omitted.
    """
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    if seeds.size == 0:
        raise EmptySeeds("need at least one seed point")
    keys = set(map(tuple, seeds))
    if len(keys) != len(seeds):
        raise DuplicateSeed("seed positions must be distinct")
    inside = geom.points_in_polygon(seeds, boundary.vertices)
    if not inside.all():
        bad = int(np.nonzero(~inside)[0][0])
        raise SeedOutsideBoundary(f"seed {bad} lies outside the boundary")

    diagnostics = {"dropped_pieces": 0, "degenerate_groups": [],
                   "dropped_cuts": 0, "merged_regions": 0,
                   "clipped_samples": False}

    scores = assign.score_matrix(boundary, seeds, config.assign_params())
    assignment = assign.assign_vertices(scores, boundary, seeds)

    pieces = vvcut.collect_pieces(assignment, boundary)
    ordered = {}
    for center_id in sorted(pieces):
        chain = vvcut.order_pieces(pieces[center_id], seeds[center_id],
                                   boundary, config.r_max)
        diagnostics["dropped_pieces"] += len(pieces[center_id]) - len(chain)
        ordered[center_id] = chain

    vv_cuts = vvcut.create_vv_cuts(ordered, boundary)
    vv_cuts = [vvcut.optimize_vv_cut(c, boundary, config.neighborhood_radius,
                                     config.negative_curvature_factor)
               for c in vv_cuts]
    vv_cuts = vvcut.dedup_cuts(vv_cuts)
    vv_cuts = _drop_boundary_crossers(vv_cuts, boundary, diagnostics)

    groups = []
    votes = []
    if len(seeds) >= 3:
        tri_set = geom.delaunay(seeds)
        tri_set = vccut.filter_triangles(tri_set, boundary,
                                         config.angle_params())
        groups = vccut.group_triangles(tri_set)
        for group in groups:
            vccut.create_vc_cuts(group, boundary)
            group.vc_anchors = [
                (vccut.optimize_vc_vertex(idx, group.centers[tid], boundary,
                                          config.neighborhood_radius,
                                          config.negative_curvature_factor),
                 tid)
                for idx, tid in group.vc_anchors]
            for tid in sorted(group.triangles):
                attached = [idx for idx, t in group.vc_anchors if t == tid]
                group.centers[tid] = vccut.optimize_vc_center(
                    group.triangle_points(tid), group.centers[tid],
                    boundary.vertices[attached], boundary.normals[attached],
                    group.shared_midpoints(tid))
            if group.degenerate:
                diagnostics["degenerate_groups"].append(group.gid)

    if groups:
        pairs, unpaired_vv, unpaired_groups = select.find_competing_pairs(
            vv_cuts, groups, boundary)
        grad_field = inv_field = None
        if image is not None:
            grad_field = imaging.gradient_magnitude(
                image, config.blur_sigma, config.closing_radius)
            inv_field = imaging.inverted_image(image, config.blur_sigma)
        final = list(unpaired_vv)
        for pair in pairs:
            trace = select.vote(pair, boundary, grad_field, inv_field)
            votes.append(trace)
            final.extend(pair.vv_cuts if trace.winner == "vv"
                         else pair.vc_cuts)
        for group in unpaired_groups:
            final.extend(vccut.group_cuts(group, boundary))
    else:
        final = list(vv_cuts)

    final = _dedup_identity(final)
    final = _drop_boundary_crossers(final, boundary, diagnostics)
    final = _enforce_non_crossing(final, diagnostics)
    diagnostics["clipped_samples"] = any(t.clipped_samples for t in votes)

    added = _surviving_centers(final, groups)
    region_map, seed_labels, label_info = apply_cuts_to_mask(
        boundary, final, shape=shape, seeds=seeds)
    diagnostics.update(label_info)
    return PartitionResult(
        cuts=final,
        added_vertices=added,
        region_map=region_map,
        seed_labels=seed_labels,
        region_count=int(region_map.max()),
        votes=votes,
        diagnostics=diagnostics,
    )


def _drop_boundary_crossers(cuts, boundary, diagnostics):
    kept = []
    for cut in cuts:
        skip = [i for i in (cut.idx_p, cut.idx_q) if i is not None]
        if geom.segment_intersects_boundary(boundary.vertices, cut.p, cut.q,
                                            skip=skip):
            diagnostics["dropped_cuts"] += 1
        else:
            kept.append(cut)
    return kept


def _dedup_identity(cuts):
    seen = set()
    out = []
    for cut in cuts:
        if id(cut) in seen:
            continue
        seen.add(id(cut))
        out.append(cut)
    return out


def _enforce_non_crossing(cuts, diagnostics):
    """Keep-first filter guaranteeing a pairwise non-crossing final set."""
    kept = []
    for cut in cuts:
        if any(geom.segments_properly_intersect(cut.p, cut.q, k.p, k.q)
               for k in kept):
            diagnostics["dropped_cuts"] += 1
            continue
        kept.append(cut)
    return kept


def _surviving_centers(cuts, groups):
    by_gid = {g.gid: g for g in groups}
    keys = set()
    for cut in cuts:
        if cut.kind == "vc":
            keys.add((cut.owner, cut.tri_q))
        elif cut.kind == "cc":
            keys.add((cut.owner, cut.tri_p))
            keys.add((cut.owner, cut.tri_q))
    centers = [by_gid[gid].centers[tid] for gid, tid in sorted(keys)]
    return np.array(centers) if centers else np.zeros((0, 2))


# --------------------------------------------------------------------------
# rasterization


def apply_cuts_to_mask(boundary: geom.ClosedBoundary, cuts, shape=None,
                       seeds=None):
    """Rasterize the boundary interior and split it along the cuts.

    Cuts are burned as 4-connected separator lines (extended a little past
    their boundary anchors so they seal against the region edge), the
    remainder is labeled with 4-connectivity, and separator pixels are
    re-assigned to the nearest region (ties to the lower label). Regions
    containing no seed are merged into the neighbor sharing the longest
    border. Region areas always sum exactly to the interior pixel count.

    Returns ``(labels, seed_labels, info)`` where ``labels`` is int32 with
    0 as background, ``seed_labels`` gives the region label per seed (None
    when no seeds are passed), and ``info`` carries merge diagnostics.
    """
    verts = boundary.vertices
    if np.any(verts < -0.5):
        raise ValueError("rasterization requires non-negative coordinates")
    if shape is None:
        shape = (int(np.ceil(verts[:, 1].max())) + 3,
                 int(np.ceil(verts[:, 0].max())) + 3)
    h, w = shape
    interior = geom.rasterize_region(verts, shape)

    separator = np.zeros(shape, dtype=bool)
    for cut in cuts:
        p, q = np.asarray(cut.p, float), np.asarray(cut.q, float)
        delta = q - p
        norm = float(np.linalg.norm(delta))
        if norm < 1e-9:
            continue
        unit = delta / norm
        p_ext = p - 2.0 * unit if cut.idx_p is not None else p
        q_ext = q + 2.0 * unit if cut.idx_q is not None else q
        cells = geom.supercover_line(p_ext, q_ext)
        keep = ((cells[:, 0] >= 0) & (cells[:, 0] < w)
                & (cells[:, 1] >= 0) & (cells[:, 1] < h))
        separator[cells[keep, 1], cells[keep, 0]] = True
    separator &= interior

    labels, count = ndimage.label(interior & ~separator)
    if count == 0:
        labels = interior.astype(np.int32)
        count = 1 if interior.any() else 0
    elif separator.any():
        dists = np.stack([ndimage.distance_transform_edt(labels != k)
                          for k in range(1, count + 1)])
        nearest = np.argmin(dists, axis=0).astype(np.int32) + 1
        labels = np.where(separator, nearest, labels)

    info = {"merged_regions": 0}
    seed_labels = None
    if seeds is not None and len(seeds):
        seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
        merged = _merge_seedless(labels, seeds)
        info["merged_regions"] = merged
    labels = _relabel_consecutive(labels)
    if seeds is not None and len(seeds):
        seed_labels = _labels_at(labels, seeds)
    return labels.astype(np.int32), seed_labels, info


def _labels_at(labels, points):
    h, w = labels.shape
    px = np.clip(np.round(points[:, 0]).astype(int), 0, w - 1)
    py = np.clip(np.round(points[:, 1]).astype(int), 0, h - 1)
    out = labels[py, px]
    if (out == 0).any():
        # snap stray points (rounded onto background) to the nearest region
        _, (iy, ix) = ndimage.distance_transform_edt(labels == 0,
                                                     return_indices=True)
        for k in np.nonzero(out == 0)[0]:
            out[k] = labels[iy[py[k], px[k]], ix[py[k], px[k]]]
    return out.astype(int)


def _merge_seedless(labels, seeds) -> int:
    """Merge seedless debris regions into their longest-border neighbor.

    Only thin regions (inscribed radius below :data:`DEBRIS_DEPTH`) are
    merged; a wide seedless region is a real partition whose seed may
    simply be missing from the input.
    """
    merged = 0
    for _ in range(int(labels.max()) + 1):
        seeded = set(_labels_at(labels, seeds).tolist())
        present = [int(v) for v in np.unique(labels) if v > 0]
        empty = [v for v in present
                 if v not in seeded
                 and ndimage.distance_transform_edt(labels == v).max()
                 < DEBRIS_DEPTH]
        if not empty or len(present) < 2:
            break
        victim = empty[0]
        counts = _border_counts(labels, victim)
        if not counts:
            target = next(v for v in present if v != victim)
        else:
            target = max(sorted(counts), key=lambda m: (counts[m], -m))
        labels[labels == victim] = target
        merged += 1
    return merged


def _border_counts(labels, victim) -> dict:
    mask = labels == victim
    counts: dict = {}
    for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        shifted = np.roll(labels, (dy, dx), axis=(0, 1))
        if dy == 1:
            shifted[0, :] = 0
        elif dy == -1:
            shifted[-1, :] = 0
        if dx == 1:
            shifted[:, 0] = 0
        elif dx == -1:
            shifted[:, -1] = 0
        touching = shifted[mask]
        for val in np.unique(touching):
            val = int(val)
            if val > 0 and val != victim:
                counts[val] = counts.get(val, 0) + int((touching == val).sum())
    return counts


def _relabel_consecutive(labels):
    present = [int(v) for v in np.unique(labels) if v > 0]
    out = np.zeros_like(labels, dtype=np.int32)
    for new, old in enumerate(present, start=1):
        out[labels == old] = new
    return out
