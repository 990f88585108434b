"""Choose between competing vertex-vertex and vertex-center cut sets.

Wherever a triangle group's cuts contest the same territory as some
vertex-vertex cuts, both sets are scored in up to four categories
(direction, curvature, image-gradient overlap, inverted-image overlap)
and a vote picks the winner. Scores are normalized per category by the
mean of the two competitors; a set winning a strict majority of the
categories takes the pair, otherwise the larger cumulative normalized
score decides, and an exact tie goes to the vertex-vertex set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geom, imaging, vccut

CATEGORIES = ("direction", "curvature", "gradient", "inverted")

#: Endpoint vertices of two vv cuts closer than this share one curvature
#: sample in the curvature category.
CURVATURE_DEDUP_DIST = 1.0


@dataclass
class VoteTrace:
    """Record of one vote, kept for diagnostics and output documents."""

    raw_vv: dict
    raw_vc: dict
    norm_vv: dict = field(default_factory=dict)
    norm_vc: dict = field(default_factory=dict)
    wins_vv: int = 0
    wins_vc: int = 0
    cumulative_vv: float = 0.0
    cumulative_vc: float = 0.0
    skipped: list = field(default_factory=list)
    winner: str = "vv"
    clipped_samples: bool = False


@dataclass
class CompetingPair:
    """One triangle group and the vertex-vertex cuts contesting it."""

    group: vccut.TriangleGroup
    vv_cuts: list
    vc_cuts: list
    trace: VoteTrace | None = None


def _triangle_contains(tri_pts: np.ndarray, point) -> bool:
    pts = tri_pts
    if geom.signed_area(pts) < 0.0:
        pts = pts[::-1]
    p = np.asarray(point, dtype=float)
    for k in range(3):
        if geom._orient(pts[k], pts[(k + 1) % 3], p) <= 0.0:
            return False
    return True


def _segment_hits_triangle(p, q, tri_pts) -> bool:
    for k in range(3):
        if geom.segments_properly_intersect(p, q, tri_pts[k],
                                            tri_pts[(k + 1) % 3]):
            return True
    return _triangle_contains(tri_pts, p) or _triangle_contains(tri_pts, q)


def find_competing_pairs(vv_cuts, groups, boundary):
    """Associate vertex-vertex cuts with the triangle groups they contest.

    A vv cut joins a group's pair iff it properly intersects any cut of
    the group or overlaps any of its triangles. Returns
    ``(pairs, unpaired_vv, unpaired_groups)``; unmatched cuts and groups
    bypass voting and are kept as they are.
    """
    pairs = []
    matched = set()
    paired_groups = set()
    for group in groups:
        gcuts = vccut.group_cuts(group, boundary)
        if not gcuts:
            continue
        tri_pts = [group.triangle_points(tid)
                   for tid in sorted(group.triangles)]
        mine = []
        for cut in vv_cuts:
            competes = any(
                geom.segments_properly_intersect(cut.p, cut.q, gc.p, gc.q)
                for gc in gcuts)
            competes = competes or any(
                _segment_hits_triangle(cut.p, cut.q, pts) for pts in tri_pts)
            if competes:
                mine.append(cut)
                matched.add(id(cut))
        if mine:
            pairs.append(CompetingPair(group=group, vv_cuts=mine,
                                       vc_cuts=gcuts))
            paired_groups.add(group.gid)
    unpaired_vv = [c for c in vv_cuts if id(c) not in matched]
    unpaired_groups = [g for g in groups if g.gid not in paired_groups]
    return pairs, unpaired_vv, unpaired_groups


# --------------------------------------------------------------------------
# category scores


def _incidences(cuts):
    """(vertex index, direction) pairs where cuts meet the boundary."""
    out = []
    for cut in cuts:
        if cut.kind == "vv":
            out.append((cut.idx_p, cut.q - cut.p))
            out.append((cut.idx_q, cut.p - cut.q))
        elif cut.kind == "vc":
            out.append((cut.idx_p, cut.q - cut.p))
    return out

def score_direction(cuts, boundary) -> float:
    """Mean normal/cut-direction agreement over boundary incidences."""
    vals = []
    for idx, direction in _incidences(cuts):
        norm = float(np.linalg.norm(direction))
        if norm < 1e-12:
            continue
        vals.append(float(boundary.normals[idx] @ (direction / norm)))
    return float(np.mean(vals)) if vals else 0.0


def score_curvature(cuts, boundary,
                    dedup_dist: float = CURVATURE_DEDUP_DIST) -> float:
    """Mean boundary curvature at the set's cut vertices.

    When endpoint vertices of two vertex-vertex cuts sit within
    ``dedup_dist`` of each other, only the first-listed vertex counts.
    """
    vals = []
    kept_vv = []
    for cut in cuts:
        entries = []
        if cut.kind == "vv":
            entries = [(cut.idx_p, True), (cut.idx_q, True)]
        elif cut.kind == "vc":
            entries = [(cut.idx_p, False)]
        for idx, is_vv in entries:
            pos = boundary.vertices[idx]
            if is_vv:
                if any(float(np.linalg.norm(pos - kp)) <= dedup_dist
                       for kp in kept_vv):
                    continue
                kept_vv.append(pos)
            vals.append(float(boundary.curvatures[idx]))
    return float(np.mean(vals)) if vals else 0.0


def _pooled_field_score(cuts, fld: imaging.ScalarField):
    samples = []
    clipped = False
    for cut in cuts:
        vals, out_of_bounds = imaging.segment_samples(fld, cut.p, cut.q)
        clipped = clipped or out_of_bounds
        samples.append(vals)
    if not samples:
        return 0.0, clipped
    return float(np.concatenate(samples).mean()), clipped


def score_gradient(cuts, gradient_field: imaging.ScalarField) -> float:
    """Pooled mean gradient magnitude sampled along the set's cuts."""
    return _pooled_field_score(cuts, gradient_field)[0]


def score_inverted(cuts, inverted_field: imaging.ScalarField) -> float:
    """Pooled mean inverted intensity sampled along the set's cuts."""
    return _pooled_field_score(cuts, inverted_field)[0]


# --------------------------------------------------------------------------
# the vote


def vote_from_scores(raw_vv: dict, raw_vc: dict) -> VoteTrace:
    """Run the vote given per-category raw scores for both sets.

    Categories where both raw scores are zero are skipped and shrink the
    majority threshold accordingly. A category whose competitor mean is
    zero but whose scores differ is decided on raw values and contributes
    nothing to the cumulative comparison.
    """
    trace = VoteTrace(raw_vv=dict(raw_vv), raw_vc=dict(raw_vc))
    counted = 0
    for cat in CATEGORIES:
        if cat not in raw_vv:
            continue
        a, b = float(raw_vv[cat]), float(raw_vc[cat])
        mean = 0.5 * (a + b)
        if a == 0.0 and b == 0.0:
            trace.skipped.append(cat)
            continue
        counted += 1
        if mean == 0.0:
            if a > b:
                trace.wins_vv += 1
            elif b > a:
                trace.wins_vc += 1
            continue
        na, nb = a / mean, b / mean
        trace.norm_vv[cat] = na
        trace.norm_vc[cat] = nb
        trace.cumulative_vv += na
        trace.cumulative_vc += nb
        if na > nb:
            trace.wins_vv += 1
        elif nb > na:
            trace.wins_vc += 1
    majority = math.ceil((counted + 1) / 2) if counted else 1
    if trace.wins_vv >= majority:
        trace.winner = "vv"
    elif trace.wins_vc >= majority:
        trace.winner = "vc"
    elif trace.cumulative_vc > trace.cumulative_vv:
        trace.winner = "vc"
    else:
        trace.winner = "vv"
    return trace


def vote(pair: CompetingPair, boundary, gradient_field=None,
         inverted_field=None) -> VoteTrace:
    """Score both sets of a competing pair and decide the winner.

    Without image fields only the direction and curvature categories
    vote. The trace is stored on the pair and returned.
    """
    raw_vv = {
        "direction": score_direction(pair.vv_cuts, boundary),
        "curvature": score_curvature(pair.vv_cuts, boundary),
    }
    raw_vc = {
        "direction": score_direction(pair.vc_cuts, boundary),
        "curvature": score_curvature(pair.vc_cuts, boundary),
    }
    clipped = False
    if gradient_field is not None and inverted_field is not None:
        for cuts, raw in ((pair.vv_cuts, raw_vv), (pair.vc_cuts, raw_vc)):
            raw["gradient"], flagged = _pooled_field_score(cuts,
                                                           gradient_field)
            clipped = clipped or flagged
            raw["inverted"], flagged = _pooled_field_score(cuts,
                                                           inverted_field)
            clipped = clipped or flagged
    pair.trace = vote_from_scores(raw_vv, raw_vc)
    pair.trace.clipped_samples = clipped
    return pair.trace
