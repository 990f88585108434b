"""Assign boundary vertices to seed points.

Each (vertex, seed) pair gets the score ``(l_hat . n_hat) / |l|`` where
``l`` points from the vertex to the seed and ``n_hat`` is the inward
boundary normal. Pairs are invalid when the direction agreement falls
below ``theta_min``, the distance exceeds ``r_max``, or the assignment
segment crosses the boundary. Vertices then take their best valid seed,
and mutually crossing assignment segments are pruned by an iterated
relative-score rule until the surviving set is crossing-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geom
from .errors import EmptySeeds

#: Marker for vertices that end up without a seed.
UNASSIGNED = -1


@dataclass(frozen=True)
class AssignParams:
    """Thresholds for candidate assignments.

    ``r_max`` is the maximum assignment distance in pixels; ``theta_min``
    the minimum dot product between the inward normal and the assignment
    direction.
    """

    r_max: float = 35.0
    theta_min: float = 0.5

    def __post_init__(self):
        if self.r_max <= 0.0:
            raise ValueError("r_max must be positive")
        if not -1.0 <= self.theta_min <= 1.0:
            raise ValueError("theta_min must lie in [-1, 1]")


@dataclass
class AssignmentScores:
    """Score matrix over (vertex, seed) pairs plus validity flags."""

    scores: np.ndarray
    valid: np.ndarray


@dataclass
class Assignment:
    """Per-vertex assignment outcome.

    ``center[i]`` is the seed index or :data:`UNASSIGNED`; ``score[i]``
    and ``vector[i]`` hold the winning score and displacement (zero for
    unassigned vertices).
    """

    center: np.ndarray
    score: np.ndarray
    vector: np.ndarray


def score_matrix(boundary: geom.ClosedBoundary, seeds,
                 params: AssignParams = AssignParams()) -> AssignmentScores:
    """Score every (vertex, seed) pair and flag invalid candidates.

    Candidates whose segment properly crosses the boundary are invalidated
    here, once, so the pruning loop never needs to re-test them.

    Raises
    ------
    EmptySeeds
        If no seeds are given.
    """
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    if seeds.size == 0:
        raise EmptySeeds("need at least one seed point")
    verts = boundary.vertices
    normals = boundary.normals
    disp = seeds[None, :, :] - verts[:, None, :]
    dist = np.linalg.norm(disp, axis=2)
    safe = np.maximum(dist, 1e-12)
    unit = disp / safe[..., None]
    dot = np.einsum("ijk,ik->ij", unit, normals)
    scores = dot / safe
    valid = (dot >= params.theta_min) & (dist <= params.r_max) & (dist > 1e-9)

    cand = np.argwhere(valid)
    if len(cand):
        crossing = geom.segments_cross_boundary(
            verts, verts[cand[:, 0]], seeds[cand[:, 1]], skip_a=cand[:, 0])
        bad = cand[crossing]
        valid[bad[:, 0], bad[:, 1]] = False
    return AssignmentScores(scores=scores, valid=valid)


def assign_vertices(scores: AssignmentScores, boundary: geom.ClosedBoundary,
                    seeds) -> Assignment:
    """Resolve assignments by best score plus crossing removal.

    Repeats three steps until stable: (1) every vertex takes its best
    valid seed; (2) while any two assignment segments properly cross, the
    segment with the smallest relative score ``sum_k s_i / s_k`` over its
    crossing partners is removed (ties go to the lower vertex index);
    (3) removed pairs are marked invalid and the loop restarts. Each outer
    round permanently invalidates at least one matrix entry, so the loop
    terminates. Vertices may end up unassigned.
    """
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    scr = scores.scores
    valid = scores.valid.copy()
    n, m = scr.shape
    verts = boundary.vertices

    best = np.full(n, UNASSIGNED, dtype=int)
    has = np.zeros(n, dtype=bool)
    for _ in range(n * m + 1):
        masked = np.where(valid, scr, -np.inf)
        best = np.argmax(masked, axis=1)
        has = valid.any(axis=1)
        assigned = np.nonzero(has)[0]
        if len(assigned) < 2:
            break
        seg_start = verts[assigned]
        seg_end = seeds[best[assigned]]
        inter = geom.proper_intersection_matrix(seg_start, seg_end)
        np.fill_diagonal(inter, False)
        if not inter.any():
            break
        svals = masked[assigned, best[assigned]]
        adj = [set(np.nonzero(row)[0]) for row in inter]
        alive = np.ones(len(assigned), dtype=bool)
        removed = []
        while True:
            cands = [i for i in range(len(assigned)) if alive[i] and adj[i]]
            if not cands:
                break
            frak = {i: svals[i] * float(np.sum(1.0 / svals[sorted(adj[i])]))
                    for i in cands}
            victim = min(cands, key=lambda i: (frak[i], assigned[i]))
            alive[victim] = False
            removed.append(victim)
            for j in adj[victim]:
                adj[j].discard(victim)
            adj[victim] = set()
        for i in removed:
            valid[assigned[i], best[assigned[i]]] = False
    else:
        raise RuntimeError("assignment loop failed to terminate")

    center = np.where(has, best, UNASSIGNED)
    score = np.where(has, scr[np.arange(n), best], 0.0)
    vector = np.zeros((n, 2))
    idx = np.nonzero(has)[0]
    vector[idx] = seeds[best[idx]] - verts[idx]
    return Assignment(center=center, score=score, vector=vector)
