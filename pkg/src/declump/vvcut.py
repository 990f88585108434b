"""Vertex-vertex cuts: piece collection, piece ordering, gap cuts, and
local cut optimization.

Vertices assigned to the same seed are grouped into contiguous boundary
pieces; the pieces of one seed are chained into a well-oriented cycle and
a cut is emitted wherever consecutive vertices of the chained sequence sit
more than one contour step apart. Each cut is then refined over small arc
neighborhoods of its endpoints, trading cut length against direction
agreement and boundary concavity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import geom
from .assign import UNASSIGNED, Assignment


@dataclass
class Piece:
    """Maximal cyclic run of boundary vertices sharing one seed."""

    center: int
    indices: np.ndarray

    @property
    def start(self) -> int:
        return int(self.indices[0])

    @property
    def end(self) -> int:
        return int(self.indices[-1])


@dataclass
class Cut:
    """A candidate partition segment.

    ``kind`` is ``"vv"`` (two boundary vertices), ``"vc"`` (boundary
    vertex to an added interior vertex), or ``"cc"`` (two added interior
    vertices of edge-sharing triangles). ``idx_p``/``idx_q`` carry
    boundary indices where the endpoint lies on the boundary. ``owner``
    is the seed index for vv cuts and the triangle-group id otherwise;
    ``tri_p``/``tri_q`` name the triangles whose centers anchor vc/cc
    endpoints.
    """

    kind: str
    p: np.ndarray
    q: np.ndarray
    idx_p: int | None = None
    idx_q: int | None = None
    owner: int = -1
    tri_p: int | None = None
    tri_q: int | None = None

    def endpoint_key(self):
        """Unordered boundary-index pair, for deduplication of vv cuts."""
        if self.idx_p is None or self.idx_q is None:
            return None
        return (min(self.idx_p, self.idx_q), max(self.idx_p, self.idx_q))


def collect_pieces(assignment: Assignment,
                   boundary: geom.ClosedBoundary) -> dict:
    """Group assigned vertices into pieces, keyed by seed index.

    Unassigned vertices break pieces. Pieces are listed in boundary order
    of their start vertex.
    """
    labels = assignment.center
    n = len(labels)
    out: dict = {}
    changes = np.nonzero(labels != np.roll(labels, 1))[0]
    if len(changes) == 0:
        if n and labels[0] != UNASSIGNED:
            out[int(labels[0])] = [Piece(int(labels[0]), np.arange(n))]
        return out
    starts = np.sort(changes)
    lengths = np.diff(np.concatenate([starts, [starts[0] + n]]))
    for start, length in zip(starts, lengths):
        value = int(labels[start])
        if value == UNASSIGNED:
            continue
        idx = (start + np.arange(length)) % n
        out.setdefault(value, []).append(Piece(value, idx))
    return out


def order_pieces(pieces, center, boundary: geom.ClosedBoundary,
                 r_max: float = 35.0):
    """Chain one seed's pieces into a well-oriented cycle.

    The walk starts at the piece whose nearest vertex is closest to the
    seed, then repeatedly moves to the piece maximizing
    ``(n_end . l_hat - n_start . l_hat) / |l|`` where ``l`` runs from the
    current piece's end vertex to the candidate's start vertex. Candidates
    farther than ``r_max`` are ignored; the walk stops when it would
    revisit a piece, and unvisited pieces are dropped.
    """
    if not pieces:
        return []
    verts = boundary.vertices
    normals = boundary.normals
    center = np.asarray(center, dtype=float)

    nearest = [float(np.linalg.norm(verts[p.indices] - center, axis=1).min())
               for p in pieces]
    order = [int(np.argmin(nearest))]
    visited = {order[0]}
    current = order[0]
    while True:
        v_end = verts[pieces[current].end]
        n_end = normals[pieces[current].end]
        best_idx = None
        best_score = -np.inf
        for k, piece in enumerate(pieces):
            if k == current:
                continue
            link = verts[piece.start] - v_end
            dist = float(np.linalg.norm(link))
            if dist > r_max or dist < 1e-12:
                continue
            link_hat = link / dist
            score = (float(n_end @ link_hat)
                     - float(normals[piece.start] @ link_hat)) / dist
            if score > best_score:
                best_score = score
                best_idx = k
        if best_idx is None or best_idx in visited:
            break
        order.append(best_idx)
        visited.add(best_idx)
        current = best_idx
    return [pieces[k] for k in order]


def create_vv_cuts(ordered_pieces: dict, boundary: geom.ClosedBoundary,
                   gap: float = geom.ADJACENT_GAP):
    """Emit vertex-vertex cuts at gaps in each seed's chained sequence.

    ``ordered_pieces`` maps seed index to its ordered piece list. The
    concatenated vertex sequence is traversed cyclically (the wrap-around
    gap counts), and a cut is created wherever consecutive vertices are
    farther than ``gap`` apart. Identical cuts produced by different seeds
    are deduplicated.
    """
    verts = boundary.vertices
    cuts = []
    seen = set()
    for center in sorted(ordered_pieces):
        pieces = ordered_pieces[center]
        if not pieces:
            continue
        seq = np.concatenate([p.indices for p in pieces])
        nxt = np.roll(seq, -1)
        dist = np.linalg.norm(verts[nxt] - verts[seq], axis=1)
        for i0, i1, d in zip(seq, nxt, dist):
            if d <= gap + 1e-9 or i0 == i1:
                continue
            key = (min(int(i0), int(i1)), max(int(i0), int(i1)))
            if key in seen:
                continue
            seen.add(key)
            cuts.append(Cut("vv", verts[i0].copy(), verts[i1].copy(),
                            idx_p=int(i0), idx_q=int(i1), owner=int(center)))
    return cuts


def scaled_curvature(curvatures: np.ndarray,
                     neg_factor: float = 5.0) -> np.ndarray:
    """Curvature copy with negative (convex) values scaled up as a penalty.

    Used only inside cut objectives; stored curvature is never mutated.
    """
    return np.where(curvatures < 0.0, neg_factor * curvatures, curvatures)


def optimize_vv_cut(cut: Cut, boundary: geom.ClosedBoundary,
                    radius: float = 7.0, neg_factor: float = 5.0) -> Cut:
    """Refine a vertex-vertex cut over arc neighborhoods of its endpoints.

    Maximizes ``(n_i . l_hat - n_j . l_hat + k'_i + k'_j) / |l|`` over
    candidate pairs, where ``l`` runs from i to j and ``k'`` is the
    penalty-scaled curvature. Candidate pairs whose segment properly
    crosses the boundary are infeasible. Returns the input cut unchanged
    when the two neighborhoods coincide (tiny region) or nothing is
    feasible.
    """
    verts = boundary.vertices
    normals = boundary.normals
    kappa = scaled_curvature(boundary.curvatures, neg_factor)
    set1 = geom.indices_within_arc(boundary.arc, cut.idx_p, radius)
    set2 = geom.indices_within_arc(boundary.arc, cut.idx_q, radius)
    if set(set1.tolist()) == set(set2.tolist()):
        return cut

    link = verts[set2][None, :, :] - verts[set1][:, None, :]
    dist = np.linalg.norm(link, axis=2)
    ok = (dist > 1e-9) & (set1[:, None] != set2[None, :])
    unit = link / np.maximum(dist, 1e-12)[..., None]
    num = (np.einsum("abk,ak->ab", unit, normals[set1])
           - np.einsum("abk,bk->ab", unit, normals[set2])
           + kappa[set1][:, None] + kappa[set2][None, :])
    score = np.where(ok, num / np.maximum(dist, 1e-12), -np.inf)

    ii, jj = np.meshgrid(set1, set2, indexing="ij")
    flat_i = ii.ravel()
    flat_j = jj.ravel()
    flat_score = score.ravel()
    finite = np.isfinite(flat_score)
    if finite.any():
        crossing = geom.segments_cross_boundary(
            verts, verts[flat_i[finite]], verts[flat_j[finite]],
            skip_a=flat_i[finite], skip_b=flat_j[finite])
        tmp = flat_score[finite]
        tmp[crossing] = -np.inf
        flat_score = flat_score.copy()
        flat_score[finite] = tmp
    if not np.isfinite(flat_score).any():
        return cut
    k = int(np.argmax(flat_score))
    i, j = int(flat_i[k]), int(flat_j[k])
    return replace(cut, p=verts[i].copy(), q=verts[j].copy(),
                   idx_p=i, idx_q=j)


def vv_objective(boundary: geom.ClosedBoundary, i: int, j: int,
                 neg_factor: float = 5.0) -> float:
    """Evaluate the vv-cut objective for one endpoint pair."""
    verts = boundary.vertices
    kappa = scaled_curvature(boundary.curvatures, neg_factor)
    link = verts[j] - verts[i]
    dist = float(np.linalg.norm(link))
    if dist < 1e-9:
        return -np.inf
    unit = link / dist
    return (float(boundary.normals[i] @ unit)
            - float(boundary.normals[j] @ unit)
            + float(kappa[i]) + float(kappa[j])) / dist


def dedup_cuts(cuts):
    """Drop later cuts sharing an unordered boundary-index endpoint pair."""
    seen = set()
    out = []
    for cut in cuts:
        key = cut.endpoint_key()
        if key is not None:
            if key in seen:
                continue
            seen.add(key)
        out.append(cut)
    return out
