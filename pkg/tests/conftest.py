import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from declump import geom, imaging


def disk_mask(radius=20, margin=6):
    size = 2 * (radius + margin) + 1
    c = radius + margin
    yy, xx = np.mgrid[0:size, 0:size]
    return ((xx - c) ** 2 + (yy - c) ** 2 <= radius ** 2).astype(np.uint8)


def two_disk_mask(radius=20, distance=30, margin=6):
    """Horizontal dumbbell; returns (mask, seeds)."""
    cy = radius + margin
    cx1 = radius + margin
    cx2 = cx1 + distance
    h = 2 * (radius + margin) + 1
    w = cx2 + radius + margin + 1
    yy, xx = np.mgrid[0:h, 0:w]
    mask = (((xx - cx1) ** 2 + (yy - cy) ** 2 <= radius ** 2)
            | ((xx - cx2) ** 2 + (yy - cy) ** 2 <= radius ** 2))
    seeds = np.array([[cx1, cy], [cx2, cy]], dtype=float)
    return mask.astype(np.uint8), seeds


def three_disk_mask(radius=20, side=37, margin=6):
    """Equilateral triple with a central gap; (mask, seeds, image)."""
    half = side / 2.0
    apo = side / (2.0 * np.sqrt(3.0))
    circ = side / np.sqrt(3.0)
    cx = half + radius + margin
    cy = circ + radius + margin
    centers = np.array([
        [cx - half, cy + apo],
        [cx + half, cy + apo],
        [cx, cy - circ],
    ])
    w = int(np.ceil(cx + half + radius + margin))
    h = int(np.ceil(cy + apo + radius + margin))
    yy, xx = np.mgrid[0:h, 0:w]
    mask = np.zeros((h, w), bool)
    image = np.full((h, w), 0.08)
    for c in centers:
        q = ((xx - c[0]) ** 2 + (yy - c[1]) ** 2) / radius ** 2
        mask |= q <= 1.0
        image = np.maximum(image, np.where(q <= 1.0,
                                           0.3 + 0.65 * (1.0 - q), 0.0))
    image = np.clip(image, imaging.INTENSITY_FLOOR, 1.0)
    return mask.astype(np.uint8), centers, image


def star_boundary(rng, n_points=220, base_radius=32.0):
    """Random smooth star-shaped boundary (centered at positive coords)."""
    amps = rng.uniform(0.02, 0.12, size=4)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=4)
    t = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    r = base_radius * (1.0 + sum(a * np.cos((k + 2) * t + p)
                                 for k, (a, p) in enumerate(zip(amps, phases))))
    shift = base_radius * 1.6
    pts = np.column_stack([shift + r * np.cos(t), shift + r * np.sin(t)])
    return geom.prepare_boundary(pts)


def analytic_circle_boundary(radius=20.0, n=126, center=(30.0, 30.0)):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.column_stack([center[0] + radius * np.cos(t),
                           center[1] + radius * np.sin(t)])
    return geom.prepare_boundary(pts)


def symmetric_triple_boundary(radius=20.0, side=34.0, origin=(60.0, 60.0)):
    """Union contour of three circles with exact 3-fold symmetry.

    Built by rotating one sampled arc, bypassing resampling so the
    discretization itself is symmetric. Returns (ClosedBoundary, centers).
    """
    origin = np.asarray(origin, float)
    circum = side / np.sqrt(3.0)
    angles = np.pi / 2 + np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    centers = origin + circum * np.column_stack([np.cos(angles),
                                                 np.sin(angles)])

    def outer_intersection(i, j):
        mid = 0.5 * (centers[i] + centers[j])
        h = np.sqrt(radius ** 2 - (side / 2.0) ** 2)
        u = mid - origin
        u = u / np.linalg.norm(u)
        return mid + h * u

    # arc of circle 0 runs CCW from its crossing with circle 1 to its
    # crossing with circle 2, where circle 2's own arc continues
    a = outer_intersection(0, 1)
    b = outer_intersection(0, 2)
    ang_a = np.arctan2(*(a - centers[0])[::-1])
    ang_b = np.arctan2(*(b - centers[0])[::-1])
    out_ang = np.arctan2(*(centers[0] - origin)[::-1])
    delta = (ang_b - ang_a) % (2.0 * np.pi)
    if (out_ang - ang_a) % (2.0 * np.pi) >= delta:
        delta -= 2.0 * np.pi  # sweep the other way, through the outside
    m = max(8, int(round(radius * abs(delta))))
    span = ang_a + delta * np.arange(m) / m
    arc0 = centers[0] + radius * np.column_stack([np.cos(span),
                                                  np.sin(span)])
    rot = -2.0 * np.pi / 3.0  # 0 -> 2 -> 1 matches the arc endpoints
    mat = np.array([[np.cos(rot), -np.sin(rot)],
                    [np.sin(rot), np.cos(rot)]])
    arc1 = (arc0 - origin) @ mat.T + origin
    arc2 = (arc1 - origin) @ mat.T + origin
    verts = np.vstack([arc0, arc1, arc2])
    if geom.signed_area(verts) < 0:
        verts = verts[::-1].copy()
    normals = geom.compute_normals(verts)
    curv = geom.compute_curvature(verts)
    seg = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    boundary = geom.ClosedBoundary(vertices=verts, normals=normals,
                                   curvatures=curv, arc=arc)
    return boundary, centers


@pytest.fixture(scope="session")
def dumbbell():
    mask, seeds = two_disk_mask()
    return mask, geom.boundary_from_mask(mask, 1), seeds


@pytest.fixture(scope="session")
def three_disk():
    mask, seeds, image = three_disk_mask()
    return mask, geom.boundary_from_mask(mask, 1), seeds, image


@pytest.fixture(scope="session")
def disk_boundary():
    mask = disk_mask()
    return mask, geom.boundary_from_mask(mask, 1)
