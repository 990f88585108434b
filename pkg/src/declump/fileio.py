"""File formats: portable graymaps, YAML case documents, the JSON cuts
document, and the SVG overlay. All writers are byte-stable for identical
inputs."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np
import yaml

from .imaging import ScalarField, intensity_field
from .pipeline import Config, PartitionResult


# --------------------------------------------------------------------------
# portable graymaps


def read_pgm(path) -> np.ndarray:
    """Read a P2/P5 portable graymap as uint8 or uint16 (big-endian)."""
    data = Path(path).read_bytes()
    magic, fields, offset = _pgm_header(data)
    width, height, maxval = fields
    if magic == b"P2":
        values = np.array(data[offset:].split(), dtype=int)
        if len(values) < width * height:
            raise ValueError(f"{path}: truncated P2 data")
        arr = values[:width * height].reshape(height, width)
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        count = width * height
        raw = data[offset:offset + count * dtype.itemsize]
        if len(raw) < count * dtype.itemsize:
            raise ValueError(f"{path}: truncated P5 data")
        arr = np.frombuffer(raw, dtype=dtype).reshape(height, width)
    return arr.astype(np.uint16 if maxval > 255 else np.uint8)


def _pgm_header(data: bytes):
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError("not a portable graymap (P2/P5)")
    magic = data[:2]
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    return magic, tuple(fields), pos


def write_pgm(path, array: np.ndarray, maxval: int | None = None) -> None:
    Path(path).write_bytes(pgm_bytes(array, maxval))


def pgm_bytes(array: np.ndarray, maxval: int | None = None) -> bytes:
    """Serialize an integer raster as binary PGM (16-bit is big-endian)."""
    arr = np.asarray(array)
    if maxval is None:
        maxval = 255 if arr.dtype == np.uint8 else 65535
    if int(arr.max(initial=0)) > maxval:
        raise ValueError("raster values exceed maxval")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode()
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    return header + arr.astype(dtype).tobytes()


def read_intensity(path) -> ScalarField:
    """Load a grayscale image as an intensity field.

    PGM is native; other formats go through Pillow when available.
    """
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".pnm"):
        return intensity_field(read_pgm(path))
    try:
        from PIL import Image
    except ImportError as exc:
        raise ValueError(
            f"{path.suffix} images need the optional Pillow dependency "
            "(pip install declump[images])") from exc
    with Image.open(path) as img:
        arr = np.asarray(img.convert("I") if img.mode not in ("L", "I;16")
                         else img)
    scale = float(arr.max()) if arr.max() > 255 else 255.0
    return intensity_field(np.asarray(arr, dtype=float) / scale)


# --------------------------------------------------------------------------
# YAML documents


def load_boundary_file(path) -> np.ndarray:
    doc = _load_yaml(path)
    verts = _point_list(doc, "vertices", path)
    return verts


def load_seeds_file(path) -> np.ndarray:
    doc = _load_yaml(path)
    return _point_list(doc, "seeds", path)


def _load_yaml(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a mapping document")
    return doc


def _point_list(doc, key, path) -> np.ndarray:
    if key not in doc:
        raise ValueError(f"{path}: missing '{key}' entry")
    pts = np.asarray(doc[key], dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"{path}: '{key}' must be a list of [x, y] pairs")
    return pts


def load_config_file(path) -> Config:
    """Load a flat key/value config; unknown keys are rejected."""
    doc = _load_yaml(path)
    known = {f.name for f in dataclasses.fields(Config)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
    return Config(**doc)


# --------------------------------------------------------------------------
# result documents


def _round(value):
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, np.ndarray):
        return _round(value.tolist())
    if isinstance(value, (np.floating,)):
        return round(float(value), 6)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def cuts_document(result: PartitionResult, config: Config) -> dict:
    """JSON-ready description of a partition (cuts, votes, diagnostics)."""
    cuts = [{
        "kind": c.kind,
        "p": _round(c.p),
        "q": _round(c.q),
        "idx_p": c.idx_p,
        "idx_q": c.idx_q,
        "owner": c.owner,
        "tri_p": c.tri_p,
        "tri_q": c.tri_q,
    } for c in result.cuts]
    votes = [{
        "winner": t.winner,
        "wins_vv": t.wins_vv,
        "wins_vc": t.wins_vc,
        "raw_vv": _round(t.raw_vv),
        "raw_vc": _round(t.raw_vc),
        "norm_vv": _round(t.norm_vv),
        "norm_vc": _round(t.norm_vc),
        "cumulative_vv": _round(t.cumulative_vv),
        "cumulative_vc": _round(t.cumulative_vc),
        "skipped": list(t.skipped),
    } for t in result.votes]
    return {
        "config": _round(config.to_dict()),
        "cuts": cuts,
        "added_vertices": _round(result.added_vertices),
        "region_count": result.region_count,
        "seed_labels": (result.seed_labels.tolist()
                        if result.seed_labels is not None else None),
        "votes": votes,
        "diagnostics": _round(result.diagnostics),
    }


def cuts_document_bytes(result: PartitionResult, config: Config) -> bytes:
    return (json.dumps(cuts_document(result, config), sort_keys=True,
                       indent=2) + "\n").encode()


def write_cuts_document(path, result: PartitionResult,
                        config: Config) -> None:
    Path(path).write_bytes(cuts_document_bytes(result, config))


def write_report(path, report_dict: dict) -> None:
    Path(path).write_bytes(
        (json.dumps(report_dict, sort_keys=True, indent=2) + "\n").encode())


# --------------------------------------------------------------------------
# SVG overlay

_SVG_STYLE = ("path.boundary{fill:none;stroke:#000;stroke-width:1}"
              "line.vv{stroke:#d62728;stroke-width:1}"
              "line.vc{stroke:#1f77b4;stroke-width:1}"
              "line.cc{stroke:#1f77b4;stroke-width:1;stroke-dasharray:3 2}"
              "circle.seed{fill:#2ca02c}"
              "circle.added{fill:#ff7f0e}")


def svg_bytes(boundary, result: PartitionResult, seeds) -> bytes:
    """Deterministic SVG overlay: boundary, cuts by kind, seed dots."""
    verts = boundary.vertices
    width = float(np.ceil(verts[:, 0].max())) + 2
    height = float(np.ceil(verts[:, 1].max())) + 2
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f"<style>{_SVG_STYLE}</style>",
    ]
    path = "M " + " L ".join(f"{x:.2f},{y:.2f}" for x, y in verts) + " Z"
    lines.append(f'<path class="boundary" d="{path}"/>')
    for cut in result.cuts:
        lines.append(
            f'<line class="{cut.kind}" x1="{cut.p[0]:.2f}" '
            f'y1="{cut.p[1]:.2f}" x2="{cut.q[0]:.2f}" y2="{cut.q[1]:.2f}"/>')
    for sx, sy in np.asarray(seeds, dtype=float).reshape(-1, 2):
        lines.append(
            f'<circle class="seed" cx="{sx:.2f}" cy="{sy:.2f}" r="2"/>')
    for ax, ay in result.added_vertices:
        lines.append(
            f'<circle class="added" cx="{ax:.2f}" cy="{ay:.2f}" r="2"/>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode()


def write_svg(path, boundary, result: PartitionResult, seeds) -> None:
    Path(path).write_bytes(svg_bytes(boundary, result, seeds))
