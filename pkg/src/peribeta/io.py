"""Deterministic artifact writers: CSV point clouds, PGM/PPM rasters, JSON.

Raster palette.  A PGM image (one label) is 255 on occupied cells and 0
elsewhere.  A PPM image (several labels) takes red and green from
``PALETTE[k % len(PALETTE)]`` where k is the lowest label index present in
the cell, and encodes the number of labels present in blue as
``min(255, MULTIPLICITY_STEP * multiplicity)``.  Empty cells are black.  The
top image row is the largest imaginary part.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

PALETTE = (
    (230, 25), (60, 180), (255, 225), (0, 130), (245, 130),
    (145, 30), (70, 240), (240, 50), (210, 245), (250, 190),
    (0, 128), (170, 110), (128, 0), (170, 255), (128, 128), (255, 215),
)
MULTIPLICITY_STEP = 64


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def csv_header(coord_kinds) -> str:
    if tuple(coord_kinds) == ("real", "real"):
        return "label,x1,x2"
    if tuple(coord_kinds) == ("real",):
        return "label,x1"
    return "label,re,im"


def write_points_csv(path, clouds, coord_kinds) -> Path:
    """One row per point, clouds in the given order, points in cloud order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    one_dim = tuple(coord_kinds) == ("real",)
    with path.open("w", newline="\n") as fh:
        fh.write(csv_header(coord_kinds) + "\n")
        for cloud in clouds:
            label = cloud.label
            pts = cloud.points
            if one_dim:
                for z in pts:
                    fh.write(f"{label},{float(z.real)!r}\n")
            else:
                for z in pts:
                    fh.write(f"{label},{float(z.real)!r},{float(z.imag)!r}\n")
    return path


def raster_pixels(raster) -> np.ndarray:
    """(ny, nx, 3) uint8 image following the module palette."""
    occ = raster.occupancy
    mult = occ.sum(axis=0)
    first = np.argmax(occ, axis=0)
    pal = np.array(PALETTE, dtype=np.int64)
    rg = pal[first % len(PALETTE)]
    img = np.zeros((raster.ny, raster.nx, 3), dtype=np.uint8)
    on = mult > 0
    img[on, 0] = rg[on, 0]
    img[on, 1] = rg[on, 1]
    img[on, 2] = np.minimum(255, MULTIPLICITY_STEP * mult[on])
    return img[::-1]


def write_raster(path, raster) -> Path:
    """PGM for a single label, PPM otherwise; the suffix is set accordingly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if len(raster.labels) == 1:
        path = path.with_suffix(".pgm")
        img = np.where(raster.occupancy[0], 255, 0).astype(np.uint8)[::-1]
        head = f"P5\n{raster.nx} {raster.ny}\n255\n".encode()
    else:
        path = path.with_suffix(".ppm")
        img = raster_pixels(raster)
        head = f"P6\n{raster.nx} {raster.ny}\n255\n".encode()
    path.write_bytes(head + np.ascontiguousarray(img).tobytes())
    return path


def read_pnm(path):
    """(magic, width, height, pixel array) of a binary PGM/PPM file."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    magic = parts[0].decode()
    w, h = (int(v) for v in parts[1].split())
    body = np.frombuffer(parts[3], dtype=np.uint8)
    if magic == "P5":
        return magic, w, h, body.reshape(h, w)
    return magic, w, h, body.reshape(h, w, 3)


def write_counterexamples_csv(path, counterexamples) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        fh.write("p,q,preperiod_len,period_len\n")
        for c in counterexamples:
            fh.write(f"{c['p']},{c['q']},{c['preperiod_len']},{c['period_len']}\n")
    return path
