import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from peribeta.config import RunConfig
from peribeta.errors import DomainError
from peribeta.io import (
    MULTIPLICITY_STEP,
    PALETTE,
    csv_header,
    dumps,
    raster_pixels,
    read_pnm,
    write_counterexamples_csv,
    write_points_csv,
    write_raster,
)
from peribeta.tiling import PointCloud, Raster, rasterize


def _cloud(label, pts):
    pts = np.asarray(pts, dtype=np.complex128)
    return PointCloud(label, pts, np.zeros(pts.size, dtype=np.int64), 0)


def test_dumps_is_canonical():
    text = dumps({"b": Fraction(1, 3), "a": [1 + 2j, np.int64(4), np.float64(0.5)],
                  "c": float("inf")})
    assert text.endswith("\n")
    data = json.loads(text)
    assert list(data) == ["a", "b", "c"]
    assert data == {"a": [[1.0, 2.0], 4, 0.5], "b": "1/3", "c": "inf"}


def test_csv_headers():
    assert csv_header(("complex",)) == "label,re,im"
    assert csv_header(("real", "real")) == "label,x1,x2"
    assert csv_header(("real",)) == "label,x1"


def test_points_csv_roundtrip(tmp_path):
    pts = [0.1 + 0.2j, -1 / 3 + 1e-17j]
    p = write_points_csv(tmp_path / "a.csv", [_cloud("T0", pts)], ("complex",))
    lines = p.read_text().splitlines()
    assert lines[0] == "label,re,im"
    back = [complex(float(r.split(",")[1]), float(r.split(",")[2])) for r in lines[1:]]
    assert back == pts


def test_pgm_for_single_label(tmp_path):
    r = rasterize([_cloud("c", [0.25 + 0.75j])], bbox=((0, 0), (1, 1)), cell=0.5)
    p = write_raster(tmp_path / "img.ppm", r)
    assert p.suffix == ".pgm"
    magic, w, h, img = read_pnm(p)
    assert (magic, w, h) == ("P5", 2, 2)
    # top row holds the largest imaginary part
    assert img.tolist() == [[255, 0], [0, 0]]


def test_ppm_palette_and_multiplicity(tmp_path):
    clouds = [_cloud("a", [0.25 + 0.25j]), _cloud("b", [0.25 + 0.25j, 0.75 + 0.25j])]
    r = rasterize(clouds, bbox=((0, 0), (1, 1)), cell=0.5)
    p = write_raster(tmp_path / "img", r)
    magic, w, h, img = read_pnm(p)
    assert magic == "P6" and p.suffix == ".ppm"
    bottom = img[1]
    assert tuple(bottom[0]) == PALETTE[0] + (2 * MULTIPLICITY_STEP,)
    assert tuple(bottom[1]) == PALETTE[1] + (MULTIPLICITY_STEP,)
    assert not img[0].any()
    assert np.array_equal(raster_pixels(r), img)


def test_counterexample_csv(tmp_path):
    rows = [{"p": 33, "q": 49, "preperiod_len": 30, "period_len": 336}]
    p = write_counterexamples_csv(tmp_path / "c.csv", rows)
    assert p.read_text() == "p,q,preperiod_len,period_len\n33,49,30,336\n"


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(base="-1,2,-3,1", depth=None, cell=0.005, qmax=500, lo="1/3",
                    hi="2/3", threads=3, write_csv=False)
    path = cfg.save(tmp_path / "run.json")
    assert RunConfig.load(path) == cfg
    assert json.loads(path.read_text())["schema"] == "peribeta.config/1"


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10 ** 6), st.floats(1e-9, 10, allow_nan=False),
       st.integers(1, 64), st.booleans())
def test_config_roundtrip_property(depth, cell, threads, toggle):
    cfg = RunConfig(depth=depth, cell=cell, threads=threads, write_raster=toggle)
    assert RunConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("kwargs", [
    {"depth": 0}, {"cell": -0.1}, {"cell": True}, {"qmax": 0}, {"budget": -5},
    {"threads": 0}, {"precision_bits": 1.5}, {"lo": "1/2", "hi": "1/3"},
    {"hi": "3/2"}, {"lo": "abc"},
])
def test_config_rejects_bad_knobs(kwargs):
    with pytest.raises(DomainError):
        RunConfig(**kwargs)


def test_config_rejects_unknown_keys_and_schema():
    with pytest.raises(DomainError):
        RunConfig.from_json('{"base": "-1,-1,1", "colour": 3}')
    with pytest.raises(DomainError):
        RunConfig.from_json('{"schema": "other/9"}')
    with pytest.raises(DomainError):
        RunConfig.from_json("[1, 2]")
    with pytest.raises(DomainError):
        RunConfig.from_json("{not json")
