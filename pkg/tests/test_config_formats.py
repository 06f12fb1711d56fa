import json
import math

import numpy as np
import pytest

from texrd.config import PipelineConfig, load_config
from texrd.features.extract import N_FEATURES, FeatureVector
from texrd.formats import (
    FEATURE_HEADER, fits_document, fmt, format_feature_csv, read_feature_csv, read_fits,
    read_rd_points, write_rd_points,
)
from texrd.rd_models import RdCurve, RdFit


def test_config_json_round_trip():
    cfg = PipelineConfig().updated(seed=7, forest_n_trees=40, relation_log_base="e")
    again = PipelineConfig.from_dict(json.loads(cfg.to_json()))
    assert again == cfg
    assert again.forest.n_trees == 40
    assert cfg.rfe_hyper.n_trees == 25 and cfg.rfe_hyper.max_depth == cfg.forest.max_depth


@pytest.mark.parametrize("change", [
    {"gop_len": 2}, {"max_frames": 4}, {"glcm_levels": 1}, {"glcm_offset": (0, 0)},
    {"ncc_window": 1}, {"nlp_scales": 0}, {"forest_n_trees": 0}, {"rfe_folds": 1},
    {"relation_log_base": "1"}, {"split_by": "frame"}, {"feature_set": "x"}, {"test_fraction": 1.0},
])
def test_config_validation(change):
    with pytest.raises(ValueError):
        PipelineConfig().updated(**change)


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown config keys: bogus"):
        PipelineConfig.from_dict({"bogus": 1})


def test_load_config_sources(tmp_path):
    cfg = PipelineConfig().updated(seed=3)
    (tmp_path / "a.json").write_text(cfg.to_json())
    (tmp_path / "b.csv").write_text(f"# texrd 0.1.0\n# config: {cfg.to_json()}\nx\n")
    (tmp_path / "c.json").write_text(json.dumps({"version": "0.1.0", "config": cfg.to_dict()}))
    (tmp_path / "d.svg").write_text(f"<svg>\n<!--\ntexrd 0.1.0\nconfig: {cfg.to_json()}\n-->\n</svg>\n")
    for name in "a.json", "b.csv", "c.json", "d.svg":
        assert load_config(tmp_path / name) == cfg


def test_fmt_round_trips_doubles():
    for v in (0.1, 1 / 3, -2.5e-300, 1e308, 0.0):
        assert float(fmt(v)) == v
    assert (fmt(math.nan), fmt(math.inf), fmt(-math.inf)) == ("nan", "inf", "-inf")


def test_feature_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    rows = [FeatureVector(rng.standard_normal(N_FEATURES), "seqA", g) for g in range(3)]
    text = format_feature_csv(rows, "{}", ["extra note"])
    lines = text.splitlines()
    assert lines[0].startswith("# texrd ") and lines[1] == "# config: {}"
    assert lines[2].startswith("# features: F1=")
    assert lines[3] == "# extra note"
    assert lines[4] == ",".join(FEATURE_HEADER)
    p = tmp_path / "f.csv"
    p.write_text(text)
    back = read_feature_csv(p)
    assert [(f.sequence_id, f.gop_index) for f in back] == [("seqA", 0), ("seqA", 1), ("seqA", 2)]
    assert all(np.array_equal(a.values, b.values) for a, b in zip(rows, back))


def test_feature_csv_schema_errors(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("sequence_id,gop_index,F1\nx,0,1\n")
    with pytest.raises(ValueError, match="schema"):
        read_feature_csv(p)
    p.write_text("# only comments\n")
    with pytest.raises(ValueError, match="header"):
        read_feature_csv(p)


def test_rd_points_round_trip_and_errors(tmp_path):
    c = RdCurve.from_arrays([0.1, 0.2, 0.4, 0.8], [30.0, 32.0, 34.0, 35.5], "s", 2, qps=[37, 32, 27, 22])
    p = tmp_path / "p.csv"
    write_rd_points(p, [c])
    with open(p, "a") as fh:
        fh.write("t,0,22,0.5,40\n")
    curves, errors = read_rd_points(p)
    assert list(curves) == [("s", 2)]
    assert curves[("s", 2)].points == c.points
    assert ("t", 0) in errors
    p.write_text("a,b\n")
    with pytest.raises(ValueError):
        read_rd_points(p)


def test_fits_document(tmp_path):
    fits = [RdFit("Lin", (1.0, 2.0), 0.9, 0.1, "a", 0), RdFit("Exp", (30.0, 0.1), None, None, "a", 0)]
    doc = fits_document(fits, '{"seed":1}', summary={})
    assert doc["config"] == {"seed": 1}
    p = tmp_path / "f.json"
    p.write_text(json.dumps(doc))
    back = read_fits(p)
    assert back[0].params == (1.0, 2.0) and back[0].r_squared == 0.9
    assert back[1].rmse is None
    assert [f.kind.value for f in read_fits(p, "Exp")] == ["Exp"]
