import json
import math
import os

import pytest

import bizsurv

SMALL = {
    "synth": {"restaurants": 200, "other_businesses": 80, "users": 150},
    "models": {"gbdt": {"trees": 20}},
}


def test_version():
    assert bizsurv.version().startswith("bizsurv ")
    assert bizsurv.stages() == [
        "synth", "ingest", "label", "features", "train", "evaluate", "ablate", "explain"]


def test_default_config():
    config = bizsurv.default_config()
    assert config["geo"]["radius_m"] == 500
    assert config["text"]["vocab_size"] == 1000
    assert config["explain"]["top_k"] == 10


def test_config_error_names_field():
    with pytest.raises(bizsurv.ConfigError, match="geo.radius_m"):
        bizsurv.resolve_config(overrides={"geo": {"radius_m": -1}})


def test_haversine_quarter_meridian():
    d = bizsurv.haversine(0.0, 0.0, 90.0, 0.0)
    assert math.isclose(d, math.pi / 2 * 6371000.0, rel_tol=1e-12)
    assert bizsurv.haversine(36.1, -115.2, 36.1, -115.2) == 0.0


def test_roc_auc():
    assert bizsurv.roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75
    with pytest.raises(bizsurv.DataError):
        bizsurv.roc_auc([0.1, 0.2], [1, 1])


def test_text_helpers():
    assert bizsurv.preprocess("The Food was GREAT!") == ["food", "great"]
    assert bizsurv.polarity(3) == "positive"
    assert bizsurv.polarity(3, "drop_three") == "neutral"


def test_pipeline(tmp_path):
    wd = tmp_path / "work"
    with pytest.raises(bizsurv.MissingArtifactError, match="geo_features.csv"):
        bizsurv.run_stage("train", workdir=wd, overrides=SMALL)
    for stage in ["synth", "ingest", "label", "features", "train", "evaluate"]:
        out = bizsurv.run_stage(stage, workdir=wd, seed=7, overrides=SMALL)
        assert not out["skipped"], stage
    assert bizsurv.run_stage("train", workdir=wd, seed=7, overrides=SMALL)["skipped"]

    report = json.loads((wd / "eval_report.json").read_text())
    assert 0.0 <= report["auc"] <= 1.0

    business = json.loads((wd / "split.json").read_text())["test"][0]
    out = bizsurv.explain(workdir=wd, business_id=business, top_k=5, samples=500, overrides=SMALL)
    explanation = json.loads((wd / out["outputs"][0]).read_text())
    assert len(explanation["entries"]) <= 5
