import json

import pytest

from causalgeom.cli import main


def run(capsys, *argv):
    code = main(["--json", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_classify(capsys):
    code, doc = run(capsys, "classify", "0,0,0", "1,0.5,0")
    assert code == 0 and doc["schema"] == "causalgeom.classify/1"
    assert doc["class"] == "TimelikeFuture"


def test_pred_and_error(capsys):
    code, doc = run(capsys, "--h", "0.25", "pred", "--timelike-convex",
                    "--region", "dcone((-1,0,0),(1,0,0))")
    assert code == 0 and doc["verdict"] is True
    code, doc = run(capsys, "pred", "--convex", "--region", "dcone((0,0,0),(0,1,0))")
    assert code == 2 and doc["schema"] == "causalgeom.error/1"
    assert (doc["line"], doc["column"]) == (1, 1)


def test_empty_intersection_x120(capsys):
    code, doc = run(capsys, "--h", "0.2", "empty-intersection", "--wedges", "x120")
    assert code == 0 and doc["empty"] is True and doc["eps"] > 0


def test_localize_catalog(tmp_path, capsys):
    from causalgeom import fixtures
    p = tmp_path / "cat.json"
    p.write_text(json.dumps(fixtures.triangle_tag(2).to_json()))
    code, doc = run(capsys, "--h", "0.2", "localize", "--catalog", str(p))
    assert code == 0 and all(doc["nonempty"].values()) and doc["scalar"] is False


def test_wave_dependence(capsys):
    code, doc = run(capsys, "--dim", "1", "wave", "dependence")
    assert code == 0 and doc["verdict"] is True


def test_timing_flag(capsys):
    _, doc = run(capsys, "--timing", "classify", "0,0", "0,1")
    assert "timing" in doc
    _, doc = run(capsys, "classify", "0,0", "0,1")
    assert "timing" not in doc
