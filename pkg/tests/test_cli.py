import json
import math

import pytest

from raylander.cli import round_floats, run


def call(capsys, *argv):
    status = run(list(argv))
    out = capsys.readouterr().out
    return status, out


def test_round_floats():
    assert round_floats({"a": [1 / 3, math.inf], "b": True}) == \
        {"a": [0.333333333333333, "inf"], "b": True}


def test_kappa(capsys):
    status, out = call(capsys, "kappa", "--d", "1")
    doc = json.loads(out)
    assert status == 0
    assert doc["kappa"] == pytest.approx(0.907181087447930, abs=1e-14)
    assert doc["provenance"] == "lemma22"
    status, out = call(capsys, "kappa", "--r-n", str(math.exp(-math.pi)), "--delta", "0")
    assert status == 0 and json.loads(out)["provenance"] == "prop27"


def test_density_and_dist(capsys):
    status, out = call(capsys, "density", "--domain", "unit_disk", "--re", "0")
    assert status == 0 and json.loads(out)["density"] == 2.0
    status, out = call(capsys, "dist", "--domain", "right_half_plane", "--z-re", "1", "--w-re", "2")
    assert json.loads(out)["distance"] == pytest.approx(math.log(2), abs=1e-14)


def test_domain_error_exit_1(capsys):
    status, out = call(capsys, "density", "--domain", "punctured_unit_disk", "--re", "0")
    doc = json.loads(out)
    assert status == 1 and doc["reason"] == "puncture-hit" and doc["exit_status"] == 1


def test_bad_arguments_exit_1(capsys):
    status, out = call(capsys, "kappa", "--nope")
    assert status == 1 and json.loads(out)["reason"] == "invalid-arguments"
    status, out = call(capsys, "kappa")
    assert status == 1 and json.loads(out)["reason"] == "missing-parameter"
    status, out = call(capsys, "kappa", "--d", "1", "--format", "csv")
    assert status == 1 and json.loads(out)["reason"] == "format-unsupported"


def test_nonconvergence_exit_2(capsys, monkeypatch):
    monkeypatch.setenv("RAYLANDER_MAX_DEPTH", "2")
    status, out = call(capsys, "trace", "--lambda-re", "0.2", "--address", "0", "--t", "0.5")
    assert status == 2 and json.loads(out)["reason"] == "non-convergence"


def test_land_repelling(capsys):
    status, out = call(capsys, "land", "--lambda-re", "0.2", "--lambda-im", "0", "--address", "0",
                       "--period", "1", "--t0", "1", "--tol", "1e-10")
    doc = json.loads(out)
    assert status == 0
    assert doc["classification"] == "repelling"
    assert doc["w"]["re"] == pytest.approx(2.5426413577735265, abs=1e-12)


def test_land_unbounded_exit_3(capsys):
    status, out = call(capsys, "land", "--lambda-re", "3", "--address", "0", "--period", "1",
                       "--max-iter", "100")
    doc = json.loads(out)
    assert status == 3 and doc["reason"] == "postsingular-unbounded"


def test_trace_csv_and_output_file(capsys, tmp_path):
    target = tmp_path / "seg.csv"
    status, out = call(capsys, "trace", "--lambda-re", "0.2", "--address", "0,1", "--period", "2",
                       "--t", "1", "--format", "csv", "--output", str(target))
    assert status == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "t,re,im" and len(lines) > 3


def test_postsingular_and_ladder(capsys):
    status, out = call(capsys, "postsingular", "--lambda-re", "0.2")
    assert status == 0 and json.loads(out)["status"] == "bounded"
    status, out = call(capsys, "ladder", "--lambda-re", "0.2", "--z0-re", "3", "--R", "1",
                       "--j-max", "3")
    doc = json.loads(out)
    assert doc["delta"] == pytest.approx(3.54617565991123, abs=1e-12)
    status, out = call(capsys, "ladder", "--lambda-re", "0.2", "--z0-re", "3", "--R", "1",
                       "--format", "csv")
    assert out.splitlines()[0] == "j,re,im"


def test_verify_suite(capsys):
    status, out = call(capsys, "verify", "--suite", "lemma41")
    doc = json.loads(out)
    assert status == 0 and doc["passed"] and len(doc["checks"]) == 3
