import json

import numpy as np
import pytest

from cspace.channels import random_cptp
from cspace.cli import ScenarioConfig, main, parse_angle
from cspace.io import save_channel, save_resource
from cspace.resource import aklt


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.mark.parametrize(
    "text,value",
    [("pi/2", np.pi / 2), ("3*pi/2", 3 * np.pi / 2), ("-pi", -np.pi), ("0.25", 0.25), ("pi", np.pi), ("2pi/3", 2 * np.pi / 3)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_validate_aklt(capsys):
    code, rep = report(capsys, "validate", "--resource", "aklt", "--theta", "pi/2", "--phi", "pi/2")
    assert code == 0
    assert rep["schema_version"] == "1" and rep["command"] == "validate"


def test_validate_invalid_exit_code(capsys):
    code, rep = report(capsys, "validate", "--resource", "aklt", "--theta", "1.0", "--phi", "0.3")
    assert code == 1


def test_validate_tolerance_from_env(capsys, monkeypatch):
    monkeypatch.setenv("CSPACE_TOL", "1e-5")
    code, _ = report(capsys, "validate", "--resource", "aklt", "--theta", "1.5708", "--phi", "1.5708")
    assert code == 0
    monkeypatch.setenv("CSPACE_TOL", "nope")
    assert run(capsys, "validate")[0] == 2


def test_witness_exit_codes(capsys):
    code, rep = report(capsys, "witness", "--resource", "aklt")
    assert code == 0 and rep["witness"]["violation"] > 1e-3
    code, rep = report(capsys, "witness", "--resource", "cluster")
    assert code == 3 and rep["witness"] is None


def test_aklt_mixing(capsys):
    code, rep = report(capsys, "aklt-mixing", "--r", "3")
    assert code == 0
    assert rep["identity_coefficient"] == pytest.approx(2.0)
    assert rep["classification"]["verdict"] != "LinearCPTP"
    assert rep["global_tp_deviation"] <= 1e-9


def test_classify_scenarios(capsys):
    assert report(capsys, "classify")[1]["verdict"] == "LinearCPTP"
    _, rep = report(capsys, "classify", "--scenario", "outcome", "--outcome", "0", "--mode", "state")
    assert rep["verdict"] == "NonLinear"
    _, rep = report(capsys, "classify", "--scenario", "outcome", "--outcome", "0")
    assert rep["verdict"] == "CPnotTP"


def test_oracle_check(capsys):
    code, rep = report(capsys, "oracle-check", "--trials", "2", "--seed", "7")
    assert code == 0 and rep["max_choi_distance"] <= 1e-8


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["oracle-check", "--trials", "2", "--seed", "3", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    out, _ = capsys.readouterr()
    assert "max Choi distance" in out


def test_file_resource_and_error(tmp_path, capsys):
    save_resource(aklt(), tmp_path / "r.json")
    save_channel(random_cptp(3, 2, 1), tmp_path / "c.json")
    code, rep = report(capsys, "classify", "--resource", f"file:{tmp_path / 'r.json'}", "--error", f"file:{tmp_path / 'c.json'}")
    assert code == 0 and rep["verdict"] == "LinearCPTP"


def test_channel_dimension_mismatch(tmp_path, capsys):
    save_channel(random_cptp(2, 1, 1), tmp_path / "c.json")
    assert run(capsys, "classify", "--error", f"file:{tmp_path / 'c.json'}")[0] == 2


def test_scenario_file(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"r": 2, "theta": "pi/2", "phi": "pi/2"}))
    code, rep = report(capsys, "aklt-mixing", "--scenario-file", str(p))
    assert code == 0 and rep["r"] == 2
    code, rep = report(capsys, "aklt-mixing", "--scenario-file", str(p), "--r", "4")
    assert rep["r"] == 4


def test_scenario_file_unknown_field(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"radius": 2}))
    code, _, err = run(capsys, "aklt-mixing", "--scenario-file", str(p))
    assert code == 2 and "unknown" in err


def test_malformed_inputs(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert run(capsys, "validate", "--resource", f"file:{p}")[0] == 2
    assert run(capsys, "validate", "--resource", "nope")[0] == 2
    assert run(capsys, "witness", "--grid", "8by16")[0] == 2
    assert run(capsys, "aklt-mixing", "--resource", "cluster")[0] == 2
    assert run(capsys, "validate", "--resource", f"file:{tmp_path / 'missing.json'}")[0] == 2


def test_scenario_config_merge():
    a = ScenarioConfig(r=2, theta=1.0)
    b = ScenarioConfig(r=3)
    m = a.merged(b)
    assert m.r == 3 and m.theta == 1.0
    assert m.with_defaults(theta=5.0, phi=2.0).phi == 2.0
    assert m.with_defaults(theta=5.0).theta == 1.0
