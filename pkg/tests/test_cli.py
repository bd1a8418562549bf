import json
import os

import pytest
import yaml

from cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, RunConfig, build_parser, main, run
from errors import ConfigError


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _report(capsys, *argv):
    code, out, _ = _run(capsys, *argv)
    return code, json.loads(out)


def test_enumerate_matches_golden(capsys, golden_dir):
    code, out, _ = _run(capsys, "gorenstein", "enumerate", "--dim", "2")
    assert code == EXIT_OK
    path = golden_dir / "gorenstein_enumerate_dim2.json"
    if os.getenv("UPDATE_GOLDEN") == "1":
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")


def test_enumerate_dimension_three(capsys):
    code, report = _report(capsys, "gorenstein", "enumerate", "--dim", "3")
    assert code == EXIT_OK
    assert report["count"] == 14
    assert [1, 3, 4, 4] in report["weights"]


@pytest.mark.parametrize("weights, expected", [("1,3,4,4", EXIT_OK), ("1,2,2,3", EXIT_FAIL)])
def test_gorenstein_check(capsys, weights, expected):
    code, report = _report(capsys, "gorenstein", "check", "--weights", weights)
    assert code == expected
    assert report["gorenstein"] is (expected == EXIT_OK)


def test_pole_is_an_error(capsys):
    code, out, err = _run(capsys, "quantum", "--weights", "1,1,2,2", "--q", "1")
    assert code == EXIT_ERROR
    assert json.loads(out)["error"]["code"] == "pole"
    assert err.startswith("Error [pole]")


def test_verify_iso_passes(capsys, fixtures_dir):
    code, report = _report(capsys, "verify-iso", "--weights", "1,3,4,4", "--q", "i,i,i,0",
                           "--map", str(fixtures_dir / "ri.json"))
    assert code == EXIT_OK
    assert report["iso"]["passed"]
    assert report["isometry"]["passed"]
    assert report["command"] == "verify-iso"
    assert len(report["matrix"]) == 12


def test_verify_iso_reports_relation_violation(capsys):
    code, report = _report(capsys, "verify-iso", "--weights", "1,1,2,2", "--q", "i")
    assert code == EXIT_FAIL
    assert report["relation_violation"]["relation"].startswith("E*E")
    assert "iso" not in report


def test_text_format_is_yaml(capsys):
    code, out, _ = _run(capsys, "--format", "text", "sectors", "--weights", "1,1,2,2")
    assert code == EXIT_OK
    report = yaml.safe_load(out)
    assert report["command"] == "sectors"
    assert len(report["sectors"]) == 2


def test_resolve(capsys):
    code, report = _report(capsys, "resolve", "--weights", "1,1,2,2")
    assert code == EXIT_OK
    assert report["validation"]["cone_count"] == 6


def test_resolve_unsupported_family(capsys):
    code, report = _report(capsys, "resolve", "--weights", "1,2,3")
    assert code == EXIT_ERROR
    assert report["error"]["code"] == "unsupported_family"


def test_missing_weights(capsys):
    code, _, _ = _run(capsys, "gorenstein", "check")
    assert code == EXIT_ERROR


def test_usage_error(capsys):
    code, _, _ = _run(capsys, "frobnicate")
    assert code == EXIT_ERROR


def test_output_is_stable(capsys):
    first = _run(capsys, "mrho", "--weights", "1,3,4,4")
    second = _run(capsys, "mrho", "--weights", "1,3,4,4")
    assert first[0] == EXIT_OK
    assert first[1] == second[1]
    report = json.loads(first[1])
    assert report["chain"]["chain"] == ["Gamma1", "Gamma2", "Gamma3"]
    assert report["intersections"]["rows"][3] == ["0", "0", "0", "-3"]


def test_symbolic_quantum_report(capsys):
    code, report = _report(capsys, "quantum", "--weights", "1,1,2,2")
    assert code == EXIT_OK
    assert report["symbolic"]["e*e"]["h*e"] == {"classical": "4", "quantum": {"1": "8"}}


def test_scan(capsys):
    code, report = _report(capsys, "scan", "--weights", "1,1,2,2", "--candidates", "1;-1;i")
    assert code == EXIT_OK
    assert [r["status"] for r in report["results"]] == ["pole", "pass", "fail"]
    assert report["passing"] == [["-1"]]


def test_cyclotomic_order_override(capsys, monkeypatch):
    _, report = _report(capsys, "quantum", "--weights", "1,1,2,2", "--q", "i")
    assert report["algebra"]["products"]["e * e"]["h*e"] == "4*zeta(4,1)"

    monkeypatch.setenv("WPS_CYCLO_ORDER", "4")
    _, report = _report(capsys, "quantum", "--weights", "1,1,2,2", "--q", "i")
    value = report["algebra"]["products"]["e * e"]["h*e"]
    assert isinstance(value, dict)
    assert value["order"] == 4


def test_log_file(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("WPS_LOG_DIR", str(tmp_path))
    code, _, _ = _run(capsys, "sectors", "--weights", "1,1,2,2")
    assert code == EXIT_OK
    assert list(tmp_path.glob("sectors_*.log"))


def test_run_config_round_trip():
    args = build_parser().parse_args(["verify-iso", "--weights", "1,3,4,4", "--q", "i,i,i,0"])
    config = RunConfig.from_args(args)
    assert config.command == "verify-iso"
    assert config.map is None
    assert RunConfig.from_json(json.loads(json.dumps(config.to_json()))) == config


def test_run_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_json({"command": "sectors", "colour": "blue"})
    with pytest.raises(ConfigError):
        RunConfig.from_json({"command": "translate"})


def test_run_returns_report_and_code():
    report, code = run(RunConfig(command="gorenstein", action="check", weights="1,1,2"))
    assert code == EXIT_OK
    assert report == {"command": "gorenstein check", "weights": [1, 1, 2], "gorenstein": True, "well_formed": True}


def test_resolve_with_rays_file(capsys, tmp_path):
    path = tmp_path / "rays.json"
    path.write_text('{"rays": [[0, -1, -1]]}', encoding="utf-8")
    code, report = _report(capsys, "resolve", "--weights", "1,1,2,2", "--rays", str(path))
    assert code == EXIT_OK
    assert report["refined"]["rays"][-1] == [0, -1, -1]

    path.write_text('{"rays": [[0, "a", -1]]}', encoding="utf-8")
    code, report = _report(capsys, "resolve", "--weights", "1,1,2,2", "--rays", str(path))
    assert code == EXIT_ERROR
    assert report["error"]["code"] == "parse_error"


def test_quantum_at_cube_root_of_unity(capsys):
    code, report = _report(capsys, "quantum", "--weights", "1,1,2,2", "--q", "zeta(3,1)")
    assert code == EXIT_OK
    assert report["q"] == ["zeta(3,1)"]


def test_malformed_quantum_parameter(capsys):
    code, out, err = _run(capsys, "quantum", "--weights", "1,1,2,2", "--q", "zeta(3")
    assert code == EXIT_ERROR
    assert json.loads(out)["error"]["code"] == "parse_error"
    assert err.startswith("Error [parse_error]")


def test_scan_candidates_with_calls(capsys):
    code, report = _report(capsys, "scan", "--weights", "1,1,2,2", "--candidates", "zeta(3,1);-1")
    assert code == EXIT_OK
    assert [r["status"] for r in report["results"]] == ["fail", "pass"]
    assert report["results"][0]["q"] == ["zeta(3,1)"]


def test_chenruan_report(capsys):
    code, report = _report(capsys, "chenruan", "--weights", "1,3,4,4")
    assert code == EXIT_OK
    assert report["betti"]["dims"] == [1, 5, 5, 1]
    assert {"gamma": "1/4", "fixed_indices": [2, 3], "age": "1", "weights": [4, 4]} in report["sectors"]
    assert report["algebra"]["name"]


def test_chenruan_without_presentation(capsys):
    code, report = _report(capsys, "chenruan", "--weights", "1,1,1,1")
    assert code == EXIT_OK
    assert [s["gamma"] for s in report["sectors"]] == ["0"]
    assert report["betti"]["dims"] == [1, 1, 1, 1]
    assert "algebra" not in report


def test_cohomology_report_has_gram(capsys):
    code, report = _report(capsys, "cohomology", "--weights", "1,1,2,2")
    assert code == EXIT_OK
    algebra = report["algebra"]
    labels = [b["label"] for b in algebra["basis"]]
    gram = algebra["gram"]
    assert len(gram) == len(labels) == 6
    assert gram[labels.index("h")][labels.index("h^2")] == "1/4"
    assert gram[0][labels.index("h^3")] == "1/4"
