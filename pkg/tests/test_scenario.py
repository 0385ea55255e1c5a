import json
from fractions import Fraction
from pathlib import Path

import pytest

from hahnci.cli import main
from hahnci.hahn import FieldConfig
from hahnci.pseudo import PseudoSequence, check_pseudo_convergent
from hahnci.scenario import (ScenarioError, generate_planted, load_scenario, mask_timing, parse_series,
                             render_structured, render_text, run_scenario)

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = sorted((ROOT / "scenarios").glob("*.json"))


def small(tasks, **extra):
    doc = {"schema": "hahnci.scenario/1", "name": "t", "field": {"p": 3, "q": 3},
           "sequences": {"g": {"kind": "geometric", "window": 6}}, "tasks": tasks}
    doc.update(extra)
    return doc


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_committed_scenarios_match_goldens(path, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", str(path), "--mask-timing", "-o", str(out)]) == 0
    golden = ROOT / "tests" / "golden" / f"{path.stem}.report.json"
    assert out.read_text() == golden.read_text()
    assert main(["verify", str(golden)]) == 0
    assert "evidence reproduced" in capsys.readouterr().err


def test_verify_detects_tampering(tmp_path):
    golden = json.loads((ROOT / "tests" / "golden" / "geometric-F2.report.json").read_text())
    golden["tasks"][0]["status"] = "failed"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(golden))
    assert main(["verify", str(p)]) == 1


def test_exit_codes(tmp_path, capsys):
    bad_json = tmp_path / "broken.json"
    bad_json.write_text('{"schema": "hahnci.scenario/1",\n  "field": }')
    assert main(["run", str(bad_json)]) == 2
    err = capsys.readouterr().err
    assert f"{bad_json}:2:" in err

    failing = tmp_path / "fail.json"
    towers = {"G": {"kind": "explicit", "levels": [{"seq": "g"}]}}
    failing.write_text(json.dumps(small([{"id": "x", "op": "fraction_var", "tower": "G", "j": 5}], towers=towers)))
    assert main(["run", str(failing)]) == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps(small([{"id": "x", "op": "fraction_var", "tower": "nope", "j": 0}])))
    assert main(["run", str(unknown)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_horizon_past_window_is_a_task_failure(capsys):
    path = ROOT / "scenarios" / "rank2-F4.json"
    assert main(["run", str(path), "--tasks", "thr-1d", "--horizon", "40", "--report", "text"]) == 1
    assert "BeyondWindow" in capsys.readouterr().out


def test_field_validation_names_the_field():
    with pytest.raises(ScenarioError) as ei:
        load_scenario(small([], field={"p": 4, "q": 4}))
    assert "field.p" in str(ei.value)


def test_empty_task_list():
    rep = run_scenario(load_scenario(small([])))
    assert rep["summary"] == {"tasks": 0, "ok": 0, "failed": 0}
    assert "summary 0/0 ok" in render_text(rep)


def test_task_filter_and_expect_error():
    doc = small([
        {"id": "conv", "op": "check_pseudo_convergent", "seq": "g"},
        {"id": "miss", "op": "check_pseudo_convergent", "seq": "g", "expect_error": "WindowTooShort"},
    ])
    rep = run_scenario(load_scenario(doc))
    assert [t["status"] for t in rep["tasks"]] == ["ok", "failed"]
    assert rep["tasks"][1]["error"]["type"] == "MissingExpectedError"
    only = run_scenario(load_scenario(doc), ["conv"])
    assert [t["id"] for t in only["tasks"]] == ["conv"]


def test_overrides_and_determinism():
    doc = small([{"id": "conv", "op": "check_pseudo_convergent", "seq": "g"}], seed=3)
    a = load_scenario(doc, seed=9)
    assert a.seed == 9
    r1 = render_structured(mask_timing(run_scenario(a)))
    r2 = render_structured(mask_timing(run_scenario(load_scenario(doc, seed=9))))
    assert r1 == r2
    assert json.loads(r1)["timing"]["total_ms"] is None


def test_generate_planted_window_too_short():
    with pytest.raises(ScenarioError):
        generate_planted({"p": 2, "window": 2}, 0)


@pytest.mark.parametrize("seed", range(5))
def test_generate_artin_schreier_profile_bounded(seed):
    out = generate_planted({"p": 3, "window": 7, "ladder": "artin-schreier"}, seed)
    cfg = FieldConfig(3, 3)
    window = [parse_series(cfg, w) for w in out["window"]]
    chk = check_pseudo_convergent(PseudoSequence(tuple(window)))
    assert chk.ok and out["classification"] == "algebraic" and out["degree"] == 3
    # exponents m - g / Q^k accumulate at m <= 2, so the profile stays below 2
    assert all(g < 2 for g, in (map(Fraction, p) for p in out["profile"]))
    assert [list(map(str, g)) for g in chk.profile] == out["profile"]


def test_generate_integer_ladder_is_fundamental():
    out = generate_planted({"p": 2, "window": 6, "ladder": "integer"}, 1)
    assert out["classification"] == "fundamental" and "witness" not in out
    assert out["profile"][:3] == [["1"], ["2"], ["3"]]
