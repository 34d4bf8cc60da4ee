import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from biaxhelm.cli import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, main

BASE = ["--alpha", "0.3", "--beta", "0.35", "--lambda", "0.5"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema():
    return json.loads(resources.files("biaxhelm").joinpath("schemas/report.schema.json").read_text())


def test_eval_grid_rows(capsys):
    code, out, _ = run(capsys, "eval", *BASE, "--x0", "1,1,1", "--grid", "0.8:1.2:3,0.8:1.2:3,1.3:1.5:3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    assert len(rows) == 27
    assert {r["representation"] for r in rows} <= {"direct", "regularized", "integral"}
    # round-trip precision
    assert float(rows[0]["value"]) == float(repr(float(rows[0]["value"])))


def test_eval_on_axis_is_config_error(capsys):
    code, _, err = run(capsys, "eval", *BASE, "--x0", "1,1,1", "--point", "0,1,1.2")
    assert code == EXIT_CONFIG
    assert "x1 > 0, x2 > 0" in err


def test_eval_a2_at_origin(capsys):
    code, out, _ = run(capsys, "eval", "--a2", "0.9,0.3,0.4,0.6,0.8", "--point", "0,0,0")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    assert float(rows[0]["value"]) == 1.0


def test_allow_partial_adds_status(capsys):
    code, out, _ = run(capsys, "eval", *BASE, "--x0", "1,1,1", "--point", "0,1,1.2", "--point", "1,1,1.3",
                       "--allow-partial")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    assert rows[0]["status"].startswith("DomainError")
    assert rows[1]["status"] == "ok"


def test_table_profile(capsys):
    code, out, _ = run(capsys, "table", *BASE, "--dim", "4", "--x0", "1,1,1,1", "--direction", "0,0,1,1",
                       "--radii", "1e-4:1e-1:4")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    comp = [float(r["compensated"]) for r in rows]
    assert len(rows) == 4
    assert comp[0] == pytest.approx(comp[1], rel=1e-3)


def test_table_zero_direction(capsys):
    code, _, err = run(capsys, "table", *BASE, "--x0", "1,1,1", "--direction", "0,0,0")
    assert code == EXIT_CONFIG
    assert "direction" in err


def test_table_second_kernel_near_axis(capsys):
    code, out, _ = run(capsys, "table", *BASE, "--kernel", "2", "--x0", "0.05,1,1", "--direction", "1,0,0",
                       "--radii", "1e-4,1e-3,1e-2", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert all(r["value"] is not None and r["value"] > 0 for r in data["rows"])


def test_bad_flags_exit_one(capsys):
    assert run(capsys, "eval", "--format", "xml")[0] == EXIT_CONFIG
    assert run(capsys, "eval", *BASE)[0] == EXIT_CONFIG


def test_config_file_wins_with_warning(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 0.2, "x0": [1, 1, 1], "point": [[1.2, 0.9, 1.1]], "format": "json"}))
    code, out, err = run(capsys, "eval", "--alpha", "0.3", "--config", str(cfg))
    assert code == EXIT_OK
    assert "overridden" in err
    assert json.loads(out)["config_echo"]["alpha"] == 0.2


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"colour": 1}))
    assert run(capsys, "eval", "--config", str(cfg))[0] == EXIT_CONFIG


def test_output_directory_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("BIAXHELM_OUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "eval", "--a2", "0.9,0.3,0.4,0.6,0.8", "--point", "0.1,0.1,0.1")
    assert code == EXIT_OK and out == ""
    assert (tmp_path / "eval.csv").exists()


def test_verify_report_validates_and_is_deterministic(capsys):
    args = ["verify", "--alpha", "0.2", "--beta", "0.35", "--lambda", "0", "--suite", "operator",
            "--samples", "1", "--seed", "3"]
    (c1, out1, _), (c2, out2, _) = run(capsys, *args), run(capsys, *args)
    assert (c1, c2) == (EXIT_OK, EXIT_OK)
    assert out1 == out2
    report = json.loads(out1)
    jsonschema.validate(report, schema())
    assert report["pass"] is True


def test_verify_singularity_reports_slope(capsys):
    code, out, _ = run(capsys, "verify", "--alpha", "0.1", "--beta", "0.4", "--lambda", "0.5", "--dim", "4",
                       "--suite", "singularity", "--samples", "1")
    report = json.loads(out)
    jsonschema.validate(report, schema())
    slopes = [c["slope"] for c in report["suites"][0]["checks"]]
    assert code == EXIT_OK
    assert slopes == pytest.approx([-2.0] * 4, abs=0.02)


def test_verify_failure_exit_code(capsys):
    # q1 and q4 hit the positive-integer pole of A2 at alpha = beta = 1/4, p = 3, lambda != 0
    code, out, _ = run(capsys, "verify", "--alpha", "0.25", "--beta", "0.25", "--lambda", "1",
                       "--suite", "boundary", "--samples", "1")
    report = json.loads(out)
    jsonschema.validate(report, schema())
    assert code == EXIT_VERIFY
    assert any("PoleError" in c.get("error", "") for c in report["suites"][0]["checks"])
