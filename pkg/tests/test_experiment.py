import csv
import io
import json

import jsonschema
import numpy as np
import pytest

from rkinterp.errors import ConfigurationError, ReportIOError
from rkinterp.experiment.cli import main
from rkinterp.experiment.config import resolve
from rkinterp.experiment.report import (ExperimentReport, Table, emit_report, format_complex, format_real,
                                        report_json, table_csv, validate_document)
from rkinterp.experiment.runners import VERDICT_NONE, VERDICT_SINGLE, VERDICT_TREND, run, trend_verdict

TWO_POINT = {
    "command": "gram",
    "space": {"kind": "HardyDisc"},
    "exponents": [2.0],
    "sequence": {"source": "points", "points": [[0.0], [0.8660254037844386]]},
}
SMALL_FRAME = {
    "command": "frame",
    "space": {"kind": "HardyDisc"},
    "exponents": [2.0, 4.0],
    "sequence": {"source": "random_separated", "count": 4},
    "optimizer": {"restarts": 2, "max_iters": 200, "grid_resolution": 128},
}


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_real_formatting():
    assert format_real(0.1) == "0.10000000000000001"
    assert float(format_real(np.pi)) == np.pi
    assert format_complex(1 - 2j) == "1,-2"


def test_resolve_fills_defaults_and_is_idempotent():
    cfg = resolve(TWO_POINT)
    assert cfg.optimizer.restarts == 32
    again = resolve(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()


@pytest.mark.parametrize("bad", [
    {"command": "nope"},
    dict(TWO_POINT, extra=1),
    dict(TWO_POINT, optimizer={"restarts": 0}),
    dict(TWO_POINT, sequence={"source": "points"}),
    dict(TWO_POINT, seed=-1),
    {"command": "babenko"},
    {"command": "babenko", "truncations": [10], "babenko": {"p": 4.0, "q": 3.0}},
    {"command": "babenko", "truncations": [20, 10]},
    {"command": "lift", "space": {"kind": "HardyDisc"}, "sequence": {"source": "points", "points": [[0.0]]}},
])
def test_invalid_configs(bad):
    with pytest.raises(ConfigurationError):
        resolve(bad)


def test_empty_table_is_valid_json():
    report = ExperimentReport("gram", resolve(TWO_POINT).to_dict(), [Table("summary", ["N"])])
    doc = json.loads(report_json(report))
    assert doc["tables"]["summary"]["rows"] == []


def test_schema_forbids_unknown_fields():
    doc = json.loads(report_json(ExperimentReport("gram", resolve(TWO_POINT).to_dict())))
    doc["surprise"] = 1
    with pytest.raises(jsonschema.ValidationError):
        validate_document(doc)


def test_gram_csv_cells(tmp_path):
    report = run(resolve(TWO_POINT))
    gram = [t for t in report.tables if t.name.startswith("gram")][0]
    rows = list(csv.reader(io.StringIO(table_csv(gram))))
    assert rows[0] == ["c0", "c1"]
    assert len(rows) == 3
    for row in rows[1:]:
        assert len(row) == 2
        for cell in row:
            re, im = cell.split(",")
            float(re), float(im)
    assert complex(*map(float, rows[1][1].split(","))) == pytest.approx(0.5)


def test_two_point_summary_values():
    report = run(resolve(TWO_POINT))
    row = dict(zip(report.table("summary").columns, report.table("summary").rows[0]))
    assert row["lambda_min"] == pytest.approx(0.5, abs=1e-14)
    assert row["lambda_max"] == pytest.approx(1.5, abs=1e-14)


def test_every_command_report_validates(tmp_path):
    for name in ("two_point_gram", "frame_p4", "dual_ball", "carleson_radial", "lift_bergman", "seqgen_lattice"):
        raw = json.loads(open(f"configs/{name}.json").read())
        raw.setdefault("optimizer", {}).update({"restarts": 1, "max_iters": 50}) if raw["command"] == "frame" else None
        validate_document(run(resolve(raw)).to_document())


def test_trend_verdicts():
    assert trend_verdict([{"lower_q": 1, "upper_q": 1}]) == VERDICT_SINGLE
    assert trend_verdict([{"lower_q": 1, "upper_q": 1}, {"lower_q": 0.4, "upper_q": 1.2}]) == VERDICT_TREND
    assert trend_verdict([{"lower_q": 1, "upper_q": 1}, {"lower_q": 0.6, "upper_q": 1.2}]) == VERDICT_NONE
    assert trend_verdict([{"lower_q": 1, "upper_q": 1}, {"lower_q": 0.4, "upper_q": 1.6}]) == VERDICT_NONE


def test_cli_dry_run_prints_config(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["gram", "--config", _write(tmp_path, TWO_POINT), "--out", str(out), "--dry-run"]) == 0
    echoed = json.loads(capsys.readouterr().out)
    assert echoed["output"]["dir"] == str(out)
    assert not out.exists()


def test_cli_config_errors(tmp_path):
    assert main(["gram", "--config", _write(tmp_path, dict(TWO_POINT, extra=1))]) == 2
    assert main(["frame", "--config", _write(tmp_path, TWO_POINT)]) == 2
    assert main(["gram", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["gram", "--config", str(bad)]) == 2


def test_cli_degeneracy_exit(tmp_path):
    cfg = {"command": "dual", "space": {"kind": "HardyDisc"},
           "sequence": {"source": "points", "points": [[0.5], [0.5000000000001]]}}
    assert main(["dual", "--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 3


def test_cli_calibration_exit(tmp_path, capsys):
    cfg = {"command": "babenko", "truncations": [10], "babenko": {"margin": 0.2}}
    assert main(["babenko", "--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 4
    cfg = {"command": "babenko", "truncations": [10], "babenko": {"density_bracket": [0.001, 0.002],
                                                                  "max_bisections": 3}}
    assert main(["babenko", "--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 4
    assert "angular_density=" in capsys.readouterr().err


def test_cli_io_exit_removes_partial_files(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["gram", "--config", _write(tmp_path, TWO_POINT), "--out", str(blocker / "sub")]) == 5
    report = run(resolve(TWO_POINT))
    out = tmp_path / "partial"
    out.mkdir()
    (out / "gram_timings.json").mkdir()  # the last file cannot be written
    with pytest.raises(ReportIOError):
        emit_report(report, out, "csv")
    assert sorted(p.name for p in out.iterdir()) == ["gram_timings.json"]


def test_cli_csv_and_json_outputs(tmp_path):
    assert main(["gram", "--config", _write(tmp_path, TWO_POINT), "--out", str(tmp_path / "j")]) == 0
    assert (tmp_path / "j" / "gram.json").exists()
    assert main(["gram", "--config", _write(tmp_path, TWO_POINT), "--out", str(tmp_path / "c"),
                 "--format", "csv"]) == 0
    meta = json.loads((tmp_path / "c" / "gram_meta.json").read_text())
    for entry in meta["tables"].values():
        assert (tmp_path / "c" / entry["file"]).exists()


def test_rerun_from_echoed_config_is_byte_identical(tmp_path):
    first = tmp_path / "a"
    assert main(["frame", "--config", _write(tmp_path, SMALL_FRAME), "--out", str(first), "--seed", "7"]) == 0
    text = (first / "frame.json").read_text()
    echoed = json.loads(text)["config"]
    assert echoed["seed"] == 7
    second = tmp_path / "b"
    echoed["output"]["dir"] = str(second)
    assert main(["frame", "--config", _write(tmp_path, echoed, "echo.json")]) == 0
    assert (second / "frame.json").read_text().replace(str(second), str(first)) == text


def test_babenko_ball_target_reproduces_bergman_disc():
    base = {"command": "babenko", "truncations": [6, 12], "optimizer": {"max_iters": 60},
            "quadrature": {"angular": 8}}
    tables = {}
    for target in ("bergman_disc", "hardy_ball"):
        report = run(resolve(dict(base, babenko={"target": target})))
        t = report.table("babenko")
        tables[target] = [dict(zip(t.columns, r)) for r in t.rows]
    for a, b in zip(tables["bergman_disc"], tables["hardy_ball"]):
        for key in ("lower_q", "upper_q", "lower_p", "upper_p", "lambda_min", "lambda_max"):
            assert a[key] == pytest.approx(b[key], rel=1e-9)


def test_babenko_single_rung_is_inconclusive():
    cfg = {"command": "babenko", "truncations": [10], "optimizer": {"max_iters": 40},
           "quadrature": {"angular": 8, "torus_angular": 4}, "babenko": {"target": "hardy_bidisc"}}
    report = run(resolve(cfg))
    assert len(report.table("babenko").rows) == 1
    assert report.metadata["verdict"] == VERDICT_SINGLE
    validate_document(report.to_document())
