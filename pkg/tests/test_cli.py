import csv
import io
import json

import pytest
from click.testing import CliRunner

from app.cli import cli
from app.exceptions.base import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, EXIT_VERIFICATION_FAILED
from app.schemas.construction import ConstructionSpec
from app.services.average import AverageService
from app.services.construction import ConstructionService
from app.services.diagnostics import DiagnosticsService


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_construct_defaults(runner):
    result = runner.invoke(cli, ["construct"])
    assert result.exit_code == 0, result.stderr
    summary = json.loads(result.stdout)
    assert summary["config"]["variant"] == "thm13"
    assert summary["config"]["b"] == 3.0
    assert summary["admissibility_bound"] == 2.0
    assert summary["beta_sum"] == pytest.approx(0.5, rel=1e-12)


def test_construct_rejects_inadmissible_b(runner):
    result = runner.invoke(cli, ["construct", "--b", "1.5"])
    assert result.exit_code == EXIT_CONFIG_ERROR
    assert "2(1-p)/p" in result.stderr
    assert result.stdout == ""


def test_construct_thm14_table(runner):
    result = runner.invoke(cli, ["construct", "--variant", "thm14", "--format", "table"])
    assert result.exit_code == 0, result.stderr
    assert "beta_sum" in result.stdout
    json_result = runner.invoke(cli, ["construct", "--variant", "thm14"])
    assert json.loads(json_result.stdout)["beta_sum"] == pytest.approx(0.5, rel=1e-12)


def test_custom_variant_from_flags(runner):
    result = runner.invoke(cli, [
        "construct", "--p", "1", "--variant", "custom",
        "--amplitude", '{"kind": "power", "q_exponent": 1}',
        "--weights", '{"kind": "geometric", "ratio": 0.5}',
    ])
    assert result.exit_code == 0, result.stderr
    config = json.loads(result.stdout)["config"]
    assert config["amplitude"]["q_exponent"] == 1.0
    assert config["weights"]["kind"] == "geometric"


def test_bad_rule_json(runner):
    result = runner.invoke(cli, ["construct", "--variant", "custom", "--amplitude", "{oops"])
    assert result.exit_code == EXIT_CONFIG_ERROR
    assert "--amplitude" in result.stderr


def test_invalid_exponent(runner):
    result = runner.invoke(cli, ["construct", "--p", "1.5"])
    assert result.exit_code == EXIT_CONFIG_ERROR
    assert result.stderr.startswith("ERROR: p")


def test_blowup_thm15(runner, tmp_path):
    out = tmp_path / "blowup.csv"
    result = runner.invoke(cli, ["blowup", "--variant", "thm15", "--q", "4", "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    rows = read_csv(out.read_text(encoding="utf-8"))
    assert rows[0] == ["q", "s", "t", "norm", "predicted"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4"]
    assert float(rows[-1][3]) == pytest.approx(2.0, rel=1e-9)
    assert float(rows[-1][4]) == pytest.approx(2.0, rel=1e-12)


def test_artifacts_are_byte_identical_across_runs(runner, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = runner.invoke(cli, ["blowup", "--variant", "thm13", "--q", "10", "--out", str(out)])
        assert result.exit_code == 0, result.stderr
    assert first.read_bytes() == second.read_bytes()


def test_blowup_beyond_cap(runner):
    result = runner.invoke(cli, ["blowup", "--q", "30", "--q-cap", "20"])
    assert result.exit_code == EXIT_CONFIG_ERROR
    assert "q_cap=20" in result.stderr


def test_degenerate_scan(runner):
    result = runner.invoke(cli, ["scan", "--variant", "thm14", "--s-range", "0.5", "0.5",
                                 "--t-range", "0.25", "0.25", "--grid", "1"])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert len(lines) == 2
    assert lines[0] == "s,t,norm"
    assert lines[1].startswith("0.5,0.25,")


def test_scan_warns_about_the_corner(runner):
    result = runner.invoke(cli, ["scan", "--variant", "thm15", "--s-range", "0.5", "1",
                                 "--t-range", "0.5", "1", "--grid", "2"])
    assert result.exit_code == 0, result.stderr
    assert len(result.stdout.splitlines()) == 4
    assert "WARNING: skipping cell (1, 1)" in result.stderr


def test_riemann(runner):
    result = runner.invoke(cli, ["riemann", "--variant", "thm14", "--mesh-from", "4", "--mesh-exp", "6"])
    assert result.exit_code == 0, result.stderr
    rows = read_csv(result.stdout)
    assert rows[0] == ["mesh_exponent", "mesh", "cells", "norm"]
    assert [r[2] for r in rows[1:]] == ["16", "32", "64"]
    expected = AverageService(ConstructionService(ConstructionSpec(variant="thm14"))).riemann_rows([6])
    assert float(rows[-1][3]) == expected[0].norm


def test_verify_passes(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--variant", "thm14", "--q", "12", "--trials", "200",
                                 "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    assert "thm14: BOUNDED_NOT_SEPARATELY" in result.stderr
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["label"] == "BOUNDED_NOT_SEPARATELY"
    assert report["proof_inequalities"]["trials"] == 200
    assert report["proof_inequalities"]["passed"] is True


def test_verify_exit_code_on_failure(runner, monkeypatch):
    monkeypatch.setattr(DiagnosticsService, "failures", staticmethod(lambda report: ["forced mismatch"]))
    result = runner.invoke(cli, ["verify", "--variant", "thm14", "--q", "5", "--trials", "10"])
    assert result.exit_code == EXIT_VERIFICATION_FAILED
    assert "forced mismatch" in result.stderr


def test_config_file_overrides_flags(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"variant": "thm14", "q_cap": 30}), encoding="utf-8")
    result = runner.invoke(cli, ["construct", "--variant", "thm15", "--config", str(config)])
    assert result.exit_code == 0, result.stderr
    summary = json.loads(result.stdout)
    assert summary["config"]["variant"] == "thm14"
    assert summary["config"]["q_cap"] == 30


def test_missing_config_file(runner, tmp_path):
    result = runner.invoke(cli, ["construct", "--config", str(tmp_path / "nope.json")])
    assert result.exit_code == EXIT_CONFIG_ERROR
    assert "Invalid configuration" in result.stderr


def test_config_file_must_hold_an_object(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text("[1, 2]", encoding="utf-8")
    result = runner.invoke(cli, ["construct", "--config", str(config)])
    assert result.exit_code == EXIT_CONFIG_ERROR


def test_unwritable_output(runner, tmp_path):
    result = runner.invoke(cli, ["construct", "--out", str(tmp_path)])
    assert result.exit_code == EXIT_IO_ERROR
    assert "Could not write artifact" in result.stderr


def test_lipschitz(runner):
    result = runner.invoke(cli, ["lipschitz", "--variant", "thm15", "--grid", "5", "--aligned-q", "9"])
    assert result.exit_code == 0, result.stderr
    estimate = json.loads(result.stdout)
    assert estimate["same_block_quotient"] == pytest.approx(3.0, rel=1e-9)


def test_window(runner):
    result = runner.invoke(cli, [
        "window", "--p", "1", "--variant", "custom",
        "--amplitude", '{"kind": "power", "q_exponent": 1}',
        "--weights", '{"kind": "geometric", "ratio": 0.5}',
        "--m-from", "2", "--m-to", "4", "--q-to", "12",
    ])
    assert result.exit_code == 0, result.stderr
    rows = read_csv(result.stdout)
    assert rows[0] == ["m", "lo", "sup_norm"]
    assert [float(r[2]) for r in rows[1:]] == pytest.approx([1 / 3, 1 / 4, 1 / 5], rel=1e-9)


def test_modulus(runner):
    result = runner.invoke(cli, ["modulus", "--p", "0.5", "--q", "2", "--resolution", "0.125"])
    assert result.exit_code == 0, result.stderr
    header, row = result.stdout.splitlines()
    assert header.split() == ["q", "p", "C_q", "oracle"]
    q, p, exact, oracle = row.split()
    assert float(exact) == pytest.approx(2.0)
    assert float(oracle) == pytest.approx(2.0, rel=1e-9)


def test_scan_csv_is_byte_identical_across_runs(runner, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = runner.invoke(cli, ["scan", "--variant", "thm13", "--s-range", "0.9", "1",
                                     "--t-range", "0.9", "1", "--grid", "6", "--snap", "--out", str(out)])
        assert result.exit_code == 0, result.stderr
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_text(encoding="utf-8").splitlines()) > 36
