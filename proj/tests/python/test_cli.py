"""End-to-end checks of the command-line binary, including config-file
precedence. Skipped unless LIFEEVAL_CLI points at the built executable."""

import json
import os
import subprocess

import pytest

CLI = os.environ.get("LIFEEVAL_CLI")
pytestmark = pytest.mark.skipif(CLI is None, reason="LIFEEVAL_CLI not set")


def data_dir():
    here = os.path.dirname(os.path.abspath(__file__))
    default = os.path.join(here, "..", "..", "data")
    return os.environ.get("LIFEEVAL_DATA_DIR", default)


def table_path():
    return os.path.join(data_dir(), "ssa_period_life_table_2022.csv")


def run_cli(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def test_help_lists_all_subcommands():
    result = run_cli("--help")
    assert result.returncode == 0
    for name in ("gen-questions", "run", "score", "report", "contamination",
                 "oracle"):
        assert name in result.stdout


def test_gen_questions_default_grid(tmp_path):
    out = tmp_path / "q.jsonl"
    result = run_cli("gen-questions", "--table", table_path(), "--out", str(out))
    assert result.returncode == 0, result.stderr
    lines = out.read_text().splitlines()
    assert len(lines) == 808
    assert json.loads(lines[0])["id"] == "lifeeval-male-a0-r1"


def test_config_file_overrides_flags(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"min_age_hi": 1, "radii": [5]}))
    out = tmp_path / "q.jsonl"
    result = run_cli(
        "--config", str(config),
        "gen-questions", "--table", table_path(), "--out", str(out),
        "--min-age-hi", "100",
    )
    assert result.returncode == 0, result.stderr
    # The config value (ages 0..1, radius 5 only) wins over the flag.
    assert len(out.read_text().splitlines()) == 4


def test_full_synthetic_pipeline(tmp_path):
    q = tmp_path / "q.jsonl"
    r = tmp_path / "r.jsonl"
    s = tmp_path / "s.jsonl"
    a = tmp_path / "a.json"
    runs = tmp_path / "runs"

    assert run_cli("gen-questions", "--table", table_path(), "--out", str(q),
                   "--min-age-hi", "20").returncode == 0
    assert run_cli("run", "--questions", str(q), "--table", table_path(),
                   "--agent", "calibrated-oracle", "--seed", "3",
                   "--out", str(r)).returncode == 0
    assert run_cli("score", "--questions", str(q), "--responses", str(r),
                   "--table", table_path(), "--out", str(s),
                   "--alignment-out", str(a)).returncode == 0
    assert run_cli("report", "--scored", str(s), "--alignment", str(a),
                   "--out", str(runs), "--run-id", "cli").returncode == 0

    summary = (runs / "cli" / "summary.md").read_text()
    assert "calibrated-oracle" in summary
    manifest = json.loads((runs / "cli" / "manifest.json").read_text())
    assert manifest["aligned_n"] == 2 * 21 * 4


def test_run_without_seed_fails(tmp_path):
    q = tmp_path / "q.jsonl"
    run_cli("gen-questions", "--table", table_path(), "--out", str(q),
            "--min-age-hi", "1")
    result = run_cli("run", "--questions", str(q), "--table", table_path(),
                     "--agent", "calibrated-oracle", "--out",
                     str(tmp_path / "r.jsonl"))
    assert result.returncode != 0
    assert "--seed" in result.stderr


def test_oracle_subcommand_reduced_scale():
    result = run_cli("oracle", "--table", table_path(), "--cases", "4",
                     "--samples", "50000", "--tolerance", "0.02")
    assert result.returncode == 0, result.stderr
    assert "4/4 cases" in result.stdout
