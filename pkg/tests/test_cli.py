"""Command-line interface: exit codes, reports, CSV sweeps."""

import csv
import subprocess
import sys

import pytest
from click.testing import CliRunner

from countsearch.cli import CSV_HEADER, cli

FULL_SQUARE = "3\n1 2 3\n2 3 1\n3 1 2\n"
HOLED_SQUARE = "3\n1 0 3\n0 3 1\n3 1 0\n"
UNSAT_SQUARE = "2\n0 0\n1 1\n"  # repeated value in the bottom row


@pytest.fixture
def runner():
    return CliRunner()


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_full_square_is_sat_with_zero_backtracks(runner, tmp_path):
    path = _write(tmp_path, "full.qwh", FULL_SQUARE)
    result = runner.invoke(cli, ["solve", path])
    assert result.exit_code == 0
    assert "status:     sat" in result.output
    assert "backtracks: 0" in result.output


def test_solve_unsat_exit_code(runner, tmp_path):
    path = _write(tmp_path, "bad.qwh", UNSAT_SQUARE)
    result = runner.invoke(cli, ["solve", path])
    assert result.exit_code == 1
    assert "status:     unsat" in result.output


def test_solve_zero_timeout_exit_code(runner, tmp_path):
    path = _write(tmp_path, "holed.qwh", HOLED_SQUARE)
    result = runner.invoke(cli, ["solve", path, "--timeout", "0"])
    assert result.exit_code == 2
    assert "status:     timeout" in result.output


def test_solve_every_traversal(runner, tmp_path):
    path = _write(tmp_path, "holed.qwh", HOLED_SQUARE)
    for traversal in ("dfs", "restart", "lds"):
        result = runner.invoke(cli, ["solve", path, "--traversal", traversal])
        assert result.exit_code == 0, result.output


def test_usage_error_exit_code_is_three(tmp_path):
    path = _write(tmp_path, "full.qwh", FULL_SQUARE)
    proc = subprocess.run(
        [sys.executable, "-m", "countsearch.cli",
         "solve", path, "--heuristic", "bogus"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 3


def test_densities_dump_with_exact(runner, tmp_path):
    path = _write(tmp_path, "holed.qwh", HOLED_SQUARE)
    result = runner.invoke(cli, ["densities", path, "--exact"])
    assert result.exit_code == 0
    assert "alldifferent" in result.output
    assert "exact count:" in result.output


def test_densities_unsat_instance(runner, tmp_path):
    path = _write(tmp_path, "bad.qwh", UNSAT_SQUARE)
    result = runner.invoke(cli, ["densities", path])
    assert result.exit_code == 1
    assert "unsatisfiable" in result.output


def _run_bench(runner, tmp_path, out_name):
    out = str(tmp_path / out_name)
    result = runner.invoke(
        cli,
        ["bench", str(tmp_path / "instances"),
         "--heuristic", "maxSD", "--heuristic", "dom",
         "--seeds", "0,1", "--timeout", "30", "-o", out],
    )
    assert result.exit_code == 0, result.output
    with open(out, newline="") as fh:
        return list(csv.reader(fh))


def test_bench_sweep_schema_and_determinism(runner, tmp_path):
    inst_dir = tmp_path / "instances"
    inst_dir.mkdir()
    (inst_dir / "a.qwh").write_text(HOLED_SQUARE)
    (inst_dir / "b.qwh").write_text(FULL_SQUARE)
    rows1 = _run_bench(runner, tmp_path, "run1.csv")
    rows2 = _run_bench(runner, tmp_path, "run2.csv")
    assert rows1[0] == CSV_HEADER
    # 2 instances x 2 heuristics x 2 seeds
    assert len(rows1) == 1 + 8
    time_col = CSV_HEADER.index("time_ms")

    def strip(rows):
        return [
            [v for i, v in enumerate(row) if i != time_col] for row in rows
        ]

    assert strip(rows1) == strip(rows2)
    for row in rows1[1:]:
        assert row[CSV_HEADER.index("status")] == "sat"


def test_bench_empty_dir_is_usage_error(runner, tmp_path):
    empty = tmp_path / "none"
    empty.mkdir()
    result = runner.invoke(cli, ["bench", str(empty)])
    assert result.exit_code != 0


def test_generate_writes_instances(runner, tmp_path):
    out_dir = str(tmp_path / "gen")
    result = runner.invoke(
        cli,
        ["generate", "qwh", out_dir, "--count", "3", "--seed", "2",
         "-p", "order=4", "-p", "holes=0.3"],
    )
    assert result.exit_code == 0, result.output
    paths = result.output.split()
    assert len(paths) == 3
    # generated files are loadable and solvable
    solve = CliRunner().invoke(cli, ["solve", paths[0]])
    assert solve.exit_code == 0


def test_generate_bad_param_is_usage_error(runner, tmp_path):
    result = runner.invoke(
        cli, ["generate", "qwh", str(tmp_path / "g"), "-p", "order"]
    )
    assert result.exit_code != 0
