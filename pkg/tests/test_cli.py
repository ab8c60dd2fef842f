from __future__ import annotations

import hashlib
import json
import subprocess
import sys

import pytest

from fdplace.cli import main

from conftest import fixture_path as _fixture_path


def fixture_path(name: str) -> str:
    return str(_fixture_path(name))


EXPECTED_KEYS = [
    "command",
    "model_digest",
    "objective",
    "witness",
    "wall_time_ms",
    "algorithm",
]


def run_cli(capsys, *args: str) -> tuple[int, str, str]:
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *args: str) -> dict:
    code, out, _err = run_cli(capsys, *args)
    assert code == 0, out
    return json.loads(out)


def test_solve_single_report(capsys):
    model = fixture_path("two_rows.json")
    report = run_json(capsys, "solve-single", model, "--rho", "3")
    assert list(report) == EXPECTED_KEYS
    assert report["command"] == "solve-single"
    assert report["objective"] == [0, 1, 7, 7]
    assert len(report["witness"]["leaves"]) == 3
    assert report["algorithm"] == "fast"
    assert isinstance(report["wall_time_ms"], int)
    with open(model, "rb") as fh:
        assert report["model_digest"] == hashlib.sha256(fh.read()).hexdigest()


@pytest.mark.parametrize("algorithm", ["basic", "fast", "greedy"])
def test_solve_single_algorithms_agree(capsys, algorithm):
    model = fixture_path("two_rows.json")
    report = run_json(
        capsys, "solve-single", model, "--rho", "3", "--algorithm", algorithm
    )
    assert report["objective"] == [0, 1, 7, 7]
    assert report["algorithm"] == algorithm


def test_solve_single_objective_line_on_stderr(capsys):
    model = fixture_path("two_rows.json")
    code, out, err = run_cli(capsys, "solve-single", model, "--rho", "3")
    assert code == 0
    assert "objective <0,1,7,7>" in err
    assert "objective <" not in out


def test_eval_placement_fixtures(capsys):
    model = fixture_path("two_rows.json")
    clustered = run_json(
        capsys,
        "eval",
        model,
        "--placement",
        fixture_path("two_rows_clustered.json"),
        "--rho",
        "3",
    )
    assert clustered["objective"] == [2, 0, 3, 10]
    spread = run_json(
        capsys,
        "eval",
        model,
        "--placement",
        fixture_path("two_rows_spread.json"),
        "--rho",
        "3",
    )
    assert spread["objective"] == [0, 1, 7, 7]
    # rho defaults to the placement size, which is 3 here as well.
    default = run_json(
        capsys, "eval", model, "--placement", fixture_path("two_rows_spread.json")
    )
    assert default["objective"] == [0, 1, 7, 7]


def test_eval_blocks(capsys):
    report = run_json(
        capsys,
        "eval",
        fixture_path("shared_tree.json"),
        "--blocks",
        fixture_path("shared_tree_blocks.json"),
    )
    assert report["objective"] == [3, 4, 14, 9]
    assert len(report["witness"]["blocks"]) == 3


def test_eval_argument_combinations(capsys):
    model = fixture_path("two_rows.json")
    code, _out, err = run_cli(capsys, "eval", model)
    assert code == 2 and "error:" in err
    code, _out, err = run_cli(
        capsys,
        "eval",
        model,
        "--placement",
        fixture_path("two_rows_spread.json"),
        "--blocks",
        fixture_path("shared_tree_blocks.json"),
    )
    assert code == 2
    code, _out, err = run_cli(
        capsys,
        "eval",
        model,
        "--blocks",
        fixture_path("shared_tree_blocks.json"),
        "--rho",
        "3",
    )
    assert code == 2 and "--rho" in err


def test_check_reports_balance(capsys):
    model = fixture_path("two_rows.json")
    code, out, _err = run_cli(
        capsys, "check", model, "--placement", fixture_path("two_rows_spread.json")
    )
    assert code == 0
    doc = json.loads(out)
    assert doc == {"balanced": True, "violations": []}

    code, out, _err = run_cli(
        capsys, "check", model, "--placement", fixture_path("two_rows_clustered.json")
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["balanced"] is False
    assert doc["violations"]
    first = doc["violations"][0]
    assert set(first) == {
        "node",
        "light_child",
        "heavy_child",
        "light_count",
        "heavy_count",
    }


def test_solve_multi_cli(capsys):
    model = fixture_path("shared_tree.json")
    report = run_json(capsys, "solve-multi", model, "--sizes", "3,3,2")
    assert report["command"] == "solve-multi"
    assert report["algorithm"] == "dp"
    assert sorted(len(b) for b in report["witness"]["blocks"]) == [2, 3, 3]

    code, _out, err = run_cli(capsys, "solve-multi", model, "--sizes", "3,3,2", "--skew", "0")
    assert code == 4 and "skew" in err

    code, _out, _err = run_cli(capsys, "solve-multi", model, "--sizes", "a,b")
    assert code == 2

    code, _out, _err = run_cli(capsys, "solve-multi", model, "--sizes", "")
    assert code == 2


def test_infeasible_requests_exit_3(capsys):
    model = fixture_path("two_rows.json")
    code, _out, err = run_cli(capsys, "solve-single", model, "--rho", "100")
    assert code == 3 and "error:" in err
    code, _out, _err = run_cli(capsys, "solve-multi", model, "--sizes", "10")
    assert code == 3
    code, _out, _err = run_cli(capsys, "oracle-single", model, "--rho", "0")
    assert code == 3


def test_oracle_guard_exits_3(capsys, monkeypatch):
    model = fixture_path("two_rows.json")
    code, _out, err = run_cli(
        capsys, "oracle-single", model, "--rho", "3", "--guard", "1"
    )
    assert code == 3 and "error:" in err
    monkeypatch.setenv("FDPLACE_ORACLE_GUARD", "1")
    code, _out, _err = run_cli(capsys, "oracle-single", model, "--rho", "3")
    assert code == 3


def test_oracle_commands_match_solvers(capsys):
    model = fixture_path("two_rows.json")
    report = run_json(capsys, "oracle-single", model, "--rho", "3")
    assert report["objective"] == [0, 1, 7, 7]
    report = run_json(
        capsys, "oracle-multi", fixture_path("shared_tree.json"), "--sizes", "3,3,2"
    )
    solved = run_json(
        capsys, "solve-multi", fixture_path("shared_tree.json"), "--sizes", "3,3,2"
    )
    assert report["objective"] == solved["objective"]


def test_bad_model_file_exits_2(capsys, tmp_path):
    code, _out, err = run_cli(capsys, "solve-single", "/no/such/file.json", "--rho", "1")
    assert code == 2 and "error:" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _out, _err = run_cli(capsys, "solve-single", str(broken), "--rho", "1")
    assert code == 2


def test_gen_is_deterministic(capsys, tmp_path):
    code, first, _err = run_cli(capsys, "gen", "--leaves", "12", "--seed", "5")
    assert code == 0
    code, second, _err = run_cli(capsys, "gen", "--leaves", "12", "--seed", "5")
    assert code == 0
    assert first == second

    out_file = tmp_path / "model.json"
    code, piped, _err = run_cli(
        capsys, "gen", "--leaves", "12", "--seed", "5", "--out", str(out_file)
    )
    assert code == 0 and piped == ""
    assert out_file.read_text() == first

    report = run_json(capsys, "solve-single", str(out_file), "--rho", "4")
    assert report["objective"]


def test_gen_rejects_bad_parameters(capsys):
    code, _out, _err = run_cli(capsys, "gen", "--leaves", "0", "--seed", "1")
    assert code == 2
    code, _out, _err = run_cli(
        capsys, "gen", "--leaves", "2", "--seed", "1", "--roots", "5"
    )
    assert code == 2


def test_threads_flag(capsys):
    model = fixture_path("two_rows.json")
    code, _out, err = run_cli(
        capsys, "solve-single", model, "--rho", "3", "--threads", "2"
    )
    assert code == 0
    assert "single-threaded" in err
    code, _out, _err = run_cli(
        capsys, "solve-single", model, "--rho", "3", "--threads", "0"
    )
    assert code == 2


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "fdplace",
            "solve-single",
            fixture_path("two_rows.json"),
            "--rho",
            "3",
        ],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["objective"] == [0, 1, 7, 7]


def test_reports_are_stable_between_runs(capsys):
    model = fixture_path("two_rows.json")
    first = run_json(capsys, "solve-single", model, "--rho", "3")
    second = run_json(capsys, "solve-single", model, "--rho", "3")
    first.pop("wall_time_ms")
    second.pop("wall_time_ms")
    assert first == second
