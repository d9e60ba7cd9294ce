import argparse
import json

import pytest

from bangbang_rabi.cli import main, parse_grid, parse_int_grid
from bangbang_rabi.config import resolve_workers
from bangbang_rabi.utils.records import RunRecord, read_csv


def _run(tmp_path, *argv: str) -> RunRecord:
    main([*argv, "--out-dir", str(tmp_path), "--n-max", "20", "--threads", "1"])
    stem = argv[0].replace("-", "_")
    assert (tmp_path / "summary.txt").exists()
    return RunRecord.load(tmp_path / f"{stem}.json")


def test_parse_grid():
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert parse_grid("1,2.5") == [1.0, 2.5]
    assert len(parse_grid("0.1:3.0:0.1")) == 30
    assert parse_int_grid("20,40") == [20, 40]
    for bad in ["", "a,b", "1:0:1", "0:1:0.3", "1:2"]:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid(bad)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_int_grid("1.5")


def test_resolve_workers(monkeypatch):
    assert resolve_workers(3) == 3
    monkeypatch.setenv("BANGBANG_RABI_THREADS", "2")
    assert resolve_workers() == 2
    monkeypatch.setenv("BANGBANG_RABI_THREADS", "many")
    with pytest.raises(ValueError):
        resolve_workers()
    with pytest.raises(ValueError):
        resolve_workers(0)


def test_free_evolve_without_coupling(tmp_path, capsys):
    record = _run(tmp_path, "free-evolve", "--g", "0", "--t-max", "2")
    rows = read_csv(tmp_path / "free_evolve.csv")
    assert len(rows) == 201
    assert all(row["n_ph"] == 0.0 for row in rows)
    assert record.result["t0"] is None
    assert record.params["omega_a"] == 1.0
    assert record.n_max == 20
    assert "✅ free-evolve completed" in capsys.readouterr().out


def test_search_writes_sequence_and_trajectory(tmp_path):
    record = _run(tmp_path, "search", "--algo", "pga", "--T", "0.6", "--dt", "0.2")
    assert record.result["best_sequence"] == "111"
    assert record.protocol == "switch-off"
    assert record.search["beam_exponent"] == 12
    assert record.invariants_ok
    rows = read_csv(tmp_path / "search.csv")
    assert [row["bit"] for row in rows] == [-1.0, 1.0, 1.0, 1.0]
    assert rows[-1]["n_ph"] == record.result["best_photon_number"]


def test_identical_flags_give_identical_data(tmp_path):
    argv = ("search", "--algo", "greedy", "--T", "2", "--dt", "0.2")
    _run(tmp_path / "a", *argv)
    _run(tmp_path / "b", *argv)
    first = (tmp_path / "a" / "search.csv").read_bytes()
    assert first == (tmp_path / "b" / "search.csv").read_bytes()


def test_guard_violation_exits_with_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        _run(tmp_path, "search", "--algo", "exhaustive", "--T", "5", "--dt", "0.2")
    assert exc.value.code == 1
    assert "❌ search failed" in capsys.readouterr().err


def test_invalid_flags(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["search", "--algo", "annealing", "--out-dir", str(tmp_path)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["free-evolve", "--threads", "0", "--out-dir", str(tmp_path)])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["free-evolve", "--g", "-1", "--out-dir", str(tmp_path)])
    assert exc.value.code == 1


def test_constrained_without_on_pulses(tmp_path):
    record = _run(
        tmp_path, "constrained", "--n-g", "0", "--n-0-min", "1", "--n-0-max", "3", "--beam-exp", "4"
    )
    rows = read_csv(tmp_path / "constrained.csv")
    assert [row["n_0"] for row in rows] == [1.0, 2.0, 3.0]
    assert all(row["value_pga"] == 0.0 and row["value_greedy"] == 0.0 for row in rows)
    assert record.result["n_g"] == 0


def test_single_cell_sweep_matches_greedy_search(tmp_path):
    _run(tmp_path / "sweep", "sweep", "--omega-a-grid", "1.0", "--T-grid", "2")
    _run(tmp_path / "search", "search", "--algo", "greedy", "--T", "2", "--dt", "0.2")
    (cell,) = read_csv(tmp_path / "sweep" / "sweep.csv")
    trajectory = read_csv(tmp_path / "search" / "search.csv")
    assert cell == {"omega_a": 1.0, "T": 2.0, "n_ph": trajectory[-1]["n_ph"]}


def test_oracle_with_switched_off_sequence(tmp_path, capsys):
    record = _run(tmp_path, "oracle", "--sequence", "000000", "--dt", "0.2")
    assert record.result["max_abs_deviation"] == 0.0
    rows = read_csv(tmp_path / "oracle.csv")
    assert list(rows[0]) == ["t", "n_exact", "n_oracle"]
    assert len(rows) == 7
    assert "max |n_oracle - N_ph|" in capsys.readouterr().out


def test_oracle_with_schedule_file(tmp_path):
    schedule = tmp_path / "pulses.txt"
    schedule.write_text("# on, off, on\n0.5 0.1\n0.3 0\n0.5 0.1\n", encoding="utf-8")
    record = _run(tmp_path, "oracle", "--schedule-file", str(schedule), "--sample-dt", "0.1")
    assert record.result["segments"] == 3
    assert record.result["max_abs_deviation"] <= 0.02
    times = [row["t"] for row in read_csv(tmp_path / "oracle.csv")]
    assert times[-1] == pytest.approx(1.3)


def test_dt_convergence_with_equal_steps(tmp_path):
    record = _run(
        tmp_path,
        "dt-convergence",
        "--T-grid",
        "0.4,0.8",
        "--dt-fine",
        "0.2",
        "--dt-coarse",
        "0.2",
        "--beam-exp",
        "4",
    )
    assert record.result["max_gap"] == 0.0


def test_curve(tmp_path):
    _run(tmp_path, "curve", "--T-grid", "0.4:1.2:0.4", "--beam-exp", "6")
    rows = read_csv(tmp_path / "curve.csv")
    assert [row["T"] for row in rows] == [0.4, 0.8, 1.2]
    assert all(row["n_pga"] >= row["n_greedy"] - 1e-12 for row in rows)


def test_check_equivalence(tmp_path):
    record = _run(tmp_path, "check-equivalence", "--t-max", "2", "--n-max-values", "10,20")
    assert record.invariants_ok
    assert record.result["max_deviation"] <= 1e-8
    with open(tmp_path / "check_equivalence.json", encoding="utf-8") as f:
        assert json.load(f)["schema_version"] == "1.0"


def test_constrained_without_on_pulses_from_default_range(tmp_path):
    _run(tmp_path, "constrained", "--n-g", "0", "--n-0-max", "2", "--beam-exp", "4")
    rows = read_csv(tmp_path / "constrained.csv")
    assert [row["n_0"] for row in rows] == [1.0, 2.0]
    assert all(row["value_pga"] == 0.0 for row in rows)
