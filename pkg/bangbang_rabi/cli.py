"""Command-line front end: one subcommand per experiment.

Every command writes ``<command>.csv`` (data), ``<command>.json`` (RunRecord) and
``summary.txt`` into ``--out-dir``.
"""

import argparse
import logging
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from bangbang_rabi.config import (
    DEFAULT_BEAM_EXPONENT,
    DEFAULT_DT,
    DEFAULT_G,
    DEFAULT_N_MAX,
    DEFAULT_OMEGA_A,
    DEFAULT_OMEGA_C,
    DEFAULT_RK4_STEP,
    DEFAULT_SAMPLE_DT,
    DEFAULT_TOTAL_TIME,
    EQUIVALENCE_TOL,
    resolve_workers,
)
from bangbang_rabi.control import (
    Algorithm,
    SearchConfig,
    constrained_scan,
    dt_convergence,
    photon_curve,
    run_search,
    sweep_omega_a,
)
from bangbang_rabi.errors import MonotoneTrajectoryError
from bangbang_rabi.oracle import Schedule, compare_with_exact
from bangbang_rabi.physics import (
    ModelParams,
    ProtocolKind,
    analyze_trajectory,
    free_trajectory,
    full_vs_effective_check,
)
from bangbang_rabi.sequence import ControlSequence
from bangbang_rabi.utils import RunRecord, load_schedule, render_summary, write_csv

logger = logging.getLogger(__name__)

DEFAULT_OMEGA_A_GRID = "0.1:3.0:0.1"
DEFAULT_SWEEP_T_GRID = "1:15:1"
DEFAULT_CURVE_T_GRID = "1:15:1"
DEFAULT_CONVERGENCE_T_GRID = "2:14:2"


@dataclass
class CommandOutput:
    """Data rows and headline numbers produced by one subcommand."""

    fieldnames: list[str]
    rows: list[dict[str, Any]]
    result: dict[str, Any]
    headline: str
    search: dict[str, Any] | None = None
    protocol: str | None = None
    invariants_ok: bool = True


def parse_grid(text: str) -> list[float]:
    """Parse ``a,b,c`` or the inclusive range ``start:stop:step``."""
    message = f"invalid grid {text!r}; use 'a,b,c' or 'start:stop:step'"
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            count = int(round((stop - start) / step)) if step > 0 else -1
            if count < 0 or abs(start + count * step - stop) > 1e-9:
                raise argparse.ArgumentTypeError(message)
            return [round(float(v), 12) for v in np.linspace(start, stop, count + 1)]
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(message)
    if not values:
        raise argparse.ArgumentTypeError(message)
    return values


def parse_int_grid(text: str) -> list[int]:
    values = parse_grid(text)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in values]


def _search_config(
    args: argparse.Namespace, params: ModelParams, workers: int, **overrides: Any
) -> SearchConfig:
    settings: dict[str, Any] = {
        "total_time": getattr(args, "total_time", DEFAULT_TOTAL_TIME),
        "dt": getattr(args, "dt", DEFAULT_DT),
        "beam_exponent": args.beam_exp,
        "protocol": ProtocolKind(args.protocol),
    }
    settings.update(overrides)
    return SearchConfig(params=params, workers=workers, **settings)


def cmd_free_evolve(args: argparse.Namespace, params: ModelParams, workers: int) -> CommandOutput:
    traj = free_trajectory(params, args.t_max, args.sample_dt)
    result: dict[str, Any] = {
        "max_n_ph": float(traj.photon_numbers.max()),
        "t_max": args.t_max,
        "sample_dt": args.sample_dt,
    }
    try:
        analysis = analyze_trajectory(traj)
        result.update(
            t0=analysis.t0,
            first_max=analysis.first_max,
            global_max_time=analysis.global_max_time,
        )
    except MonotoneTrajectoryError as e:
        logger.info("no first maximum: %s", e)
        result["t0"] = None

    return CommandOutput(
        fieldnames=["t", "n_ph"],
        rows=[{"t": t, "n_ph": n} for t, n in zip(traj.times, traj.photon_numbers)],
        result=result,
        headline=f"max N_ph = {result['max_n_ph']:.6f}, t0 = {result['t0']}",
    )


def cmd_search(args: argparse.Namespace, params: ModelParams, workers: int) -> CommandOutput:
    cfg = _search_config(args, params, workers)
    found = run_search(cfg, args.algo)
    traj = found.trajectory
    bits = traj.control_bits if traj.control_bits is not None else np.full(len(traj), -1)
    return CommandOutput(
        fieldnames=["t", "n_ph", "bit"],
        rows=[
            {"t": t, "n_ph": n, "bit": int(b)}
            for t, n, b in zip(traj.times, traj.photon_numbers, bits)
        ],
        result=found.to_dict(),
        headline=f"{found.algorithm}: N_ph(T) = {found.best_photon_number:.6f} "
        f"with {found.best_sequence}",
        search=cfg.to_dict(),
        protocol=cfg.protocol.value,
    )


def cmd_constrained(args: argparse.Namespace, params: ModelParams, workers: int) -> CommandOutput:
    if args.n_0_max < args.n_0_min:
        raise ValueError(f"--n-0-max ({args.n_0_max}) is below --n-0-min ({args.n_0_min})")
    cfg = _search_config(args, params, workers)
    n_0_values = list(range(args.n_0_min, args.n_0_max + 1))
    rows = constrained_scan(cfg, args.n_g, n_0_values)
    best = max(rows, key=lambda r: r.value_pga)
    return CommandOutput(
        fieldnames=["n_0", "value_pga", "value_greedy"],
        rows=[
            {"n_0": r.n_0, "value_pga": r.value_pga, "value_greedy": r.value_greedy}
            for r in rows
        ],
        result={
            "n_g": args.n_g,
            "n_0_min": args.n_0_min,
            "n_0_max": args.n_0_max,
            "best_value_pga": best.value_pga,
            "best_n_0": best.n_0,
        },
        headline=f"n_g={args.n_g}: best PGA value {best.value_pga:.6f} at n_0={best.n_0}",
        search=cfg.to_dict(),
        protocol=cfg.protocol.value,
    )


def cmd_sweep(args: argparse.Namespace, params: ModelParams, workers: int) -> CommandOutput:
    cfg = _search_config(args, params, workers, total_time=args.t_grid[0])
    grid = sweep_omega_a(cfg, args.omega_a_grid, args.t_grid)
    i, j = np.unravel_index(int(np.argmax(grid.values)), grid.values.shape)
    return CommandOutput(
        fieldnames=["omega_a", "T", "n_ph"],
        rows=grid.rows(),
        result={
            "cells": int(grid.values.size),
            "max_n_ph": float(grid.values[i, j]),
            "max_omega_a": float(grid.omega_a[i]),
            "max_T": float(grid.total_times[j]),
        },
        headline=f"{grid.values.size} cells, max N_ph = {grid.values[i, j]:.6f} "
        f"at omega_a={grid.omega_a[i]:g}, T={grid.total_times[j]:g}",
        search=cfg.to_dict(),
        protocol=cfg.protocol.value,
    )


def cmd_oracle(args: argparse.Namespace, params: ModelParams, workers: int) -> CommandOutput:
    if args.schedule_file:
        schedule = load_schedule(args.schedule_file)
        source = str(args.schedule_file)
        sample_dt = args.sample_dt or DEFAULT_SAMPLE_DT
    elif args.sequence:
        seq = ControlSequence.from_string(args.sequence, args.dt)
        schedule = Schedule.from_sequence(seq, params.g, args.protocol)
        source = f"sequence {seq} ({args.protocol})"
        sample_dt = args.sample_dt or args.dt
    else:
        schedule = Schedule(((args.t_max, params.g),))
        source = f"free evolution to t={args.t_max}"
        sample_dt = args.sample_dt or DEFAULT_SAMPLE_DT

    comparison = compare_with_exact(params, schedule, args.step, sample_dt)
    deviation = comparison.max_abs_deviation
    return CommandOutput(
        fieldnames=["t", "n_exact", "n_oracle"],
        rows=comparison.rows(),
        result={
            "source": source,
            "segments": len(schedule.segments),
            "step": args.step,
            "sample_dt": sample_dt,
            "max_abs_deviation": deviation,
        },
        headline=f"max |n_oracle - N_ph| = {deviation:.3e}",
        protocol=args.protocol if args.sequence else None,
    )


def cmd_dt_convergence(
    args: argparse.Namespace, params: ModelParams, workers: int
) -> CommandOutput:
    cfg = _search_config(args, params, workers, total_time=args.t_grid[0], dt=args.dt_fine)
    curves = dt_convergence(cfg, args.t_grid, args.dt_fine, args.dt_coarse)
    return CommandOutput(
        fieldnames=["T", "n_fine", "n_coarse", "gap"],
        rows=curves.rows(),
        result={"dt_fine": args.dt_fine, "dt_coarse": args.dt_coarse, "max_gap": curves.max_gap},
        headline=f"max gap between dt={args.dt_fine:g} and dt={args.dt_coarse:g}: "
        f"{curves.max_gap:.3e}",
        search=cfg.to_dict(),
        protocol=cfg.protocol.value,
    )


def cmd_curve(args: argparse.Namespace, params: ModelParams, workers: int) -> CommandOutput:
    cfg = _search_config(args, params, workers, total_time=args.t_grid[0])
    curve = photon_curve(cfg, args.t_grid)
    return CommandOutput(
        fieldnames=["T", "n_pga", "n_greedy"],
        rows=curve.rows(),
        result={
            "points": int(curve.total_times.size),
            "final_pga": float(curve.pga[-1]),
            "final_greedy": float(curve.greedy[-1]),
        },
        headline=f"T={curve.total_times[-1]:g}: PGA {curve.pga[-1]:.6f}, "
        f"greedy {curve.greedy[-1]:.6f}",
        search=cfg.to_dict(),
        protocol=cfg.protocol.value,
    )


def cmd_check_equivalence(
    args: argparse.Namespace, params: ModelParams, workers: int
) -> CommandOutput:
    n_max_values = args.n_max_values or [params.n_max]
    rows = []
    for n_max in n_max_values:
        deviation = full_vs_effective_check(
            params.with_changes(n_max=n_max), args.t_max, args.sample_dt
        )
        rows.append({"n_max": n_max, "max_deviation": deviation})
    worst = max(row["max_deviation"] for row in rows)
    return CommandOutput(
        fieldnames=["n_max", "max_deviation"],
        rows=rows,
        result={"max_deviation": worst, "tolerance": EQUIVALENCE_TOL, "t_max": args.t_max},
        headline=f"max |<a^dag a> - <b^dag b>| = {worst:.3e} (tolerance {EQUIVALENCE_TOL:g})",
        invariants_ok=worst <= EQUIVALENCE_TOL,
    )


Handler = Callable[[argparse.Namespace, ModelParams, int], CommandOutput]


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    model = parent.add_argument_group("model")
    model.add_argument(
        "--omega-c", type=float, default=DEFAULT_OMEGA_C, help="Cavity frequency (default: 1.0)"
    )
    model.add_argument(
        "--omega-a",
        type=float,
        default=DEFAULT_OMEGA_A,
        help="Atom frequency in units of omega_c (default: 1.0, resonance)",
    )
    model.add_argument(
        "--g", type=float, default=DEFAULT_G, help="Coupling strength (default: 0.1)"
    )
    model.add_argument(
        "--n-max", type=int, default=DEFAULT_N_MAX, help="Fock truncation (default: 60)"
    )

    run = parent.add_argument_group("run")
    run.add_argument(
        "--out-dir", type=str, default="results", help="Output folder (default: results)"
    )
    run.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Worker threads (default: $BANGBANG_RABI_THREADS, else all cores)",
    )
    run.add_argument(
        "--seed", type=int, default=None, help="Accepted and ignored; every run is deterministic"
    )
    run.add_argument("--verbose", action="store_true", help="Log progress at INFO level")
    return parent


def _add_protocol(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--protocol",
        choices=[kind.value for kind in ProtocolKind],
        default=ProtocolKind.SWITCH_OFF.value,
        help="What a 0-bit does to the coupling (default: switch-off)",
    )


def _add_search(parser: argparse.ArgumentParser, with_times: bool = True) -> None:
    if with_times:
        parser.add_argument(
            "--T",
            dest="total_time",
            type=float,
            default=DEFAULT_TOTAL_TIME,
            help="Total control time (default: 15)",
        )
        parser.add_argument(
            "--dt", type=float, default=DEFAULT_DT, help="Pulse duration (default: 0.2)"
        )
    parser.add_argument(
        "--beam-exp",
        type=int,
        default=DEFAULT_BEAM_EXPONENT,
        help="PGA keeps 2^N candidates per step (default: 12)",
    )
    _add_protocol(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bangbang-rabi",
        description="Bang-bang control of photon generation in the quantum Rabi model",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  bangbang-rabi free-evolve --g 0.1 --t-max 15 --sample-dt 0.01
  bangbang-rabi search --algo pga --T 15 --dt 0.2 --beam-exp 12
  bangbang-rabi constrained --n-g 10 --n-0-min 0 --n-0-max 40
  bangbang-rabi sweep --protocol sign-flip --omega-a-grid 0.5,1,5 --T-grid 5,10,15
  bangbang-rabi oracle --sequence 110011 --dt 0.2
  bangbang-rabi dt-convergence --T-grid 2:14:2
        """,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parent()

    def add(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    free = add("free-evolve", cmd_free_evolve, "Photon number under constant coupling")
    free.add_argument("--t-max", type=float, default=DEFAULT_TOTAL_TIME)
    free.add_argument("--sample-dt", type=float, default=DEFAULT_SAMPLE_DT)

    search = add("search", cmd_search, "Optimal control sequence for one T")
    search.add_argument(
        "--algo", choices=[a.value for a in Algorithm], default=Algorithm.PGA.value
    )
    _add_search(search)

    constrained = add(
        "constrained", cmd_constrained, "Best value with fixed numbers of on and off pulses"
    )
    constrained.add_argument("--n-g", type=int, required=True, help="Number of 1-bits")
    constrained.add_argument("--n-0-min", type=int, default=0)
    constrained.add_argument("--n-0-max", type=int, default=40)
    _add_search(constrained)

    sweep = add("sweep", cmd_sweep, "Greedy N_ph over an (omega_a, T) grid")
    sweep.add_argument("--omega-a-grid", type=parse_grid, default=DEFAULT_OMEGA_A_GRID)
    sweep.add_argument(
        "--T-grid", dest="t_grid", type=parse_grid, default=DEFAULT_SWEEP_T_GRID
    )
    sweep.add_argument("--dt", type=float, default=DEFAULT_DT)
    _add_search(sweep, with_times=False)

    oracle = add("oracle", cmd_oracle, "Cumulant equations against exact diagonalization")
    source = oracle.add_mutually_exclusive_group()
    source.add_argument("--schedule-file", type=Path, help="Lines of '<duration> <g_value>'")
    source.add_argument("--sequence", type=str, help="Bit string, e.g. 110011")
    oracle.add_argument("--dt", type=float, default=DEFAULT_DT, help="Pulse duration of --sequence")
    oracle.add_argument(
        "--t-max", type=float, default=DEFAULT_TOTAL_TIME, help="Free evolution length"
    )
    oracle.add_argument("--step", type=float, default=DEFAULT_RK4_STEP, help="RK4 step")
    oracle.add_argument("--sample-dt", type=float, default=None)
    _add_protocol(oracle)

    convergence = add(
        "dt-convergence", cmd_dt_convergence, "PGA curves at two pulse durations"
    )
    convergence.add_argument(
        "--T-grid", dest="t_grid", type=parse_grid, default=DEFAULT_CONVERGENCE_T_GRID
    )
    convergence.add_argument("--dt-fine", type=float, default=0.1)
    convergence.add_argument("--dt-coarse", type=float, default=0.2)
    _add_search(convergence, with_times=False)

    curve = add("curve", cmd_curve, "Maximum N_ph(T) by PGA and by greedy")
    curve.add_argument(
        "--T-grid", dest="t_grid", type=parse_grid, default=DEFAULT_CURVE_T_GRID
    )
    curve.add_argument("--dt", type=float, default=DEFAULT_DT)
    _add_search(curve, with_times=False)

    equivalence = add(
        "check-equivalence", cmd_check_equivalence, "Full Rabi model against the effective model"
    )
    equivalence.add_argument("--t-max", type=float, default=DEFAULT_TOTAL_TIME)
    equivalence.add_argument("--sample-dt", type=float, default=DEFAULT_SAMPLE_DT)
    equivalence.add_argument(
        "--n-max-values", type=parse_int_grid, default=None, help="e.g. 20,40,60"
    )
    return parser


def _write_outputs(out_dir: Path, output: CommandOutput, record: RunRecord) -> list[Path]:
    stem = record.command.replace("-", "_")
    csv_path = write_csv(out_dir / f"{stem}.csv", output.fieldnames, output.rows)
    json_path = record.save(out_dir / f"{stem}.json")
    summary_path = out_dir / "summary.txt"
    summary_path.write_text(render_summary(record), encoding="utf-8")
    return [csv_path, json_path, summary_path]


def main(argv: Sequence[str] | None = None) -> None:
    """CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.seed is not None:
        logger.info("--seed %d ignored: all algorithms are deterministic", args.seed)

    command = args.command
    try:
        print(f"🚀 Running {command}...")
        started = time.perf_counter()
        params = ModelParams(
            omega_c=args.omega_c, omega_a=args.omega_a, g=args.g, n_max=args.n_max
        )
        workers = resolve_workers(args.threads)
        output: CommandOutput = args.handler(args, params, workers)
        record = RunRecord(
            command=command,
            argv=list(sys.argv[1:] if argv is None else argv),
            params=params.to_dict(),
            search=output.search,
            protocol=output.protocol,
            result=output.result,
            n_max=params.n_max,
            wall_clock_seconds=time.perf_counter() - started,
            invariants_ok=output.invariants_ok,
        )
        paths = _write_outputs(Path(args.out_dir), output, record)
    except Exception as e:
        print(f"❌ {command} failed: {e}", file=sys.stderr)
        sys.exit(1)

    if not output.invariants_ok:
        print(f"❌ {command}: invariant check failed: {output.headline}", file=sys.stderr)
        sys.exit(1)

    print(f"\n✅ {command} completed in {record.wall_clock_seconds:.2f}s")
    print(f"📈 {output.headline}")
    for path in paths:
        print(f"📁 {path}")


if __name__ == "__main__":
    main()
