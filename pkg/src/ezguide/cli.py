"""Command-line surface: run one scenario, sweep many starts, self-check, plot.

Exit codes for ``run`` (and ``plot``) map the engagement outcome directly:
0 Intercepted, 2 EZViolation, 3 Timeout, 4 InvalidStart; 1 is reserved for
usage, file, or validation errors.  ``sweep`` exits 0 only when no valid
start ends in a zone violation.  ``check`` exits 0 only when every
numerical self-check passes.

The default output directory is ``.`` or the value of ``EZGUIDE_OUT_DIR``.
Given identical inputs, ``run`` writes byte-identical CSV, JSON, and SVG.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields as dataclass_fields

from . import checks, plots, scenario_io
from .simulate import (
    Scenario,
    monte_carlo_sweep,
    run_scenario,
    sample_ring_starts,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EZ_VIOLATION = 2
EXIT_TIMEOUT = 3
EXIT_INVALID_START = 4

_OUTCOME_EXIT = {
    "Intercepted": EXIT_OK,
    "EZViolation": EXIT_EZ_VIOLATION,
    "Timeout": EXIT_TIMEOUT,
    "InvalidStart": EXIT_INVALID_START,
}

ENV_OUT_DIR = "EZGUIDE_OUT_DIR"


class CliError(Exception):
    """User-facing error mapped to exit code 1."""


def _default_out_dir() -> str:
    return os.environ.get(ENV_OUT_DIR, ".")


def _load(path: str) -> Scenario:
    # Bundled scenarios may be named without a path or extension.
    if not os.path.exists(path) and os.sep not in path and not path.endswith(".json"):
        try:
            return scenario_io.load_bundled_scenario(path)
        except FileNotFoundError:
            pass
    try:
        return scenario_io.load_scenario(path)
    except FileNotFoundError as exc:
        raise CliError(f"scenario file not found: {path}") from exc
    except OSError as exc:
        raise CliError(f"cannot read scenario file {path}: {exc}") from exc
    except scenario_io.ScenarioError as exc:
        raise CliError(str(exc)) from exc


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def apply_override(scn: Scenario, spec: str) -> None:
    """Apply one ``dot.path=value`` override in place (validated later).

    Paths address Scenario fields (``dt=0.002``), nested guidance gains
    (``params.safety_gain=0.5``), the attacker pose (``attacker.heading=0``),
    and the target (``target.x=1.5``).
    """
    if "=" not in spec:
        raise CliError(f"override must look like path=value, got {spec!r}")
    path, raw = spec.split("=", 1)
    parts = path.strip().split(".")
    value = _coerce(raw.strip())

    if parts[0] == "target":
        if len(parts) != 2 or parts[1] not in ("x", "y"):
            raise CliError(f"unknown override path {path!r}")
        x, y = scn.target
        scn.target = (value, y) if parts[1] == "x" else (x, value)
        return
    obj = scn
    for part in parts[:-1]:
        if part not in ("params", "attacker"):
            raise CliError(f"unknown override path {path!r}")
        obj = getattr(scn, part)
    leaf = parts[-1]
    if leaf not in {f.name for f in dataclass_fields(obj)} or leaf in (
        "defenders",
        "params",
        "attacker",
        "target",
    ):
        raise CliError(f"unknown override path {path!r}")
    setattr(obj, leaf, value)


def _prepare_scenario(args) -> Scenario:
    scn = _load(args.scenario)
    for spec in args.set or []:
        apply_override(scn, spec)
    if getattr(args, "dt", None) is not None:
        scn.dt = args.dt
    if getattr(args, "t_max", None) is not None:
        scn.t_max = args.t_max
    try:
        scn.validate()
    except ValueError as exc:
        raise CliError(f"invalid scenario after overrides: {exc}") from exc
    return scn


def _ensure_out_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {path}: {exc}") from exc
    return path


def cmd_run(args) -> int:
    scn = _prepare_scenario(args)
    out = _ensure_out_dir(args.out)
    log = run_scenario(scn)
    scenario_io.write_trajectory_csv(log, os.path.join(out, "trajectory.csv"))
    scenario_io.write_summary_json(log, os.path.join(out, "summary.json"))
    if not args.no_plots:
        for kind in plots.PLOT_KINDS:
            scenario_io.emit_plots(log, kind, os.path.join(out, f"{kind}.svg"))
    print(
        f"{log.outcome.kind} at t={log.t_final:.3f} s "
        f"(min clearance {log.min_margin:.4f} m, peak |a_A| {log.max_accel:.4f})"
    )
    return _OUTCOME_EXIT[log.outcome.kind]


def cmd_sweep(args) -> int:
    scn = _prepare_scenario(args)
    out = _ensure_out_dir(args.out)
    starts = sample_ring_starts(scn, args.samples, args.r_min, args.r_max, args.seed)
    report = monte_carlo_sweep(scn, starts, jobs=args.jobs)
    report.seed = args.seed
    scenario_io.write_sweep_report_json(
        report, os.path.join(out, "sweep_report.json")
    )
    rate = report.success_rate
    print(
        f"{len(report.runs)} runs, {report.n_valid} valid starts: "
        f"{report.count('Intercepted')} intercepted, "
        f"{report.count('EZViolation')} zone violations, "
        f"{report.count('Timeout')} timeouts"
        + (f"; success rate {rate:.3f}" if rate is not None else "; no valid starts")
    )
    return EXIT_OK if report.count("EZViolation") == 0 else EXIT_EZ_VIOLATION


def cmd_check(args) -> int:
    results = checks.run_all_checks(trials=args.trials)
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_USAGE


def cmd_plot(args) -> int:
    scn = _prepare_scenario(args)
    out = _ensure_out_dir(args.out)
    log = run_scenario(scn)
    kinds = plots.PLOT_KINDS if args.kind == "all" else (args.kind,)
    for kind in kinds:
        path = os.path.join(out, f"{kind}.svg")
        scenario_io.emit_plots(log, kind, path)
        print(path)
    return _OUTCOME_EXIT[log.outcome.kind]


def _add_scenario_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="scenario file path or bundled name")
    parser.add_argument(
        "--set",
        action="append",
        metavar="PATH=VALUE",
        help="override a scenario field by dot path, e.g. params.safety_gain=0.5",
    )
    parser.add_argument("--dt", type=float, help="override the control step (s)")
    parser.add_argument("--t-max", type=float, help="override the horizon (s)")
    parser.add_argument(
        "--out", default=_default_out_dir(), help="output directory"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ezguide",
        description="Safe intercept guidance simulator amid engagement zones",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, write csv/json/svg")
    _add_scenario_args(p_run)
    p_run.add_argument(
        "--no-plots", action="store_true", help="skip SVG plot emission"
    )
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo sweep of random starts")
    _add_scenario_args(p_sweep)
    p_sweep.add_argument("--samples", type=int, default=100)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument(
        "--r-min", type=float, default=6.0, help="annulus inner radius (m)"
    )
    p_sweep.add_argument(
        "--r-max", type=float, default=9.0, help="annulus outer radius (m)"
    )
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.set_defaults(func=cmd_sweep)

    p_check = sub.add_parser("check", help="run numerical self-checks")
    p_check.add_argument("--trials", type=int, default=10_000)
    p_check.set_defaults(func=cmd_check)

    p_plot = sub.add_parser("plot", help="run a scenario and emit plots")
    _add_scenario_args(p_plot)
    p_plot.add_argument(
        "--kind",
        default="all",
        choices=("all",) + plots.PLOT_KINDS,
    )
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
