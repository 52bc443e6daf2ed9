"""Serialization boundary: scenario files, trajectory CSV, summaries, plots.

Scenario files are versioned JSON documents (one dialect only) that map 1:1
onto :class:`~ezguide.simulate.Scenario`.  Omitted optional fields take the
reference-engagement defaults; unknown keys are rejected with the full dotted
path so typos never silently become defaults.  Trajectory logs go out as
RFC-4180 CSV with units in the header and full round-trip float precision.
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Optional, Sequence, Union

import numpy as np

from . import _columns as C
from .geometry import AttackerState, DefenderSpec
from .guidance import GuidanceParams
from .simulate import Scenario, SweepReport, TrajectoryLog, aim_at

SCENARIO_FORMAT_VERSION = 1
SUMMARY_FORMAT_VERSION = 1

#: Directory of scenario files bundled with the package.
BUNDLED_DIR = os.path.join(os.path.dirname(__file__), "scenarios")


class ScenarioError(ValueError):
    """Base class for scenario document problems."""


class ScenarioSyntaxError(ScenarioError):
    """Malformed document; carries source name, line, and column."""

    def __init__(self, source: str, line: int, column: int, message: str):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.source = source
        self.line = line
        self.column = column


class ScenarioValueError(ScenarioError):
    """Well-formed document violating a semantic invariant; names the key."""


# Default engagement parameters applied to omitted fields.
_DEF_RANGE_LIMIT = 1.5
_DEF_CAPTURE_RADIUS = 0.5
_DEF_SPEED_RATIO = 0.7
_DEFAULT_SPEED = 1.0

_PARAM_KEYS = (
    "safety_gain",
    "intercept_gain",
    "tracking_gain",
    "smoothing",
    "safety_margin",
    "switch_center",
    "switch_width",
    "switch_threshold",
    "accel_limit",
    "sat_exponent",
    "sat_leak",
    "switch_mode",
    "sign_layer",
    "denom_floor",
)

_TOP_KEYS = (
    "version",
    "attacker",
    "speed",
    "target",
    "defenders",
    "params",
    "dt",
    "t_max",
    "capture_radius",
    "seed",
)


def _reject_unknown(mapping: dict, allowed: Sequence[str], path: str) -> None:
    for key in mapping:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ScenarioValueError(f"unknown key '{where}'")


def _get_mapping(mapping: dict, key: str, path: str, required: bool = True):
    if key not in mapping:
        if required:
            raise ScenarioValueError(f"missing required key '{_join(path, key)}'")
        return None
    value = mapping[key]
    if not isinstance(value, dict):
        raise ScenarioValueError(f"'{_join(path, key)}' must be an object")
    return value


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _get_number(
    mapping: dict, key: str, path: str, default: Optional[float] = None
) -> float:
    if key not in mapping:
        if default is None:
            raise ScenarioValueError(f"missing required key '{_join(path, key)}'")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValueError(f"'{_join(path, key)}' must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioValueError(f"'{_join(path, key)}' must be finite")
    return value


def _get_int(mapping: dict, key: str, path: str, default: Optional[int] = None) -> int:
    if key not in mapping:
        if default is None:
            raise ScenarioValueError(f"missing required key '{_join(path, key)}'")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioValueError(f"'{_join(path, key)}' must be an integer")
    return value


def _parse_point(mapping: dict, path: str) -> tuple[float, float]:
    _reject_unknown(mapping, ("x", "y"), path)
    return (_get_number(mapping, "x", path), _get_number(mapping, "y", path))


def _parse_defender(mapping: dict, index: int) -> DefenderSpec:
    path = f"defenders[{index}]"
    allowed = ("id", "x", "y", "range_limit", "capture_radius", "speed_ratio")
    _reject_unknown(mapping, allowed, path)
    try:
        return DefenderSpec(
            origin=(_get_number(mapping, "x", path), _get_number(mapping, "y", path)),
            range_limit=_get_number(mapping, "range_limit", path, _DEF_RANGE_LIMIT),
            capture_radius=_get_number(
                mapping, "capture_radius", path, _DEF_CAPTURE_RADIUS
            ),
            speed_ratio=_get_number(mapping, "speed_ratio", path, _DEF_SPEED_RATIO),
            id=_get_int(mapping, "id", path, index + 1),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioValueError(f"{path}: {exc}") from exc


def _parse_params(mapping: Optional[dict]) -> GuidanceParams:
    params = GuidanceParams()
    if mapping is None:
        return params
    _reject_unknown(mapping, _PARAM_KEYS, "params")
    for key in _PARAM_KEYS:
        if key not in mapping:
            continue
        if key == "switch_mode":
            value = mapping[key]
            if not isinstance(value, str):
                raise ScenarioValueError("'params.switch_mode' must be a string")
        elif key == "sat_exponent":
            value = _get_int(mapping, key, "params")
        else:
            value = _get_number(mapping, key, "params")
        setattr(params, key, value)
    try:
        params.validate()
    except ValueError as exc:
        raise ScenarioValueError(f"params: {exc}") from exc
    return params


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse a scenario document into a fully validated Scenario.

    Raises :class:`ScenarioSyntaxError` for malformed JSON (with line and
    column) and :class:`ScenarioValueError` for unknown keys or values that
    violate a model invariant.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(source, exc.lineno, exc.colno, exc.msg) from exc
    if not isinstance(doc, dict):
        raise ScenarioValueError("top-level document must be an object")
    _reject_unknown(doc, _TOP_KEYS, "")

    version = _get_int(doc, "version", "")
    if version != SCENARIO_FORMAT_VERSION:
        raise ScenarioValueError(
            f"unsupported version {version} (this build reads version "
            f"{SCENARIO_FORMAT_VERSION})"
        )

    target = _parse_point(_get_mapping(doc, "target", ""), "target")

    att = _get_mapping(doc, "attacker", "")
    _reject_unknown(att, ("x", "y", "heading", "accel"), "attacker")
    x = _get_number(att, "x", "attacker")
    y = _get_number(att, "y", "attacker")
    # Default heading points straight at the target.
    heading = _get_number(att, "heading", "attacker", aim_at((x, y), target))
    accel = _get_number(att, "accel", "attacker", 0.0)

    raw_defs = doc.get("defenders", [])
    if not isinstance(raw_defs, list):
        raise ScenarioValueError("'defenders' must be an array")
    defenders = []
    for i, entry in enumerate(raw_defs):
        if not isinstance(entry, dict):
            raise ScenarioValueError(f"'defenders[{i}]' must be an object")
        defenders.append(_parse_defender(entry, i))

    scn = Scenario(
        attacker=AttackerState(x=x, y=y, heading=heading, accel=accel),
        speed=_get_number(doc, "speed", "", _DEFAULT_SPEED),
        target=target,
        defenders=tuple(defenders),
        params=_parse_params(_get_mapping(doc, "params", "", required=False)),
        dt=_get_number(doc, "dt", "", 1e-3),
        t_max=_get_number(doc, "t_max", "", 30.0),
        capture_radius=_get_number(doc, "capture_radius", "", 0.05),
        seed=_get_int(doc, "seed", "", 0),
    )
    try:
        scn.validate()
    except ValueError as exc:
        raise ScenarioValueError(str(exc)) from exc
    return scn


def scenario_to_dict(scn: Scenario) -> dict:
    """Explicit document form of a Scenario; every field is written out."""
    return {
        "version": SCENARIO_FORMAT_VERSION,
        "attacker": {
            "x": scn.attacker.x,
            "y": scn.attacker.y,
            "heading": scn.attacker.heading,
            "accel": scn.attacker.accel,
        },
        "speed": scn.speed,
        "target": {"x": scn.target[0], "y": scn.target[1]},
        "defenders": [
            {
                "id": d.id,
                "x": d.origin[0],
                "y": d.origin[1],
                "range_limit": d.range_limit,
                "capture_radius": d.capture_radius,
                "speed_ratio": d.speed_ratio,
            }
            for d in scn.defenders
        ],
        "params": {key: getattr(scn.params, key) for key in _PARAM_KEYS},
        "dt": scn.dt,
        "t_max": scn.t_max,
        "capture_radius": scn.capture_radius,
        "seed": scn.seed,
    }


def serialize_scenario(scn: Scenario) -> str:
    """Deterministic document text; ``parse_scenario`` inverts it exactly."""
    return json.dumps(scenario_to_dict(scn), indent=2) + "\n"


def load_scenario(path: Union[str, os.PathLike]) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read(), source=str(path))


def save_scenario(scn: Scenario, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_scenario(scn))


def bundled_scenario_path(name: str) -> str:
    """Absolute path of a bundled scenario ('paper_scenario_1' or ..._2)."""
    path = os.path.join(BUNDLED_DIR, f"{name}.json")
    if not os.path.exists(path):
        raise FileNotFoundError(f"no bundled scenario named '{name}'")
    return path


def load_bundled_scenario(name: str) -> Scenario:
    return load_scenario(bundled_scenario_path(name))


# ---------------------------------------------------------------------------
# Trajectory CSV

#: Fixed leading columns: (header name with units, column index in the log).
_CSV_FIXED = (
    ("t (s)", C.COL_T),
    ("x (m)", C.COL_X),
    ("y (m)", C.COL_Y),
    ("gamma (rad)", C.COL_HEADING),
    ("a_A (m/s^2)", C.COL_ACCEL),
    ("a_T (m/s^2)", C.COL_A_INTERCEPT),
    ("a_b (m/s^2)", C.COL_A_SAFE),
    ("alpha (1)", C.COL_ALPHA),
    ("a_d (m/s^2)", C.COL_A_DESIRED),
    ("a_c (m/s^2)", C.COL_A_COMMANDED),
    ("z (m/s^2)", C.COL_Z),
    ("h (m)", C.COL_H),
    ("r_AT (m)", C.COL_R_TARGET),
    ("sigma_AT (rad)", C.COL_SIGMA_TARGET),
)


def csv_header(n_defenders: int) -> list[str]:
    names = [name for name, _ in _CSV_FIXED]
    for i in range(n_defenders):
        k = i + 1
        names += [f"r_{k} (m)", f"sigma_{k} (rad)", f"b_{k} (m)"]
    names.append("degenerate (flag)")
    return names


def write_trajectory_csv(log: TrajectoryLog, destination) -> None:
    """Write one row per control step; floats carry full repr precision.

    On steps where the avoidance law was degenerate (denominator below the
    floor, fixed-magnitude fallback used) the a_b column is the sentinel
    ``nan`` and the trailing flag column is 1; the table stays rectangular.
    """
    if len(log.data) == 0:
        raise ValueError("empty trajectory log")
    if hasattr(destination, "write"):
        _write_csv(log, destination)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            _write_csv(log, fh)


def _write_csv(log: TrajectoryLog, fh) -> None:
    n = log.n_defenders
    flag_col = C.flag_column(n)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(csv_header(n))
    indices = [idx for _, idx in _CSV_FIXED]
    for i in range(n):
        indices.extend(C.defender_columns(i))
    for row in log.data:
        degenerate = row[flag_col] != 0.0
        out = []
        for idx in indices:
            value = row[idx]
            if degenerate and idx == C.COL_A_SAFE:
                value = math.nan
            out.append(repr(float(value)))
        out.append("1" if degenerate else "0")
        writer.writerow(out)


def read_trajectory_csv(source) -> tuple[list[str], np.ndarray]:
    """Inverse of ``write_trajectory_csv``: (header names, float table)."""
    if hasattr(source, "read"):
        return _read_csv(source)
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _read_csv(fh)


def _read_csv(fh) -> tuple[list[str], np.ndarray]:
    reader = csv.reader(fh)
    header = next(reader)
    rows = [[float(cell) for cell in row] for row in reader]
    return header, np.array(rows)


# ---------------------------------------------------------------------------
# Run summary and sweep report JSON


def summary_dict(log: TrajectoryLog) -> dict:
    """Stable run-summary schema for summary.json."""
    t = log.data[:, C.COL_T]
    acc = np.abs(log.data[:, C.COL_ACCEL])
    window = (t >= 0.5) & (t <= 3.0)
    min_margin = log.min_margin
    return {
        "version": SUMMARY_FORMAT_VERSION,
        "outcome": {
            "kind": log.outcome.kind,
            "time": log.outcome.time,
            "defender_id": log.outcome.defender_id,
        },
        "t_final": log.t_final,
        "steps": int(len(log.data)),
        "min_margin": None if math.isinf(min_margin) else min_margin,
        "max_accel": log.max_accel,
        "max_accel_0p5_to_3s": float(acc[window].max()) if window.any() else None,
        "final_target_range": float(log.data[-1, C.COL_R_TARGET]),
        "final_lead_angle": float(log.data[-1, C.COL_SIGMA_TARGET]),
    }


def write_summary_json(log: TrajectoryLog, destination) -> None:
    _write_json(summary_dict(log), destination)


def sweep_report_dict(report: SweepReport, n_bins: int = 20) -> dict:
    """Sweep report schema: rates, outcome counts, min-clearance histogram."""
    margins = [
        r.min_margin
        for r in report.valid_runs
        if math.isfinite(r.min_margin)
    ]
    if margins:
        counts, edges = np.histogram(margins, bins=n_bins)
        histogram = {"edges": [float(e) for e in edges], "counts": counts.tolist()}
    else:
        histogram = {"edges": [], "counts": []}
    return {
        "version": SUMMARY_FORMAT_VERSION,
        "seed": report.seed,
        "n_runs": len(report.runs),
        "n_valid": report.n_valid,
        "all_starts_invalid": report.n_valid == 0 and len(report.runs) > 0,
        "counts": {
            kind: report.count(kind)
            for kind in ("Intercepted", "EZViolation", "Timeout", "InvalidStart")
        },
        "success_rate": report.success_rate,
        "violation_rate": report.violation_rate,
        "min_margin_histogram": histogram,
        "runs": [
            {
                "index": r.index,
                "x0": r.x0,
                "y0": r.y0,
                "heading0": r.heading0,
                "outcome": r.outcome.kind,
                "t_final": r.outcome.time,
                "min_margin": r.min_margin if math.isfinite(r.min_margin) else None,
                "max_accel": r.max_accel,
            }
            for r in report.runs
        ],
    }


def write_sweep_report_json(report: SweepReport, destination) -> None:
    _write_json(sweep_report_dict(report), destination)


def _write_json(payload: dict, destination) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def emit_plots(log: TrajectoryLog, kind: str, destination) -> None:
    """Render one SVG plot kind; see :mod:`ezguide.plots`."""
    from . import plots

    plots.emit_plots(log, kind, destination)
