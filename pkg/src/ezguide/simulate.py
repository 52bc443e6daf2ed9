"""Scenario description, closed-loop runs, and Monte-Carlo sweeps.

The per-step arithmetic lives in a backend: a compiled extension
(``ezguide._loop``) when available, otherwise the pure-Python twin
(``ezguide._loop_py``).  Set ``EZGUIDE_PURE_PYTHON=1`` to force the
fallback.  Both produce the same record layout and agree numerically.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _columns as C
from . import _loop_py
from .geometry import AttackerState, DefenderSpec
from .guidance import GuidanceParams

try:  # compiled core; optional
    from . import _loop as _loop_ext
except ImportError:  # pragma: no cover - depends on build environment
    _loop_ext = None

HAVE_COMPILED_BACKEND = _loop_ext is not None


def active_backend() -> str:
    """Name of the backend ``run_scenario`` will use: 'compiled' or 'python'."""
    if HAVE_COMPILED_BACKEND and os.environ.get("EZGUIDE_PURE_PYTHON") != "1":
        return "compiled"
    return "python"


_OUTCOME_KINDS = {
    _loop_py.OUTCOME_INTERCEPTED: "Intercepted",
    _loop_py.OUTCOME_EZ_VIOLATION: "EZViolation",
    _loop_py.OUTCOME_TIMEOUT: "Timeout",
    _loop_py.OUTCOME_INVALID_START: "InvalidStart",
}


@dataclass(frozen=True)
class Outcome:
    kind: str  # Intercepted | EZViolation | Timeout | InvalidStart
    time: float
    defender_id: Optional[int] = None

    @property
    def intercepted(self) -> bool:
        return self.kind == "Intercepted"


@dataclass
class Scenario:
    """Full engagement description; everything a run needs."""

    attacker: AttackerState
    speed: float
    target: tuple[float, float]
    defenders: tuple[DefenderSpec, ...]
    params: GuidanceParams = field(default_factory=GuidanceParams)
    dt: float = 1e-3
    t_max: float = 30.0
    capture_radius: float = 0.05
    seed: int = 0

    def validate(self) -> None:
        if not self.speed > 0.0:
            raise ValueError(f"speed must be > 0, got {self.speed}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_max > self.dt:
            raise ValueError("t_max must exceed dt")
        if not self.capture_radius > 0.0:
            raise ValueError("capture_radius must be > 0")
        self.params.validate()


@dataclass
class TrajectoryLog:
    """Uniformly sampled record of one run, one row per control step."""

    data: np.ndarray  # (rows, n_columns(n_defenders))
    outcome: Outcome
    scenario: Scenario

    @property
    def n_defenders(self) -> int:
        return len(self.scenario.defenders)

    @property
    def t(self) -> np.ndarray:
        return self.data[:, C.COL_T]

    def column(self, index: int) -> np.ndarray:
        return self.data[:, index]

    def defender_margins(self) -> np.ndarray:
        """(rows, n) array of per-defender clearances b_i."""
        cols = [C.defender_columns(i)[2] for i in range(self.n_defenders)]
        return self.data[:, cols]

    @property
    def min_margin(self) -> float:
        """Smallest clearance to any zone over the whole run (inf if none)."""
        if self.n_defenders == 0:
            return math.inf
        return float(self.defender_margins().min())

    @property
    def max_accel(self) -> float:
        return float(np.abs(self.data[:, C.COL_ACCEL]).max())

    @property
    def t_final(self) -> float:
        return float(self.data[-1, C.COL_T])


def _pack_params(p: GuidanceParams) -> np.ndarray:
    return np.array(
        [
            p.safety_gain,
            p.intercept_gain,
            p.tracking_gain,
            p.smoothing,
            p.safety_margin,
            p.switch_center,
            p.switch_width,
            p.switch_threshold,
            p.accel_limit,
            float(p.sat_exponent),
            p.sat_leak,
            0.0 if p.switch_mode == "smooth" else 1.0,
            p.sign_layer,
            p.denom_floor,
        ]
    )


def _pack_defenders(defenders: Sequence[DefenderSpec]) -> np.ndarray:
    arr = np.empty((len(defenders), 5))
    for i, d in enumerate(defenders):
        arr[i] = (d.origin[0], d.origin[1], d.range_limit, d.capture_radius, d.speed_ratio)
    return arr


def run_scenario(scn: Scenario) -> TrajectoryLog:
    """Integrate the closed loop until interception, violation, or timeout."""
    scn.validate()
    n_steps = int(round(scn.t_max / scn.dt))
    a = scn.attacker
    if active_backend() == "compiled":
        data, code, hit = _loop_ext.run_closed_loop(
            a.x,
            a.y,
            a.heading,
            a.accel,
            scn.speed,
            scn.target[0],
            scn.target[1],
            _pack_defenders(scn.defenders),
            _pack_params(scn.params),
            scn.dt,
            n_steps,
            scn.capture_radius,
        )
    else:
        data, code, hit = _loop_py.run_closed_loop(
            a.x,
            a.y,
            a.heading,
            a.accel,
            scn.speed,
            scn.target,
            scn.defenders,
            scn.params,
            scn.dt,
            n_steps,
            scn.capture_radius,
        )
    outcome = Outcome(
        kind=_OUTCOME_KINDS[code],
        time=float(data[-1, C.COL_T]),
        defender_id=scn.defenders[hit].id if hit >= 0 else None,
    )
    return TrajectoryLog(data=data, outcome=outcome, scenario=scn)


def aim_at(position: tuple[float, float], target: tuple[float, float]) -> float:
    """Heading that points from ``position`` straight at ``target``."""
    return math.atan2(target[1] - position[1], target[0] - position[0])


@dataclass(frozen=True)
class SweepRun:
    index: int
    x0: float
    y0: float
    heading0: float
    outcome: Outcome
    min_margin: float
    max_accel: float


@dataclass
class SweepReport:
    runs: list[SweepRun]
    seed: int

    @property
    def valid_runs(self) -> list[SweepRun]:
        return [r for r in self.runs if r.outcome.kind != "InvalidStart"]

    @property
    def n_valid(self) -> int:
        return len(self.valid_runs)

    def count(self, kind: str) -> int:
        return sum(1 for r in self.runs if r.outcome.kind == kind)

    @property
    def success_rate(self) -> Optional[float]:
        """Interception rate over valid starts; None if every start was invalid."""
        if self.n_valid == 0:
            return None
        return self.count("Intercepted") / self.n_valid

    @property
    def violation_rate(self) -> Optional[float]:
        if self.n_valid == 0:
            return None
        return self.count("EZViolation") / self.n_valid


def sample_ring_starts(
    base: Scenario, n_samples: int, r_min: float, r_max: float, seed: int
) -> list[AttackerState]:
    """Random starts on an annulus around the target, aimed at the target."""
    rng = np.random.default_rng(seed)
    starts = []
    for _ in range(n_samples):
        radius = rng.uniform(r_min, r_max)
        angle = rng.uniform(-math.pi, math.pi)
        x = base.target[0] + radius * math.cos(angle)
        y = base.target[1] + radius * math.sin(angle)
        starts.append(
            AttackerState(x=x, y=y, heading=aim_at((x, y), base.target), accel=0.0)
        )
    return starts


def _sweep_one(args) -> SweepRun:
    index, scn = args
    log = run_scenario(scn)
    return SweepRun(
        index=index,
        x0=scn.attacker.x,
        y0=scn.attacker.y,
        heading0=scn.attacker.heading,
        outcome=log.outcome,
        min_margin=log.min_margin,
        max_accel=log.max_accel,
    )


def monte_carlo_sweep(
    base: Scenario,
    starts: Sequence[AttackerState],
    jobs: int = 1,
) -> SweepReport:
    """Run the base scenario from each start; deterministic given the starts.

    Per-run failures are recorded in the report rather than raised.  Results
    are keyed by run index, so parallel execution is order-independent.
    """
    tasks = [(i, replace(base, attacker=s)) for i, s in enumerate(starts)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_sweep_one, tasks))
    else:
        runs = [_sweep_one(t) for t in tasks]
    runs.sort(key=lambda r: r.index)
    return SweepReport(runs=runs, seed=base.seed)
