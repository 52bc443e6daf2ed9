"""Pure-Python closed-loop integrator (fallback backend).

One control evaluation per step with the command held constant across the
classical Runge-Kutta substeps (zero-order hold).  The compiled backend in
``_loop.pyx`` mirrors this routine statement for statement; keep the two in
sync.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import _columns as C
from .geometry import AttackerState, DefenderSpec, wrap_angle
from .guidance import GuidanceContext, GuidanceParams, guidance_step, saturation_rate

OUTCOME_INTERCEPTED = 1
OUTCOME_EZ_VIOLATION = 2
OUTCOME_TIMEOUT = 3
OUTCOME_INVALID_START = 4

ACCEL_CLAMP_SLACK = 1e-12


def _rk4_step(
    state: AttackerState,
    dt: float,
    command: float,
    speed: float,
    params: GuidanceParams,
) -> AttackerState:
    def deriv(heading: float, accel: float):
        return (
            speed * math.cos(heading),
            speed * math.sin(heading),
            accel / speed,
            saturation_rate(accel, command, params),
        )

    g0, a0 = state.heading, state.accel
    k1 = deriv(g0, a0)
    k2 = deriv(g0 + 0.5 * dt * k1[2], a0 + 0.5 * dt * k1[3])
    k3 = deriv(g0 + 0.5 * dt * k2[2], a0 + 0.5 * dt * k2[3])
    k4 = deriv(g0 + dt * k3[2], a0 + dt * k3[3])

    sixth = dt / 6.0
    x = state.x + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    y = state.y + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    heading = wrap_angle(g0 + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]))
    accel = a0 + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    # Numerical guard only; the dynamics themselves repel the bound.
    limit = params.accel_limit - ACCEL_CLAMP_SLACK
    if accel > limit:
        accel = limit
    elif accel < -limit:
        accel = -limit
    return AttackerState(x=x, y=y, heading=heading, accel=accel)


def run_closed_loop(
    x0: float,
    y0: float,
    heading0: float,
    accel0: float,
    speed: float,
    target: tuple[float, float],
    defenders: Sequence[DefenderSpec],
    params: GuidanceParams,
    dt: float,
    n_steps: int,
    capture_radius: float,
):
    """Integrate until an event fires; returns (rows, outcome, defender_idx).

    ``rows`` is a (k, n_columns) float array, one row per evaluated step
    including the terminal state.  ``defender_idx`` is -1 unless the outcome
    is a zone violation.
    """
    n_def = len(defenders)
    data = np.empty((n_steps + 1, C.n_columns(n_def)))
    flag_col = C.flag_column(n_def)

    state = AttackerState(x=x0, y=y0, heading=heading0, accel=accel0)
    ctx = GuidanceContext()
    outcome = OUTCOME_TIMEOUT
    hit_defender = -1

    rows = 0
    for k in range(n_steps + 1):
        out = guidance_step(state, target, defenders, speed, params, ctx, dt)
        row = data[k]
        row[C.COL_T] = k * dt
        row[C.COL_X] = state.x
        row[C.COL_Y] = state.y
        row[C.COL_HEADING] = state.heading
        row[C.COL_ACCEL] = state.accel
        row[C.COL_A_INTERCEPT] = out.intercept
        row[C.COL_A_SAFE] = out.safe
        row[C.COL_ALPHA] = out.alpha
        row[C.COL_A_DESIRED] = out.desired
        row[C.COL_A_DESIRED_RATE] = out.desired_rate
        row[C.COL_A_COMMANDED] = out.commanded
        row[C.COL_Z] = out.tracking_error
        row[C.COL_H] = out.aggregate
        row[C.COL_R_TARGET] = out.target_polar.r
        row[C.COL_SIGMA_TARGET] = out.target_polar.sigma
        for i, sv in enumerate(out.safety_values):
            cr, cs, cb = C.defender_columns(i)
            row[cr] = sv.polar.r
            row[cs] = sv.polar.sigma
            row[cb] = sv.margin
        row[flag_col] = 1.0 if out.degenerate else 0.0
        rows = k + 1

        if out.target_polar.r <= capture_radius:
            outcome = OUTCOME_INTERCEPTED
            break
        violated = -1
        for i, sv in enumerate(out.safety_values):
            if sv.polar.r - sv.rho <= 0.0:
                violated = i
                break
        if violated >= 0:
            outcome = OUTCOME_INVALID_START if k == 0 else OUTCOME_EZ_VIOLATION
            hit_defender = violated
            break
        if k == n_steps:
            outcome = OUTCOME_TIMEOUT
            break

        state = _rk4_step(state, dt, out.commanded, speed, params)

    return data[:rows].copy(), outcome, hit_defender
