"""Column layout of the per-step trajectory record.

Shared by both closed-loop backends and by the CSV writer so the layouts
can never drift apart.
"""

from __future__ import annotations

COL_T = 0
COL_X = 1
COL_Y = 2
COL_HEADING = 3
COL_ACCEL = 4
COL_A_INTERCEPT = 5
COL_A_SAFE = 6
COL_ALPHA = 7
COL_A_DESIRED = 8
COL_A_DESIRED_RATE = 9
COL_A_COMMANDED = 10
COL_Z = 11
COL_H = 12
COL_R_TARGET = 13
COL_SIGMA_TARGET = 14
N_FIXED = 15  # per-defender (r, sigma, b) triples follow, then the flag

PER_DEFENDER = 3


def n_columns(n_defenders: int) -> int:
    return N_FIXED + PER_DEFENDER * n_defenders + 1


def flag_column(n_defenders: int) -> int:
    return N_FIXED + PER_DEFENDER * n_defenders


def defender_columns(i: int) -> tuple[int, int, int]:
    """(range, lead angle, clearance) column indices of defender i."""
    base = N_FIXED + PER_DEFENDER * i
    return base, base + 1, base + 2
