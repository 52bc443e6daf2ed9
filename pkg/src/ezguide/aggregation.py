"""Soft-minimum aggregation of per-defender clearances.

Many defenders produce many clearance values; the controller needs one
scalar.  The log-sum-exp soft minimum

    h = -beta * log(sum_i exp(-b_i / beta))

under-approximates min_i b_i by at most beta*ln(n), so h > 0 certifies every
individual clearance positive.  Smaller beta tracks the minimum tightly;
larger beta lets several nearby zones contribute jointly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import DegenerateRangeError, SafetyValue


@dataclass(frozen=True)
class AggregateSafety:
    value: float  # aggregated clearance h (m)
    weights: tuple[float, ...]  # softmax weights, sum to 1
    margins: tuple[float, ...]  # the inputs b_i (m)
    min_margin: float  # min_i b_i (m)


def aggregate(margins: Sequence[float], smoothing: float) -> AggregateSafety:
    """Log-sum-exp soft minimum of the clearances, computed stably.

    Exponents are shifted by the minimum before exponentiation so the result
    is finite for any magnitudes; the value is mathematically identical to
    the unshifted formula.
    """
    if not margins:
        raise ValueError("aggregate requires at least one clearance value")
    if not smoothing > 0.0:
        raise ValueError(f"smoothing must be > 0, got {smoothing}")
    b_min = min(margins)
    exps = [math.exp(-(b - b_min) / smoothing) for b in margins]
    total = math.fsum(exps)
    h = b_min - smoothing * math.log(total)
    weights = tuple(e / total for e in exps)
    return AggregateSafety(
        value=h, weights=weights, margins=tuple(margins), min_margin=b_min
    )


def margin_rate(speed: float, sv: SafetyValue, accel: float) -> float:
    """Time derivative of one clearance b along the attacker's motion.

    Composed of the closing speed along the line of sight, the boundary
    rotation induced by the line-of-sight rate, and the boundary change due
    to the commanded turn.
    """
    r = sv.polar.r
    if r <= 0.0:
        raise DegenerateRangeError("clearance rate undefined at zero range")
    sigma = sv.polar.sigma
    return (
        -speed * math.cos(sigma)
        - (speed / r) * sv.grad_rho * math.sin(sigma)
        - sv.grad_rho * accel / speed
    )
