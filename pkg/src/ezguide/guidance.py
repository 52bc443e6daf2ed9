"""The control stack: pursuit, zone avoidance, blending, and saturation.

Two primitive laws are blended by a switch on the aggregate clearance h:
a pursuit command that drives the lead angle to the target to zero, and a
repulsive command that drives h toward zero from above (never through it).
The physical lateral acceleration is a state governed by smooth saturation
dynamics, so the blended reference is tracked through a commanded
acceleration that compensates the saturation attenuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .aggregation import AggregateSafety, aggregate
from .geometry import (
    AttackerState,
    DefenderSpec,
    RelativePolar,
    SafetyValue,
    relative_polar,
    safety_value,
)

#: Exponent clamp for the sigmoid switch; beyond this the tail is exactly 0/1.
_SIGMOID_CLAMP = 500.0

#: Floor for the saturation denominator 1 - (a/a_max)^n in the commanded law.
SAT_DENOM_FLOOR = 1e-6


@dataclass
class GuidanceParams:
    """Gains and design parameters; defaults follow the reference scenarios."""

    safety_gain: float = 0.3  # 1/s, rate at which h is driven down
    intercept_gain: float = 0.7  # 1/s, rate at which the target lead decays
    tracking_gain: float = 3.5  # m/s^3, acceleration-tracking gain
    smoothing: float = 0.3  # m, log-sum-exp softness
    safety_margin: float = 0.0  # m, extra clearance folded into each b
    switch_center: float = 0.1  # m, h at which the smooth switch is 1/2
    switch_width: float = 0.1  # m, smooth switch steepness scale
    switch_threshold: float = 0.1  # m, threshold of the discontinuous switch
    accel_limit: float = 1.0  # m/s^2
    sat_exponent: int = 2  # even integer >= 2
    sat_leak: float = 0.2  # 1/s, leak term of the saturation dynamics
    switch_mode: str = "smooth"  # "smooth" or "discontinuous"
    sign_layer: float = 0.05  # m/s^2, boundary layer replacing sign(z)
    denom_floor: float = 1e-4  # m/rad, degeneracy cutoff for the safe law

    def validate(self) -> None:
        for name in (
            "safety_gain",
            "intercept_gain",
            "tracking_gain",
            "smoothing",
            "switch_width",
            "accel_limit",
            "sat_leak",
            "sign_layer",
            "denom_floor",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.safety_margin < 0.0:
            raise ValueError(f"safety_margin must be >= 0, got {self.safety_margin}")
        if self.sat_exponent < 2 or self.sat_exponent % 2 != 0:
            raise ValueError(
                f"sat_exponent must be an even integer >= 2, got {self.sat_exponent}"
            )
        if self.switch_mode not in ("smooth", "discontinuous"):
            raise ValueError(f"unknown switch_mode {self.switch_mode!r}")


@dataclass(frozen=True)
class GuidanceOutput:
    """Everything computed in one control evaluation, for logging."""

    intercept: float  # pursuit term (m/s^2)
    safe: float  # avoidance term (m/s^2); nan when absent
    alpha: float  # blend weight in [0, 1]
    desired: float  # blended reference (m/s^2)
    desired_rate: float  # filtered reference derivative (m/s^3)
    commanded: float  # command into the saturation dynamics (m/s^2)
    tracking_error: float  # z = actual - desired (m/s^2)
    aggregate: float  # h (m); +inf with no defenders
    margins: tuple[float, ...]  # per-defender b_i (m)
    degenerate: bool  # safe-law denominator fell below the floor
    target_polar: RelativePolar
    safety_values: tuple[SafetyValue, ...]


@dataclass
class GuidanceContext:
    """One-step memory owned by the caller: previous reference and filter."""

    prev_desired: Optional[float] = None
    prev_intercept: Optional[float] = None
    prev_safe: Optional[float] = None
    rate_filter: float = 0.0


def intercept_accel(speed: float, target_polar: RelativePolar, gain: float) -> float:
    """Pursuit command: exponential decay of the lead angle to the target."""
    return (
        -gain * speed * target_polar.sigma
        - speed * speed * math.sin(target_polar.sigma) / target_polar.r
    )


def safe_accel(
    speed: float,
    gain: float,
    agg: AggregateSafety,
    svs: Sequence[SafetyValue],
    denom_floor: float,
) -> Optional[float]:
    """Avoidance command enforcing an exponential approach of h to zero.

    Returns None when the weighted boundary-gradient denominator is below
    ``denom_floor`` (head-on or symmetric cancellation); the caller falls
    back to a fixed-magnitude turn.
    """
    if len(svs) != len(agg.weights):
        raise ValueError("weights and safety values are misaligned")
    denom = 0.0
    drift = 0.0
    for w, sv in zip(agg.weights, svs):
        sigma = sv.polar.sigma
        denom += w * sv.grad_rho
        drift += w * (math.cos(sigma) + sv.grad_rho / sv.polar.r * math.sin(sigma))
    if abs(denom) < denom_floor:
        return None
    return (speed * gain * agg.value - speed * speed * drift) / denom


def switch_alpha(h: float, params: GuidanceParams) -> float:
    """Blend weight: 1 deep in danger, 0 far from every zone."""
    if params.switch_mode == "discontinuous":
        return 1.0 if h < params.switch_threshold else 0.0
    arg = (h - params.switch_center) / params.switch_width
    if arg > _SIGMOID_CLAMP:
        return 0.0
    if arg < -_SIGMOID_CLAMP:
        return 1.0
    return 1.0 / (1.0 + math.exp(arg))


def saturation_rate(accel: float, command: float, params: GuidanceParams) -> float:
    """Rate of the actual acceleration under the smooth saturation model.

    The attenuation factor vanishes at the limits and the leak pulls inward,
    so trajectories starting strictly inside (-a_max, a_max) never leave it.
    """
    frac = (accel / params.accel_limit) ** params.sat_exponent
    return (1.0 - frac) * command - params.sat_leak * accel


def sign_smooth(z: float, width: float) -> float:
    """Odd saturating replacement for sign(z): linear inside the layer."""
    s = z / width
    if s > 1.0:
        return 1.0
    if s < -1.0:
        return -1.0
    return s


def commanded_accel(
    accel: float,
    desired_rate: float,
    alpha: float,
    target_sigma: float,
    safety_coupling: float,
    tracking_error: float,
    speed: float,
    params: GuidanceParams,
) -> float:
    """Command into the saturation dynamics that makes tracking dissipative.

    ``safety_coupling`` is h times the weighted boundary gradient (zero when
    no defenders are present).  The denominator compensates the saturation
    attenuation; it is floored when the actual acceleration sits essentially
    at the limit, which the leak term makes transient.
    """
    numer = (
        params.sat_leak * accel
        + desired_rate
        + (alpha - 1.0) * target_sigma / speed
        + alpha * safety_coupling / speed
        - params.tracking_gain * sign_smooth(tracking_error, params.sign_layer)
    )
    denom = 1.0 - (accel / params.accel_limit) ** params.sat_exponent
    if denom < SAT_DENOM_FLOOR:
        denom = SAT_DENOM_FLOOR
    return numer / denom


def guidance_step(
    attacker: AttackerState,
    target: tuple[float, float],
    defenders: Sequence[DefenderSpec],
    speed: float,
    params: GuidanceParams,
    ctx: GuidanceContext,
    dt: float,
) -> GuidanceOutput:
    """One full control evaluation; updates ``ctx`` for the next call."""
    target_polar = relative_polar(attacker, target)
    a_t = intercept_accel(speed, target_polar, params.intercept_gain)

    degenerate = False
    if defenders:
        svs = tuple(
            safety_value(attacker, d, params.safety_margin) for d in defenders
        )
        agg = aggregate([sv.margin for sv in svs], params.smoothing)
        h = agg.value
        alpha = switch_alpha(h, params)
        a_b = safe_accel(speed, params.safety_gain, agg, svs, params.denom_floor)
        if a_b is None:
            degenerate = True
            # Fixed-magnitude turn away from the most threatening defender;
            # the exact-zero lead angle tie breaks toward a positive turn.
            i_max = max(range(len(svs)), key=lambda i: agg.weights[i])
            sig = svs[i_max].polar.sigma
            a_b = params.accel_limit if sig >= 0.0 else -params.accel_limit
        a_d = alpha * a_b + (1.0 - alpha) * a_t
        coupling = h * sum(
            w * sv.grad_rho for w, sv in zip(agg.weights, svs)
        )
        margins = agg.margins
    else:
        svs = ()
        h = math.inf
        alpha = 0.0
        a_b = math.nan
        a_d = a_t
        coupling = 0.0
        margins = ()

    # Filtered backward difference of the reference; zero on the first step.
    # Under the discontinuous switch the blend jumps between branches, so the
    # difference is taken per branch (the jump carries no useful rate and
    # would otherwise inject a 1/dt spike into the command).
    if ctx.prev_desired is None:
        raw = 0.0
    elif params.switch_mode == "discontinuous":
        d_safe = 0.0
        if not math.isnan(a_b) and ctx.prev_safe is not None:
            d_safe = (a_b - ctx.prev_safe) / dt
        d_int = (a_t - ctx.prev_intercept) / dt
        raw = alpha * d_safe + (1.0 - alpha) * d_int
    else:
        raw = (a_d - ctx.prev_desired) / dt
    tau = 10.0 * dt
    ctx.rate_filter += (raw - ctx.rate_filter) * (dt / (tau + dt))
    a_d_dot = ctx.rate_filter
    ctx.prev_desired = a_d
    ctx.prev_intercept = a_t
    ctx.prev_safe = None if math.isnan(a_b) else a_b

    z = attacker.accel - a_d
    a_c = commanded_accel(
        attacker.accel, a_d_dot, alpha, target_polar.sigma, coupling, z, speed, params
    )
    return GuidanceOutput(
        intercept=a_t,
        safe=a_b,
        alpha=alpha,
        desired=a_d,
        desired_rate=a_d_dot,
        commanded=a_c,
        tracking_error=z,
        aggregate=h,
        margins=margins,
        degenerate=degenerate,
        target_polar=target_polar,
        safety_values=svs,
    )
