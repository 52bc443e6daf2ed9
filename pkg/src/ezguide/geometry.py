"""Planar engagement-zone geometry.

Each defender is range-limited: launched from a fixed origin, it can fly at
most ``range_limit`` before running out, and captures anything within
``capture_radius`` of itself.  Because the defender is faster than the
attacker (speed ratio in (0, 1)), there is a critical radial distance around
the defender origin, depending on the attacker's lead angle, inside which
capture is guaranteed if the attacker holds course.  This module provides
that boundary radius, its analytic gradient with respect to the lead angle,
and the signed clearance used by the safety controller.

All functions here are pure; there is no shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


class DegenerateRangeError(ValueError):
    """Raised when a relative range collapses to zero (coincident points)."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the interval (-pi, pi]."""
    a = angle % TWO_PI
    if a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class DefenderSpec:
    """A range-limited defender, reduced to its engagement-zone geometry.

    origin: launch point in world coordinates (m)
    range_limit: maximum flyout distance R (m), > 0
    capture_radius: kill radius c (m), >= 0
    speed_ratio: attacker speed over defender speed, in (0, 1)
    """

    origin: tuple[float, float]
    range_limit: float
    capture_radius: float
    speed_ratio: float
    id: int = 0

    def __post_init__(self):
        if not self.range_limit > 0.0:
            raise ValueError(f"range_limit must be > 0, got {self.range_limit}")
        if self.capture_radius < 0.0:
            raise ValueError(
                f"capture_radius must be >= 0, got {self.capture_radius}"
            )
        if not 0.0 < self.speed_ratio < 1.0:
            raise ValueError(
                f"speed_ratio must lie in (0, 1), got {self.speed_ratio}"
            )

    @property
    def reach(self) -> float:
        """Total maximum range from the origin: flyout plus kill radius."""
        return self.range_limit + self.capture_radius


@dataclass
class AttackerState:
    """Attacker pose plus its actual lateral acceleration.

    The acceleration is part of the state because the smooth saturation
    dynamics integrate it rather than applying commands directly.
    """

    x: float
    y: float
    heading: float  # rad, wrapped to (-pi, pi]
    accel: float = 0.0  # m/s^2

    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class RelativePolar:
    """Range, line-of-sight angle, and lead angle to a point of interest."""

    r: float  # m
    theta: float  # LOS angle, rad, (-pi, pi]
    sigma: float  # lead angle heading - theta, rad, (-pi, pi]


@dataclass(frozen=True)
class SafetyValue:
    """Signed clearance to one defender's zone, with reusable intermediates."""

    margin: float  # b = r - rho - eps (m); positive means safe
    rho: float  # boundary radius at the current lead angle (m)
    grad_rho: float  # d(rho)/d(sigma) (m/rad)
    polar: RelativePolar


def relative_polar(attacker: AttackerState, point: tuple[float, float]) -> RelativePolar:
    """Polar quantities from the attacker to a world point."""
    dx = point[0] - attacker.x
    dy = point[1] - attacker.y
    r = math.hypot(dx, dy)
    if r == 0.0:
        raise DegenerateRangeError("attacker coincides with the reference point")
    theta = math.atan2(dy, dx)
    sigma = wrap_angle(attacker.heading - theta)
    return RelativePolar(r=r, theta=theta, sigma=sigma)


def _sqrt_term(cos_sigma: float, d: DefenderSpec) -> float:
    # Argument is bounded below by (reach/(mu R))^2 - 1 > 0 for any valid spec.
    ratio = d.reach / (d.speed_ratio * d.range_limit)
    return math.sqrt(cos_sigma * cos_sigma - 1.0 + ratio * ratio)


def boundary_radius(sigma: float, d: DefenderSpec) -> float:
    """Critical radial distance from the defender origin at lead angle sigma.

    Closer than this (at this lead angle) the defender can guarantee capture
    of a course-holding attacker.  Even function of sigma; maximal head-on
    (mu*R + R + c) and minimal tail-on (R + c - mu*R).
    """
    c = math.cos(sigma)
    return d.speed_ratio * d.range_limit * (c + _sqrt_term(c, d))


def boundary_radius_gradient(sigma: float, d: DefenderSpec) -> float:
    """Analytic derivative of the boundary radius with respect to sigma."""
    c = math.cos(sigma)
    return (
        -d.speed_ratio
        * d.range_limit
        * math.sin(sigma)
        * (1.0 + c / _sqrt_term(c, d))
    )


def safety_value(
    attacker: AttackerState, d: DefenderSpec, margin: float = 0.0
) -> SafetyValue:
    """Signed clearance b = r - rho(sigma) - margin to one defender's zone."""
    polar = relative_polar(attacker, d.origin)
    rho = boundary_radius(polar.sigma, d)
    grad = boundary_radius_gradient(polar.sigma, d)
    return SafetyValue(
        margin=polar.r - rho - margin, rho=rho, grad_rho=grad, polar=polar
    )


def zone_contains(attacker: AttackerState, d: DefenderSpec) -> bool:
    """True iff the attacker is inside the hard zone (closed: r <= rho)."""
    polar = relative_polar(attacker, d.origin)
    return polar.r <= boundary_radius(polar.sigma, d)
