"""Self-contained numerical health checks, exposed through ``ezguide check``.

Each check compares an analytic implementation against an independent
reference (finite differences, elementary bounds, Richardson-style order
estimation, Monte-Carlo sampling) and returns a pass/fail verdict with the
measured figure.  The test suite exercises the same properties with frozen
seeds; this module is the operational counterpart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._loop_py import _rk4_step
from .aggregation import aggregate
from .geometry import (
    AttackerState,
    DefenderSpec,
    boundary_radius,
    boundary_radius_gradient,
)
from .guidance import GuidanceParams


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: {self.detail} = {self.measured:.3e} "
            f"(tolerance {self.tolerance:.3e})"
        )


def _random_defender(rng: np.random.Generator) -> DefenderSpec:
    return DefenderSpec(
        origin=(0.0, 0.0),
        range_limit=rng.uniform(0.5, 3.0),
        capture_radius=rng.uniform(0.1, 1.0),
        speed_ratio=rng.uniform(0.2, 0.95),
    )


def central_difference_boundary_slope(
    sigma: float, d: DefenderSpec, step: float = 1e-6
) -> float:
    """Central difference (rho(s+h) - rho(s-h)) / (2h), evaluated stably.

    The naive two-point subtraction cancels catastrophically where the
    slope is small (the radius is even in sigma).  Rewriting the numerator
    with the exact identities cos(s+h) - cos(s-h) = -2 sin(s) sin(h) and
    a - b = (a^2 - b^2)/(a + b) for the square-root term gives the same
    difference quotient with no cancellation, so the quotient itself is
    accurate to machine precision at any lead angle.
    """
    mu_r = d.speed_ratio * d.range_limit
    c_plus = math.cos(sigma + step)
    c_minus = math.cos(sigma - step)
    # Square-root terms recovered from the radius the production code built.
    s_plus = boundary_radius(sigma + step, d) / mu_r - c_plus
    s_minus = boundary_radius(sigma - step, d) / mu_r - c_minus
    cos_diff = -2.0 * math.sin(sigma) * math.sin(step)
    return (
        mu_r
        * cos_diff
        * (1.0 + (c_plus + c_minus) / (s_plus + s_minus))
        / (2.0 * step)
    )


def check_boundary_gradient(trials: int = 10_000, seed: int = 0) -> CheckResult:
    """Analytic zone-boundary slope versus a central finite difference."""
    rng = np.random.default_rng(seed)
    tol = 1e-6
    worst = 0.0
    for _ in range(trials):
        d = _random_defender(rng)
        sigma = rng.uniform(-math.pi, math.pi)
        if abs(math.sin(sigma)) < 1e-8:
            continue
        analytic = boundary_radius_gradient(sigma, d)
        numeric = central_difference_boundary_slope(sigma, d)
        denom = max(abs(analytic), abs(numeric), 1e-300)
        worst = max(worst, abs(analytic - numeric) / denom)
    return CheckResult(
        "boundary-gradient", worst <= tol, worst, tol, "max relative error"
    )


def check_softmin_sandwich(trials: int = 10_000, seed: int = 1) -> CheckResult:
    """min b - beta ln n <= h <= min b, up to tiny floating-point slack."""
    rng = np.random.default_rng(seed)
    tol = 1e-9
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 8))
        margins = rng.uniform(-5.0, 5.0, size=n)
        beta = float(rng.uniform(0.01, 2.0))
        h = aggregate(margins.tolist(), beta).value
        lo = margins.min() - beta * math.log(n)
        hi = margins.min()
        worst = max(worst, lo - h, h - hi, 0.0)
    return CheckResult(
        "softmin-sandwich", worst <= tol, worst, tol, "max bound violation"
    )


def check_saturation_bound(
    walks: int = 1000, seed: int = 2, duration: float = 10.0, dt: float = 1e-3
) -> CheckResult:
    """Bounded random-walk commands never push |a_A| to the limit.

    Integrates the saturation dynamics alone (vectorized classical
    Runge-Kutta, command held over each step) from a_A(0) = 0.
    """
    rng = np.random.default_rng(seed)
    params = GuidanceParams()
    n_steps = int(round(duration / dt))
    limit = params.accel_limit

    # Bounded random walks in the command, clipped to +/- 10 limits.
    steps = rng.normal(0.0, 0.5, size=(n_steps, walks))
    commands = np.clip(np.cumsum(steps, axis=0), -10.0 * limit, 10.0 * limit)

    def rate(a, u):
        return (1.0 - (a / limit) ** params.sat_exponent) * u - params.sat_leak * a

    a = np.zeros(walks)
    peak = 0.0
    for k in range(n_steps):
        u = commands[k]
        k1 = rate(a, u)
        k2 = rate(a + 0.5 * dt * k1, u)
        k3 = rate(a + 0.5 * dt * k2, u)
        k4 = rate(a + dt * k3, u)
        a = a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        peak = max(peak, float(np.abs(a).max()))
    return CheckResult(
        "saturation-bound", peak < limit, peak, limit, "peak |a_A|"
    )


def check_integrator_order(min_order: float = 3.5) -> CheckResult:
    """Observed convergence order of the step routine on a smooth segment.

    A constant command makes the closed kinematics a smooth autonomous
    system, so halving the step should shrink the error by about 2^4.
    """
    params = GuidanceParams()
    speed = 1.0
    command = 0.8
    duration = 1.0

    def integrate(dt: float) -> np.ndarray:
        state = AttackerState(x=0.0, y=0.0, heading=0.3, accel=0.0)
        for _ in range(int(round(duration / dt))):
            state = _rk4_step(state, dt, command, speed, params)
        return np.array([state.x, state.y, state.heading, state.accel])

    reference = integrate(1e-5)
    err_coarse = float(np.linalg.norm(integrate(0.05) - reference))
    err_fine = float(np.linalg.norm(integrate(0.025) - reference))
    order = math.log2(err_coarse / err_fine)
    return CheckResult(
        "integrator-order", order >= min_order, order, min_order, "observed order"
    )


def run_all_checks(trials: int = 10_000) -> list[CheckResult]:
    walks = max(100, trials // 10)
    return [
        check_boundary_gradient(trials=trials),
        check_softmin_sandwich(trials=trials),
        check_saturation_bound(walks=walks),
        check_integrator_order(),
    ]
