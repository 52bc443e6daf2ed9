"""Zone geometry: boundary radius, its gradient, clearances, containment."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ezguide.geometry import (
    AttackerState,
    DefenderSpec,
    DegenerateRangeError,
    boundary_radius,
    boundary_radius_gradient,
    relative_polar,
    safety_value,
    wrap_angle,
    zone_contains,
)

# The reference defender used throughout: flyout 1.5, kill radius 0.5,
# attacker/defender speed ratio 0.7, so total reach is 2.0.
REF = DefenderSpec(origin=(0.0, 0.0), range_limit=1.5, capture_radius=0.5,
                   speed_ratio=0.7, id=1)

defender_st = st.builds(
    DefenderSpec,
    origin=st.tuples(
        st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)
    ),
    range_limit=st.floats(0.3, 4.0),
    capture_radius=st.floats(0.05, 2.0),
    speed_ratio=st.floats(0.05, 0.95),
)

angle_st = st.floats(-math.pi, math.pi)


class TestWrapAngle:
    def test_identity_inside(self):
        assert wrap_angle(0.3) == 0.3
        assert wrap_angle(-3.0) == -3.0

    def test_boundary_convention(self):
        # Interval is half-open on the left: (-pi, pi].
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)

    @given(st.floats(-50, 50))
    def test_range_and_equivalence(self, angle):
        w = wrap_angle(angle)
        assert -math.pi < w <= math.pi + 1e-15
        assert math.isclose(math.cos(w), math.cos(angle), abs_tol=1e-9)
        assert math.isclose(math.sin(w), math.sin(angle), abs_tol=1e-9)


class TestBoundaryRadius:
    def test_head_on_value(self):
        # Head-on: mu*R*(1 + reach/(mu*R)) = mu*R + reach = 1.05 + 2 = 3.05
        assert boundary_radius(0.0, REF) == pytest.approx(3.05, abs=1e-12)

    def test_tail_on_value(self):
        # Tail-on: reach - mu*R = 2 - 1.05 = 0.95
        assert boundary_radius(math.pi, REF) == pytest.approx(0.95, abs=1e-12)

    def test_beam_value(self):
        # At sigma = pi/2 the radius is sqrt(reach^2 - (mu*R)^2).
        expected = math.sqrt(2.0**2 - 1.05**2)
        assert boundary_radius(math.pi / 2, REF) == pytest.approx(
            expected, rel=1e-12
        )
        assert expected == pytest.approx(1.70220445, abs=1e-7)

    @given(angle_st, defender_st)
    def test_even_function(self, sigma, d):
        assert boundary_radius(sigma, d) == pytest.approx(
            boundary_radius(-sigma, d), rel=1e-12
        )

    @given(angle_st, defender_st)
    def test_global_bounds(self, sigma, d):
        rho = boundary_radius(sigma, d)
        mu_r = d.speed_ratio * d.range_limit
        assert d.reach - mu_r - 1e-9 <= rho <= d.reach + mu_r + 1e-9

    def test_monotone_decreasing_on_half_turn(self):
        values = [boundary_radius(s * math.pi / 64, REF) for s in range(65)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestBoundaryGradient:
    @given(angle_st, defender_st)
    def test_odd_function(self, sigma, d):
        assert boundary_radius_gradient(sigma, d) == pytest.approx(
            -boundary_radius_gradient(-sigma, d), abs=1e-9
        )

    def test_zero_at_symmetry_axes(self):
        assert boundary_radius_gradient(0.0, REF) == 0.0
        assert abs(boundary_radius_gradient(math.pi, REF)) < 1e-12

    def test_negative_on_front_half(self):
        for s in (0.1, 0.5, 1.0, 2.0, 3.0):
            assert boundary_radius_gradient(s, REF) < 0.0

    @settings(max_examples=300)
    @given(angle_st, defender_st)
    def test_matches_central_difference(self, sigma, d):
        if abs(math.sin(sigma)) < 1e-8:
            return
        step = 1e-6
        numeric = (
            boundary_radius(sigma + step, d) - boundary_radius(sigma - step, d)
        ) / (2.0 * step)
        analytic = boundary_radius_gradient(sigma, d)
        assert analytic == pytest.approx(numeric, rel=1e-6, abs=1e-8)


class TestRelativePolar:
    def test_known_quadrant(self):
        polar = relative_polar(AttackerState(0.0, 0.0, 0.0), (1.0, 1.0))
        assert polar.r == pytest.approx(math.sqrt(2.0))
        assert polar.theta == pytest.approx(math.pi / 4)
        assert polar.sigma == pytest.approx(-math.pi / 4)

    def test_coincident_raises(self):
        with pytest.raises(DegenerateRangeError):
            relative_polar(AttackerState(2.0, 3.0, 0.0), (2.0, 3.0))


class TestSafetyValue:
    def test_margin_is_range_minus_boundary(self):
        attacker = AttackerState(-6.0, 0.0, 0.0)  # head-on toward the origin
        sv = safety_value(attacker, REF)
        assert sv.polar.r == pytest.approx(6.0)
        assert sv.rho == pytest.approx(3.05, abs=1e-12)
        assert sv.margin == pytest.approx(6.0 - 3.05, abs=1e-12)

    def test_extra_margin_shifts_clearance(self):
        attacker = AttackerState(-6.0, 0.0, 0.0)
        plain = safety_value(attacker, REF, 0.0)
        padded = safety_value(attacker, REF, 0.25)
        assert padded.margin == pytest.approx(plain.margin - 0.25)

    def test_containment_extremes(self):
        # Inside the tail-on minimum radius: contained for any heading.
        for heading in (0.0, 1.0, -2.0, math.pi):
            assert zone_contains(AttackerState(0.5, 0.0, heading), REF)
        # Beyond the head-on maximum radius: outside for any heading.
        for heading in (0.0, 1.0, -2.0, math.pi):
            assert not zone_contains(AttackerState(-4.0, 0.0, heading), REF)

    def test_containment_is_heading_dependent(self):
        # At 2.5 m the head-on boundary (3.05) contains, tail-on (0.95) not.
        assert zone_contains(AttackerState(-2.5, 0.0, 0.0), REF)
        assert not zone_contains(AttackerState(-2.5, 0.0, math.pi, 0.0), REF)


class TestDefenderSpecValidation:
    def test_speed_ratio_must_be_fractional(self):
        with pytest.raises(ValueError, match="speed_ratio must lie in"):
            DefenderSpec((0, 0), 1.5, 0.5, 1.2)

    def test_range_limit_positive(self):
        with pytest.raises(ValueError, match="range_limit"):
            DefenderSpec((0, 0), 0.0, 0.5, 0.7)

    def test_capture_radius_nonnegative(self):
        with pytest.raises(ValueError, match="capture_radius"):
            DefenderSpec((0, 0), 1.5, -0.1, 0.7)
