"""Soft-minimum aggregation of clearances and the clearance rate."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ezguide.aggregation import aggregate, margin_rate
from ezguide.geometry import AttackerState, DefenderSpec, safety_value

margins_st = st.lists(st.floats(-50, 50), min_size=1, max_size=8)
beta_st = st.floats(0.01, 3.0)


class TestAggregate:
    def test_single_value_is_exact(self):
        agg = aggregate([1.7], 0.3)
        assert agg.value == 1.7
        assert agg.weights == (1.0,)
        assert agg.min_margin == 1.7

    def test_equal_values_drop_by_log_count(self):
        # n equal clearances b give exactly b - beta*ln(n).
        agg = aggregate([1.0, 1.0, 1.0], 0.3)
        assert agg.value == pytest.approx(1.0 - 0.3 * math.log(3.0), abs=1e-12)
        assert agg.value == pytest.approx(0.6704163, abs=1e-7)
        for w in agg.weights:
            assert w == pytest.approx(1.0 / 3.0)

    @given(margins_st, beta_st)
    def test_sandwich(self, margins, beta):
        agg = aggregate(margins, beta)
        lo = min(margins) - beta * math.log(len(margins))
        assert lo - 1e-9 <= agg.value <= min(margins) + 1e-9

    @given(margins_st, beta_st)
    def test_weights_form_distribution(self, margins, beta):
        agg = aggregate(margins, beta)
        assert sum(agg.weights) == pytest.approx(1.0, abs=1e-9)
        # Weights of far-dominated clearances may underflow to exactly zero.
        assert all(w >= 0.0 for w in agg.weights)
        # The smallest clearance carries the largest weight.
        i_min = min(range(len(margins)), key=lambda i: margins[i])
        assert agg.weights[i_min] == max(agg.weights)

    @given(margins_st, beta_st, st.floats(0.01, 5.0))
    def test_monotone_in_each_margin(self, margins, beta, bump):
        base = aggregate(margins, beta).value
        for i in range(len(margins)):
            bumped = list(margins)
            bumped[i] += bump
            assert aggregate(bumped, beta).value >= base - 1e-9

    def test_extreme_magnitudes_stay_finite(self):
        agg = aggregate([-1e6, 3.0, 1e6], 0.3)
        assert math.isfinite(agg.value)
        assert agg.value == pytest.approx(-1e6, rel=1e-9)

    def test_rejects_empty_and_bad_smoothing(self):
        with pytest.raises(ValueError):
            aggregate([], 0.3)
        with pytest.raises(ValueError):
            aggregate([1.0], 0.0)


class TestMarginRate:
    def test_matches_finite_difference_along_motion(self):
        """The analytic clearance rate equals d/dt of the clearance."""
        d = DefenderSpec((0.0, 0.0), 1.5, 0.5, 0.7)
        speed = 1.0
        accel = 0.4
        state = AttackerState(-5.0, 1.3, 0.25, accel)
        sv = safety_value(state, d)
        analytic = margin_rate(speed, sv, accel)

        dt = 1e-6
        moved = AttackerState(
            state.x + dt * speed * math.cos(state.heading),
            state.y + dt * speed * math.sin(state.heading),
            state.heading + dt * accel / speed,
            accel,
        )
        numeric = (safety_value(moved, d).margin - sv.margin) / dt
        assert analytic == pytest.approx(numeric, rel=1e-4)

    def test_pure_closing_speed_head_on(self):
        # Head-on, no turn: the clearance shrinks at exactly the speed.
        d = DefenderSpec((0.0, 0.0), 1.5, 0.5, 0.7)
        sv = safety_value(AttackerState(-6.0, 0.0, 0.0), d)
        assert margin_rate(1.0, sv, 0.0) == pytest.approx(-1.0, abs=1e-12)
