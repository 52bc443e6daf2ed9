"""Compiled and pure-Python loop backends must agree numerically."""

from dataclasses import replace

import numpy as np
import pytest

from ezguide.simulate import (
    HAVE_COMPILED_BACKEND,
    active_backend,
    run_scenario,
    sample_ring_starts,
)


def test_compiled_backend_is_built():
    assert HAVE_COMPILED_BACKEND, "compiled loop extension failed to build"


def test_env_var_selects_fallback(monkeypatch):
    monkeypatch.delenv("EZGUIDE_PURE_PYTHON", raising=False)
    assert active_backend() == "compiled"
    monkeypatch.setenv("EZGUIDE_PURE_PYTHON", "1")
    assert active_backend() == "python"


@pytest.mark.parametrize("name", ["scenario1", "scenario2"])
def test_reference_scenarios_bitwise_close(name, request, monkeypatch):
    scn = request.getfixturevalue(name)
    monkeypatch.delenv("EZGUIDE_PURE_PYTHON", raising=False)
    compiled = run_scenario(scn)
    monkeypatch.setenv("EZGUIDE_PURE_PYTHON", "1")
    fallback = run_scenario(scn)

    assert compiled.outcome.kind == fallback.outcome.kind
    assert compiled.data.shape == fallback.data.shape
    finite = np.isfinite(compiled.data)
    assert np.array_equal(finite, np.isfinite(fallback.data))
    diff = np.max(np.abs(compiled.data[finite] - fallback.data[finite]))
    assert diff < 1e-9


def test_short_random_battery_agrees(scenario1, monkeypatch):
    short = replace(scenario1, t_max=3.0)
    for start in sample_ring_starts(short, 8, 6.0, 9.0, seed=11):
        scn = replace(short, attacker=start)
        monkeypatch.delenv("EZGUIDE_PURE_PYTHON", raising=False)
        compiled = run_scenario(scn)
        monkeypatch.setenv("EZGUIDE_PURE_PYTHON", "1")
        fallback = run_scenario(scn)
        assert compiled.outcome.kind == fallback.outcome.kind
        assert compiled.data.shape == fallback.data.shape
        finite = np.isfinite(compiled.data)
        diff = np.max(np.abs(compiled.data[finite] - fallback.data[finite]))
        assert diff < 1e-9
