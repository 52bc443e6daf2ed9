"""Compare the compiled and pure-Python closed-loop backends.

Runs the two bundled reference scenarios on each backend, reports wall
times and the speedup, and verifies that the logs agree.

Usage: python benchmarks/benchmark_backends.py [--repeat N]
"""

import argparse
import os
import statistics
import time

import numpy as np

from ezguide.scenario_io import load_bundled_scenario
from ezguide.simulate import HAVE_COMPILED_BACKEND, active_backend, run_scenario


def time_run(scn, repeat: int):
    times = []
    log = None
    for _ in range(repeat):
        start = time.perf_counter()
        log = run_scenario(scn)
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times), log


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not HAVE_COMPILED_BACKEND:
        print("compiled backend not built; nothing to compare")
        return 1

    for name in ("paper_scenario_1", "paper_scenario_2"):
        scn = load_bundled_scenario(name)
        os.environ.pop("EZGUIDE_PURE_PYTHON", None)
        assert active_backend() == "compiled"
        c_best, c_med, c_log = time_run(scn, args.repeat)

        os.environ["EZGUIDE_PURE_PYTHON"] = "1"
        assert active_backend() == "python"
        p_best, p_med, p_log = time_run(scn, args.repeat)
        os.environ.pop("EZGUIDE_PURE_PYTHON", None)

        finite = np.isfinite(c_log.data)
        diff = float(np.max(np.abs(c_log.data[finite] - p_log.data[finite])))
        steps = len(c_log.data)
        print(f"{name}: {steps} steps, outcome {c_log.outcome.kind}")
        print(
            f"  compiled: best {c_best * 1e3:8.2f} ms  median {c_med * 1e3:8.2f} ms"
        )
        print(
            f"  python:   best {p_best * 1e3:8.2f} ms  median {p_med * 1e3:8.2f} ms"
        )
        print(f"  speedup:  {p_best / c_best:.1f}x   max |diff| {diff:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
