"""Static SVG plots of a trajectory log: no scripts, no external assets.

Four kinds are offered:

- ``trajectory``: world-frame attacker path, target marker, defender
  origins with dotted maximum-range circles and the zone-boundary polar
  curve drawn around each origin.
- ``range_bearing``: target range and lead angle versus time.
- ``safety``: aggregate clearance and per-defender clearances versus time,
  with the zero line drawn.
- ``accel``: actual, reference, and commanded lateral acceleration with
  dashed lines at the symmetric acceleration limits.

Output is a deterministic function of the log: same log, same bytes.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from . import _columns as C
from .geometry import boundary_radius
from .simulate import TrajectoryLog

PLOT_KINDS = ("trajectory", "range_bearing", "safety", "accel")

#: Fraction of the scene extent added around the drawn geometry.
MARGIN_FRACTION = 0.1

#: Maximum polyline vertices per series; longer logs are subsampled.
MAX_POINTS = 1200

#: Commanded acceleration is clipped to this many limits for display only.
COMMAND_CLIP_LIMITS = 3.0

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(value: float) -> str:
    return format(float(value), ".6g")


def _points_attr(xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))


class _Canvas:
    """Collects SVG elements in plot coordinates (y already flipped)."""

    def __init__(self):
        self.elements: list[str] = []
        self.min_x = math.inf
        self.min_y = math.inf
        self.max_x = -math.inf
        self.max_y = -math.inf

    def _grow(self, xs, ys) -> None:
        self.min_x = min(self.min_x, float(np.min(xs)))
        self.max_x = max(self.max_x, float(np.max(xs)))
        self.min_y = min(self.min_y, float(np.min(ys)))
        self.max_y = max(self.max_y, float(np.max(ys)))

    def polyline(
        self,
        xs,
        ys,
        color: str,
        width: float,
        dash: Optional[str] = None,
        closed: bool = False,
    ) -> None:
        self._grow(xs, ys)
        tag = "polygon" if closed else "polyline"
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<{tag} points="{_points_attr(xs, ys)}" fill="none" '
            f'stroke="{color}" stroke-width="{_fmt(width)}"{dash_attr}/>'
        )

    def circle(
        self,
        cx: float,
        cy: float,
        r: float,
        color: str,
        width: float,
        dash: Optional[str] = None,
        fill: str = "none",
    ) -> None:
        self._grow([cx - r, cx + r], [cy - r, cy + r])
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'fill="{fill}" stroke="{color}" stroke-width="{_fmt(width)}"'
            f"{dash_attr}/>"
        )

    def text(self, x: float, y: float, content: str, size: float, color: str) -> None:
        self._grow([x], [y])
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(size)}" '
            f'font-family="sans-serif" fill="{color}">{content}</text>'
        )

    def render(self) -> str:
        span_x = self.max_x - self.min_x
        span_y = self.max_y - self.min_y
        pad_x = MARGIN_FRACTION * (span_x if span_x > 0 else 1.0)
        pad_y = MARGIN_FRACTION * (span_y if span_y > 0 else 1.0)
        viewbox = (
            f"{_fmt(self.min_x - pad_x)} {_fmt(self.min_y - pad_y)} "
            f"{_fmt(span_x + 2 * pad_x)} {_fmt(span_y + 2 * pad_y)}"
        )
        body = "\n".join(self.elements)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{viewbox}">\n'
            f"{body}\n</svg>\n"
        )


def _subsample(n: int) -> np.ndarray:
    if n <= MAX_POINTS:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, MAX_POINTS).astype(int))


def _trajectory_svg(log: TrajectoryLog) -> str:
    cv = _Canvas()
    idx = _subsample(len(log.data))
    xs = log.data[idx, C.COL_X]
    ys = -log.data[idx, C.COL_Y]
    scale = max(
        float(np.ptp(xs)), float(np.ptp(ys)), 1.0
    )
    lw = 0.004 * scale

    for i, d in enumerate(log.scenario.defenders):
        color = _PALETTE[i % len(_PALETTE)]
        ox, oy = d.origin
        cv.circle(ox, -oy, 0.02 * scale, color, lw, fill=color)
        # Dotted circle at total maximum range (flyout plus kill radius).
        cv.circle(ox, -oy, d.reach, color, lw, dash=f"{_fmt(lw * 2)} {_fmt(lw * 3)}")
        # Zone boundary as the full polar curve over the lead angle.
        angles = np.linspace(-math.pi, math.pi, 257)
        radii = np.array([boundary_radius(a, d) for a in angles])
        cv.polyline(
            ox + radii * np.cos(angles),
            -(oy + radii * np.sin(angles)),
            color,
            lw,
            closed=True,
        )

    cv.polyline(xs, ys, "#000000", lw * 1.5)
    start_x, start_y = log.data[0, C.COL_X], log.data[0, C.COL_Y]
    cv.circle(start_x, -start_y, 0.015 * scale, "#000000", lw, fill="#ffffff")
    tx, ty = log.scenario.target
    half = 0.025 * scale
    cv.polyline([tx - half, tx + half], [-ty, -ty], "#000000", lw)
    cv.polyline([tx, tx], [-ty - half, -ty + half], "#000000", lw)
    cv.circle(tx, -ty, half, "#000000", lw)
    return cv.render()


def _time_panel(
    cv: _Canvas,
    t: np.ndarray,
    series: Sequence[tuple[str, np.ndarray, str, Optional[str]]],
    y_offset: float,
    zero_line: bool,
    extra_levels: Sequence[float] = (),
) -> None:
    """One stacked panel: series share a vertical scale within the band."""
    lo = min(float(np.min(v)) for _, v, _, _ in series)
    hi = max(float(np.max(v)) for _, v, _, _ in series)
    for level in extra_levels:
        lo = min(lo, level)
        hi = max(hi, level)
    if zero_line:
        lo = min(lo, 0.0)
        hi = max(hi, 0.0)
    span = hi - lo if hi > lo else 1.0
    t_span = float(t[-1] - t[0]) if t[-1] > t[0] else 1.0
    yscale = 0.35 * t_span / span

    def map_y(values):
        return y_offset - (np.asarray(values, dtype=float) - lo) * yscale

    lw = 0.004 * t_span
    top = y_offset - span * yscale
    # Panel frame and zero/reference levels.
    cv.polyline(
        [t[0], t[-1], t[-1], t[0], t[0]],
        [y_offset, y_offset, top, top, y_offset],
        "#888888",
        lw * 0.5,
    )
    if zero_line and lo < 0.0 < hi:
        zy = float(map_y([0.0])[0])
        cv.polyline([t[0], t[-1]], [zy, zy], "#888888", lw * 0.5)
    for level in extra_levels:
        ly = float(map_y([level])[0])
        cv.polyline(
            [t[0], t[-1]], [ly, ly], "#000000", lw * 0.75,
            dash=f"{_fmt(lw * 3)} {_fmt(lw * 3)}",
        )
    for k, (label, values, color, dash) in enumerate(series):
        cv.polyline(t, map_y(values), color, lw, dash=dash)
        cv.text(
            t[0] + 0.02 * t_span + 0.18 * t_span * k,
            top - 0.02 * t_span,
            label,
            0.03 * t_span,
            color,
        )


def _range_bearing_svg(log: TrajectoryLog) -> str:
    cv = _Canvas()
    idx = _subsample(len(log.data))
    t = log.data[idx, C.COL_T]
    t_span = float(t[-1] - t[0]) if t[-1] > t[0] else 1.0
    _time_panel(
        cv,
        t,
        [("r_AT (m)", log.data[idx, C.COL_R_TARGET], _PALETTE[0], None)],
        0.0,
        zero_line=True,
    )
    _time_panel(
        cv,
        t,
        [("sigma_AT (rad)", log.data[idx, C.COL_SIGMA_TARGET], _PALETTE[1], None)],
        0.55 * t_span,
        zero_line=True,
    )
    return cv.render()


def _safety_svg(log: TrajectoryLog) -> str:
    cv = _Canvas()
    idx = _subsample(len(log.data))
    t = log.data[idx, C.COL_T]
    series = [("h (m)", log.data[idx, C.COL_H], "#000000", None)]
    for i in range(log.n_defenders):
        _, _, cb = C.defender_columns(i)
        series.append(
            (f"b_{i + 1} (m)", log.data[idx, cb], _PALETTE[i % len(_PALETTE)], None)
        )
    _time_panel(cv, t, series, 0.0, zero_line=True)
    return cv.render()


def _accel_svg(log: TrajectoryLog) -> str:
    cv = _Canvas()
    idx = _subsample(len(log.data))
    t = log.data[idx, C.COL_T]
    limit = log.scenario.params.accel_limit
    clip = COMMAND_CLIP_LIMITS * limit
    commanded = np.clip(log.data[idx, C.COL_A_COMMANDED], -clip, clip)
    series = [
        ("a_A (m/s^2)", log.data[idx, C.COL_ACCEL], "#000000", None),
        ("a_d (m/s^2)", log.data[idx, C.COL_A_DESIRED], _PALETTE[0], None),
        ("a_c (m/s^2, clipped)", commanded, _PALETTE[1], None),
    ]
    _time_panel(
        cv, t, series, 0.0, zero_line=True, extra_levels=(limit, -limit)
    )
    return cv.render()


_BUILDERS = {
    "trajectory": _trajectory_svg,
    "range_bearing": _range_bearing_svg,
    "safety": _safety_svg,
    "accel": _accel_svg,
}


def render_plot(log: TrajectoryLog, kind: str) -> str:
    """SVG text for one plot kind; deterministic for a given log."""
    if len(log.data) == 0:
        raise ValueError("empty trajectory log")
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ValueError(
            f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}"
        ) from None
    return builder(log)


def emit_plots(log: TrajectoryLog, kind: str, destination) -> None:
    """Render one plot kind to a path or writable text stream."""
    text = render_plot(log, kind)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
