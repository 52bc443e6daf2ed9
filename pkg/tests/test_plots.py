"""SVG plot emission: well-formedness, determinism, required elements."""

import io
import re
import xml.etree.ElementTree as ET

import pytest

from ezguide.plots import PLOT_KINDS, emit_plots, render_plot


@pytest.fixture(scope="module", params=PLOT_KINDS)
def rendered(request, log1):
    return request.param, render_plot(log1, request.param)


def _viewbox(svg_text):
    root = ET.fromstring(svg_text)
    x, y, w, h = (float(v) for v in root.attrib["viewBox"].split())
    return x, y, w, h


def test_well_formed_xml_without_scripts(rendered):
    _, svg = rendered
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert "script" not in svg.lower()


def test_deterministic_output(log1, rendered):
    kind, svg = rendered
    assert render_plot(log1, kind) == svg


def test_viewbox_covers_all_geometry_with_margin(rendered):
    _, svg = rendered
    x0, y0, w, h = _viewbox(svg)
    number = r"(-?\d+\.?\d*(?:e[+-]?\d+)?)"
    coords = [
        (float(a), float(b)) for a, b in re.findall(number + "," + number, svg)
    ]
    assert coords
    for cx, cy in coords:
        assert x0 <= cx <= x0 + w
        assert y0 <= cy <= y0 + h
    # The margin leaves slack on every side (10% of the content extent).
    min_x = min(c for c, _ in coords)
    max_x = max(c for c, _ in coords)
    assert x0 < min_x and max_x < x0 + w


def test_trajectory_has_three_dotted_reach_circles(log1):
    svg = render_plot(log1, "trajectory")
    dotted = re.findall(r'<circle[^>]*r="2"[^>]*stroke-dasharray', svg)
    assert len(dotted) == 3


def test_trajectory_draws_zone_curves_and_path(log1):
    svg = render_plot(log1, "trajectory")
    # One closed boundary curve per defender plus the open attacker path.
    assert svg.count("<polygon") == 3
    assert svg.count("<polyline") >= 3  # path + target cross arms


def test_safety_plot_has_aggregate_and_per_defender_series(log1):
    svg = render_plot(log1, "safety")
    assert "h (m)" in svg
    for i in (1, 2, 3):
        assert f"b_{i} (m)" in svg


def test_accel_plot_has_two_dashed_limit_lines(log1):
    svg = render_plot(log1, "accel")
    dashed = re.findall(r'<polyline[^>]*stroke-dasharray', svg)
    assert len(dashed) >= 2
    assert "a_A (m/s^2)" in svg and "a_d (m/s^2)" in svg

def test_range_bearing_has_both_panels(log1):
    svg = render_plot(log1, "range_bearing")
    assert "r_AT (m)" in svg
    assert "sigma_AT (rad)" in svg


def test_unknown_kind_rejected(log1):
    with pytest.raises(ValueError, match="unknown plot kind"):
        render_plot(log1, "heatmap")


def test_empty_log_rejected(log1):
    empty = log1.__class__(
        data=log1.data[:0], outcome=log1.outcome, scenario=log1.scenario
    )
    with pytest.raises(ValueError, match="empty"):
        render_plot(empty, "trajectory")


def test_emit_to_stream_and_path(tmp_path, log1):
    buf = io.StringIO()
    emit_plots(log1, "trajectory", buf)
    path = tmp_path / "out.svg"
    emit_plots(log1, "trajectory", path)
    assert path.read_text() == buf.getvalue()
