import numpy as np
import pytest

from parkfield.field import FieldMap, sample_field
from parkfield.geometry import Point2
from parkfield.render import contour_polylines, render_scene, scene_bounds
from parkfield.scenario import area_field_set, build_footprint
from parkfield.solver import Pose

from conftest import load_golden, regular_polygon
from parkfield.field import FieldSet


def radial_map(radius=1.0, extent=2.0, nodes=41):
    xs = np.linspace(-extent, extent, nodes)
    gx, gy = np.meshgrid(xs, xs)
    values = radius - np.hypot(gx, gy)
    cell = xs[1] - xs[0]
    return FieldMap(Point2(-extent, -extent), cell, nodes, nodes, values)


def test_level_set_contour_approximates_circle():
    # level chosen so no lattice node sits exactly on the contour
    fmap = radial_map()
    lines = contour_polylines(fmap, 0.093)
    assert len(lines) == 1
    points = lines[0]
    assert len(points) > 20
    radii = [np.hypot(x, y) for x, y in points]
    assert max(abs(r - 0.907) for r in radii) < 0.02


def test_contour_absent_outside_range():
    fmap = radial_map()
    assert contour_polylines(fmap, 2.0) == []
    assert contour_polylines(fmap, -5.0) == []


def test_contours_nest_with_level():
    fmap = radial_map()
    inner = contour_polylines(fmap, 0.493)[0]
    outer = contour_polylines(fmap, -0.437)[0]
    assert max(np.hypot(x, y) for x, y in inner) < min(
        np.hypot(x, y) for x, y in outer
    )


def test_field_render_has_contours_around_obstacle():
    scenario = load_golden("field_demo.json")
    fmap = sample_field(area_field_set(scenario), scene_bounds(scenario), 8.0)
    svg = render_scene(scenario, fmap=fmap)
    assert svg.count("<polyline") >= 5
    assert svg.count("<polygon") >= 2  # spot outline + obstacle


def test_pose_render_draws_footprint():
    scenario = load_golden("empty_spot.json")
    footprint = build_footprint(scenario.context, scenario.vehicle)
    svg = render_scene(
        scenario,
        poses={"main": Pose(2.5, 1.25, 0.0)},
        footprint=footprint,
    )
    # spot outline + body + one maneuver rect
    assert svg.count("<polygon") == 3


def test_render_deterministic():
    scenario = load_golden("field_demo.json")
    fmap = sample_field(area_field_set(scenario), scene_bounds(scenario), 8.0)
    a = render_scene(scenario, fmap=fmap)
    b = render_scene(scenario, fmap=fmap)
    assert a == b
    assert a.startswith("<svg ") and a.rstrip().endswith("</svg>")


def test_chained_polylines_cover_all_segments():
    fields = FieldSet((regular_polygon(0.0, 0.0, 1.0, 6),))
    fmap = sample_field(fields, (-2.0, -2.0, 2.0, 2.0), 10.0)
    for level in (-0.5, 0.0, 0.4):
        lines = contour_polylines(fmap, level)
        assert lines, level
        total_points = sum(len(line) for line in lines)
        assert total_points >= 10
