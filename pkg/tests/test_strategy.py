import math

import pytest

from parkfield.field import FieldSet
from parkfield.geometry import Point2, Polygon, transform_polygon
from parkfield.scenario import (
    CabinContext,
    Rect,
    Scenario,
    VehicleFootprint,
    VehicleSpec,
    build_footprint,
    make_spot,
    spot_field_set,
)
from parkfield.solver import Pose, SamplingPlan, SolveResult, objective
from parkfield.strategy import (
    BACKWARDS,
    CENTERED,
    FORWARDS,
    MAX_BACK,
    MAX_LEFT,
    MAX_RIGHT,
    rank_spots,
    round_strategy,
    spot_margins,
)

from conftest import load_golden


def standard_spot(spot_id="s"):
    return make_spot(
        spot_id,
        [Point2(0, 0), Point2(5, 0), Point2(5, 2.5), Point2(0, 2.5)],
        "x_max",
    )


def fake_result(x, y, theta, score=-1.0):
    return SolveResult(Pose(x, y, theta), score, 1, True)


BODY = VehicleFootprint(Rect(-2.1, 2.1, -0.9, 0.9))


# ---------------------------------------------------------------------------
# round_strategy
# ---------------------------------------------------------------------------


def test_centered_pose_rounds_centered():
    strategy = round_strategy(fake_result(2.5, 1.25, 0.0), standard_spot(), BODY)
    assert strategy.lateral_bias == CENTERED
    assert strategy.longitudinal_bias == CENTERED
    assert strategy.direction == FORWARDS


def test_rounding_is_idempotent_pure():
    result = fake_result(2.3, 1.0, 0.05)
    a = round_strategy(result, standard_spot(), BODY)
    b = round_strategy(result, standard_spot(), BODY)
    assert a == b


def test_backwards_left_back_phrase():
    # nose away from the x_max approach edge, footprint shifted toward
    # the right (low y) and the front (high x): space remains on the
    # left and at the back
    strategy = round_strategy(
        fake_result(2.8, 1.0, math.pi), standard_spot(), BODY
    )
    assert strategy.direction == BACKWARDS
    assert strategy.lateral_bias == MAX_LEFT
    assert strategy.longitudinal_bias == MAX_BACK
    assert "backwards" in strategy.explanation
    assert "left" in strategy.explanation
    assert "back" in strategy.explanation


def test_direction_follows_approach_side():
    spot_ymin = make_spot(
        "s", [Point2(0, 0), Point2(5, 0), Point2(5, 2.5), Point2(0, 2.5)], "y_min"
    )
    towards = round_strategy(
        fake_result(2.5, 1.25, -math.pi / 2 + 0.1), spot_ymin, BODY
    )
    away = round_strategy(
        fake_result(2.5, 1.25, math.pi / 2 - 0.1), spot_ymin, BODY
    )
    assert towards.direction == FORWARDS
    assert away.direction == BACKWARDS


def test_bias_uses_footprint_not_body_center():
    # body centered, but a deep left band makes the left margin smaller
    footprint = VehicleFootprint(
        Rect(-2.1, 2.1, -0.9, 0.9), ((Rect(-2.1, 2.1, 0.9, 1.6), "rear_left_door"),)
    )
    strategy = round_strategy(
        fake_result(2.5, 1.25, 0.0), standard_spot(), footprint
    )
    assert strategy.lateral_bias == MAX_RIGHT


def test_bias_soundness_on_goldens():
    for name in (
        "single_obstacle.json",
        "single_obstacle_baby.json",
        "two_obstacles.json",
        "adjacent_car.json",
    ):
        scenario = load_golden(name)
        ranked = rank_spots(scenario, explain=False)
        footprint = build_footprint(scenario.context, scenario.vehicle)
        spots = {s.id: s for s in scenario.spots}
        for strategy in ranked.strategies:
            margins = spot_margins(footprint, strategy.pose, spots[strategy.spot_id])
            if strategy.lateral_bias == MAX_LEFT:
                assert margins["left"] > margins["right"]
            elif strategy.lateral_bias == MAX_RIGHT:
                assert margins["right"] > margins["left"]
            if strategy.longitudinal_bias == MAX_BACK:
                assert margins["back"] > margins["front"]
            elif strategy.longitudinal_bias == "maximize_front":
                assert margins["front"] > margins["back"]


# ---------------------------------------------------------------------------
# rank_spots
# ---------------------------------------------------------------------------


def test_single_empty_spot_centered_strategy():
    ranked = rank_spots(load_golden("empty_spot.json"))
    assert len(ranked.strategies) == 1
    strategy = ranked.strategies[0]
    assert strategy.lateral_bias == CENTERED
    assert strategy.longitudinal_bias == CENTERED
    assert not ranked.infeasible


def test_obstructed_twin_ranks_second():
    spot_a = standard_spot("alpha")
    spot_b = make_spot(
        "beta",
        [Point2(0, 6), Point2(5, 6), Point2(5, 8.5), Point2(0, 8.5)],
        "x_max",
    )
    obstacle = Polygon(
        (Point2(0.2, 6.2), Point2(1.0, 6.2), Point2(1.0, 7.0), Point2(0.2, 7.0)),
        name="bin",
    )
    scenario = Scenario(
        (spot_a, spot_b), (obstacle,), CabinContext(), VehicleSpec()
    )
    ranked = rank_spots(scenario, explain=False)
    assert [s.spot_id for s in ranked.strategies] == ["alpha", "beta"]
    assert ranked.strategies[0].score < ranked.strategies[1].score


def test_flanked_spot_never_first():
    ranked = rank_spots(load_golden("three_spot_area.json"), explain=False)
    assert len(ranked.strategies) == 3
    assert ranked.strategies[0].spot_id != "spot_a"
    assert ranked.strategies[-1].spot_id == "spot_a"


def test_every_spot_accounted_for():
    spot_big = standard_spot("big")
    spot_small = make_spot(
        "small", [Point2(8, 0), Point2(11, 0), Point2(11, 1.5), Point2(8, 1.5)], "x_max"
    )
    scenario = Scenario((spot_big, spot_small), (), CabinContext(), VehicleSpec())
    ranked = rank_spots(scenario, explain=False)
    ids = [s.spot_id for s in ranked.strategies] + [sid for sid, _ in ranked.infeasible]
    assert sorted(ids) == ["big", "small"]
    assert ranked.infeasible[0][0] == "small"
    assert "does not fit" in ranked.infeasible[0][1]


def test_all_spots_infeasible_is_explicit():
    spot_small = make_spot(
        "small", [Point2(0, 0), Point2(3, 0), Point2(3, 1.5), Point2(0, 1.5)], "x_max"
    )
    scenario = Scenario((spot_small,), (), CabinContext(), VehicleSpec())
    ranked = rank_spots(scenario, explain=False)
    assert ranked.empty
    assert len(ranked.infeasible) == 1


def test_score_order_matches_reevaluation():
    ranked = rank_spots(load_golden("three_spot_area.json"), explain=False)
    scenario = load_golden("three_spot_area.json")
    footprint = build_footprint(scenario.context, scenario.vehicle)
    spots = {s.id: s for s in scenario.spots}
    recomputed = []
    for strategy in ranked.strategies:
        spot = spots[strategy.spot_id]
        fields = spot_field_set(
            spot, list(scenario.obstacles), reach=footprint.max_reach()
        )
        local = FieldSet(
            tuple(transform_polygon(spot.spot_frame, p) for p in fields.polygons)
        )
        value = objective(local, footprint, strategy.pose, SamplingPlan())
        assert value == pytest.approx(strategy.score, abs=1e-9)
        recomputed.append(value)
    assert recomputed == sorted(recomputed)


def test_baby_rectangle_drives_bias():
    scenario = load_golden("single_obstacle_baby.json")
    ranked = rank_spots(scenario)
    strategy = ranked.strategies[0]
    assert strategy.lateral_bias == MAX_LEFT
    assert "rear_right_door" in strategy.bias_drivers
    assert "rear_right_door" in strategy.explanation


def test_stats_reported_per_spot():
    ranked = rank_spots(load_golden("empty_spot.json"), explain=False)
    assert len(ranked.solve_stats) == 1
    spot_id, evaluations, converged = ranked.solve_stats[0]
    assert spot_id == "main"
    assert evaluations > 0
    assert converged is True
