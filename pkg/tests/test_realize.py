import math

import pytest

from scengen.errors import DomainError, PlanningError
from scengen.lanegraph import GraphEdge, GraphNode, LaneGraph
from scengen.realize import (
    parse_timeline,
    plan_trajectory,
    realize_scenario,
    timeline_to_document,
)
from scengen.rng import SplitMix64
from scengen.scenario import ActorSpec, EnvironmentConfig, new_scenario, place_actor

from conftest import STRAIGHT_FULL_ROI
from oracles import enumerate_shortest

ENV = EnvironmentConfig("ClearNoon", "noon")


@pytest.fixture()
def straight_scenario(straight_bundle, catalog):
    return new_scenario(straight_bundle, STRAIGHT_FULL_ROI, ENV, catalog)


def graph_edges(graph):
    return [
        (e.from_node, e.to_node, e.length)
        for e in graph.edges
        if e.relation in ("successor", "left", "right")
    ]


def test_plan_straight_lane(straight_scenario):
    plan = plan_trajectory(
        straight_scenario.subgraph, "fixture_straight:1:-1:0", "fixture_straight:1:-1:20"
    )
    assert len(plan.node_path) == 21
    assert plan.path_length == pytest.approx(100.0)
    oracle = enumerate_shortest(
        graph_edges(straight_scenario.subgraph),
        "fixture_straight:1:-1:0",
        "fixture_straight:1:-1:20",
    )
    assert plan.path_length == pytest.approx(oracle[0])
    assert list(plan.node_path) == oracle[1]


def test_plan_single_edge(straight_scenario):
    plan = plan_trajectory(
        straight_scenario.subgraph, "fixture_straight:1:-1:19", "fixture_straight:1:-1:20"
    )
    assert len(plan.node_path) == 2
    assert plan.path_length == pytest.approx(5.0)


def test_plan_densification_step(straight_scenario):
    plan = plan_trajectory(
        straight_scenario.subgraph, "fixture_straight:1:-1:0", "fixture_straight:1:-1:20"
    )
    arcs = [row[0] for row in plan.poses]
    assert arcs[0] == 0.0
    assert arcs[-1] == pytest.approx(plan.path_length)
    assert all(b - a <= 0.5 + 1e-9 for a, b in zip(arcs, arcs[1:]))


def _tie_graph():
    nodes = {}
    positions = {
        "c:0": (0.0, 0.0),
        "c:a1": (3.0, 1.0),
        "c:a2": (7.0, 1.0),
        "c:b1": (3.0, -1.0),
        "c:b2": (7.0, -1.0),
        "c:z": (10.0, 0.0),
    }
    for nid, (x, y) in positions.items():
        nodes[nid] = GraphNode(nid, x, y, 0.0, 0.0, "1", -1, "road_bound")
    edges = [
        GraphEdge("c:0", "c:a1", "successor", 3.0),
        GraphEdge("c:a1", "c:a2", "successor", 4.0),
        GraphEdge("c:a2", "c:z", "successor", 3.0),
        GraphEdge("c:0", "c:b1", "right", 3.0),
        GraphEdge("c:b1", "c:b2", "successor", 4.0),
        GraphEdge("c:b2", "c:z", "left", 3.0),
    ]
    return LaneGraph("craft", 5.0, nodes, edges)


def test_plan_breaks_ties_lexicographically():
    graph = _tie_graph()
    plan = plan_trajectory(graph, "c:0", "c:z")
    assert plan.path_length == pytest.approx(10.0)
    assert plan.node_path == ("c:0", "c:a1", "c:a2", "c:z")
    oracle = enumerate_shortest(
        [(e.from_node, e.to_node, e.length) for e in graph.edges], "c:0", "c:z"
    )
    assert list(plan.node_path) == oracle[1]


def test_plan_unreachable():
    graph = _tie_graph()
    with pytest.raises(PlanningError):
        plan_trajectory(graph, "c:z", "c:0")


def test_plan_random_graphs_match_enumeration():
    rng = SplitMix64(99)
    for trial in range(40):
        n = rng.randint(4, 12)
        ids = [f"g:{i}" for i in range(n)]
        nodes = {
            nid: GraphNode(nid, rng.uniform(0, 50), rng.uniform(0, 50), 0.0, 0.0, "1", -1, "road_bound")
            for nid in ids
        }
        edges = []
        seen = set()
        for _ in range(2 * n):
            a, b = rng.choice(ids), rng.choice(ids)
            if a == b or (a, b) in seen:
                continue
            seen.add((a, b))
            edges.append(GraphEdge(a, b, "successor", rng.uniform(0.5, 10.0)))
        graph = LaneGraph("rand", 5.0, nodes, edges)
        triples = [(e.from_node, e.to_node, e.length) for e in edges]
        for _ in range(3):
            spawn, goal = rng.choice(ids), rng.choice(ids)
            if spawn == goal:
                continue
            oracle = enumerate_shortest(triples, spawn, goal)
            if oracle is None:
                with pytest.raises(PlanningError):
                    plan_trajectory(graph, spawn, goal)
            else:
                plan = plan_trajectory(graph, spawn, goal)
                assert plan.path_length == pytest.approx(oracle[0])


def car_at_speed(scenario, catalog, velocity=10.0, offset=0.0):
    spec = ActorSpec(
        actor_id="car", category="normal_vehicle", model=None,
        spawn_node="fixture_straight:1:-1:0", goal_node="fixture_straight:1:-1:20",
        desired_velocity=velocity, lateral_offset=offset,
    )
    return place_actor(scenario, spec, catalog)


def test_realize_arrival_time(straight_scenario, catalog):
    scenario = car_at_speed(straight_scenario, catalog, velocity=10.0)
    timeline = realize_scenario(scenario, dt=0.1)
    assert len(timeline.frames) == 101
    assert timeline.duration == pytest.approx(10.0)
    final = timeline.frames[-1]
    assert final.t == pytest.approx(10.0)
    assert final.states["car"].done
    assert final.states["car"].x == pytest.approx(100.0)
    assert not timeline.frames[-2].states["car"].done


def test_realize_lateral_offset(straight_scenario, catalog):
    scenario = car_at_speed(straight_scenario, catalog, offset=0.5)
    timeline = realize_scenario(scenario, dt=0.5)
    for frame in timeline.frames:
        assert frame.states["car"].y == pytest.approx(-1.75 + 0.5)


def test_realize_mirror_offset(straight_scenario, catalog):
    up = realize_scenario(car_at_speed(straight_scenario, catalog, offset=0.4), dt=0.5)
    down = realize_scenario(car_at_speed(straight_scenario, catalog, offset=-0.4), dt=0.5)
    center = realize_scenario(car_at_speed(straight_scenario, catalog, offset=0.0), dt=0.5)
    for fu, fd, fc in zip(up.frames, down.frames, center.frames):
        assert abs(
            fu.states["car"].y + fd.states["car"].y - 2 * fc.states["car"].y
        ) < 1e-9


def test_realize_arc_monotonic(straight_scenario, catalog):
    scenario = car_at_speed(straight_scenario, catalog, velocity=7.3)
    timeline = realize_scenario(scenario, dt=0.05)
    xs = [f.states["car"].x for f in timeline.frames]
    assert all(b >= a - 1e-12 for a, b in zip(xs, xs[1:]))
    increments = [b - a for a, b in zip(xs, xs[1:])]
    for inc in increments[:-1]:
        assert inc == pytest.approx(7.3 * 0.05, abs=1e-9)


def test_realize_empty_scenario(straight_scenario):
    timeline = realize_scenario(straight_scenario, dt=0.1)
    assert timeline.duration == 0.0
    assert len(timeline.frames) == 1
    assert timeline.frames[0].states == {}


def test_realize_bad_dt(straight_scenario):
    with pytest.raises(DomainError):
        realize_scenario(straight_scenario, dt=0.0)


def test_realize_frame_cap(straight_scenario, catalog):
    scenario = car_at_speed(straight_scenario, catalog, velocity=1e-6)
    with pytest.raises(DomainError) as exc:
        realize_scenario(scenario, dt=0.05)
    assert exc.value.code == "frame_cap"
    assert "car" in str(exc.value)


def test_realize_pedestrian_walks_undirected(straight_scenario, catalog):
    spec = ActorSpec(
        actor_id="walker", category="pedestrian", model=None,
        spawn_node="fixture_straight:1:-3:10", goal_node="fixture_straight:1:-3:0",
        desired_velocity=1.5,
    )
    scenario = place_actor(straight_scenario, spec, catalog)
    timeline = realize_scenario(scenario, dt=0.5)
    xs = [f.states["walker"].x for f in timeline.frames]
    assert xs[0] == pytest.approx(50.0)
    assert xs[-1] == pytest.approx(0.0)
    # walking direction faces negative x
    assert abs(timeline.frames[0].states["walker"].heading) == pytest.approx(math.pi)


def test_realize_deterministic(straight_scenario, catalog):
    scenario = car_at_speed(straight_scenario, catalog, velocity=9.7, offset=0.3)
    t1 = realize_scenario(scenario, dt=0.05)
    t2 = realize_scenario(scenario, dt=0.05)
    assert timeline_to_document(t1) == timeline_to_document(t2)


def test_timeline_document_roundtrip(straight_scenario, catalog):
    scenario = car_at_speed(straight_scenario, catalog)
    timeline = realize_scenario(scenario, dt=0.1)
    doc = timeline_to_document(timeline)
    parsed = parse_timeline(doc)
    assert parsed.dt == timeline.dt
    assert parsed.duration == timeline.duration
    assert len(parsed.frames) == len(timeline.frames)
    assert parsed.frames[-1].states == timeline.frames[-1].states
