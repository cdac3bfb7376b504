"""Scenario composition on an induced subgraph.

A scenario is an environment configuration plus actors placed on
spawn nodes of the subgraph induced by a ROI. Actor parameters are
encoded as node attributes and one ``goal`` edge per actor, making the
annotated graph the single source of truth for serialization. All
operations are value-semantic: they return a new Scenario and leave
the input untouched.
"""

from __future__ import annotations

import math
import uuid
import warnings
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .assets import CATEGORIES, AssetCatalog
from .errors import ConflictError, DomainError, NotFoundError, ValidationError
from .lanegraph import (
    DIRECTED_RELATIONS,
    GraphEdge,
    LaneGraph,
    reachable_set,
    terminal_nodes,
)
from .regions import (
    RegionPartition,
    Roi,
    eligible_extensions,
    expand_roi,
    induced_subgraph,
    validate_roi,
)
from .rng import SplitMix64

TIMES_OF_DAY = ("dawn", "noon", "sunset", "night")
DEFAULT_OFFSET_MARGIN = 1.0

DEFAULT_CATEGORY_WEIGHTS: dict[str, float] = {
    "normal_vehicle": 0.5,
    "pedestrian": 0.2,
    "bicycle": 0.05,
    "motorcycle": 0.05,
    "van": 0.1,
    "truck": 0.05,
    "bus": 0.05,
}

DEFAULT_VELOCITY_RANGES: dict[str, tuple[float, float]] = {
    "normal_vehicle": (3.0, 14.0),
    "van": (3.0, 14.0),
    "truck": (3.0, 14.0),
    "bus": (3.0, 14.0),
    "motorcycle": (3.0, 14.0),
    "bicycle": (2.0, 7.0),
    "pedestrian": (0.5, 2.0),
}


class ScenarioWarning(UserWarning):
    """Non-fatal conditions met while composing or sampling scenarios."""


@dataclass(frozen=True)
class EnvironmentConfig:
    weather_preset: str
    time_of_day: str | int = "noon"


@dataclass(frozen=True)
class ActorSpec:
    actor_id: str
    category: str
    model: str | None
    spawn_node: str
    goal_node: str
    desired_velocity: float
    lateral_offset: float = 0.0
    is_ego: bool = False


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    map_id: str
    roi: Roi
    environment: EnvironmentConfig
    actors: tuple[ActorSpec, ...]
    ego: str | None
    subgraph: LaneGraph

    def actor(self, actor_id: str) -> ActorSpec | None:
        for a in self.actors:
            if a.actor_id == actor_id:
                return a
        return None


@dataclass(frozen=True)
class MapBundle:
    """Everything the scenario layer needs to know about one ingested map."""

    map_id: str
    graph: LaneGraph  # combined road + pedestrian graph
    partition: RegionPartition


def resolve_environment(environment: EnvironmentConfig, catalog: AssetCatalog) -> EnvironmentConfig:
    """Validate the preset and apply its implied time of day, if any."""
    preset = catalog.preset(environment.weather_preset)
    if preset is None:
        raise NotFoundError("unknown_preset", f"unknown weather preset {environment.weather_preset!r}")
    time = environment.time_of_day
    if isinstance(time, bool) or not (
        (isinstance(time, int) and 0 <= time < 24 * 60) or time in TIMES_OF_DAY
    ):
        raise DomainError("bad_time_of_day", f"time_of_day {time!r} is neither symbolic nor minutes")
    if preset.implies_time is not None:
        time = preset.implies_time
    return EnvironmentConfig(weather_preset=preset.preset_id, time_of_day=time)


def new_scenario(
    bundle: MapBundle,
    roi: Roi,
    environment: EnvironmentConfig,
    catalog: AssetCatalog,
    scenario_id: str | None = None,
) -> Scenario:
    """Empty scenario over the ROI-induced road + pedestrian subgraph."""
    validate_roi(bundle.partition, roi)
    env = resolve_environment(environment, catalog)
    subgraph = induced_subgraph(bundle.graph, bundle.partition, roi)
    return Scenario(
        scenario_id=scenario_id or f"scn-{uuid.uuid4().hex}",
        map_id=bundle.map_id,
        roi=roi,
        environment=env,
        actors=(),
        ego=None,
        subgraph=subgraph,
    )


# ---------------------------------------------------------------------------
# goal candidates and capacity


def goal_candidates(scenario: Scenario, spawn_node: str) -> set[str]:
    """Valid goals for an actor spawned at ``spawn_node``.

    Road-bound spawns may target reachable terminal nodes; pedestrian
    spawns may target any other node of their connected footway chain.
    """
    graph = scenario.subgraph
    node = graph.nodes.get(spawn_node)
    if node is None:
        raise NotFoundError("unknown_node", f"unknown node {spawn_node}")
    reachable = reachable_set(graph, spawn_node)
    if node.kind == "road_bound":
        return (terminal_nodes(graph) & reachable) - {spawn_node}
    return reachable - {spawn_node}


def eligible_spawn_nodes(scenario: Scenario) -> set[str]:
    """Unoccupied road-bound nodes with at least one goal candidate."""
    graph = scenario.subgraph
    occupied = {a.spawn_node for a in scenario.actors}
    terminals = terminal_nodes(graph)
    road_terminals = {n for n in terminals if graph.nodes[n].kind == "road_bound"}
    # reverse reachability: which nodes can reach a terminal at all
    reaches = set(road_terminals)
    frontier = list(road_terminals)
    while frontier:
        current = frontier.pop()
        for other, _edge in graph.incoming(current, DIRECTED_RELATIONS):
            if other not in reaches:
                reaches.add(other)
                frontier.append(other)
    return {
        n for n in reaches
        if n not in road_terminals
        and graph.nodes[n].kind == "road_bound"
        and n not in occupied
    }


def eligible_pedestrian_spawns(scenario: Scenario) -> set[str]:
    """Unoccupied pedestrian nodes connected to at least one other node."""
    graph = scenario.subgraph
    occupied = {a.spawn_node for a in scenario.actors}
    out = set()
    for nid, node in graph.nodes.items():
        if node.kind != "pedestrian" or nid in occupied:
            continue
        if any(True for _ in graph.outgoing(nid, frozenset({"pedestrian"}))):
            out.add(nid)
    return out


def max_allowable_actors(scenario: Scenario) -> int:
    return len(eligible_spawn_nodes(scenario))


# ---------------------------------------------------------------------------
# actor encoding on the subgraph


def strip_actor_encoding(graph: LaneGraph) -> LaneGraph:
    """Subgraph without any actor attributes or goal edges."""
    return graph.with_changes(
        edges=[e for e in graph.edges if e.relation != "goal"], node_attrs={}
    )


def _encode_actors(graph: LaneGraph, actors: tuple[ActorSpec, ...]) -> LaneGraph:
    base = strip_actor_encoding(graph)
    attrs: dict[str, dict[str, object]] = {}
    edges = list(base.edges)
    for a in actors:
        record: dict[str, object] = {
            "actor": a.actor_id,
            "category": a.category,
            "velocity": a.desired_velocity,
            "offset": a.lateral_offset,
        }
        if a.model is not None:
            record["model"] = a.model
        if a.is_ego:
            record["ego"] = True
        attrs[a.spawn_node] = record
        spawn, goal = base.nodes[a.spawn_node], base.nodes[a.goal_node]
        edges.append(
            GraphEdge(a.spawn_node, a.goal_node, "goal",
                      math.hypot(goal.x - spawn.x, goal.y - spawn.y))
        )
    return base.with_changes(edges=edges, node_attrs=attrs)


def actors_from_subgraph(graph: LaneGraph) -> tuple[ActorSpec, ...]:
    """Reconstruct the actor list from node attributes plus goal edges."""
    goals = {e.from_node: e.to_node for e in graph.edges if e.relation == "goal"}
    specs = []
    for nid in sorted(graph.node_attrs):
        attrs = graph.node_attrs[nid]
        if nid not in goals:
            raise ValidationError(f"spawn node {nid} carries actor attributes but no goal edge")
        specs.append(
            ActorSpec(
                actor_id=str(attrs["actor"]),
                category=str(attrs["category"]),
                model=str(attrs["model"]) if "model" in attrs else None,
                spawn_node=nid,
                goal_node=goals[nid],
                desired_velocity=float(attrs["velocity"]),
                lateral_offset=float(attrs.get("offset", 0.0)),
                is_ego=bool(attrs.get("ego", False)),
            )
        )
    return tuple(sorted(specs, key=lambda a: a.actor_id))


def _rebuild(scenario: Scenario, actors: tuple[ActorSpec, ...]) -> Scenario:
    ego = next((a.actor_id for a in actors if a.is_ego), None)
    return replace(
        scenario,
        actors=actors,
        ego=ego,
        subgraph=_encode_actors(scenario.subgraph, actors),
    )


# ---------------------------------------------------------------------------
# mutations


def validate_actor_spec(
    scenario: Scenario,
    spec: ActorSpec,
    catalog: AssetCatalog,
    offset_margin: float = DEFAULT_OFFSET_MARGIN,
) -> list[str]:
    """All invariant violations of ``spec`` against the scenario subgraph."""
    graph = scenario.subgraph
    failures: list[str] = []
    spawn = graph.nodes.get(spec.spawn_node)
    goal = graph.nodes.get(spec.goal_node)
    if spawn is None:
        raise NotFoundError("unknown_node", f"unknown spawn node {spec.spawn_node}")
    if goal is None:
        raise NotFoundError("unknown_node", f"unknown goal node {spec.goal_node}")
    if spec.category not in CATEGORIES:
        failures.append(f"unknown category {spec.category!r}")
    else:
        expected_kind = "pedestrian" if spec.category == "pedestrian" else "road_bound"
        if spawn.kind != expected_kind:
            failures.append(
                f"category {spec.category} requires a {expected_kind} spawn node, got {spawn.kind}"
            )
        if goal.kind != expected_kind:
            failures.append(
                f"category {spec.category} requires a {expected_kind} goal node, got {goal.kind}"
            )
    if spec.desired_velocity <= 0:
        failures.append(f"desired_velocity must be positive, got {spec.desired_velocity}")
    if abs(spec.lateral_offset) > offset_margin + 1e-12:
        failures.append(
            f"lateral_offset {spec.lateral_offset} exceeds the {offset_margin} m margin"
        )
    if spec.model is not None:
        model = catalog.model(spec.model)
        if model is None:
            failures.append(f"model {spec.model!r} is not in the asset catalog")
        elif model.category != spec.category:
            failures.append(
                f"model {spec.model!r} is a {model.category}, not a {spec.category}"
            )
    if spec.is_ego and spec.category == "pedestrian":
        failures.append("a pedestrian cannot be the ego actor")
    if spec.goal_node == spec.spawn_node:
        failures.append("goal node must differ from spawn node")
    elif not failures and spec.goal_node not in goal_candidates(scenario, spec.spawn_node):
        failures.append(
            f"goal {spec.goal_node} is not a reachable goal candidate of {spec.spawn_node}"
        )
    return failures


def place_actor(
    scenario: Scenario,
    spec: ActorSpec,
    catalog: AssetCatalog,
    offset_margin: float = DEFAULT_OFFSET_MARGIN,
) -> Scenario:
    """Add one actor; annotates the spawn node and adds its goal edge."""
    if scenario.actor(spec.actor_id) is not None:
        raise ConflictError("duplicate_actor", f"actor id {spec.actor_id} already placed")
    if any(a.spawn_node == spec.spawn_node for a in scenario.actors):
        raise ConflictError("occupied_node", f"spawn node {spec.spawn_node} is occupied")
    failures = validate_actor_spec(scenario, spec, catalog, offset_margin)
    if failures:
        raise ValidationError(f"invalid actor {spec.actor_id}", failures=failures)
    actors = scenario.actors + (spec,)
    if spec.is_ego:  # the flag moves: clear previous holder
        actors = tuple(
            a if a.actor_id == spec.actor_id else replace(a, is_ego=False) for a in actors
        )
    return _rebuild(scenario, actors)


def designate_ego(scenario: Scenario, actor_id: str) -> Scenario:
    actor = scenario.actor(actor_id)
    if actor is None:
        raise NotFoundError("unknown_actor", f"unknown actor {actor_id}")
    if actor.category == "pedestrian":
        raise ValidationError(f"actor {actor_id} is a pedestrian and cannot be ego")
    actors = tuple(replace(a, is_ego=a.actor_id == actor_id) for a in scenario.actors)
    return _rebuild(scenario, actors)


def set_environment(
    scenario: Scenario, environment: EnvironmentConfig, catalog: AssetCatalog
) -> Scenario:
    return replace(scenario, environment=resolve_environment(environment, catalog))


def remove_actor(scenario: Scenario, actor_id: str) -> Scenario:
    if scenario.actor(actor_id) is None:
        raise NotFoundError("unknown_actor", f"unknown actor {actor_id}")
    actors = tuple(a for a in scenario.actors if a.actor_id != actor_id)
    return _rebuild(scenario, actors)


def expand_scenario_roi(scenario: Scenario, bundle: MapBundle, region_id: str) -> Scenario:
    """Grow the scenario's ROI by one eligible region, keeping its actors.

    Growth can turn a placed goal node non-terminal (its outgoing
    successor edge returns with the new region); such expansions are
    rejected so goal soundness holds after every operation.
    """
    roi = expand_roi(bundle.partition, scenario.roi, region_id)
    subgraph = induced_subgraph(bundle.graph, bundle.partition, roi)
    grown = _rebuild(replace(scenario, roi=roi, subgraph=subgraph), scenario.actors)
    invalidated = [
        a.actor_id
        for a in grown.actors
        if a.goal_node not in goal_candidates(grown, a.spawn_node)
    ]
    if invalidated:
        raise ConflictError(
            "invalidates_actors",
            f"expanding into {region_id} would invalidate goals of: {', '.join(invalidated)}",
            actors=invalidated,
        )
    return grown


def export_empty_subgraph(scenario: Scenario) -> str:
    """The scenario subgraph with all actor annotations stripped, as GraphML."""
    from .graphml import graph_to_graphml

    return graph_to_graphml(strip_actor_encoding(scenario.subgraph))


# ---------------------------------------------------------------------------
# automated sampling


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    fill_percentage: float = 0.3
    category_weights: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_CATEGORY_WEIGHTS)
    )
    velocity_ranges: Mapping[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_VELOCITY_RANGES)
    )
    lateral_offset_range: tuple[float, float] = (-0.5, 0.5)
    roi_region_count_range: tuple[int, int] = (1, 3)


def validate_sampler_config(config: SamplerConfig) -> None:
    if not (0 <= config.seed < 2 ** 64):
        raise DomainError("bad_seed", "seed must fit in an unsigned 64-bit integer")
    if not (0.0 <= config.fill_percentage <= 1.0):
        raise DomainError("bad_fill", "fill_percentage must lie in [0, 1]")
    weights = dict(config.category_weights)
    if any(w < 0 for w in weights.values()) or sum(weights.values()) <= 0:
        raise DomainError("bad_weights", "category weights must be non-negative with a positive sum")
    for cat in weights:
        if cat not in CATEGORIES:
            raise DomainError("bad_weights", f"unknown category {cat!r} in weights")
    for cat, (lo, hi) in dict(config.velocity_ranges).items():
        if cat not in CATEGORIES or lo <= 0 or hi < lo:
            raise DomainError("bad_velocity_range", f"bad velocity range for {cat!r}")
    lo, hi = config.lateral_offset_range
    if hi < lo:
        raise DomainError("bad_offset_range", "lateral_offset_range must be ordered")
    if abs(lo) > DEFAULT_OFFSET_MARGIN or abs(hi) > DEFAULT_OFFSET_MARGIN:
        raise DomainError(
            "bad_offset_range",
            f"lateral offsets must stay within the {DEFAULT_OFFSET_MARGIN} m lane margin",
        )
    rlo, rhi = config.roi_region_count_range
    if rlo < 1 or rhi < rlo:
        raise DomainError("bad_region_range", "roi_region_count_range must be ordered and >= 1")


def _weights_for(config: SamplerConfig, exclude: set[str]) -> list[float]:
    weights = dict(config.category_weights)
    return [0.0 if c in exclude else float(weights.get(c, 0.0)) for c in CATEGORIES]


def sample_scenario(
    bundles: Sequence[MapBundle],
    config: SamplerConfig,
    catalog: AssetCatalog,
) -> Scenario:
    """Deterministic random scenario from (bundles, config.seed).

    Draw order is fixed and frozen by golden files: map, initial
    region, roi size, growth picks, weather preset, time of day,
    scenario id, then per actor category, spawn, velocity, offset,
    goal and model. Pedestrian draws fall back to vehicle categories
    when no footway spawn is free, keeping the actor count exact.
    """
    validate_sampler_config(config)
    if not bundles:
        raise DomainError("empty_catalog", "no ingested maps to sample from")
    rng = SplitMix64(config.seed)
    bundle = rng.choice(sorted(bundles, key=lambda b: b.map_id))

    roi = Roi.start(rng.choice(sorted(bundle.partition.regions)))
    target_regions = rng.randint(*config.roi_region_count_range)
    while len(roi.region_ids) < target_regions:
        eligible = sorted(eligible_extensions(bundle.partition, roi))
        if not eligible:
            break
        roi = expand_roi(bundle.partition, roi, rng.choice(eligible))

    preset_id = rng.choice(sorted(catalog.preset_ids()))
    implied = catalog.preset(preset_id).implies_time
    time_of_day = implied if implied is not None else rng.choice(TIMES_OF_DAY)
    scenario_id = f"scn-{rng.next_u64():016x}"
    scenario = new_scenario(
        bundle, roi, EnvironmentConfig(preset_id, time_of_day), catalog,
        scenario_id=scenario_id,
    )

    capacity = max_allowable_actors(scenario)
    count = int(math.floor(config.fill_percentage * capacity))
    if config.fill_percentage > 0 and capacity == 0:
        warnings.warn(
            f"scenario {scenario_id}: no eligible spawn nodes, sampling zero actors",
            ScenarioWarning,
        )
    velocity_ranges = dict(DEFAULT_VELOCITY_RANGES)
    velocity_ranges.update(config.velocity_ranges)

    for i in range(count):
        category = rng.weighted_choice(CATEGORIES, _weights_for(config, set()))
        if category == "pedestrian" and not eligible_pedestrian_spawns(scenario):
            fallback = _weights_for(config, {"pedestrian"})
            category = (
                rng.weighted_choice(CATEGORIES, fallback)
                if sum(fallback) > 0
                else "normal_vehicle"
            )
        if category == "pedestrian":
            spawn = rng.choice(sorted(eligible_pedestrian_spawns(scenario)))
            offset = 0.0
        else:
            spawn = rng.choice(sorted(eligible_spawn_nodes(scenario)))
            offset = rng.uniform(*config.lateral_offset_range)
        velocity = rng.uniform(*velocity_ranges[category])
        goal = rng.choice(sorted(goal_candidates(scenario, spawn)))
        models = catalog.models_of(category)
        model = rng.choice(models).model_id if models else None
        spec = ActorSpec(
            actor_id=f"npc-{i:03d}", category=category, model=model,
            spawn_node=spawn, goal_node=goal,
            desired_velocity=velocity, lateral_offset=offset,
        )
        scenario = place_actor(scenario, spec, catalog)
    return scenario
