"""HTTP API over the scenario workflow.

Stateless engine calls behind an in-memory session store: every
mutation replaces the stored scenario value, pushes the previous
serialized document onto a bounded undo stack and writes the new
document through to the cache directory. Writes to one scenario id
are serialized by a per-scenario lock.

Error bodies carry a machine-readable ``code`` plus a ``message``;
unknown ids map to 404, conflicts (occupancy, ineligible regions,
undo on an empty stack) to 409 and validation problems to 422.
"""

from __future__ import annotations

import threading
import uuid
from collections import defaultdict

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .assets import CATEGORIES
from .errors import ConflictError, NotFoundError, ScengenError
from .lanegraph import LaneGraph
from .persist import Workspace, document_to_scenario, scenario_to_document
from .realize import DEFAULT_DT, realize_scenario, timeline_to_document
from .regions import Roi, eligible_extensions, induced_subgraph
from .scenario import (
    ActorSpec,
    EnvironmentConfig,
    SamplerConfig,
    Scenario,
    designate_ego,
    eligible_spawn_nodes,
    expand_scenario_roi,
    export_empty_subgraph,
    goal_candidates,
    max_allowable_actors,
    new_scenario,
    place_actor,
    remove_actor,
    sample_scenario,
    set_environment,
)

UNDO_DEPTH = 50


class EnvironmentBody(BaseModel):
    weather_preset: str
    time_of_day: str | int = "noon"


class CreateScenarioBody(BaseModel):
    map_id: str
    roi: list[str]
    environment: EnvironmentBody


class ExpandBody(BaseModel):
    region_id: str


class ActorBody(BaseModel):
    actor_id: str | None = None
    category: str
    model: str | None = None
    spawn_node: str
    goal_node: str
    desired_velocity: float
    lateral_offset: float = 0.0
    is_ego: bool = False


class EgoBody(BaseModel):
    actor_id: str


class RealizeBody(BaseModel):
    dt: float = DEFAULT_DT


class GenerateBody(BaseModel):
    seed: int = 0
    fill_percentage: float = 0.3
    count: int = Field(default=1, ge=1, le=1000)
    roi_region_count_range: tuple[int, int] = (1, 3)
    category_weights: dict[str, float] | None = None
    lateral_offset_range: tuple[float, float] = (-0.5, 0.5)


class _Sessions:
    def __init__(self):
        self.scenarios: dict[str, Scenario] = {}
        self.undo: dict[str, list[str]] = defaultdict(list)
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()

    def lock(self, scenario_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks[scenario_id]

    def get(self, scenario_id: str) -> Scenario:
        scenario = self.scenarios.get(scenario_id)
        if scenario is None:
            raise NotFoundError("unknown_scenario", f"unknown scenario {scenario_id}")
        return scenario


def _error_status(exc: ScengenError) -> int:
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, ConflictError):
        return 409
    return 422


def create_app(workspace: Workspace, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="scengen", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions = _Sessions()

    @app.exception_handler(ScengenError)
    async def _handle_engine_error(_request: Request, exc: ScengenError):
        body: dict = {"code": exc.code, "message": exc.message}
        if getattr(exc, "failures", None):
            body["failures"] = exc.failures
        if exc.details:
            body.update(exc.details)
        return JSONResponse(status_code=_error_status(exc), content=body)

    # -- payload shaping

    def graph_payload(graph: LaneGraph) -> dict:
        return {
            "map_id": graph.map_id,
            "spacing": graph.spacing,
            "nodes": [
                {
                    "id": nid,
                    "x": node.x,
                    "y": node.y,
                    "heading": node.heading,
                    "s": node.s_coord,
                    "road": node.road_id,
                    "lane": node.lane_id,
                    "kind": node.kind,
                }
                for nid, node in sorted(graph.nodes.items())
            ],
            "edges": [
                {
                    "from": e.from_node,
                    "to": e.to_node,
                    "relation": e.relation,
                    "length": e.length,
                }
                for e in graph.sorted_edges()
            ],
        }

    def scenario_payload(scenario: Scenario) -> dict:
        bundle = workspace.bundle(scenario.map_id)
        return {
            "scenario_id": scenario.scenario_id,
            "map_id": scenario.map_id,
            "roi": list(scenario.roi.region_ids),
            "environment": {
                "weather_preset": scenario.environment.weather_preset,
                "time_of_day": scenario.environment.time_of_day,
            },
            "actors": [
                {
                    "actor_id": a.actor_id,
                    "category": a.category,
                    "model": a.model,
                    "spawn_node": a.spawn_node,
                    "goal_node": a.goal_node,
                    "desired_velocity": a.desired_velocity,
                    "lateral_offset": a.lateral_offset,
                    "is_ego": a.is_ego,
                }
                for a in scenario.actors
            ],
            "ego": scenario.ego,
            "max_allowable_actors": max_allowable_actors(scenario),
            "eligible_extensions": sorted(
                eligible_extensions(bundle.partition, scenario.roi)
            ),
            "eligible_spawn_nodes": sorted(eligible_spawn_nodes(scenario)),
            "undo_depth": len(sessions.undo[scenario.scenario_id]),
        }

    def _store(scenario: Scenario, previous_doc: str | None) -> None:
        sid = scenario.scenario_id
        sessions.scenarios[sid] = scenario
        if previous_doc is not None:
            stack = sessions.undo[sid]
            stack.append(previous_doc)
            del stack[:-UNDO_DEPTH]
        workspace.save_scenario(scenario)

    def _mutate(scenario_id: str, fn) -> Scenario:
        with sessions.lock(scenario_id):
            scenario = sessions.get(scenario_id)
            before = scenario_to_document(
                scenario, workspace.entry(scenario.map_id).digest
            )
            updated = fn(scenario)
            _store(updated, before)
            return updated

    # -- catalog and graphs

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/assets")
    def assets():
        return {
            "categories": list(CATEGORIES),
            "weather_presets": [
                {"id": p.preset_id, "name": p.display_name, "implies_time": p.implies_time}
                for p in workspace.catalog.weather_presets
            ],
            "models": [
                {
                    "id": m.model_id,
                    "category": m.category,
                    "name": m.display_name,
                    "length": m.length,
                    "width": m.width,
                }
                for m in workspace.catalog.models
            ],
        }

    @app.get("/maps")
    def maps():
        out = []
        for entry in workspace.entries():
            meta = entry.metadata
            out.append(
                {
                    "map_id": entry.map_id,
                    "spacing": entry.spacing,
                    "target_length": entry.target_length,
                    "junction_count": meta.junction_count,
                    "crosswalk_count": meta.crosswalk_count,
                    "traffic_light_count": meta.traffic_light_count,
                    "total_drivable_length": meta.total_drivable_length,
                    "bounding_box": list(meta.bounding_box),
                    "speed_limit_range": (
                        list(meta.speed_limit_range) if meta.speed_limit_range else None
                    ),
                }
            )
        return {"maps": out}

    @app.get("/maps/{map_id}/regions")
    def map_regions(map_id: str):
        partition = workspace.load_partition(map_id)
        return {
            "map_id": map_id,
            "regions": [
                {
                    "region_id": rid,
                    "kind": partition.regions[rid].kind,
                    "node_ids": sorted(partition.regions[rid].node_ids),
                }
                for rid in sorted(partition.regions)
            ],
            "adjacency": {
                rid: sorted(partition.adjacency[rid]) for rid in sorted(partition.adjacency)
            },
        }

    @app.get("/maps/{map_id}/graph")
    def map_graph(map_id: str, roi: str | None = Query(default=None)):
        bundle = workspace.bundle(map_id)
        graph = bundle.graph
        if roi:
            graph = induced_subgraph(
                bundle.graph, bundle.partition, Roi(tuple(roi.split(",")))
            )
        return graph_payload(graph)

    # -- scenario lifecycle

    @app.post("/scenarios", status_code=201)
    def create_scenario(body: CreateScenarioBody):
        bundle = workspace.bundle(body.map_id)
        scenario = new_scenario(
            bundle,
            Roi(tuple(body.roi)),
            EnvironmentConfig(body.environment.weather_preset, body.environment.time_of_day),
            workspace.catalog,
            scenario_id=f"scn-{uuid.uuid4().hex}",
        )
        with sessions.lock(scenario.scenario_id):
            _store(scenario, None)
        return scenario_payload(scenario)

    @app.get("/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str):
        return scenario_payload(sessions.get(scenario_id))

    @app.get("/scenarios/{scenario_id}/graph")
    def get_scenario_graph(scenario_id: str):
        return graph_payload(sessions.get(scenario_id).subgraph)

    @app.post("/scenarios/{scenario_id}/roi/expand")
    def expand(scenario_id: str, body: ExpandBody):
        updated = _mutate(
            scenario_id,
            lambda s: expand_scenario_roi(
                s, workspace.bundle(s.map_id), body.region_id
            ),
        )
        return scenario_payload(updated)

    @app.get("/scenarios/{scenario_id}/goal-candidates")
    def candidates(scenario_id: str, spawn: str = Query(...)):
        scenario = sessions.get(scenario_id)
        return {"spawn": spawn, "candidates": sorted(goal_candidates(scenario, spawn))}

    @app.post("/scenarios/{scenario_id}/actors", status_code=201)
    def add_actor(scenario_id: str, body: ActorBody):
        def apply(scenario: Scenario) -> Scenario:
            actor_id = body.actor_id or _next_actor_id(scenario)
            spec = ActorSpec(
                actor_id=actor_id,
                category=body.category,
                model=body.model,
                spawn_node=body.spawn_node,
                goal_node=body.goal_node,
                desired_velocity=body.desired_velocity,
                lateral_offset=body.lateral_offset,
                is_ego=body.is_ego,
            )
            return place_actor(scenario, spec, workspace.catalog)

        updated = _mutate(scenario_id, apply)
        payload = scenario_payload(updated)
        payload["actor_id"] = updated.actors[-1].actor_id
        return payload

    @app.delete("/scenarios/{scenario_id}/actors/{actor_id}")
    def delete_actor(scenario_id: str, actor_id: str):
        return scenario_payload(
            _mutate(scenario_id, lambda s: remove_actor(s, actor_id))
        )

    @app.post("/scenarios/{scenario_id}/ego")
    def set_ego(scenario_id: str, body: EgoBody):
        return scenario_payload(
            _mutate(scenario_id, lambda s: designate_ego(s, body.actor_id))
        )

    @app.post("/scenarios/{scenario_id}/environment")
    def set_env(scenario_id: str, body: EnvironmentBody):
        return scenario_payload(
            _mutate(
                scenario_id,
                lambda s: set_environment(
                    s,
                    EnvironmentConfig(body.weather_preset, body.time_of_day),
                    workspace.catalog,
                ),
            )
        )

    @app.post("/scenarios/{scenario_id}/undo")
    def undo(scenario_id: str):
        with sessions.lock(scenario_id):
            sessions.get(scenario_id)
            stack = sessions.undo[scenario_id]
            if not stack:
                raise ConflictError("nothing_to_undo", f"scenario {scenario_id} has no undo history")
            previous = document_to_scenario(stack.pop(), workspace)
            sessions.scenarios[scenario_id] = previous
            workspace.save_scenario(previous)
        return scenario_payload(previous)

    # -- realization and documents

    @app.post("/scenarios/{scenario_id}/realize")
    def realize(scenario_id: str, body: RealizeBody):
        scenario = sessions.get(scenario_id)
        timeline = realize_scenario(scenario, dt=body.dt)
        return PlainTextResponse(timeline_to_document(timeline))

    @app.get("/scenarios/{scenario_id}/export")
    def export(scenario_id: str):
        scenario = sessions.get(scenario_id)
        doc = scenario_to_document(scenario, workspace.entry(scenario.map_id).digest)
        return Response(content=doc, media_type="application/json")

    @app.get("/scenarios/{scenario_id}/export-empty")
    def export_empty(scenario_id: str):
        scenario = sessions.get(scenario_id)
        return Response(content=export_empty_subgraph(scenario), media_type="application/xml")

    @app.post("/scenarios/import", status_code=201)
    async def import_scenario(request: Request):
        document = (await request.body()).decode("utf-8")
        scenario = document_to_scenario(document, workspace)
        with sessions.lock(scenario.scenario_id):
            _store(scenario, None)
        return scenario_payload(scenario)

    @app.post("/generate")
    def generate(body: GenerateBody):
        bundles = workspace.bundles()
        documents = []
        for i in range(body.count):
            config = SamplerConfig(
                seed=(body.seed + i) % (2 ** 64),
                fill_percentage=body.fill_percentage,
                roi_region_count_range=body.roi_region_count_range,
                lateral_offset_range=body.lateral_offset_range,
                **(
                    {"category_weights": body.category_weights}
                    if body.category_weights
                    else {}
                ),
            )
            scenario = sample_scenario(bundles, config, workspace.catalog)
            documents.append(
                scenario_to_document(scenario, workspace.entry(scenario.map_id).digest)
            )
        return {"count": len(documents), "scenarios": documents}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _next_actor_id(scenario: Scenario) -> str:
    taken = {a.actor_id for a in scenario.actors}
    n = len(taken) + 1
    while f"a{n}" in taken:
        n += 1
    return f"a{n}"
