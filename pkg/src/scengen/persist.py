"""Offline cache and document serialization.

Ingesting a map parses its OpenDRIVE source once and persists
everything later stages need under ``<cache_root>/<map_id>/``:

    meta.json       map metadata + build parameters
    graph.graphml   combined road + pedestrian graph
    regions.json    region partition + adjacency
    digest          source digest + parameters; marks the cache valid

Scenario documents are self-contained JSON files embedding their
subgraph as GraphML, so a single file can be shared and re-imported
against the same map cache. All writes are atomic
(write-temp-then-rename) and ingest holds an advisory lock per map.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .assets import AssetCatalog, load_asset_catalog
from .errors import FormatError, NotFoundError, StaleMapError, ValidationError
from .graphml import graph_to_graphml, graphml_to_graph
from .lanegraph import (
    DEFAULT_SPACING,
    LaneGraph,
    build_lane_graph,
    build_pedestrian_graph,
    merge_graphs,
)
from .opendrive import MapMetadata, extract_metadata, parse_opendrive
from .regions import (
    DEFAULT_TARGET_LENGTH,
    Region,
    RegionPartition,
    Roi,
    segment_regions,
    validate_roi,
)
from .scenario import (
    ActorSpec,
    EnvironmentConfig,
    MapBundle,
    Scenario,
    actors_from_subgraph,
    induced_subgraph,
    validate_actor_spec,
)

SCENARIO_FORMAT = "scenario/1"
REGIONS_FORMAT = "regions/1"
META_FORMAT = "map-meta/1"
DIGEST_FORMAT = "digest/1"


def source_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# metadata and partition documents


def metadata_to_payload(meta: MapMetadata) -> dict:
    return {
        "map_id": meta.map_id,
        "junction_count": meta.junction_count,
        "crosswalk_count": meta.crosswalk_count,
        "traffic_light_count": meta.traffic_light_count,
        "total_drivable_length": meta.total_drivable_length,
        "bounding_box": list(meta.bounding_box),
        "speed_limit_range": list(meta.speed_limit_range) if meta.speed_limit_range else None,
    }


def payload_to_metadata(payload: dict) -> MapMetadata:
    return MapMetadata(
        map_id=payload["map_id"],
        junction_count=int(payload["junction_count"]),
        crosswalk_count=int(payload["crosswalk_count"]),
        traffic_light_count=int(payload["traffic_light_count"]),
        total_drivable_length=float(payload["total_drivable_length"]),
        bounding_box=tuple(payload["bounding_box"]),
        speed_limit_range=(
            tuple(payload["speed_limit_range"]) if payload["speed_limit_range"] else None
        ),
    )


def partition_to_document(partition: RegionPartition) -> str:
    return _dumps(
        {
            "format": REGIONS_FORMAT,
            "map_id": partition.map_id,
            "regions": [
                {
                    "region_id": rid,
                    "kind": partition.regions[rid].kind,
                    "source": list(partition.regions[rid].source),
                    "node_ids": sorted(partition.regions[rid].node_ids),
                }
                for rid in sorted(partition.regions)
            ],
            "adjacency": {
                rid: sorted(partition.adjacency[rid]) for rid in sorted(partition.adjacency)
            },
        }
    )


def document_to_partition(document: str) -> RegionPartition:
    payload = _load_json(document)
    if payload.get("format") != REGIONS_FORMAT:
        raise FormatError("format_version", f"expected partition format {REGIONS_FORMAT!r}")
    regions = {
        r["region_id"]: Region(
            region_id=r["region_id"],
            kind=r["kind"],
            node_ids=frozenset(r["node_ids"]),
            source=tuple(r["source"]),
        )
        for r in payload["regions"]
    }
    return RegionPartition(
        map_id=payload["map_id"],
        regions=regions,
        adjacency={rid: frozenset(v) for rid, v in payload["adjacency"].items()},
    )


def _load_json(document: str) -> dict:
    try:
        payload = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError("bad_document", f"document is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise FormatError("bad_document", "document root must be an object")
    return payload


# ---------------------------------------------------------------------------
# scenario documents


def scenario_to_document(scenario: Scenario, map_digest: str) -> str:
    return _dumps(
        {
            "format": SCENARIO_FORMAT,
            "scenario_id": scenario.scenario_id,
            "map_id": scenario.map_id,
            "map_digest": map_digest,
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
            "subgraph_graphml": graph_to_graphml(scenario.subgraph),
        }
    )


def document_to_scenario(document: str, workspace: "Workspace") -> Scenario:
    """Parse and validate a scenario document against the map cache.

    Raises a format error on version mismatch, a stale-map error when
    the referenced map changed since export, and a validation error
    listing every invariant breach.
    """
    payload = _load_json(document)
    if payload.get("format") != SCENARIO_FORMAT:
        raise FormatError(
            "format_version",
            f"expected scenario format {SCENARIO_FORMAT!r}, got {payload.get('format')!r}",
        )
    map_id = payload["map_id"]
    entry = workspace.entry(map_id)
    if payload.get("map_digest") != entry.digest:
        raise StaleMapError(
            "stale_map",
            f"scenario was exported against a different revision of map {map_id}",
        )
    subgraph = graphml_to_graph(payload["subgraph_graphml"])
    actors = tuple(
        ActorSpec(
            actor_id=a["actor_id"],
            category=a["category"],
            model=a.get("model"),
            spawn_node=a["spawn_node"],
            goal_node=a["goal_node"],
            desired_velocity=float(a["desired_velocity"]),
            lateral_offset=float(a.get("lateral_offset", 0.0)),
            is_ego=bool(a.get("is_ego", False)),
        )
        for a in payload["actors"]
    )
    env = payload["environment"]
    scenario = Scenario(
        scenario_id=payload["scenario_id"],
        map_id=map_id,
        roi=Roi(tuple(payload["roi"])),
        environment=EnvironmentConfig(
            weather_preset=env["weather_preset"], time_of_day=env["time_of_day"]
        ),
        actors=actors,
        ego=payload.get("ego"),
        subgraph=subgraph,
    )
    failures = validate_scenario(scenario, workspace)
    if failures:
        raise ValidationError(
            f"scenario {scenario.scenario_id} violates {len(failures)} invariant(s)",
            failures=failures,
        )
    return scenario


def validate_scenario(scenario: Scenario, workspace: "Workspace") -> list[str]:
    """Every invariant breach of a scenario against its cached map."""
    failures: list[str] = []
    bundle = workspace.bundle(scenario.map_id)
    try:
        validate_roi(bundle.partition, scenario.roi)
    except Exception as exc:  # roi errors become plain failures on import
        failures.append(str(exc))
        return failures

    expected = induced_subgraph(bundle.graph, bundle.partition, scenario.roi)
    if set(expected.nodes) != set(scenario.subgraph.nodes):
        failures.append("subgraph nodes do not match the roi-induced subgraph of the map cache")

    spawns: set[str] = set()
    egos = [a.actor_id for a in scenario.actors if a.is_ego]
    for actor in scenario.actors:
        if actor.spawn_node in spawns:
            failures.append(f"spawn node {actor.spawn_node} hosts more than one actor")
        spawns.add(actor.spawn_node)
        try:
            failures.extend(
                f"actor {actor.actor_id}: {msg}"
                for msg in validate_actor_spec(scenario, actor, workspace.catalog)
            )
        except NotFoundError as exc:
            failures.append(f"actor {actor.actor_id}: {exc.message}")
    if len(egos) > 1:
        failures.append(f"more than one ego actor: {egos}")
    if scenario.ego is not None and scenario.ego not in [a.actor_id for a in scenario.actors]:
        failures.append(f"ego {scenario.ego} is not a placed actor")
    if egos and scenario.ego != egos[0]:
        failures.append("ego field disagrees with actor flags")
    try:
        from_graph = actors_from_subgraph(scenario.subgraph)
        if from_graph != tuple(sorted(scenario.actors, key=lambda a: a.actor_id)):
            failures.append("subgraph actor encoding disagrees with the actor list")
    except ValidationError as exc:
        failures.extend(exc.failures)
    return failures


# ---------------------------------------------------------------------------
# workspace


@dataclass(frozen=True)
class MapCatalogEntry:
    map_id: str
    source_path: str
    metadata: MapMetadata
    meta_path: Path
    graph_path: Path
    regions_path: Path
    digest: str
    spacing: float
    target_length: float


class Workspace:
    """Cache directory plus asset catalog: the on-disk face of the engine."""

    def __init__(self, cache_root: str | Path, assets_path: str | Path | None = None):
        self.cache_root = Path(cache_root)
        self.cache_root.mkdir(parents=True, exist_ok=True)
        self.catalog: AssetCatalog = load_asset_catalog(assets_path)
        self._bundles: dict[str, MapBundle] = {}

    # -- layout

    def map_dir(self, map_id: str) -> Path:
        return self.cache_root / map_id

    def scenario_dir(self) -> Path:
        path = self.cache_root / "scenarios"
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _paths(self, map_id: str) -> dict[str, Path]:
        base = self.map_dir(map_id)
        return {
            "meta": base / "meta.json",
            "graph": base / "graph.graphml",
            "regions": base / "regions.json",
            "digest": base / "digest",
        }

    # -- ingest

    def ingest(
        self,
        source: str | Path,
        spacing: float = DEFAULT_SPACING,
        target_length: float = DEFAULT_TARGET_LENGTH,
    ) -> MapCatalogEntry:
        """Parse a map once and persist graph, partition and metadata.

        A re-run is a no-op while the source bytes and build parameters
        are unchanged; any change rebuilds the whole cache entry.
        """
        source = Path(source)
        data = source.read_bytes()
        digest = source_digest(data)
        map_id = source.stem
        base = self.map_dir(map_id)
        base.mkdir(parents=True, exist_ok=True)
        paths = self._paths(map_id)
        digest_payload = {
            "format": DIGEST_FORMAT,
            "source_sha256": digest,
            "spacing": spacing,
            "target_length": target_length,
        }
        with open(base / ".lock", "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                if paths["digest"].exists():
                    current = json.loads(paths["digest"].read_text())
                    if current == digest_payload and all(p.exists() for p in paths.values()):
                        return self._entry_from_cache(map_id)

                network = parse_opendrive(data.decode("utf-8"))
                road_graph = build_lane_graph(network, spacing, map_id)
                ped_graph = build_pedestrian_graph(network, spacing, map_id)
                partition = segment_regions(
                    road_graph, network, target_length, pedestrian_graph=ped_graph
                )
                combined = merge_graphs(road_graph, ped_graph)
                metadata = extract_metadata(network, map_id)

                atomic_write(
                    paths["meta"],
                    _dumps(
                        {
                            "format": META_FORMAT,
                            "map_id": map_id,
                            "source_path": str(source),
                            "source_sha256": digest,
                            "spacing": spacing,
                            "target_length": target_length,
                            "metadata": metadata_to_payload(metadata),
                        }
                    ),
                )
                atomic_write(paths["graph"], graph_to_graphml(combined))
                atomic_write(paths["regions"], partition_to_document(partition))
                # the digest file is written last: it marks the cache entry valid
                atomic_write(paths["digest"], _dumps(digest_payload))
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)
        self._bundles.pop(map_id, None)
        return self._entry_from_cache(map_id)

    # -- catalog access

    def _entry_from_cache(self, map_id: str) -> MapCatalogEntry:
        paths = self._paths(map_id)
        if not paths["digest"].exists() or not paths["meta"].exists():
            raise NotFoundError("unknown_map", f"map {map_id} is not in the cache")
        meta_payload = json.loads(paths["meta"].read_text())
        digest_payload = json.loads(paths["digest"].read_text())
        return MapCatalogEntry(
            map_id=map_id,
            source_path=meta_payload.get("source_path", ""),
            metadata=payload_to_metadata(meta_payload["metadata"]),
            meta_path=paths["meta"],
            graph_path=paths["graph"],
            regions_path=paths["regions"],
            digest=digest_payload["source_sha256"],
            spacing=float(digest_payload["spacing"]),
            target_length=float(digest_payload["target_length"]),
        )

    def entries(self) -> list[MapCatalogEntry]:
        out = []
        for child in sorted(self.cache_root.iterdir()) if self.cache_root.exists() else []:
            if child.is_dir() and (child / "digest").exists():
                out.append(self._entry_from_cache(child.name))
        return out

    def entry(self, map_id: str) -> MapCatalogEntry:
        return self._entry_from_cache(map_id)

    def load_graph(self, map_id: str) -> LaneGraph:
        return self.bundle(map_id).graph

    def load_partition(self, map_id: str) -> RegionPartition:
        return self.bundle(map_id).partition

    def bundle(self, map_id: str) -> MapBundle:
        if map_id not in self._bundles:
            paths = self._paths(map_id)
            if not paths["digest"].exists():
                raise NotFoundError("unknown_map", f"map {map_id} is not in the cache")
            self._bundles[map_id] = MapBundle(
                map_id=map_id,
                graph=graphml_to_graph(paths["graph"].read_text()),
                partition=document_to_partition(paths["regions"].read_text()),
            )
        return self._bundles[map_id]

    def bundles(self) -> list[MapBundle]:
        return [self.bundle(e.map_id) for e in self.entries()]

    # -- scenario documents

    def save_scenario(self, scenario: Scenario) -> Path:
        doc = scenario_to_document(scenario, self.entry(scenario.map_id).digest)
        path = self.scenario_dir() / f"{scenario.scenario_id}.json"
        atomic_write(path, doc)
        return path

    def load_scenario_file(self, path: str | Path) -> Scenario:
        return document_to_scenario(Path(path).read_text(), self)
