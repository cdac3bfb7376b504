"""Partitioning of a lane graph into selectable regions.

Junction connecting roads form one region per junction; every other
road is cut into approximately ``target_length`` slices. Regions keep
symmetric adjacency derived from graph edges that cross region
boundaries, and a ROI can only grow along that adjacency so its
footprint stays connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConflictError, DomainError, NotFoundError
from .lanegraph import GraphEdge, LaneGraph, road_s_of
from .opendrive import RoadNetwork

DEFAULT_TARGET_LENGTH = 75.0


@dataclass(frozen=True)
class Region:
    region_id: str
    kind: str  # junction | road_segment
    node_ids: frozenset[str]
    # ("junction", junction_id) or ("road", road_id, s_lo, s_hi)
    source: tuple


@dataclass(frozen=True)
class RegionPartition:
    map_id: str
    regions: dict[str, Region]
    adjacency: dict[str, frozenset[str]]

    def region_of(self) -> dict[str, str]:
        """node id -> region id over all member nodes."""
        out: dict[str, str] = {}
        for region in self.regions.values():
            for nid in region.node_ids:
                out[nid] = region.region_id
        return out


@dataclass(frozen=True)
class Roi:
    region_ids: tuple[str, ...]

    @staticmethod
    def start(region_id: str) -> "Roi":
        return Roi((region_id,))


def _slice_count(length: float, target_length: float) -> int:
    # round half up keeps slice sizes within +-50% of the target
    return max(1, int(math.floor(length / target_length + 0.5)))


def segment_regions(
    graph: LaneGraph,
    network: RoadNetwork,
    target_length: float,
    pedestrian_graph: LaneGraph | None = None,
) -> RegionPartition:
    """Partition all graph nodes into junction and road-slice regions.

    Pedestrian nodes (when their graph is supplied) join the region of
    the nearest road-bound node on the same road, falling back to the
    nearest region centroid for roads without driving lanes.
    """
    if target_length <= 0:
        raise DomainError("bad_target_length", f"target_length must be positive, got {target_length}")

    sources: dict[str, tuple] = {}
    slice_info: dict[str, tuple[int, float]] = {}  # road_id -> (k, slice_len)
    for jid in sorted(network.junctions):
        sources[f"junction:{jid}"] = ("junction", jid)
    for road_id in sorted(network.roads):
        road = network.roads[road_id]
        if road.junction_id is not None:
            continue
        k = _slice_count(road.length, target_length)
        slice_len = road.length / k
        slice_info[road_id] = (k, slice_len)
        for i in range(k):
            sources[f"road:{road_id}:{i}"] = ("road", road_id, i * slice_len, (i + 1) * slice_len)

    assignment: dict[str, str] = {}
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        road = network.roads[node.road_id]
        if road.junction_id is not None:
            assignment[nid] = f"junction:{road.junction_id}"
            continue
        k, slice_len = slice_info[node.road_id]
        road_s = road_s_of(network, node)
        idx = int(math.floor(road_s / slice_len))
        # nodes exactly on a slice boundary belong to the lower-s slice
        if idx > 0 and road_s - idx * slice_len < 1e-9:
            idx -= 1
        assignment[nid] = f"road:{node.road_id}:{min(idx, k - 1)}"

    if pedestrian_graph is not None:
        _assign_pedestrians(pedestrian_graph, graph, assignment)

    members: dict[str, set[str]] = {rid: set() for rid in sources}
    for nid, rid in assignment.items():
        members[rid].add(nid)

    adjacency: dict[str, set[str]] = {rid: set() for rid in sources}
    all_edges: list[GraphEdge] = list(graph.edges)
    if pedestrian_graph is not None:
        all_edges += pedestrian_graph.edges
    for edge in all_edges:
        ra = assignment.get(edge.from_node)
        rb = assignment.get(edge.to_node)
        if ra is None or rb is None or ra == rb:
            continue
        adjacency[ra].add(rb)
        adjacency[rb].add(ra)

    regions = {
        rid: Region(region_id=rid, kind=src[0] if src[0] == "junction" else "road_segment",
                    node_ids=frozenset(members[rid]), source=src)
        for rid, src in sources.items()
    }
    return RegionPartition(
        map_id=graph.map_id,
        regions=regions,
        adjacency={rid: frozenset(adjacency[rid]) for rid in sources},
    )


def _assign_pedestrians(
    pedestrian_graph: LaneGraph, road_graph: LaneGraph, assignment: dict[str, str]
) -> None:
    by_road: dict[str, list] = {}
    for node in road_graph.nodes.values():
        by_road.setdefault(node.road_id, []).append(node)
    centroids: dict[str, tuple[float, float]] = {}
    sums: dict[str, tuple[float, float, int]] = {}
    for nid, rid in assignment.items():
        node = road_graph.nodes[nid]
        sx, sy, n = sums.get(rid, (0.0, 0.0, 0))
        sums[rid] = (sx + node.x, sy + node.y, n + 1)
    for rid, (sx, sy, n) in sums.items():
        centroids[rid] = (sx / n, sy / n)

    for nid in sorted(pedestrian_graph.nodes):
        ped = pedestrian_graph.nodes[nid]
        candidates = by_road.get(ped.road_id, [])
        if candidates:
            best = min(
                candidates,
                key=lambda rn: (math.hypot(rn.x - ped.x, rn.y - ped.y), rn.node_id),
            )
            assignment[nid] = assignment[best.node_id]
        elif centroids:
            rid = min(
                sorted(centroids),
                key=lambda r: (math.hypot(centroids[r][0] - ped.x, centroids[r][1] - ped.y), r),
            )
            assignment[nid] = rid


def validate_roi(partition: RegionPartition, roi: Roi) -> None:
    """Check existence, distinctness and connected growth order."""
    if not roi.region_ids:
        raise DomainError("empty_roi", "roi must contain at least one region")
    if len(set(roi.region_ids)) != len(roi.region_ids):
        raise DomainError("duplicate_region", "roi regions must be distinct")
    seen: set[str] = set()
    for rid in roi.region_ids:
        if rid not in partition.regions:
            raise NotFoundError("unknown_region", f"unknown region {rid}")
        if seen and not (partition.adjacency[rid] & seen):
            raise DomainError(
                "disconnected_roi", f"region {rid} is not adjacent to the roi so far"
            )
        seen.add(rid)


def eligible_extensions(partition: RegionPartition, roi: Roi) -> set[str]:
    """Regions adjacent to the roi that are not yet members."""
    members = set(roi.region_ids)
    for rid in members:
        if rid not in partition.regions:
            raise NotFoundError("unknown_region", f"unknown region {rid}")
    out: set[str] = set()
    for rid in members:
        out |= partition.adjacency[rid]
    return out - members


def expand_roi(partition: RegionPartition, roi: Roi, region_id: str) -> Roi:
    """Value-semantics ROI growth; rejects non-adjacent or duplicate regions."""
    if region_id not in partition.regions:
        raise NotFoundError("unknown_region", f"unknown region {region_id}")
    if region_id in roi.region_ids:
        raise ConflictError("roi_member", f"region {region_id} is already part of the roi")
    eligible = eligible_extensions(partition, roi)
    if region_id not in eligible:
        raise ConflictError(
            "ineligible_region",
            f"region {region_id} is not adjacent to the roi",
            eligible=sorted(eligible),
        )
    return Roi(roi.region_ids + (region_id,))


def induced_subgraph(graph: LaneGraph, partition: RegionPartition, roi: Roi) -> LaneGraph:
    """Subgraph of all member-region nodes with interior edges only.

    Lateral edges are re-suppressed at cut boundaries so terminal nodes
    stay exactly the zero-out-degree ones.
    """
    validate_roi(partition, roi)
    member_ids: set[str] = set()
    for rid in roi.region_ids:
        member_ids |= partition.regions[rid].node_ids
    nodes = {nid: graph.nodes[nid] for nid in graph.nodes if nid in member_ids}
    inner = [
        e for e in graph.edges if e.from_node in nodes and e.to_node in nodes
    ]
    succ_out = {e.from_node for e in inner if e.relation == "successor"}
    edges = [
        e for e in inner
        if e.relation not in ("left", "right")
        or (e.from_node in succ_out and e.to_node in succ_out)
    ]
    attrs = {nid: v for nid, v in graph.node_attrs.items() if nid in nodes}
    return LaneGraph(graph.map_id, graph.spacing, nodes, edges, attrs)
