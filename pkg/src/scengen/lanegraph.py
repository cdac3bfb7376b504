"""Directed spawn-node graph over a road network.

Nodes are sampled equidistantly along lane centerlines and connected by
typed relational edges: ``successor`` (travel continuation, including
lane links across roads and through junctions), ``left``/``right``
(lane changes between same-direction neighbours) and undirected
``pedestrian`` edges on the sidewalk/crosswalk variant. ``goal`` edges
are added later by scenario composition and never participate in
traversal.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, NotFoundError, StructuralError
from .opendrive import (
    Road,
    RoadNetwork,
    eval_lane_center,
    eval_reference_line,
    normalize_angle,
)

DIRECTED_RELATIONS = frozenset({"successor", "left", "right"})
CROSSWALK_ATTACH_RADIUS = 5.0
DEFAULT_SPACING = 4.0


class GraphWarning(UserWarning):
    """Non-fatal irregularities met during graph construction."""


@dataclass(frozen=True)
class GraphNode:
    node_id: str
    x: float
    y: float
    heading: float
    s_coord: float  # arc length along the lane/chain in travel order
    road_id: str
    lane_id: int  # 0 marks crosswalk chain nodes
    kind: str  # road_bound | pedestrian

    @property
    def pose(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.heading)


@dataclass(frozen=True)
class GraphEdge:
    from_node: str
    to_node: str
    relation: str  # successor | left | right | pedestrian | goal
    length: float


def _dist(a: GraphNode, b: GraphNode) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


class LaneGraph:
    """Immutable node/edge store with adjacency indexes.

    ``node_attrs`` carries optional actor annotations keyed by spawn
    node id; it is empty for freshly built map graphs.
    """

    def __init__(
        self,
        map_id: str,
        spacing: float,
        nodes: dict[str, GraphNode],
        edges: list[GraphEdge],
        node_attrs: dict[str, dict[str, object]] | None = None,
    ):
        self.map_id = map_id
        self.spacing = spacing
        self.nodes: dict[str, GraphNode] = dict(nodes)
        self.edges: list[GraphEdge] = list(edges)
        self.node_attrs: dict[str, dict[str, object]] = {
            k: dict(v) for k, v in (node_attrs or {}).items()
        }
        self._out: dict[str, list[tuple[str, GraphEdge]]] = {nid: [] for nid in self.nodes}
        self._in: dict[str, list[tuple[str, GraphEdge]]] = {nid: [] for nid in self.nodes}
        for edge in self.edges:
            if edge.from_node == edge.to_node:
                raise StructuralError("self_loop", f"self loop on {edge.from_node}")
            if edge.from_node not in self.nodes or edge.to_node not in self.nodes:
                raise StructuralError(
                    "dangling_edge", f"edge {edge.from_node}->{edge.to_node} references unknown node"
                )
            self._out[edge.from_node].append((edge.to_node, edge))
            self._in[edge.to_node].append((edge.from_node, edge))
            if edge.relation == "pedestrian":  # undirected: traversable both ways
                self._out[edge.to_node].append((edge.from_node, edge))
                self._in[edge.from_node].append((edge.to_node, edge))

    def outgoing(self, node_id: str, relations: frozenset[str] | None = None):
        for other, edge in self._out[node_id]:
            if relations is None or edge.relation in relations:
                yield other, edge

    def incoming(self, node_id: str, relations: frozenset[str] | None = None):
        for other, edge in self._in[node_id]:
            if relations is None or edge.relation in relations:
                yield other, edge

    def out_degree_directed(self, node_id: str) -> int:
        return sum(1 for _ in self.outgoing(node_id, DIRECTED_RELATIONS))

    def with_changes(
        self,
        nodes: dict[str, GraphNode] | None = None,
        edges: list[GraphEdge] | None = None,
        node_attrs: dict[str, dict[str, object]] | None = None,
    ) -> "LaneGraph":
        return LaneGraph(
            self.map_id,
            self.spacing,
            self.nodes if nodes is None else nodes,
            self.edges if edges is None else edges,
            self.node_attrs if node_attrs is None else node_attrs,
        )

    def sorted_edges(self) -> list[GraphEdge]:
        return sorted(self.edges, key=lambda e: (e.from_node, e.to_node, e.relation))

    def structurally_equal(self, other: "LaneGraph") -> bool:
        return (
            self.map_id == other.map_id
            and abs(self.spacing - other.spacing) < 1e-12
            and self.nodes == other.nodes
            and self.sorted_edges() == other.sorted_edges()
            and self.node_attrs == other.node_attrs
        )


def merge_graphs(a: LaneGraph, b: LaneGraph) -> LaneGraph:
    """Disjoint union of a road-bound graph and its pedestrian companion."""
    if a.map_id != b.map_id or abs(a.spacing - b.spacing) > 1e-12:
        raise DomainError("graph_mismatch", "graphs disagree on map_id or spacing")
    overlap = a.nodes.keys() & b.nodes.keys()
    if overlap:
        raise StructuralError("node_overlap", f"graphs share node ids: {sorted(overlap)[:3]}")
    nodes = dict(a.nodes)
    nodes.update(b.nodes)
    attrs = dict(a.node_attrs)
    attrs.update(b.node_attrs)
    return LaneGraph(a.map_id, a.spacing, nodes, a.edges + b.edges, attrs)


# ---------------------------------------------------------------------------
# sampling


def sample_offsets(length: float, spacing: float) -> list[float]:
    """Equidistant offsets 0, spacing, 2*spacing, ... plus the end point.

    The final interval may be shorter than ``spacing`` but never empty;
    an exact multiple produces a full-length final interval.
    """
    if spacing <= 0:
        raise DomainError("bad_spacing", f"spacing must be positive, got {spacing}")
    offsets = []
    k = 0
    while k * spacing < length - 1e-9:
        offsets.append(k * spacing)
        k += 1
    offsets.append(length)
    return offsets


def _lane_sections_for(road: Road, lane_id: int, lane_type: str):
    out = []
    for i, sec in enumerate(road.lane_sections):
        lane = sec.lane(lane_id)
        if lane is not None and lane.lane_type == lane_type:
            out.append((i, sec, lane))
    return out


class _Builder:
    def __init__(self, network: RoadNetwork, spacing: float, map_id: str, kind: str):
        self.network = network
        self.spacing = spacing
        self.map_id = map_id
        self.kind = kind
        self.nodes: dict[str, GraphNode] = {}
        self.edges: list[GraphEdge] = []
        self._seen: set[tuple[str, str, str]] = set()
        # (road_id, lane_id) -> node ids in travel order
        self.chains: dict[tuple[str, int], list[str]] = {}
        # (road_id, section_index, lane_id) -> node ids of that section in travel order
        self.section_nodes: dict[tuple[str, int, int], list[str]] = {}

    def add_edge(self, a: str, b: str, relation: str) -> None:
        key = (a, b, relation)
        if a == b or key in self._seen:
            return
        self._seen.add(key)
        self.edges.append(GraphEdge(a, b, relation, _dist(self.nodes[a], self.nodes[b])))

    def build_chains(self, lane_type: str) -> None:
        for road_id in sorted(self.network.roads):
            road = self.network.roads[road_id]
            lane_ids = sorted(
                {l.lane_id for sec in road.lane_sections for l in sec.lanes if l.lane_type == lane_type}
            )
            for lane_id in lane_ids:
                self._build_chain(road, lane_id, lane_type)

    def _build_chain(self, road: Road, lane_id: int, lane_type: str) -> None:
        sections = _lane_sections_for(road, lane_id, lane_type)
        if not sections:
            return
        if lane_id > 0:  # against_s lanes travel from high s to low s
            sections = list(reversed(sections))
        chain: list[str] = []
        offset = 0.0
        index = 0
        for sec_i, sec, _lane in sections:
            locals_ = sample_offsets(sec.length, self.spacing)
            sec_ids: list[str] = []
            if chain:  # section joint: reuse the shared boundary node
                sec_ids.append(chain[-1])
                locals_ = locals_[1:]
            for sl in locals_:
                road_s = sec.s_start + sl if lane_id < 0 else sec.s_end - sl
                x, y, h = eval_lane_center(road, lane_id, road_s)
                nid = f"{self.map_id}:{road.road_id}:{lane_id}:{index}"
                self.nodes[nid] = GraphNode(
                    node_id=nid, x=x, y=y, heading=h, s_coord=offset + sl,
                    road_id=road.road_id, lane_id=lane_id, kind=self.kind,
                )
                sec_ids.append(nid)
                chain.append(nid)
                index += 1
            offset += sec.length
            self.section_nodes[(road.road_id, sec_i, lane_id)] = sec_ids
        self.chains[(road.road_id, lane_id)] = chain
        relation = "successor" if self.kind == "road_bound" else "pedestrian"
        for a, b in zip(chain, chain[1:]):
            self.add_edge(a, b, relation)

    # -- successor bridging across roads and junctions (road graph only)

    def bridge_links(self) -> None:
        for (road_id, lane_id) in sorted(self.chains):
            road = self.network.roads[road_id]
            chain = self.chains[(road_id, lane_id)]
            exit_end = "end" if lane_id < 0 else "start"
            link = road.successor if exit_end == "end" else road.predecessor
            if link is None:
                continue
            exit_node = chain[-1]
            if link.element_type == "road":
                exit_sections = _lane_sections_for(road, lane_id, "driving")
                exit_sec_lane = exit_sections[-1][2] if lane_id < 0 else exit_sections[0][2]
                target_lane = (
                    exit_sec_lane.link_successor if exit_end == "end" else exit_sec_lane.link_predecessor
                )
                if target_lane is not None:
                    self._bridge(exit_node, link.element_id, target_lane, link.contact_point or "start")
            else:
                for conn in self.network.junctions.get(link.element_id, ()):
                    if conn.incoming_road != road_id:
                        continue
                    for frm, to in conn.lane_links:
                        if frm == lane_id:
                            self._bridge(exit_node, conn.connecting_road, to, conn.contact_point)

    def _bridge(self, exit_node: str, target_road: str, target_lane: int, contact_point: str) -> None:
        chain = self.chains.get((target_road, target_lane))
        if not chain:
            warnings.warn(
                f"lane link to {target_road}:{target_lane} has no sampled chain", GraphWarning
            )
            return
        # the chain's travel-entry node must sit at the contact end
        expected = "start" if target_lane < 0 else "end"
        if contact_point != expected:
            warnings.warn(
                f"direction mismatch entering {target_road}:{target_lane} at {contact_point}",
                GraphWarning,
            )
            return
        self.add_edge(exit_node, chain[0], "successor")

    # -- lateral lane-change edges (road graph only)

    def lateral_edges(self) -> None:
        succ_out: set[str] = {e.from_node for e in self.edges if e.relation == "successor"}
        for road_id in sorted(self.network.roads):
            road = self.network.roads[road_id]
            for sec_i, sec in enumerate(road.lane_sections):
                driving = sorted(
                    l.lane_id for l in sec.lanes if l.lane_type == "driving"
                )
                for lane_id in driving:
                    outer = lane_id - 1 if lane_id < 0 else lane_id + 1
                    if outer not in driving:
                        continue
                    near = self.section_nodes.get((road_id, sec_i, lane_id), [])
                    far = self.section_nodes.get((road_id, sec_i, outer), [])
                    for na, nb in zip(near, far):
                        if na in succ_out and nb in succ_out:
                            self.add_edge(na, nb, "right")
                            self.add_edge(nb, na, "left")


def build_lane_graph(network: RoadNetwork, spacing: float, map_id: str = "map") -> LaneGraph:
    """Sample driving lanes into a directed graph of spawn nodes.

    Lateral edges are only emitted where both endpoints still have an
    outgoing successor edge, so lane-end nodes stay terminal.
    """
    builder = _Builder(network, spacing, map_id, "road_bound")
    builder.build_chains("driving")
    builder.bridge_links()
    builder.lateral_edges()
    return LaneGraph(map_id, spacing, builder.nodes, builder.edges)


def build_pedestrian_graph(network: RoadNetwork, spacing: float, map_id: str = "map") -> LaneGraph:
    """Sample sidewalks and crosswalks into an undirected pedestrian graph."""
    builder = _Builder(network, spacing, map_id, "pedestrian")
    builder.build_chains("sidewalk")
    sidewalk_ids = sorted(builder.nodes)
    for idx, cw in enumerate(network.crosswalk_objects):
        road = network.roads[cw.road_id]
        x, y, h = eval_reference_line(road, min(max(cw.s, 0.0), road.length))
        cx = x - cw.t * math.sin(h)
        cy = y + cw.t * math.cos(h)
        walk_h = normalize_angle(h + 0.5 * math.pi + cw.heading)
        ux, uy = math.cos(walk_h), math.sin(walk_h)
        sx = cx - 0.5 * cw.span * ux
        sy = cy - 0.5 * cw.span * uy
        chain: list[str] = []
        for k, sl in enumerate(sample_offsets(cw.span, spacing)):
            nid = f"{map_id}:{cw.road_id}:xw{idx}:{k}"
            builder.nodes[nid] = GraphNode(
                node_id=nid, x=sx + sl * ux, y=sy + sl * uy, heading=walk_h,
                s_coord=sl, road_id=cw.road_id, lane_id=0, kind="pedestrian",
            )
            chain.append(nid)
        for a, b in zip(chain, chain[1:]):
            builder.add_edge(a, b, "pedestrian")
        for end in (chain[0], chain[-1]):
            best: tuple[float, str] | None = None
            for sid in sidewalk_ids:
                d = _dist(builder.nodes[end], builder.nodes[sid])
                if best is None or (d, sid) < best:
                    best = (d, sid)
            if best is not None and best[0] <= CROSSWALK_ATTACH_RADIUS:
                builder.add_edge(end, best[1], "pedestrian")
            else:
                warnings.warn(
                    f"crosswalk {idx} end {end} has no sidewalk node within "
                    f"{CROSSWALK_ATTACH_RADIUS} m; kept as isolated chain",
                    GraphWarning,
                )
    return LaneGraph(map_id, spacing, builder.nodes, builder.edges)


# ---------------------------------------------------------------------------
# traversal


def reachable_set(graph: LaneGraph, from_node: str) -> set[str]:
    """Nodes reachable from ``from_node`` (inclusive).

    Road-bound origins follow directed successor/left/right edges;
    pedestrian origins traverse pedestrian edges in both directions.
    """
    node = graph.nodes.get(from_node)
    if node is None:
        raise NotFoundError("unknown_node", f"unknown node {from_node}")
    relations = DIRECTED_RELATIONS if node.kind == "road_bound" else frozenset({"pedestrian"})
    seen = {from_node}
    frontier = [from_node]
    while frontier:
        current = frontier.pop()
        for other, _edge in graph.outgoing(current, relations):
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    return seen


def terminal_nodes(graph: LaneGraph) -> set[str]:
    """Nodes without outgoing successor/left/right edges."""
    return {nid for nid in graph.nodes if graph.out_degree_directed(nid) == 0}


def road_s_of(network: RoadNetwork, node: GraphNode) -> float:
    """Map a lane node's chain coordinate back to its road s position."""
    if node.lane_id == 0:
        raise DomainError("not_a_lane_node", f"{node.node_id} is not on a lane")
    road = network.roads[node.road_id]
    lane_type = "driving" if node.kind == "road_bound" else "sidewalk"
    sections = _lane_sections_for(road, node.lane_id, lane_type)
    if node.lane_id > 0:
        sections = list(reversed(sections))
    acc = 0.0
    for _i, sec, _lane in sections:
        if node.s_coord <= acc + sec.length + 1e-9:
            local = node.s_coord - acc
            return sec.s_start + local if node.lane_id < 0 else sec.s_end - local
        acc += sec.length
    raise DomainError("out_of_range", f"{node.node_id} s_coord outside its lane")
