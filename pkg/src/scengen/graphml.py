"""GraphML serialization of lane graphs.

Dialect: graph-level keys ``map_id``/``spacing``; node keys ``x``,
``y``, ``heading``, ``s``, ``road``, ``lane``, ``kind`` plus the
optional actor annotation keys ``actor``, ``category``, ``model``,
``velocity``, ``offset``, ``ego``; one edge key ``relation``.
``successor``/``left``/``right``/``goal`` edges are directed,
``pedestrian`` edges are marked ``directed="false"``. Key declarations
are emitted in a fixed order, nodes sorted by id, edges sorted by
(source, target, relation), and floats as shortest round-trip
decimals, so serialization is byte-stable. Edge lengths are not
stored; they are recomputed as Euclidean distances on import.
"""

from __future__ import annotations

import math
import warnings
import xml.etree.ElementTree as ET

from .errors import FormatError, ParseError
from .lanegraph import GraphEdge, GraphNode, LaneGraph

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

_GRAPH_KEYS = (("map_id", "string"), ("spacing", "double"))
_NODE_KEYS = (
    ("x", "double"),
    ("y", "double"),
    ("heading", "double"),
    ("s", "double"),
    ("road", "string"),
    ("lane", "long"),
    ("kind", "string"),
    ("actor", "string"),
    ("category", "string"),
    ("model", "string"),
    ("velocity", "double"),
    ("offset", "double"),
    ("ego", "boolean"),
)
_EDGE_KEYS = (("relation", "string"),)
_MANDATORY_NODE_KEYS = ("x", "y", "heading", "s", "road", "lane", "kind")
_ACTOR_ATTR_KEYS = ("actor", "category", "model", "velocity", "offset", "ego")


class GraphmlWarning(UserWarning):
    """Unknown keys met while importing a graph document."""


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def graph_to_graphml(graph: LaneGraph) -> str:
    """Serialize a graph to a deterministic GraphML document."""
    root = ET.Element("graphml", {"xmlns": GRAPHML_NS})
    for scope, keys in (("graph", _GRAPH_KEYS), ("node", _NODE_KEYS), ("edge", _EDGE_KEYS)):
        for name, attr_type in keys:
            ET.SubElement(
                root, "key",
                {"id": name, "for": scope, "attr.name": name, "attr.type": attr_type},
            )
    graph_elem = ET.SubElement(root, "graph", {"id": graph.map_id, "edgedefault": "directed"})
    _data(graph_elem, "map_id", graph.map_id)
    _data(graph_elem, "spacing", graph.spacing)

    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        node_elem = ET.SubElement(graph_elem, "node", {"id": nid})
        _data(node_elem, "x", node.x)
        _data(node_elem, "y", node.y)
        _data(node_elem, "heading", node.heading)
        _data(node_elem, "s", node.s_coord)
        _data(node_elem, "road", node.road_id)
        _data(node_elem, "lane", node.lane_id)
        _data(node_elem, "kind", node.kind)
        attrs = graph.node_attrs.get(nid)
        if attrs:
            for key in _ACTOR_ATTR_KEYS:
                if key in attrs:
                    _data(node_elem, key, attrs[key])

    for edge in sorted(graph.edges, key=lambda e: (e.from_node, e.to_node, e.relation)):
        edge_attrs = {"source": edge.from_node, "target": edge.to_node}
        if edge.relation == "pedestrian":
            edge_attrs["directed"] = "false"
        edge_elem = ET.SubElement(graph_elem, "edge", edge_attrs)
        _data(edge_elem, "relation", edge.relation)

    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def _data(parent: ET.Element, key: str, value: object) -> None:
    elem = ET.SubElement(parent, "data", {"key": key})
    elem.text = _fmt(value)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _collect_data(elem: ET.Element) -> dict[str, str]:
    out = {}
    for child in elem:
        if _local(child.tag) == "data" and child.get("key") is not None:
            out[child.get("key")] = child.text or ""
    return out


_PARSERS = {
    "double": float,
    "long": int,
    "int": int,
    "string": str,
    "boolean": lambda raw: raw.strip().lower() == "true",
}


def graphml_to_graph(document: str) -> LaneGraph:
    """Parse a graph document; unknown keys warn, missing mandatory keys fail."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError("malformed_xml", f"malformed GraphML at line {line}, column {col}: {exc.msg}") from None

    known = {name for name, _ in _GRAPH_KEYS + _NODE_KEYS + _EDGE_KEYS}
    key_types: dict[str, str] = {}
    for key_elem in (e for e in root if _local(e.tag) == "key"):
        key_id = key_elem.get("id")
        key_types[key_id] = key_elem.get("attr.type", "string")
        if key_id not in known:
            warnings.warn(f"ignoring unknown GraphML key {key_id!r}", GraphmlWarning)

    graph_elem = next((e for e in root if _local(e.tag) == "graph"), None)
    if graph_elem is None:
        raise FormatError("bad_document", "document contains no <graph> element")

    def parse_value(key: str, raw: str):
        return _PARSERS.get(key_types.get(key, "string"), str)(raw)

    graph_data = _collect_data(graph_elem)
    if "map_id" not in graph_data or "spacing" not in graph_data:
        raise FormatError("bad_document", "graph is missing map_id/spacing data")
    map_id = graph_data["map_id"]
    spacing = float(graph_data["spacing"])

    nodes: dict[str, GraphNode] = {}
    node_attrs: dict[str, dict[str, object]] = {}
    edges: list[GraphEdge] = []
    for elem in graph_elem:
        tag = _local(elem.tag)
        if tag == "node":
            nid = elem.get("id")
            data = _collect_data(elem)
            for key in data:
                if key not in known:
                    warnings.warn(f"ignoring unknown node key {key!r} on {nid}", GraphmlWarning)
            missing = [k for k in _MANDATORY_NODE_KEYS if k not in data]
            if missing:
                raise FormatError(
                    "bad_document", f"node {nid} is missing mandatory keys {missing}"
                )
            nodes[nid] = GraphNode(
                node_id=nid,
                x=float(data["x"]),
                y=float(data["y"]),
                heading=float(data["heading"]),
                s_coord=float(data["s"]),
                road_id=data["road"],
                lane_id=int(data["lane"]),
                kind=data["kind"],
            )
            attrs = {
                k: parse_value(k, data[k]) for k in _ACTOR_ATTR_KEYS if k in data
            }
            if attrs:
                node_attrs[nid] = attrs
        elif tag == "edge":
            source, target = elem.get("source"), elem.get("target")
            data = _collect_data(elem)
            if "relation" not in data:
                raise FormatError(
                    "bad_document", f"edge {source}->{target} is missing its relation key"
                )
            if source not in nodes or target not in nodes:
                raise FormatError(
                    "bad_document", f"edge {source}->{target} references an unknown node"
                )
            a, b = nodes[source], nodes[target]
            edges.append(
                GraphEdge(source, target, data["relation"], math.hypot(b.x - a.x, b.y - a.y))
            )
    return LaneGraph(map_id, spacing, nodes, edges, node_attrs)
