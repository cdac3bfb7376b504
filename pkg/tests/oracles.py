"""Independent reference implementations used as test oracles.

Everything in this module works directly on raw fixture XML or plain
edge lists, taking none of the production code paths it is used to
check.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from itertools import count
from pathlib import Path


def walk_fixture(path: Path) -> dict:
    """Count map entities by walking the raw OpenDRIVE XML."""
    root = ET.parse(path).getroot()
    junction_elems = root.findall("junction")
    traffic_lights = [s for s in root.iter("signal") if s.get("type") == "1000001"]
    crosswalks = [o for o in root.iter("object") if o.get("type") == "crosswalk"]
    drivable = 0.0
    driving_lane_lengths: dict[tuple[str, int], float] = {}
    for road in root.findall("road"):
        length = float(road.get("length"))
        section_starts = sorted(
            float(ls.get("s")) for ls in road.iter("laneSection")
        )
        sections = list(zip(section_starts, section_starts[1:] + [length]))
        for ls, (s0, s1) in zip(
            sorted(road.iter("laneSection"), key=lambda e: float(e.get("s"))), sections
        ):
            for lane in ls.iter("lane"):
                if lane.get("type") == "driving" and lane.get("id") != "0":
                    drivable += s1 - s0
                    driving_lane_lengths[(road.get("id"), int(lane.get("id")))] = s1 - s0
    return {
        "roads": len(root.findall("road")),
        "junctions": len(junction_elems),
        "connections": sum(len(j.findall("connection")) for j in junction_elems),
        "traffic_lights": len(traffic_lights),
        "crosswalks": len(crosswalks),
        "drivable_length": drivable,
        "driving_lane_lengths": driving_lane_lengths,
    }


def expected_chain_node_count(length: float, spacing: float) -> int:
    """Node count of the equidistant sampling rule, derived independently."""
    n = 0
    k = 0
    while k * spacing < length - 1e-9:
        n += 1
        k += 1
    return n + 1


def bfs(edges: list[tuple[str, str]], start: str, undirected: bool = False) -> set[str]:
    """Plain breadth-first search over an explicit edge list."""
    adj: dict[str, list[str]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        if undirected:
            adj.setdefault(b, []).append(a)
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop(0)
        for nxt in adj.get(cur, []):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def enumerate_shortest(
    edges: list[tuple[str, str, float]], start: str, goal: str
) -> tuple[float, list[str]] | None:
    """Exhaustive simple-path enumeration; returns (min length, lexicographically
    smallest minimal node sequence) or None when unreachable."""
    adj: dict[str, list[tuple[str, float]]] = {}
    for a, b, w in edges:
        adj.setdefault(a, []).append((b, w))
    best: tuple[float, list[str]] | None = None

    def visit(node: str, length: float, path: list[str], on_path: set[str]) -> None:
        nonlocal best
        if node == goal:
            if best is None or length < best[0] - 1e-9 or (
                abs(length - best[0]) <= 1e-9 and path < best[1]
            ):
                best = (length, list(path))
            return
        for nxt, w in adj.get(node, []):
            if nxt in on_path:
                continue
            on_path.add(nxt)
            path.append(nxt)
            visit(nxt, length + w, path, on_path)
            path.pop()
            on_path.remove(nxt)

    visit(start, 0.0, [start], {start})
    return best


def region_footprint_connected(adjacency: dict[str, set[str]], members: list[str]) -> bool:
    """Whether the member regions induce a connected undirected footprint."""
    if not members:
        return False
    member_set = set(members)
    seen = {members[0]}
    queue = [members[0]]
    while queue:
        cur = queue.pop(0)
        for nxt in adjacency.get(cur, set()):
            if nxt in member_set and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen == member_set
