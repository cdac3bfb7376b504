"""Deterministic kinematic preview of a scenario.

Each actor follows the shortest path from spawn to goal at constant
speed; frames sample every actor pose on a fixed dt grid until the
slowest actor arrives. There is no dynamics model and no collision
handling: the preview exists to check that the composed scenario is
structurally what the user intended, from a bird's-eye view.
"""

from __future__ import annotations

import heapq
import json
import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import DomainError, FormatError, PlanningError
from .lanegraph import DIRECTED_RELATIONS, GraphEdge, LaneGraph
from .scenario import Scenario

DENSIFY_STEP = 0.5
DEFAULT_DT = 0.05
MAX_FRAMES = 20_000
TIMELINE_FORMAT = "timeline/1"

_TIE_EPS = 1e-9


@dataclass(frozen=True)
class TrajectoryPlan:
    actor_id: str
    node_path: tuple[str, ...]
    path_length: float
    # (cumulative arc length, x, y, heading)
    poses: tuple[tuple[float, float, float, float], ...]

    def pose_at(self, arc: float) -> tuple[float, float, float]:
        rows = self.poses
        if arc <= 0.0:
            return rows[0][1], rows[0][2], rows[0][3]
        if arc >= self.path_length:
            return rows[-1][1], rows[-1][2], rows[-1][3]
        i = bisect_right(rows, arc, key=lambda r: r[0])
        s0, x0, y0, h0 = rows[i - 1]
        s1, x1, y1, _h1 = rows[i]
        f = (arc - s0) / (s1 - s0)
        return x0 + f * (x1 - x0), y0 + f * (y1 - y0), h0


@dataclass(frozen=True)
class ActorState:
    x: float
    y: float
    heading: float
    done: bool


@dataclass(frozen=True)
class Frame:
    t: float
    states: dict[str, ActorState]


@dataclass(frozen=True)
class Timeline:
    dt: float
    frames: tuple[Frame, ...]
    duration: float


def _relations_for(graph: LaneGraph, node_id: str) -> frozenset[str]:
    kind = graph.nodes[node_id].kind
    return DIRECTED_RELATIONS if kind == "road_bound" else frozenset({"pedestrian"})


def _dijkstra(
    graph: LaneGraph, start: str, relations: frozenset[str], reverse: bool = False
) -> dict[str, float]:
    dist = {start: 0.0}
    heap = [(0.0, start)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist.get(node, math.inf):
            continue
        hops = graph.incoming(node, relations) if reverse else graph.outgoing(node, relations)
        for other, edge in hops:
            nd = d + edge.length
            if nd < dist.get(other, math.inf):
                dist[other] = nd
                heapq.heappush(heap, (nd, other))
    return dist


def plan_trajectory(
    subgraph: LaneGraph, spawn: str, goal: str, actor_id: str = ""
) -> TrajectoryPlan:
    """Minimum-length node path from spawn to goal, densified to poses.

    Among equal-length shortest paths the lexicographically smallest
    node-id sequence is chosen, which makes planning deterministic.
    """
    for nid in (spawn, goal):
        if nid not in subgraph.nodes:
            raise PlanningError("unknown_node", f"unknown node {nid}")
    if spawn == goal:
        raise DomainError("degenerate_path", "goal node must differ from spawn node")
    relations = _relations_for(subgraph, spawn)
    dist_from = _dijkstra(subgraph, spawn, relations)
    if goal not in dist_from:
        raise PlanningError("unreachable_goal", f"goal {goal} is unreachable from {spawn}")
    dist_to = _dijkstra(subgraph, goal, relations, reverse=True)
    total = dist_from[goal]
    tol = _TIE_EPS * max(1.0, total)

    path = [spawn]
    legs: list[GraphEdge] = []
    walked = 0.0
    current = spawn
    for _ in range(2 * len(subgraph.nodes) + 1):
        if current == goal:
            break
        step = None
        for other, edge in sorted(subgraph.outgoing(current, relations), key=lambda hop: hop[0]):
            remaining = dist_to.get(other)
            if remaining is None:
                continue
            if abs(walked + edge.length + remaining - total) <= tol:
                step = (other, edge)
                break
        if step is None:
            raise PlanningError("no_tight_edge", f"no shortest-path continuation at {current}")
        current, edge = step
        walked += edge.length
        path.append(current)
        legs.append(edge)
    else:
        raise PlanningError("tie_break_loop", "shortest-path walk did not terminate")

    length = sum(leg.length for leg in legs)
    if length <= 0.0:
        raise PlanningError("degenerate_path", f"path from {spawn} to {goal} has zero length")
    return TrajectoryPlan(
        actor_id=actor_id,
        node_path=tuple(path),
        path_length=length,
        poses=_densify(subgraph, path, legs),
    )


def _densify(graph: LaneGraph, path: list[str], legs: list[GraphEdge]):
    """Linear interpolation between node poses at <= DENSIFY_STEP intervals.

    Arc length advances by each leg's edge length (the graph metric);
    heading follows the direction of each chord segment.
    """
    first = graph.nodes[path[0]]
    rows: list[tuple[float, float, float, float]] = [(0.0, first.x, first.y, first.heading)]
    arc = 0.0
    for (a_id, b_id), leg in zip(zip(path, path[1:]), legs):
        a, b = graph.nodes[a_id], graph.nodes[b_id]
        if leg.length < 1e-12:
            continue
        heading = math.atan2(b.y - a.y, b.x - a.x)
        if len(rows) == 1:  # align the start pose with the first movement
            rows[0] = (0.0, first.x, first.y, heading)
        steps = max(int(math.ceil(leg.length / DENSIFY_STEP)), 1)
        for k in range(1, steps + 1):
            f = k / steps
            rows.append(
                (arc + f * leg.length, a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), heading)
            )
        arc += leg.length
    return tuple(rows)


def realize_scenario(scenario: Scenario, dt: float = DEFAULT_DT) -> Timeline:
    """Advance every actor along its plan at its desired velocity.

    Frame k holds each actor's pose at arc length min(v * k * dt,
    path_length), laterally displaced by its offset; the timeline ends
    on the first frame at which every actor has arrived.
    """
    if dt <= 0:
        raise DomainError("bad_dt", f"dt must be positive, got {dt}")
    actors = sorted(scenario.actors, key=lambda a: a.actor_id)
    plans: dict[str, TrajectoryPlan] = {}
    for actor in actors:
        try:
            plans[actor.actor_id] = plan_trajectory(
                scenario.subgraph, actor.spawn_node, actor.goal_node, actor.actor_id
            )
        except PlanningError as exc:
            raise PlanningError(
                exc.code, f"actor {actor.actor_id}: {exc.message}"
            ) from None

    last_frame = 0
    for actor in actors:
        travel_time = plans[actor.actor_id].path_length / actor.desired_velocity
        frames_needed = int(math.ceil(travel_time / dt - 1e-9))
        if frames_needed > MAX_FRAMES:
            raise DomainError(
                "frame_cap",
                f"actor {actor.actor_id} needs {frames_needed} frames at dt={dt}; "
                f"the cap is {MAX_FRAMES} (velocity too low?)",
            )
        last_frame = max(last_frame, frames_needed)

    frames: list[Frame] = []
    for k in range(last_frame + 1):
        t = k * dt
        states: dict[str, ActorState] = {}
        for actor in actors:
            plan = plans[actor.actor_id]
            arc = min(actor.desired_velocity * t, plan.path_length)
            x, y, h = plan.pose_at(arc)
            o = actor.lateral_offset
            states[actor.actor_id] = ActorState(
                x=x - o * math.sin(h),
                y=y + o * math.cos(h),
                heading=h,
                done=arc >= plan.path_length - 1e-12,
            )
        frames.append(Frame(t=t, states=states))
    return Timeline(dt=dt, frames=tuple(frames), duration=last_frame * dt)


# ---------------------------------------------------------------------------
# line-delimited frame document


def timeline_to_document(timeline: Timeline) -> str:
    """One JSON object per line: a header, then one line per frame.

    Frame states map actor id to the fixed field order
    [x, y, heading, done].
    """
    actor_ids = sorted(timeline.frames[0].states) if timeline.frames else []
    header = {
        "format": TIMELINE_FORMAT,
        "dt": timeline.dt,
        "duration": timeline.duration,
        "frame_count": len(timeline.frames),
        "actors": actor_ids,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for frame in timeline.frames:
        payload = {
            "t": frame.t,
            "states": {
                aid: [s.x, s.y, s.heading, s.done]
                for aid, s in sorted(frame.states.items())
            },
        }
        lines.append(json.dumps(payload, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def parse_timeline(document: str) -> Timeline:
    lines = [line for line in document.splitlines() if line.strip()]
    if not lines:
        raise FormatError("bad_document", "timeline document is empty")
    header = json.loads(lines[0])
    if header.get("format") != TIMELINE_FORMAT:
        raise FormatError("format_version", f"expected timeline format {TIMELINE_FORMAT!r}")
    frames = []
    for line in lines[1:]:
        raw = json.loads(line)
        states = {
            aid: ActorState(x=v[0], y=v[1], heading=v[2], done=bool(v[3]))
            for aid, v in raw["states"].items()
        }
        frames.append(Frame(t=float(raw["t"]), states=states))
    if len(frames) != int(header["frame_count"]):
        raise FormatError("bad_document", "frame_count disagrees with the frame lines")
    return Timeline(dt=float(header["dt"]), frames=tuple(frames), duration=float(header["duration"]))
