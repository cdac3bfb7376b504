"""OpenDRIVE (.xodr) parsing and reference-line geometry.

Parses roads, lanes, junctions, traffic lights and crosswalk objects
into an immutable :class:`RoadNetwork`, and evaluates poses on road
reference lines and lane centerlines.

Geometry support: ``line`` and ``arc`` primitives are evaluated with
closed forms; ``spiral``, ``poly3`` and ``paramPoly3`` are converted at
parse time into dense sample tables whose chord deviation from the true
curve is below ``CHORD_TOLERANCE`` and are evaluated by linear
interpolation afterwards.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from bisect import bisect_right
from dataclasses import dataclass, field
from operator import itemgetter

import numpy as np

from .errors import DomainError, NotFoundError, ParseError, StructuralError

CHORD_TOLERANCE = 0.05
"""Max chord deviation (m) of approximated geometry sample tables."""

DEFAULT_TRAFFIC_LIGHT_TYPES = frozenset({"1000001", "trafficLight", "traffic_light"})
"""Signal ``type`` values counted as traffic lights."""

_FINE_STEP = 0.02
_MAX_FINE_SAMPLES = 200_000

Pose = tuple[float, float, float]


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class GeometrySegment:
    """One primitive of a road reference line.

    ``kind`` is ``line``, ``arc`` (with ``curvature``) or
    ``approximated`` (with a ``samples`` table of (s, x, y, heading)
    rows, strictly increasing in s and spanning [0, length]).
    """

    s_offset: float
    origin_x: float
    origin_y: float
    heading: float
    length: float
    kind: str
    curvature: float = 0.0
    samples: tuple[tuple[float, float, float, float], ...] = ()

    def eval(self, s_local: float) -> Pose:
        """Pose at arc length ``s_local`` from the segment start."""
        if self.kind == "line":
            return (
                self.origin_x + s_local * math.cos(self.heading),
                self.origin_y + s_local * math.sin(self.heading),
                self.heading,
            )
        if self.kind == "arc":
            k = self.curvature
            h = self.heading
            return (
                self.origin_x + (math.sin(h + k * s_local) - math.sin(h)) / k,
                self.origin_y + (math.cos(h) - math.cos(h + k * s_local)) / k,
                normalize_angle(h + k * s_local),
            )
        # approximated: linear interpolation of the sample table
        rows = self.samples
        i = bisect_right(rows, s_local, key=itemgetter(0))
        if i <= 0:
            s0, x0, y0, h0 = rows[0]
            return (x0, y0, normalize_angle(h0))
        if i >= len(rows):
            s0, x0, y0, h0 = rows[-1]
            return (x0, y0, normalize_angle(h0))
        s0, x0, y0, h0 = rows[i - 1]
        s1, x1, y1, h1 = rows[i]
        f = (s_local - s0) / (s1 - s0)
        return (
            x0 + f * (x1 - x0),
            y0 + f * (y1 - y0),
            normalize_angle(h0 + f * (h1 - h0)),
        )


@dataclass(frozen=True)
class WidthPoly:
    """Cubic lane width a + b*ds + c*ds^2 + d*ds^3, ds measured from s_offset."""

    s_offset: float
    a: float
    b: float
    c: float
    d: float

    def eval(self, ds: float) -> float:
        x = ds - self.s_offset
        return self.a + x * (self.b + x * (self.c + x * self.d))


@dataclass(frozen=True)
class Lane:
    lane_id: int
    lane_type: str  # driving | sidewalk | other
    width_polys: tuple[WidthPoly, ...]
    travel_direction: str  # with_s | against_s
    link_predecessor: int | None = None
    link_successor: int | None = None

    def width_at(self, ds: float) -> float:
        polys = self.width_polys
        i = bisect_right(polys, ds + 1e-12, key=lambda p: p.s_offset)
        w = polys[max(i - 1, 0)].eval(ds) if polys else 0.0
        return max(w, 0.0)


@dataclass(frozen=True)
class LaneSection:
    s_start: float
    s_end: float
    lanes: tuple[Lane, ...]  # lane 0 excluded, sorted by lane_id

    @property
    def length(self) -> float:
        return self.s_end - self.s_start

    def lane(self, lane_id: int) -> Lane | None:
        for l in self.lanes:
            if l.lane_id == lane_id:
                return l
        return None


@dataclass(frozen=True)
class RoadLink:
    element_type: str  # road | junction
    element_id: str
    contact_point: str | None  # start | end; None for junction links


@dataclass(frozen=True)
class Road:
    road_id: str
    length: float
    geometry: tuple[GeometrySegment, ...]
    lane_sections: tuple[LaneSection, ...]
    predecessor: RoadLink | None = None
    successor: RoadLink | None = None
    junction_id: str | None = None
    speed_limit: float | None = None

    def section_at(self, s: float) -> LaneSection:
        sections = self.lane_sections
        i = bisect_right(sections, s, key=lambda sec: sec.s_start)
        return sections[max(i - 1, 0)]


@dataclass(frozen=True)
class JunctionConnection:
    incoming_road: str
    connecting_road: str
    contact_point: str
    lane_links: tuple[tuple[int, int], ...]  # (from incoming lane, to connecting lane)


@dataclass(frozen=True)
class Signal:
    road_id: str
    s: float
    t: float
    signal_type: str


@dataclass(frozen=True)
class CrosswalkObject:
    road_id: str
    s: float
    t: float
    heading: float  # relative to the road heading at s
    span: float  # extent across the road (walking direction)
    width: float


@dataclass(frozen=True)
class RoadNetwork:
    roads: dict[str, Road] = field(default_factory=dict)
    junctions: dict[str, tuple[JunctionConnection, ...]] = field(default_factory=dict)
    signals: tuple[Signal, ...] = ()
    crosswalk_objects: tuple[CrosswalkObject, ...] = ()


@dataclass(frozen=True)
class MapMetadata:
    map_id: str
    junction_count: int
    crosswalk_count: int
    traffic_light_count: int
    total_drivable_length: float
    bounding_box: tuple[float, float, float, float]
    speed_limit_range: tuple[float, float] | None = None


# ---------------------------------------------------------------------------
# geometry approximation


def _chord_downsample(
    s: np.ndarray, x: np.ndarray, y: np.ndarray, h: np.ndarray, tol: float
) -> tuple[tuple[float, float, float, float], ...]:
    """Thin dense samples to the fewest rows keeping chord deviation <= tol."""
    keep = {0, len(s) - 1}
    stack = [(0, len(s) - 1)]
    while stack:
        i0, i1 = stack.pop()
        if i1 - i0 < 2:
            continue
        dx, dy = x[i1] - x[i0], y[i1] - y[i0]
        chord = math.hypot(dx, dy)
        px = x[i0 + 1 : i1] - x[i0]
        py = y[i0 + 1 : i1] - y[i0]
        if chord < 1e-12:
            dev = np.hypot(px, py)
        else:
            dev = np.abs(px * dy - py * dx) / chord
        j = int(np.argmax(dev))
        if dev[j] > tol * 0.8:  # headroom for interpolation error
            mid = i0 + 1 + j
            keep.add(mid)
            stack.append((i0, mid))
            stack.append((mid, i1))
    idx = sorted(keep)
    return tuple((float(s[i]), float(x[i]), float(y[i]), float(h[i])) for i in idx)


def _fine_grid(length: float) -> np.ndarray:
    n = min(max(int(math.ceil(length / _FINE_STEP)), 8), _MAX_FINE_SAMPLES)
    return np.linspace(0.0, length, n + 1)


def _approximate_spiral(
    x0: float, y0: float, hdg: float, length: float, curv0: float, curv1: float
) -> tuple[tuple[float, float, float, float], ...]:
    s = _fine_grid(length)
    cdot = (curv1 - curv0) / length
    theta = hdg + curv0 * s + 0.5 * cdot * s * s
    ds = np.diff(s)
    cx, cy = np.cos(theta), np.sin(theta)
    x = x0 + np.concatenate(([0.0], np.cumsum(0.5 * (cx[1:] + cx[:-1]) * ds)))
    y = y0 + np.concatenate(([0.0], np.cumsum(0.5 * (cy[1:] + cy[:-1]) * ds)))
    return _chord_downsample(s, x, y, theta, CHORD_TOLERANCE)


def _resample_by_arclength(
    length: float,
    u: np.ndarray,
    xl: np.ndarray,
    yl: np.ndarray,
    hl: np.ndarray,
    x0: float,
    y0: float,
    hdg: float,
) -> tuple[tuple[float, float, float, float], ...]:
    """Rotate/translate a local curve into world frame and reparameterize by s."""
    cum = np.concatenate(([0.0], np.cumsum(np.hypot(np.diff(xl), np.diff(yl)))))
    target = _fine_grid(min(length, float(cum[-1])))
    xs = np.interp(target, cum, xl)
    ys = np.interp(target, cum, yl)
    hs = np.interp(target, cum, hl)
    ch, sh = math.cos(hdg), math.sin(hdg)
    xw = x0 + ch * xs - sh * ys
    yw = y0 + sh * xs + ch * ys
    hw = np.unwrap(hs) + hdg
    return _chord_downsample(target, xw, yw, hw, CHORD_TOLERANCE)


def _approximate_poly3(
    x0: float, y0: float, hdg: float, length: float, a: float, b: float, c: float, d: float
) -> tuple[tuple[float, float, float, float], ...]:
    # arc length grows at least as fast as u, so [0, length] covers the curve
    u = _fine_grid(length)
    v = a + u * (b + u * (c + u * d))
    dv = b + u * (2 * c + u * 3 * d)
    return _resample_by_arclength(length, u, u, v, np.arctan(dv), x0, y0, hdg)


def _approximate_param_poly3(
    x0: float,
    y0: float,
    hdg: float,
    length: float,
    coeffs_u: tuple[float, float, float, float],
    coeffs_v: tuple[float, float, float, float],
    p_range: float,
) -> tuple[tuple[float, float, float, float], ...]:
    n = min(max(int(math.ceil(length / _FINE_STEP)), 8), _MAX_FINE_SAMPLES)
    p = np.linspace(0.0, p_range, n + 1)
    au, bu, cu, du = coeffs_u
    av, bv, cv, dv = coeffs_v
    ul = au + p * (bu + p * (cu + p * du))
    vl = av + p * (bv + p * (cv + p * dv))
    dul = bu + p * (2 * cu + p * 3 * du)
    dvl = bv + p * (2 * cv + p * 3 * dv)
    return _resample_by_arclength(length, p, ul, vl, np.arctan2(dvl, dul), x0, y0, hdg)


# ---------------------------------------------------------------------------
# parsing


def _attr_float(elem: ET.Element, name: str, context: str, default: float | None = None) -> float:
    raw = elem.get(name)
    if raw is None:
        if default is not None:
            return default
        raise ParseError("missing_attribute", f"{context}: missing attribute '{name}'")
    try:
        return float(raw)
    except ValueError:
        raise ParseError("bad_number", f"{context}: attribute '{name}'={raw!r} is not a number") from None


_SPEED_UNIT_FACTORS = {"m/s": 1.0, "ms": 1.0, "km/h": 1.0 / 3.6, "kmh": 1.0 / 3.6, "mph": 0.44704}


def _parse_speed(road_elem: ET.Element) -> float | None:
    for type_elem in road_elem.findall("type"):
        speed = type_elem.find("speed")
        if speed is None:
            continue
        raw = speed.get("max")
        if raw in (None, "no limit", "undefined"):
            continue
        try:
            value = float(raw)
        except ValueError:
            continue
        return value * _SPEED_UNIT_FACTORS.get(speed.get("unit", "m/s"), 1.0)
    return None


def _parse_geometry(road_elem: ET.Element, road_id: str, road_length: float) -> tuple[GeometrySegment, ...]:
    plan_view = road_elem.find("planView")
    segments: list[GeometrySegment] = []
    for geom in plan_view.findall("geometry") if plan_view is not None else []:
        ctx = f"road {road_id} geometry"
        s_off = _attr_float(geom, "s", ctx)
        gx = _attr_float(geom, "x", ctx)
        gy = _attr_float(geom, "y", ctx)
        hdg = _attr_float(geom, "hdg", ctx)
        length = _attr_float(geom, "length", ctx)
        if length <= 0:
            raise StructuralError("bad_geometry", f"road {road_id}: geometry at s={s_off} has length <= 0")
        kind, curvature, samples = "line", 0.0, ()
        if geom.find("arc") is not None:
            curvature = _attr_float(geom.find("arc"), "curvature", ctx)
            if curvature == 0.0:
                kind = "line"
            else:
                kind = "arc"
        elif geom.find("spiral") is not None:
            sp = geom.find("spiral")
            c0 = _attr_float(sp, "curvStart", ctx)
            c1 = _attr_float(sp, "curvEnd", ctx)
            kind = "approximated"
            samples = _approximate_spiral(gx, gy, hdg, length, c0, c1)
        elif geom.find("poly3") is not None:
            p3 = geom.find("poly3")
            kind = "approximated"
            samples = _approximate_poly3(
                gx, gy, hdg, length,
                _attr_float(p3, "a", ctx), _attr_float(p3, "b", ctx),
                _attr_float(p3, "c", ctx), _attr_float(p3, "d", ctx),
            )
        elif geom.find("paramPoly3") is not None:
            pp = geom.find("paramPoly3")
            p_range = length if pp.get("pRange", "normalized") == "arcLength" else 1.0
            kind = "approximated"
            samples = _approximate_param_poly3(
                gx, gy, hdg, length,
                tuple(_attr_float(pp, k, ctx) for k in ("aU", "bU", "cU", "dU")),
                tuple(_attr_float(pp, k, ctx) for k in ("aV", "bV", "cV", "dV")),
                p_range,
            )
        # line element or unknown primitive: treat as line (unknowns are ignored)
        segments.append(
            GeometrySegment(
                s_offset=s_off, origin_x=gx, origin_y=gy, heading=hdg,
                length=length, kind=kind, curvature=curvature, samples=samples,
            )
        )
    if not segments:
        raise StructuralError("zero_geometry", f"road {road_id} has no reference-line geometry")
    segments.sort(key=lambda g: g.s_offset)
    if abs(segments[0].s_offset) > 1e-2:
        raise StructuralError("bad_geometry", f"road {road_id}: geometry does not start at s=0")
    for prev, nxt in zip(segments, segments[1:]):
        if abs(prev.s_offset + prev.length - nxt.s_offset) > 1e-2:
            raise StructuralError(
                "bad_geometry", f"road {road_id}: geometry gap/overlap at s={nxt.s_offset}"
            )
    last = segments[-1]
    if abs(last.s_offset + last.length - road_length) > 1e-2:
        raise StructuralError(
            "bad_geometry",
            f"road {road_id}: geometry covers {last.s_offset + last.length:.3f} m of {road_length:.3f} m",
        )
    return tuple(segments)


_LANE_TYPE_MAP = {"driving": "driving", "sidewalk": "sidewalk"}


def _parse_lane(lane_elem: ET.Element, road_id: str) -> Lane | None:
    lane_id = int(lane_elem.get("id", "0"))
    if lane_id == 0:
        return None
    lane_type = _LANE_TYPE_MAP.get(lane_elem.get("type", ""), "other")
    widths = []
    for w in lane_elem.findall("width"):
        ctx = f"road {road_id} lane {lane_id} width"
        widths.append(
            WidthPoly(
                s_offset=_attr_float(w, "sOffset", ctx, 0.0),
                a=_attr_float(w, "a", ctx), b=_attr_float(w, "b", ctx, 0.0),
                c=_attr_float(w, "c", ctx, 0.0), d=_attr_float(w, "d", ctx, 0.0),
            )
        )
    widths.sort(key=lambda p: p.s_offset)
    pred = succ = None
    link = lane_elem.find("link")
    if link is not None:
        p = link.find("predecessor")
        s = link.find("successor")
        pred = int(p.get("id")) if p is not None and p.get("id") is not None else None
        succ = int(s.get("id")) if s is not None and s.get("id") is not None else None
    return Lane(
        lane_id=lane_id,
        lane_type=lane_type,
        width_polys=tuple(widths),
        travel_direction="with_s" if lane_id < 0 else "against_s",
        link_predecessor=pred,
        link_successor=succ,
    )


def _parse_lane_sections(road_elem: ET.Element, road_id: str, road_length: float) -> tuple[LaneSection, ...]:
    lanes_elem = road_elem.find("lanes")
    raw: list[tuple[float, list[Lane]]] = []
    for sec in lanes_elem.findall("laneSection") if lanes_elem is not None else []:
        s_start = _attr_float(sec, "s", f"road {road_id} laneSection")
        lanes: list[Lane] = []
        for side in ("left", "right"):
            side_elem = sec.find(side)
            if side_elem is None:
                continue
            for lane_elem in side_elem.findall("lane"):
                lane = _parse_lane(lane_elem, road_id)
                if lane is not None:
                    lanes.append(lane)
        lanes.sort(key=lambda l: l.lane_id)
        raw.append((s_start, lanes))
    raw.sort(key=lambda pair: pair[0])
    sections = []
    for i, (s_start, lanes) in enumerate(raw):
        s_end = raw[i + 1][0] if i + 1 < len(raw) else road_length
        if s_end - s_start <= 1e-9:
            continue  # zero-length section carries no sampled lane
        sections.append(LaneSection(s_start=s_start, s_end=s_end, lanes=tuple(lanes)))
    return tuple(sections)


def _parse_link(road_elem: ET.Element) -> tuple[RoadLink | None, RoadLink | None]:
    link = road_elem.find("link")
    result: list[RoadLink | None] = [None, None]
    if link is None:
        return None, None
    for i, tag in enumerate(("predecessor", "successor")):
        el = link.find(tag)
        if el is None or el.get("elementId") is None:
            continue
        etype = el.get("elementType", "road")
        result[i] = RoadLink(
            element_type=etype,
            element_id=el.get("elementId"),
            contact_point=el.get("contactPoint") if etype == "road" else None,
        )
    return result[0], result[1]


def parse_opendrive(
    document: str,
    traffic_light_types: frozenset[str] = DEFAULT_TRAFFIC_LIGHT_TYPES,
) -> RoadNetwork:
    """Parse an OpenDRIVE document into a :class:`RoadNetwork`.

    Driving and sidewalk lanes are kept as such, every other lane type
    becomes ``other``. Only signals whose ``type`` is in
    ``traffic_light_types`` are retained. Unknown elements are ignored.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError("malformed_xml", f"malformed XML at line {line}, column {col}: {exc.msg}") from None
    # tolerate namespaced documents
    def local(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    roads: dict[str, Road] = {}
    signals: list[Signal] = []
    crosswalks: list[CrosswalkObject] = []
    for road_elem in (e for e in root if local(e.tag) == "road"):
        road_id = road_elem.get("id")
        if road_id is None:
            raise StructuralError("missing_id", "road element without id")
        length = _attr_float(road_elem, "length", f"road {road_id}")
        junction_attr = road_elem.get("junction", "-1")
        pred, succ = _parse_link(road_elem)
        road = Road(
            road_id=road_id,
            length=length,
            geometry=_parse_geometry(road_elem, road_id, length),
            lane_sections=_parse_lane_sections(road_elem, road_id, length),
            predecessor=pred,
            successor=succ,
            junction_id=None if junction_attr in ("-1", None) else junction_attr,
            speed_limit=_parse_speed(road_elem),
        )
        if road_id in roads:
            raise StructuralError("duplicate_road", f"duplicate road id {road_id}")
        roads[road_id] = road

        signals_elem = road_elem.find("signals")
        for sig in signals_elem.findall("signal") if signals_elem is not None else []:
            sig_type = sig.get("type", "")
            if sig_type in traffic_light_types:
                ctx = f"road {road_id} signal"
                signals.append(
                    Signal(road_id=road_id, s=_attr_float(sig, "s", ctx),
                           t=_attr_float(sig, "t", ctx), signal_type=sig_type)
                )
        objects_elem = road_elem.find("objects")
        for obj in objects_elem.findall("object") if objects_elem is not None else []:
            if obj.get("type", "").lower() not in ("crosswalk", "crossing"):
                continue
            ctx = f"road {road_id} crosswalk"
            crosswalks.append(
                CrosswalkObject(
                    road_id=road_id,
                    s=_attr_float(obj, "s", ctx),
                    t=_attr_float(obj, "t", ctx, 0.0),
                    heading=_attr_float(obj, "hdg", ctx, 0.0),
                    span=_attr_float(obj, "length", ctx, 4.0),
                    width=_attr_float(obj, "width", ctx, 3.0),
                )
            )

    junctions: dict[str, tuple[JunctionConnection, ...]] = {}
    for junc_elem in (e for e in root if local(e.tag) == "junction"):
        junc_id = junc_elem.get("id")
        connections = []
        for conn in junc_elem.findall("connection"):
            links = tuple(
                (int(ll.get("from")), int(ll.get("to")))
                for ll in conn.findall("laneLink")
            )
            connections.append(
                JunctionConnection(
                    incoming_road=conn.get("incomingRoad", ""),
                    connecting_road=conn.get("connectingRoad", ""),
                    contact_point=conn.get("contactPoint", "start"),
                    lane_links=links,
                )
            )
        junctions[junc_id] = tuple(connections)

    _validate_links(roads, junctions)
    return RoadNetwork(
        roads=roads,
        junctions=junctions,
        signals=tuple(signals),
        crosswalk_objects=tuple(crosswalks),
    )


def _validate_links(roads: dict[str, Road], junctions: dict[str, tuple[JunctionConnection, ...]]) -> None:
    for road in roads.values():
        for link in (road.predecessor, road.successor):
            if link is None:
                continue
            pool = roads if link.element_type == "road" else junctions
            if link.element_id not in pool:
                raise StructuralError(
                    "dangling_link",
                    f"road {road.road_id} links to unknown {link.element_type} {link.element_id}",
                )
        if road.junction_id is not None and road.junction_id not in junctions:
            raise StructuralError(
                "dangling_link", f"road {road.road_id} belongs to unknown junction {road.junction_id}"
            )
    for junc_id, connections in junctions.items():
        for conn in connections:
            for rid in (conn.incoming_road, conn.connecting_road):
                if rid not in roads:
                    raise StructuralError(
                        "dangling_link", f"junction {junc_id} references unknown road {rid}"
                    )


# ---------------------------------------------------------------------------
# evaluation


def eval_reference_line(road: Road, s: float) -> Pose:
    """Pose (x, y, heading) on the road reference line at arc length s."""
    if s < -1e-9 or s > road.length + 1e-9:
        raise DomainError("out_of_range", f"s={s} outside [0, {road.length}] on road {road.road_id}")
    s = min(max(s, 0.0), road.length)
    segs = road.geometry
    i = bisect_right(segs, s, key=lambda g: g.s_offset)
    seg = segs[max(i - 1, 0)]
    return seg.eval(min(s - seg.s_offset, seg.length))


def eval_lane_center(road: Road, lane_id: int, s: float) -> Pose:
    """Pose at the centerline of a lane, heading aligned with travel direction."""
    if s < -1e-9 or s > road.length + 1e-9:
        raise DomainError("out_of_range", f"s={s} outside [0, {road.length}] on road {road.road_id}")
    s = min(max(s, 0.0), road.length)
    section = road.section_at(s)
    lane = section.lane(lane_id)
    if lane is None:
        raise NotFoundError("unknown_lane", f"road {road.road_id} has no lane {lane_id} at s={s}")
    ds = s - section.s_start
    side = 1 if lane_id > 0 else -1
    offset = 0.0
    for inner_id in range(side, lane_id, side):
        inner = section.lane(inner_id)
        if inner is not None:
            offset += inner.width_at(ds)
    offset += 0.5 * lane.width_at(ds)
    x, y, h = eval_reference_line(road, s)
    t = side * offset
    x -= t * math.sin(h)
    y += t * math.cos(h)
    if lane.travel_direction == "against_s":
        h = normalize_angle(h + math.pi)
    return (x, y, h)


# ---------------------------------------------------------------------------
# metadata


def extract_metadata(network: RoadNetwork, map_id: str) -> MapMetadata:
    """Catalog statistics: entity counts, drivable length, extent, speed range."""
    drivable = 0.0
    min_x = min_y = math.inf
    max_x = max_y = -math.inf
    speeds = []
    for road in network.roads.values():
        for section in road.lane_sections:
            n_driving = sum(1 for l in section.lanes if l.lane_type == "driving")
            drivable += n_driving * section.length
        step_count = max(int(math.ceil(road.length)), 1)
        for k in range(step_count + 1):
            x, y, _ = eval_reference_line(road, min(k * 1.0, road.length))
            min_x, max_x = min(min_x, x), max(max_x, x)
            min_y, max_y = min(min_y, y), max(max_y, y)
        if road.speed_limit is not None:
            speeds.append(road.speed_limit)
    if not network.roads:
        min_x = min_y = max_x = max_y = 0.0
    return MapMetadata(
        map_id=map_id,
        junction_count=len(network.junctions),
        crosswalk_count=len(network.crosswalk_objects),
        traffic_light_count=len(network.signals),
        total_drivable_length=drivable,
        bounding_box=(min_x, min_y, max_x, max_y),
        speed_limit_range=(min(speeds), max(speeds)) if speeds else None,
    )
