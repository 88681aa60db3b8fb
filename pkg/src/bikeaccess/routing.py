"""Shortest-path travel times over the road network for bikes and pedestrians.

All operations are pure functions over an immutable snapshot; one Dijkstra
per worker is safe with no shared state.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

from .geodata import CitySnapshot, GeoPoint, ROAD_CLASSES, RoadNetwork, Station, SubwayEntrance, haversine_m

log = logging.getLogger(__name__)

SNAP_MAX_M = 300.0  # beyond this a point is considered off-network


@dataclass(frozen=True)
class TravelMode:
    name: str
    allowed_classes: frozenset[str]
    speed_m_per_min: float


BIKE = TravelMode("bike", frozenset(ROAD_CLASSES), 280.0)
WALK = TravelMode("walk", frozenset(ROAD_CLASSES) - {"motorway", "trunk"}, 80.0)


@dataclass
class PathResult:
    distance_m: float
    nodes: list[int]


class SnapError(Exception):
    """Point too far from any node usable by the travel mode."""


class Unreachable(Exception):
    """No path between the endpoints over allowed edges."""


def snap(p: GeoPoint, net: RoadNetwork, mode: TravelMode) -> int:
    """Nearest node incident to an allowed-class edge; ties go to the smaller id."""
    best_id = None
    best_d = None
    for nid in net.nodes_for_classes(mode.allowed_classes):  # sorted, so ties keep first
        d = haversine_m(p, net.nodes[nid])
        if best_d is None or d < best_d:
            best_d, best_id = d, nid
    if best_id is None or best_d > SNAP_MAX_M:
        raise SnapError(
            f"no {mode.name}-usable node within {SNAP_MAX_M:.0f} m of ({p.lon}, {p.lat})"
        )
    return best_id


def _relax_targets(net: RoadNetwork, u: int, mode: TravelMode):
    for e in net.incident(u):
        if e.road_class in mode.allowed_classes:
            yield (e.v if e.u == u else e.u), e.length_m


def dijkstra_distances(net: RoadNetwork, src: int, mode: TravelMode) -> dict[int, float]:
    """Single-source distances in meters over allowed edges (reachable nodes only)."""
    dist = {src: 0.0}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in _relax_targets(net, u, mode):
            nd = d + w
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_path_m(net: RoadNetwork, src: int, dst: int, mode: TravelMode) -> PathResult:
    """Dijkstra with deterministic tie-breaking: among equal-length paths the
    lexicographically smallest node sequence wins."""
    if src not in net.nodes or dst not in net.nodes:
        raise KeyError(f"unknown node in ({src}, {dst})")
    if src == dst:
        return PathResult(0.0, [src])
    dist: dict[int, float] = {src: 0.0}
    path: dict[int, tuple[int, ...]] = {src: (src,)}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == dst:
            return PathResult(d, list(path[u]))
        for v, w in _relax_targets(net, u, mode):
            nd = d + w
            npath = path[u] + (v,)
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                path[v] = npath
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and npath < path[v]:
                path[v] = npath
    raise Unreachable(f"no {mode.name} path from node {src} to node {dst}")


def bike_time_min(distance_m: float) -> float:
    """Minutes to cover distance_m at the fixed cycling speed of 280 m/min."""
    if distance_m < 0:
        raise ValueError(f"negative distance {distance_m}")
    return distance_m / BIKE.speed_m_per_min


def reachable_entrances(
    station: Station,
    snap_: CitySnapshot,
    radius_m: float = 500.0,
    mode: TravelMode = BIKE,
) -> list[tuple[SubwayEntrance, float]]:
    """Subway entrances within radius_m straight-line, with bike minutes via the
    network. Entrances that fail to snap or route are dropped with a warning."""
    nearby = [e for e in snap_.entrances if haversine_m(station.location, e.location) <= radius_m]
    if not nearby:
        return []
    try:
        src = snap(station.location, snap_.network, mode)
    except SnapError as exc:
        log.warning("station %s off-network: %s", station.station_id, exc)
        return []
    dists = dijkstra_distances(snap_.network, src, mode)
    out = []
    for ent in nearby:
        try:
            node = snap(ent.location, snap_.network, mode)
        except SnapError as exc:
            log.warning("entrance %s off-network: %s", ent.entrance_id, exc)
            continue
        d = dists.get(node)
        if d is None:
            log.warning(
                "entrance %s unreachable from station %s", ent.entrance_id, station.station_id
            )
            continue
        out.append((ent, d / mode.speed_m_per_min))
    return out
