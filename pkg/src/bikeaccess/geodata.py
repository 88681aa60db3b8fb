"""Geospatial inputs: loading, validation, indexing, and station feature vectors.

All distances are great-circle meters on a sphere of radius 6,371,000 m.
Input files are UTF-8 text; the exact schemas are documented on the loaders.
A loaded :class:`CitySnapshot` is treated as immutable and is safe to share
across worker threads.
"""

from __future__ import annotations

import bisect
import csv
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

EARTH_RADIUS_M = 6_371_000.0
BUFFER_RADIUS_M = 500.0
COORD_DECIMALS = 7  # node identity = coordinates rounded to 7 decimals

ROAD_CLASSES = (
    "motorway",
    "trunk",
    "primary",
    "secondary",
    "tertiary",
    "unclassified",
    "residential",
    "living_street",
)
# The seven classes that occupy road-length feature slots; living_street only
# participates in walkability screening.
FEATURE_ROAD_CLASSES = ROAD_CLASSES[:7]

POI_CATEGORIES = (
    "residential",
    "educational",
    "cultural",
    "recreational",
    "commercial",
    "religious",
    "transportation",
    "government",
    "health",
    "social",
)

STATION_STATUSES = ("existing", "cold_start", "candidate")

ETHNICITY_FIELDS = ("pop_white", "pop_black", "pop_asian", "pop_hispanic")

#: Ordering of the 29 static feature slots.
FEATURE_NAMES = tuple(
    [f"road_{c}_m" for c in FEATURE_ROAD_CLASSES]
    + [f"poi_{c}" for c in POI_CATEGORIES]
    + ["subway_entrances_500m", "nearest_subway_m"]
    + [
        "pop_density",
        "share_white",
        "share_black",
        "share_asian",
        "share_hispanic",
        "share_reserved_1",
        "share_reserved_2",
        "share_reserved_3",
        "share_reserved_4",
        "share_reserved_5",
    ]
)
FEATURE_DIM = len(FEATURE_NAMES)  # 29

MONTHLY_FEATURE_NAMES = (
    "bike_lane_m",
    "stations_500m",
    "stations_1000m",
    "stations_1000_5000m",
    "mean_neighbor_dist_m",
    "age_months",
)
MONTHLY_DIM = len(MONTHLY_FEATURE_NAMES)  # 6

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


class ParseError(ValueError):
    """Malformed record in an input file (message carries the location)."""


class IntegrityError(ValueError):
    """Dangling cross-reference between input files."""


class DomainError(ValueError):
    """Value outside its documented domain (negative length, open ring, ...)."""


def parse_month(s: str, where: str = "") -> str:
    m = _MONTH_RE.match(s or "")
    if not m or not (1 <= int(m.group(2)) <= 12):
        raise ParseError(f"invalid month {s!r} (expected YYYY-MM){' at ' + where if where else ''}")
    return s


def month_index(month: str) -> int:
    """Months since year 0, for ordering and age arithmetic."""
    y, m = month.split("-")
    return int(y) * 12 + int(m) - 1


@dataclass(frozen=True)
class GeoPoint:
    lon: float
    lat: float

    def __post_init__(self):
        if not (-180.0 <= self.lon <= 180.0 and -90.0 <= self.lat <= 90.0):
            raise DomainError(f"coordinates out of range: ({self.lon}, {self.lat})")


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters (spherical earth, R = 6,371,000 m)."""
    if a.lon == b.lon and a.lat == b.lat:
        return 0.0
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


@dataclass
class RoadEdge:
    u: int
    v: int
    length_m: float
    road_class: str
    bike_lane: bool = False


class RoadNetwork:
    """Undirected weighted road graph; node ids are ints assigned at load."""

    def __init__(self, nodes: dict[int, GeoPoint], edges: list[RoadEdge]):
        for e in edges:
            if e.u not in nodes or e.v not in nodes:
                raise IntegrityError(f"edge ({e.u},{e.v}) references a missing node")
            if not (e.length_m > 0.0 and math.isfinite(e.length_m)):
                raise DomainError(f"edge ({e.u},{e.v}) has non-positive length {e.length_m}")
            if e.road_class not in ROAD_CLASSES:
                raise DomainError(f"edge ({e.u},{e.v}) has unknown road class {e.road_class!r}")
        self.nodes = dict(nodes)
        self.edges = list(edges)
        self.bike_lane_edges = [e for e in self.edges if e.bike_lane]
        self._adj: dict[int, list[RoadEdge]] = {u: [] for u in self.nodes}
        for e in self.edges:
            self._adj[e.u].append(e)
            self._adj[e.v].append(e)

    def incident(self, node_id: int) -> list[RoadEdge]:
        return self._adj[node_id]

    def nodes_for_classes(self, allowed: frozenset[str] | set[str]) -> list[int]:
        """Sorted ids of nodes touching at least one edge of an allowed class."""
        return sorted(
            u for u, es in self._adj.items() if any(e.road_class in allowed for e in es)
        )

    def __eq__(self, other):
        return (
            isinstance(other, RoadNetwork)
            and self.nodes == other.nodes
            and self.edges == other.edges
        )


@dataclass
class SubwayEntrance:
    entrance_id: str
    station_id: str  # parent subway station
    location: GeoPoint


@dataclass
class ServiceSchedule:
    station_id: str
    arrivals: list[float]  # minutes past midnight, sorted, within [0, 1440)

    def count_between(self, start_min: float, end_min: float) -> int:
        """Arrivals in the half-open window [start_min, end_min)."""
        lo = bisect.bisect_left(self.arrivals, start_min)
        hi = bisect.bisect_left(self.arrivals, end_min)
        return hi - lo


@dataclass
class Zone:
    zone_id: str
    polygon: list[GeoPoint]  # closed ring, first == last, >= 4 points
    pop_white: float
    pop_black: float
    pop_asian: float
    pop_hispanic: float
    median_income: float
    pop_density: float

    def __post_init__(self):
        if len(self.polygon) < 4:
            raise DomainError(f"zone {self.zone_id}: ring needs >= 4 points")
        first, last = self.polygon[0], self.polygon[-1]
        if first.lon != last.lon or first.lat != last.lat:
            raise DomainError(f"zone {self.zone_id}: ring is not closed")
        for name in (*ETHNICITY_FIELDS, "median_income", "pop_density"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"zone {self.zone_id}: {name} must be finite and >= 0, got {v}")

    def ethnicity_counts(self) -> dict[str, float]:
        return {
            "White": self.pop_white,
            "Black": self.pop_black,
            "Asian": self.pop_asian,
            "Hispanic": self.pop_hispanic,
        }

    def contains(self, p: GeoPoint) -> bool:
        """Point-in-polygon by ray casting; boundary points count as inside."""
        ring = self.polygon
        if _on_ring(p, ring):
            return True
        inside = False
        n = len(ring) - 1  # last point repeats the first
        j = n - 1
        for i in range(n):
            a, b = ring[i], ring[j]
            if (a.lat > p.lat) != (b.lat > p.lat):
                x_cross = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon
                if p.lon < x_cross:
                    inside = not inside
            j = i
        return inside


_ON_EDGE_EPS = 1e-12  # degrees^2 cross-product tolerance


def _on_ring(p: GeoPoint, ring: list[GeoPoint]) -> bool:
    for a, b in zip(ring, ring[1:]):
        minx, maxx = min(a.lon, b.lon), max(a.lon, b.lon)
        miny, maxy = min(a.lat, b.lat), max(a.lat, b.lat)
        if not (minx - 1e-12 <= p.lon <= maxx + 1e-12 and miny - 1e-12 <= p.lat <= maxy + 1e-12):
            continue
        cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon)
        if abs(cross) <= _ON_EDGE_EPS:
            return True
    return False


@dataclass
class Station:
    station_id: str
    location: GeoPoint
    status: str  # existing | cold_start | candidate
    open_month: str | None = None  # YYYY-MM; the cold-start month when status == cold_start
    static_features: np.ndarray | None = None
    monthly_features: dict[str, list[float]] = field(default_factory=dict)
    observed_demand: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATION_STATUSES:
            raise DomainError(f"station {self.station_id}: unknown status {self.status!r}")
        if self.status == "cold_start" and not self.open_month:
            raise DomainError(f"station {self.station_id}: cold_start requires open_month")


@dataclass
class Poi:
    poi_id: str
    location: GeoPoint
    category: str

    def __post_init__(self):
        if self.category not in POI_CATEGORIES:
            raise DomainError(f"poi {self.poi_id}: unknown category {self.category!r}")


@dataclass
class CitySnapshot:
    network: RoadNetwork
    stations: list[Station]
    entrances: list[SubwayEntrance]
    schedules: list[ServiceSchedule]
    zones: list[Zone]
    pois: list[Poi]

    def __post_init__(self):
        self._station_by_id = {s.station_id: s for s in self.stations}
        self._schedule_by_station: dict[str, ServiceSchedule] = {
            sc.station_id: sc for sc in self.schedules
        }

    def station(self, station_id: str) -> Station:
        return self._station_by_id[station_id]

    def has_station(self, station_id: str) -> bool:
        return station_id in self._station_by_id

    def arrivals_between(self, subway_station_id: str, start_min: float, end_min: float) -> int:
        sc = self._schedule_by_station.get(subway_station_id)
        return sc.count_between(start_min, end_min) if sc else 0

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(min_lon, min_lat, max_lon, max_lat) over nodes, stations, entrances."""
        pts = (
            list(self.network.nodes.values())
            + [s.location for s in self.stations]
            + [e.location for e in self.entrances]
        )
        if not pts:
            return (0.0, 0.0, 0.0, 0.0)
        return (
            min(p.lon for p in pts),
            min(p.lat for p in pts),
            max(p.lon for p in pts),
            max(p.lat for p in pts),
        )


def zone_of(p: GeoPoint, zones: list[Zone]) -> Zone | None:
    """The zone containing p, or None. Overlaps resolve to the smallest zone_id."""
    hits = [z for z in zones if z.contains(p)]
    if not hits:
        return None
    return min(hits, key=lambda z: z.zone_id)


def open_before(station: Station, month: str) -> bool:
    """Whether the station has ridership history before `month`.

    Existing stations always qualify; cold-start stations qualify strictly
    after their opening month; candidates never do.
    """
    if station.status == "existing":
        return True
    if station.status == "cold_start":
        return month_index(station.open_month) < month_index(month)
    return False


def age_months(station: Station, month: str) -> float:
    if not station.open_month:
        return 0.0
    return float(max(0, month_index(month) - month_index(station.open_month)))


def build_feature_vector(station: Station, snap: CitySnapshot) -> np.ndarray:
    """29-slot static feature vector for a station (see FEATURE_NAMES).

    Road lengths count an edge iff both endpoints fall within the 500 m
    straight-line buffer. Stations outside every zone get zeroed
    socio-demographic slots (logged as a warning).
    """
    v = np.zeros(FEATURE_DIM)
    loc = station.location
    node_in = {
        nid: haversine_m(loc, pt) <= BUFFER_RADIUS_M for nid, pt in snap.network.nodes.items()
    }
    class_slot = {c: i for i, c in enumerate(FEATURE_ROAD_CLASSES)}
    for e in snap.network.edges:
        if node_in[e.u] and node_in[e.v]:
            slot = class_slot.get(e.road_class)
            if slot is not None:
                v[slot] += e.length_m
    poi_slot = {c: 7 + i for i, c in enumerate(POI_CATEGORIES)}
    for poi in snap.pois:
        if haversine_m(loc, poi.location) <= BUFFER_RADIUS_M:
            v[poi_slot[poi.category]] += 1.0
    ent_dists = [haversine_m(loc, e.location) for e in snap.entrances]
    v[17] = float(sum(1 for d in ent_dists if d <= BUFFER_RADIUS_M))
    v[18] = min(ent_dists) if ent_dists else 0.0
    zone = zone_of(loc, snap.zones)
    if zone is None:
        log.warning("station %s lies outside all zones; demographics zeroed", station.station_id)
        return v
    v[19] = zone.pop_density
    counts = np.array([zone.pop_white, zone.pop_black, zone.pop_asian, zone.pop_hispanic])
    total = counts.sum()
    if total > 0:
        v[20:24] = counts / total
    return v


def monthly_context(station: Station, snap: CitySnapshot, month: str) -> np.ndarray:
    """6-slot monthly dynamics vector (see MONTHLY_FEATURE_NAMES).

    A precomputed entry in station.monthly_features takes precedence;
    otherwise the vector is derived from the snapshot: bike-lane edge length
    inside the 500 m buffer, counts of stations opened before `month` at
    three radii, mean distance to those within 1 km, and station age.
    """
    pre = station.monthly_features.get(month)
    if pre is not None:
        if len(pre) != MONTHLY_DIM:
            raise DomainError(
                f"station {station.station_id}: monthly vector for {month} has length {len(pre)}"
            )
        return np.asarray(pre, dtype=float)
    v = np.zeros(MONTHLY_DIM)
    loc = station.location
    if snap.network.bike_lane_edges:
        dcache: dict[int, bool] = {}

        def _within(nid: int) -> bool:
            hit = dcache.get(nid)
            if hit is None:
                hit = haversine_m(loc, snap.network.nodes[nid]) <= BUFFER_RADIUS_M
                dcache[nid] = hit
            return hit

        v[0] = sum(
            e.length_m for e in snap.network.bike_lane_edges if _within(e.u) and _within(e.v)
        )
    near = []
    for other in snap.stations:
        if other.station_id == station.station_id or not open_before(other, month):
            continue
        d = haversine_m(loc, other.location)
        if d <= 500.0:
            v[1] += 1.0
        if d <= 1000.0:
            v[2] += 1.0
            near.append(d)
        elif d <= 5000.0:
            v[3] += 1.0
    v[4] = float(np.mean(near)) if near else 0.0
    v[5] = age_months(station, month)
    return v


def build_city_snapshot(
    network: RoadNetwork,
    stations: list[Station],
    entrances: list[SubwayEntrance],
    schedules: list[ServiceSchedule],
    zones: list[Zone],
    pois: list[Poi],
) -> CitySnapshot:
    """Validate cross-references, sort deterministically, compute station features."""
    seen_station = set()
    for s in stations:
        if s.station_id in seen_station:
            raise IntegrityError(f"duplicate station_id {s.station_id}")
        seen_station.add(s.station_id)
        if s.status == "cold_start":
            opened = month_index(s.open_month)
            for m in s.observed_demand:
                if month_index(m) <= opened:
                    raise DomainError(
                        f"cold_start station {s.station_id} has observed demand at {m}, "
                        f"not after its opening month {s.open_month}"
                    )
        if s.status == "candidate" and s.observed_demand:
            log.warning("candidate station %s carries observed demand; ignored", s.station_id)
    seen_ent = set()
    parents = set()
    for e in entrances:
        if e.entrance_id in seen_ent:
            raise IntegrityError(f"duplicate entrance_id {e.entrance_id}")
        seen_ent.add(e.entrance_id)
        if not e.station_id:
            raise DomainError(f"entrance {e.entrance_id}: empty station_id")
        parents.add(e.station_id)
    for sc in schedules:
        if sc.station_id not in parents:
            raise IntegrityError(
                f"schedule references unknown subway station {sc.station_id!r}"
            )
        prev = -1.0
        for t in sc.arrivals:
            if not (0.0 <= t < 1440.0):
                raise DomainError(f"schedule {sc.station_id}: arrival {t} outside [0, 1440)")
            if t < prev:
                raise DomainError(f"schedule {sc.station_id}: arrivals not sorted")
            prev = t
    seen_zone = set()
    for z in zones:
        if z.zone_id in seen_zone:
            raise IntegrityError(f"duplicate zone_id {z.zone_id}")
        seen_zone.add(z.zone_id)
    snap = CitySnapshot(
        network=network,
        stations=sorted(stations, key=lambda s: s.station_id),
        entrances=sorted(entrances, key=lambda e: e.entrance_id),
        schedules=sorted(schedules, key=lambda sc: sc.station_id),
        zones=sorted(zones, key=lambda z: z.zone_id),
        pois=sorted(pois, key=lambda p: p.poi_id),
    )
    for s in snap.stations:
        s.static_features = build_feature_vector(s, snap)
    return snap


# ---------------------------------------------------------------------------
# file loading / saving


def _round_coord(x: float) -> float:
    return round(float(x), COORD_DECIMALS)


def load_road_network(path: str | Path) -> RoadNetwork:
    """network.geojson: FeatureCollection of LineStrings.

    Each feature needs property "highway" naming a road class; the optional
    boolean property "bike_lane" marks cycling infrastructure. Node identity
    is the coordinate pair rounded to 7 decimals; zero-length segments after
    rounding are dropped with a warning.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if data.get("type") != "FeatureCollection":
        raise ParseError(f"{path}: expected a FeatureCollection")
    node_ids: dict[tuple[float, float], int] = {}
    nodes: dict[int, GeoPoint] = {}
    edges: list[RoadEdge] = []

    def node_for(lon: float, lat: float) -> int:
        key = (_round_coord(lon), _round_coord(lat))
        nid = node_ids.get(key)
        if nid is None:
            nid = len(node_ids)
            node_ids[key] = nid
            nodes[nid] = GeoPoint(key[0], key[1])
        return nid

    for i, feat in enumerate(data.get("features", [])):
        geom = feat.get("geometry") or {}
        props = feat.get("properties") or {}
        if geom.get("type") != "LineString":
            raise ParseError(f"{path}: feature {i}: expected LineString geometry")
        cls = props.get("highway")
        if cls not in ROAD_CLASSES:
            raise ParseError(f"{path}: feature {i}: unknown highway class {cls!r}")
        bike_lane = bool(props.get("bike_lane", False))
        coords = geom.get("coordinates") or []
        if len(coords) < 2:
            raise ParseError(f"{path}: feature {i}: LineString needs >= 2 coordinates")
        ids = [node_for(c[0], c[1]) for c in coords]
        for u, v in zip(ids, ids[1:]):
            if u == v:
                log.warning("%s: feature %d: zero-length segment dropped", path, i)
                continue
            length = haversine_m(nodes[u], nodes[v])
            edges.append(RoadEdge(u=u, v=v, length_m=length, road_class=cls, bike_lane=bike_lane))
    return RoadNetwork(nodes, edges)


def _read_csv(path: Path, required: tuple[str, ...]):
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"{path}: missing columns {missing}")
        for row in reader:
            yield reader.line_num, row


def _float_field(row, key, path, line, minimum=None) -> float:
    try:
        x = float(row[key])
    except (TypeError, ValueError):
        raise ParseError(f"{path}:{line}: bad {key} value {row.get(key)!r}") from None
    if not math.isfinite(x) or (minimum is not None and x < minimum):
        raise DomainError(f"{path}:{line}: {key}={x} out of domain")
    return x


def load_stations(stations_path: str | Path, demand_path: str | Path | None) -> list[Station]:
    """stations.csv: station_id,lon,lat,status,open_month (YYYY-MM, may be blank
    except for cold_start rows). demand.csv: station_id,month,trips."""
    stations_path = Path(stations_path)
    stations: dict[str, Station] = {}
    for line, row in _read_csv(stations_path, ("station_id", "lon", "lat", "status", "open_month")):
        sid = row["station_id"].strip()
        if not sid:
            raise ParseError(f"{stations_path}:{line}: empty station_id")
        if sid in stations:
            raise IntegrityError(f"{stations_path}:{line}: duplicate station_id {sid}")
        status = row["status"].strip()
        if status not in STATION_STATUSES:
            raise ParseError(f"{stations_path}:{line}: unknown status {status!r}")
        open_month = (row["open_month"] or "").strip() or None
        if open_month:
            parse_month(open_month, where=f"{stations_path}:{line}")
        elif status == "cold_start":
            raise ParseError(f"{stations_path}:{line}: cold_start station needs open_month")
        loc = GeoPoint(
            _float_field(row, "lon", stations_path, line),
            _float_field(row, "lat", stations_path, line),
        )
        stations[sid] = Station(station_id=sid, location=loc, status=status, open_month=open_month)
    if demand_path is not None:
        demand_path = Path(demand_path)
        if demand_path.exists():
            for line, row in _read_csv(demand_path, ("station_id", "month", "trips")):
                sid = row["station_id"].strip()
                if sid not in stations:
                    raise IntegrityError(
                        f"{demand_path}:{line}: demand for unknown station {sid!r}"
                    )
                m = parse_month(row["month"].strip(), where=f"{demand_path}:{line}")
                stations[sid].observed_demand[m] = _float_field(
                    row, "trips", demand_path, line, minimum=0.0
                )
    return list(stations.values())


def load_entrances(path: str | Path) -> list[SubwayEntrance]:
    """entrances.csv: entrance_id,station_id,lon,lat."""
    path = Path(path)
    out = []
    for line, row in _read_csv(path, ("entrance_id", "station_id", "lon", "lat")):
        eid = row["entrance_id"].strip()
        if not eid:
            raise ParseError(f"{path}:{line}: empty entrance_id")
        out.append(
            SubwayEntrance(
                entrance_id=eid,
                station_id=row["station_id"].strip(),
                location=GeoPoint(
                    _float_field(row, "lon", path, line), _float_field(row, "lat", path, line)
                ),
            )
        )
    return out


def load_schedules(path: str | Path) -> list[ServiceSchedule]:
    """schedules.csv: station_id,arrival_min — one row per scheduled arrival."""
    path = Path(path)
    arrivals: dict[str, list[float]] = {}
    for line, row in _read_csv(path, ("station_id", "arrival_min")):
        sid = row["station_id"].strip()
        if not sid:
            raise ParseError(f"{path}:{line}: empty station_id")
        t = _float_field(row, "arrival_min", path, line)
        if not (0.0 <= t < 1440.0):
            raise DomainError(f"{path}:{line}: arrival_min {t} outside [0, 1440)")
        arrivals.setdefault(sid, []).append(t)
    return [ServiceSchedule(station_id=sid, arrivals=sorted(ts)) for sid, ts in arrivals.items()]


def load_zones(path: str | Path) -> list[Zone]:
    """zones.geojson: Polygon features carrying demographic properties."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if data.get("type") != "FeatureCollection":
        raise ParseError(f"{path}: expected a FeatureCollection")
    zones = []
    for i, feat in enumerate(data.get("features", [])):
        geom = feat.get("geometry") or {}
        props = feat.get("properties") or {}
        if geom.get("type") != "Polygon":
            raise ParseError(f"{path}: feature {i}: expected Polygon geometry")
        rings = geom.get("coordinates") or []
        if not rings:
            raise ParseError(f"{path}: feature {i}: Polygon has no rings")
        try:
            ring = [GeoPoint(float(c[0]), float(c[1])) for c in rings[0]]
            zones.append(
                Zone(
                    zone_id=str(props["zone_id"]),
                    polygon=ring,
                    pop_white=float(props["pop_white"]),
                    pop_black=float(props["pop_black"]),
                    pop_asian=float(props["pop_asian"]),
                    pop_hispanic=float(props["pop_hispanic"]),
                    median_income=float(props["median_income"]),
                    pop_density=float(props["pop_density"]),
                )
            )
        except KeyError as exc:
            raise ParseError(f"{path}: feature {i}: missing property {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: feature {i}: {exc}") from None
    return zones


def load_pois(path: str | Path) -> list[Poi]:
    """pois.csv: poi_id,lon,lat,category."""
    path = Path(path)
    out = []
    for line, row in _read_csv(path, ("poi_id", "lon", "lat", "category")):
        cat = row["category"].strip()
        if cat not in POI_CATEGORIES:
            raise ParseError(f"{path}:{line}: unknown POI category {cat!r}")
        out.append(
            Poi(
                poi_id=row["poi_id"].strip(),
                location=GeoPoint(
                    _float_field(row, "lon", path, line), _float_field(row, "lat", path, line)
                ),
                category=cat,
            )
        )
    return out


SNAPSHOT_FILES = {
    "network": "network.geojson",
    "stations": "stations.csv",
    "demand": "demand.csv",
    "entrances": "entrances.csv",
    "schedules": "schedules.csv",
    "zones": "zones.geojson",
    "pois": "pois.csv",
}


def load_city_snapshot(
    network: str | Path,
    stations: str | Path,
    entrances: str | Path,
    schedules: str | Path,
    zones: str | Path,
    pois: str | Path,
    demand: str | Path | None = None,
) -> CitySnapshot:
    """Load and validate all inputs into an immutable CitySnapshot."""
    return build_city_snapshot(
        network=load_road_network(network),
        stations=load_stations(stations, demand),
        entrances=load_entrances(entrances),
        schedules=load_schedules(schedules),
        zones=load_zones(zones),
        pois=load_pois(pois),
    )


def snapshot_from_dir(directory: str | Path) -> CitySnapshot:
    d = Path(directory)
    return load_city_snapshot(
        network=d / SNAPSHOT_FILES["network"],
        stations=d / SNAPSHOT_FILES["stations"],
        entrances=d / SNAPSHOT_FILES["entrances"],
        schedules=d / SNAPSHOT_FILES["schedules"],
        zones=d / SNAPSHOT_FILES["zones"],
        pois=d / SNAPSHOT_FILES["pois"],
        demand=d / SNAPSHOT_FILES["demand"],
    )


def save_city_snapshot(snap: CitySnapshot, directory: str | Path) -> None:
    """Write the snapshot back out in the canonical input formats.

    Edges are written one LineString per edge in load order so that node ids
    are reproduced exactly on reload.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    feats = []
    for e in snap.network.edges:
        u, v = snap.network.nodes[e.u], snap.network.nodes[e.v]
        props = {"highway": e.road_class}
        if e.bike_lane:
            props["bike_lane"] = True
        feats.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[u.lon, u.lat], [v.lon, v.lat]],
                },
                "properties": props,
            }
        )
    (d / SNAPSHOT_FILES["network"]).write_text(
        json.dumps({"type": "FeatureCollection", "features": feats}), encoding="utf-8"
    )
    with (d / SNAPSHOT_FILES["stations"]).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["station_id", "lon", "lat", "status", "open_month"])
        for s in snap.stations:
            w.writerow([s.station_id, repr(s.location.lon), repr(s.location.lat), s.status, s.open_month or ""])
    with (d / SNAPSHOT_FILES["demand"]).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["station_id", "month", "trips"])
        for s in snap.stations:
            for m in sorted(s.observed_demand):
                w.writerow([s.station_id, m, repr(s.observed_demand[m])])
    with (d / SNAPSHOT_FILES["entrances"]).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["entrance_id", "station_id", "lon", "lat"])
        for e in snap.entrances:
            w.writerow([e.entrance_id, e.station_id, repr(e.location.lon), repr(e.location.lat)])
    with (d / SNAPSHOT_FILES["schedules"]).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["station_id", "arrival_min"])
        for sc in snap.schedules:
            for t in sc.arrivals:
                w.writerow([sc.station_id, repr(t)])
    zfeats = []
    for z in snap.zones:
        zfeats.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[p.lon, p.lat] for p in z.polygon]],
                },
                "properties": {
                    "zone_id": z.zone_id,
                    "pop_white": z.pop_white,
                    "pop_black": z.pop_black,
                    "pop_asian": z.pop_asian,
                    "pop_hispanic": z.pop_hispanic,
                    "median_income": z.median_income,
                    "pop_density": z.pop_density,
                },
            }
        )
    (d / SNAPSHOT_FILES["zones"]).write_text(
        json.dumps({"type": "FeatureCollection", "features": zfeats}), encoding="utf-8"
    )
    with (d / SNAPSHOT_FILES["pois"]).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["poi_id", "lon", "lat", "category"])
        for p in snap.pois:
            w.writerow([p.poi_id, repr(p.location.lon), repr(p.location.lat), p.category])
