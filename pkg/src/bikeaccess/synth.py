"""Synthetic cities for demos and verification.

Two generators: a flat grid city where demand is a noisy linear function of
one built-environment feature (for training checks), and a divided city with
a transit-rich high-income east half and a transit-poor low-income west half
(for equity-curve scenarios).
"""

from __future__ import annotations

import numpy as np

from .geodata import (
    CitySnapshot,
    GeoPoint,
    Poi,
    RoadEdge,
    RoadNetwork,
    ServiceSchedule,
    Station,
    SubwayEntrance,
    Zone,
    build_city_snapshot,
)

# one degree of longitude/latitude at the equator, meters
DEG_M = 111_194.92664455873


def grid_network(nx: int, ny: int, spacing_m: float, road_class: str = "residential") -> RoadNetwork:
    """nx*ny lattice of nodes near (0, 0) joined by horizontal/vertical edges."""
    step = spacing_m / DEG_M
    nodes: dict[int, GeoPoint] = {}
    for j in range(ny):
        for i in range(nx):
            nodes[j * nx + i] = GeoPoint(round(i * step, 7), round(j * step, 7))
    edges = []
    for j in range(ny):
        for i in range(nx):
            u = j * nx + i
            for v in ((u + 1) if i + 1 < nx else None, (u + nx) if j + 1 < ny else None):
                if v is not None:
                    from .geodata import haversine_m

                    edges.append(
                        RoadEdge(u=u, v=v, length_m=haversine_m(nodes[u], nodes[v]), road_class=road_class)
                    )
    return RoadNetwork(nodes, edges)


def _rect_zone(zone_id: str, x0: float, y0: float, x1: float, y1: float, **demo) -> Zone:
    ring = [
        GeoPoint(x0, y0),
        GeoPoint(x1, y0),
        GeoPoint(x1, y1),
        GeoPoint(x0, y1),
        GeoPoint(x0, y0),
    ]
    return Zone(zone_id=zone_id, polygon=ring, **demo)


def _months(year: int) -> list[str]:
    return [f"{year}-{m:02d}" for m in range(1, 13)]


def make_linear_demand_city(
    n_stations: int = 60,
    seed: int = 0,
    noise_sigma: float = 0.1,
    slope: float = 3.0,
) -> tuple[CitySnapshot, list[str]]:
    """Grid city whose monthly trips are slope * (commercial POI count / 10)
    plus Gaussian noise, clamped at zero. Returns (snapshot, labeled months).
    """
    rng = np.random.default_rng(seed)
    nx = ny = 10
    spacing = 250.0
    net = grid_network(nx, ny, spacing)
    step = spacing / DEG_M
    # quadrant zones with boundaries at half-step offsets (no node in two zones)
    demo_rows = [
        ("z0", 0, 0, 5, 5, 200.0, 900.0, 50.0, 50.0, 40_000.0, 4_000.0),
        ("z1", 5, 0, 10, 5, 700.0, 200.0, 50.0, 50.0, 55_000.0, 6_000.0),
        ("z2", 0, 5, 5, 10, 100.0, 100.0, 800.0, 100.0, 70_000.0, 9_000.0),
        ("z3", 5, 5, 10, 10, 850.0, 50.0, 50.0, 50.0, 90_000.0, 12_000.0),
    ]
    zones = [
        _rect_zone(
            zid,
            (c0 - 0.5) * step,
            (r0 - 0.5) * step,
            (c1 - 0.5) * step,
            (r1 - 0.5) * step,
            pop_white=w,
            pop_black=b,
            pop_asian=a,
            pop_hispanic=h,
            median_income=inc,
            pop_density=dens,
        )
        for zid, c0, r0, c1, r1, w, b, a, h, inc, dens in demo_rows
    ]
    node_ids = rng.choice(nx * ny, size=n_stations, replace=False)
    months = _months(2024)
    stations = []
    pois = []
    for idx, node in enumerate(sorted(int(n) for n in node_ids)):
        sid = f"s{idx:03d}"
        loc = net.nodes[node]
        poi_count = int(rng.integers(0, 11))
        for p in range(poi_count):
            pois.append(Poi(poi_id=f"{sid}_poi{p}", location=loc, category="commercial"))
        demand = {
            m: float(max(0.0, slope * (poi_count / 10.0) + rng.normal(0.0, noise_sigma)))
            for m in months
        }
        stations.append(
            Station(
                station_id=sid,
                location=loc,
                status="existing",
                open_month="2023-01",
                observed_demand=demand,
            )
        )
    # a little subway so accessibility is non-trivial: four stations, 10-min headway
    entrances = []
    schedules = []
    for q, (i, j) in enumerate([(2, 2), (7, 2), (2, 7), (7, 7)]):
        node = j * nx + i
        entrances.append(
            SubwayEntrance(entrance_id=f"e{q}", station_id=f"sub{q}", location=net.nodes[node])
        )
        schedules.append(
            ServiceSchedule(station_id=f"sub{q}", arrivals=[450.0 + 10.0 * t for t in range(12)])
        )
    snap = build_city_snapshot(net, stations, entrances, schedules, zones, pois)
    return snap, months


def make_divided_city(seed: int = 0) -> tuple[CitySnapshot, list[str], str]:
    """20x20 grid split into a transit-poor low-income west half and a
    transit-rich high-income east half.

    Existing stations (with a year of demand history) cluster in the east;
    the base cold-start stations in the west sit far from the sparse west
    subway stops, so income equity starts badly and improves as candidates
    near those stops are recommended. Returns (snapshot, labeled months,
    evaluation month).
    """
    rng = np.random.default_rng(seed)
    nx = ny = 20
    spacing = 120.0
    net = grid_network(nx, ny, spacing)
    step = spacing / DEG_M

    def col_zone(zid, c0, c1, r0, r1, ethnic, income, density):
        # boundaries at half-step offsets so no grid node lies in two zones
        w, b, a, h = ethnic
        return _rect_zone(
            zid,
            (c0 - 0.5) * step,
            (r0 - 0.5) * step,
            (c1 - 0.5) * step,
            (r1 - 0.5) * step,
            pop_white=w,
            pop_black=b,
            pop_asian=a,
            pop_hispanic=h,
            median_income=income,
            pop_density=density,
        )

    # west: minority-majority and low income; east: White-majority and high
    # income, so the placement equity filter admits only western nodes
    zones = [
        col_zone("w00", 0, 5, 0, 10, (100, 800, 50, 50), 28_000.0, 9_000.0),
        col_zone("w01", 0, 5, 10, 20, (100, 50, 50, 800), 31_000.0, 8_500.0),
        col_zone("w10", 5, 10, 0, 10, (150, 700, 50, 100), 34_000.0, 8_000.0),
        col_zone("w11", 5, 10, 10, 20, (100, 100, 700, 100), 37_000.0, 7_500.0),
        col_zone("e00", 10, 15, 0, 10, (800, 100, 50, 50), 78_000.0, 11_000.0),
        col_zone("e01", 10, 15, 10, 20, (750, 50, 150, 50), 82_000.0, 11_500.0),
        col_zone("e10", 15, 20, 0, 10, (800, 50, 100, 50), 86_000.0, 12_000.0),
        col_zone("e11", 15, 20, 10, 20, (820, 60, 70, 50), 90_000.0, 12_500.0),
    ]

    def node(i: int, j: int) -> int:
        return j * nx + i

    # subway: dense/frequent in the east (5-min headway), sparse west (12-min)
    entrances = []
    schedules = []
    east_subs = [(12, 4), (12, 15), (17, 4), (17, 15)]
    west_subs = [(3, 4), (3, 15)]
    for q, (i, j) in enumerate(east_subs):
        entrances.append(
            SubwayEntrance(entrance_id=f"ee{q}", station_id=f"esub{q}", location=net.nodes[node(i, j)])
        )
        schedules.append(
            ServiceSchedule(station_id=f"esub{q}", arrivals=[450.0 + 5.0 * t for t in range(24)])
        )
    for q, (i, j) in enumerate(west_subs):
        entrances.append(
            SubwayEntrance(entrance_id=f"we{q}", station_id=f"wsub{q}", location=net.nodes[node(i, j)])
        )
        schedules.append(
            ServiceSchedule(station_id=f"wsub{q}", arrivals=[450.0 + 12.0 * t for t in range(10)])
        )

    months = _months(2024)
    eval_month = "2025-01"
    stations: list[Station] = []
    pois: list[Poi] = []

    def add_pois(sid: str, loc: GeoPoint, count: int):
        for p in range(count):
            pois.append(Poi(poi_id=f"{sid}_poi{p}", location=loc, category="commercial"))

    def add_existing(sid: str, i: int, j: int, poi_count: int):
        loc = net.nodes[node(i, j)]
        add_pois(sid, loc, poi_count)
        demand = {
            m: float(max(0.0, 3.0 * (poi_count / 10.0) + rng.normal(0.0, 0.05))) for m in months
        }
        stations.append(
            Station(sid, loc, "existing", open_month="2023-01", observed_demand=demand)
        )

    # east: 20 existing stations around the busy subway stops, POI-rich
    east_spots = [
        (11, 3), (13, 3), (11, 6), (13, 6), (16, 3), (18, 3), (16, 6), (18, 6),
        (11, 13), (13, 13), (11, 17), (13, 17), (16, 13), (18, 13), (16, 17), (18, 17),
        (14, 9), (17, 9), (11, 9), (19, 11),
    ]
    for idx, (i, j) in enumerate(east_spots):
        add_existing(f"e{idx:03d}", i, j, int(rng.integers(6, 11)))
    # west: 8 existing stations away from the subway stops, POI-moderate
    west_spots = [(0, 0), (8, 0), (0, 8), (8, 8), (0, 12), (8, 12), (0, 19), (8, 19)]
    for idx, (i, j) in enumerate(west_spots):
        add_existing(f"w{idx:03d}", i, j, int(rng.integers(3, 7)))

    def add_cold(sid: str, i: int, j: int, poi_count: int):
        loc = net.nodes[node(i, j)]
        add_pois(sid, loc, poi_count)
        stations.append(Station(sid, loc, "cold_start", open_month=eval_month))

    # base cold-start stations for the evaluation month: east near subways,
    # west out of reach of any subway entrance (> 500 m from all of them)
    for idx, (i, j) in enumerate([(12, 3), (12, 5), (17, 3), (12, 14), (12, 16), (17, 14)]):
        add_cold(f"ce{idx:02d}", i, j, int(rng.integers(6, 11)))
    for idx, (i, j) in enumerate([(7, 0), (9, 0), (0, 8), (0, 11), (7, 19), (9, 19)]):
        add_cold(f"cw{idx:02d}", i, j, int(rng.integers(2, 5)))

    # POI mass near the west subway stops so candidates there predict well
    for q, (i, j) in enumerate(west_subs):
        for di, dj in [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1)]:
            ii, jj = i + di, j + dj
            add_pois(f"wsubpoi{q}_{di}_{dj}", net.nodes[node(ii, jj)], 6)

    snap = build_city_snapshot(net, stations, entrances, schedules, zones, pois)
    return snap, months, eval_month
