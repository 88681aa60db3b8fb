"""Walk through the accessibility metrics on a four-node toy city.

Shows how bike travel time, scheduled headway, and the reliability buffer
combine into per-subway-station EDF values, how PTAL aggregates them, and how
predicted demand turns PTAL into wPTAL.
"""

import math

from bikeaccess.accessibility import AccessParams, edf, ptal, score_station, wptal
from bikeaccess.demand import TableDemand
from bikeaccess.geodata import (
    GeoPoint,
    RoadEdge,
    RoadNetwork,
    ServiceSchedule,
    Station,
    SubwayEntrance,
    Zone,
    build_city_snapshot,
)

DEG = 1.0 / (6_371_000.0 * math.pi / 180.0)  # one meter in degrees at the equator

# a straight residential street with nodes every 150 m
nodes = {i: GeoPoint(i * 150 * DEG, 0.0) for i in range(4)}
edges = [RoadEdge(i, i + 1, 150.0, "residential") for i in range(3)]
network = RoadNetwork(nodes, edges)

station = Station("dock", GeoPoint(0, 0), "cold_start", open_month="2024-06")
entrances = [
    SubwayEntrance("east_door", "subA", GeoPoint(150 * DEG, 0)),
    SubwayEntrance("west_door", "subB", GeoPoint(450 * DEG, 0)),
]
schedules = [
    ServiceSchedule("subA", [450.0 + 10 * i for i in range(12)]),  # every 10 min
    ServiceSchedule("subB", [450.0 + 20 * i for i in range(6)]),  # every 20 min
]
zone = Zone(
    "downtown",
    [GeoPoint(-0.01, -0.01), GeoPoint(0.02, -0.01), GeoPoint(0.02, 0.01),
     GeoPoint(-0.01, 0.01), GeoPoint(-0.01, -0.01)],
    pop_white=600, pop_black=250, pop_asian=100, pop_hispanic=50,
    median_income=52_000, pop_density=9_000,
)
snap = build_city_snapshot(network, [station], entrances, schedules, [zone], [])

params = AccessParams()
print("AM peak window:", params.window_start_min, "to", params.window_end_min, "minutes")

print("\nEDF pieces for one subway station:")
for t_bike, n_trains in [(150 / 280, 12), (450 / 280, 6)]:
    headway = params.window_minutes / n_trains
    value = edf(t_bike, n_trains, params)
    print(
        f"  bike {t_bike:5.2f} min + wait {0.5 * headway:5.2f} + buffer 0.75"
        f" -> EDF = 30/denominator = {value:.4f}"
    )

print("\nPTAL takes the best EDF in full and the rest at half weight:")
values = [edf(150 / 280, 12, params), edf(450 / 280, 6, params)]
print(f"  ptal({[round(v, 4) for v in values]}) = {ptal(values, params):.4f}")

demand = TableDemand({"dock": 120.0})
score = score_station(snap.station("dock"), snap, "2024-06", demand, params)
print("\nFull pipeline for the dock at 120 predicted trips/month:")
print(f"  reachable entrances: {score.n_entrances}")
print(f"  per-subway EDFs:     {[(j, round(v, 4)) for j, v in score.edfs]}")
print(f"  PTAL:                {score.ptal:.4f}")
print(f"  wPTAL = PTAL*demand: {wptal(score.ptal, 120.0):.4f}")
