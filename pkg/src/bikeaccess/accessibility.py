"""Station accessibility scoring: EDF per subway station, PTAL, and wPTAL.

EDF combines bike travel time, half the scheduled headway, and a fixed
reliability buffer; PTAL takes the best subway station at full weight and
the rest at half; wPTAL scales PTAL by predicted monthly demand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .geodata import CitySnapshot, Station
from .routing import reachable_entrances

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AccessParams:
    window_start_min: float = 450.0  # 7:30
    window_end_min: float = 570.0  # 9:30
    reliability_buffer_min: float = 0.75
    edf_numerator: float = 30.0
    secondary_weight: float = 0.5
    entrance_radius_m: float = 500.0

    def __post_init__(self):
        if self.window_end_min <= self.window_start_min:
            raise ValueError("window_end_min must exceed window_start_min")
        for name in ("reliability_buffer_min", "edf_numerator", "secondary_weight", "entrance_radius_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def window_minutes(self) -> float:
        return self.window_end_min - self.window_start_min


@dataclass
class AccessScore:
    station_id: str
    month: str
    edfs: list[tuple[str, float]] = field(default_factory=list)  # (subway station, EDF)
    ptal: float = 0.0
    demand: float = 0.0
    wptal: float = 0.0
    n_entrances: int = 0  # reachable physical entrances within the radius


def edf(t_bike_min: float, n_trains: int, params: AccessParams = AccessParams()) -> float:
    """Equivalent doorstep frequency for one subway station.

    Zero scheduled trains means no service and maps to 0 rather than an error.
    """
    if t_bike_min < 0:
        raise ValueError(f"negative bike time {t_bike_min}")
    if n_trains <= 0:
        return 0.0
    headway = params.window_minutes / n_trains
    return params.edf_numerator / (t_bike_min + 0.5 * headway + params.reliability_buffer_min)


def ptal(edfs: list[float], params: AccessParams = AccessParams()) -> float:
    """Best EDF at full weight plus the remainder at the secondary weight."""
    if not edfs:
        return 0.0
    if any(e < 0 for e in edfs):
        raise ValueError("EDF values must be non-negative")
    best = max(edfs)
    return best + params.secondary_weight * (sum(edfs) - best)


def wptal(ptal_value: float, demand: float) -> float:
    if ptal_value < 0 or demand < 0:
        raise ValueError("ptal and demand must be non-negative")
    return ptal_value * demand


def score_station(
    station: Station,
    snap: CitySnapshot,
    month: str,
    demand_model,
    params: AccessParams = AccessParams(),
) -> AccessScore:
    """Full pipeline for one station: reachable entrances -> per-subway-station
    EDF (minimum bike time across that station's entrances) -> PTAL -> wPTAL."""
    reach = reachable_entrances(station, snap, radius_m=params.entrance_radius_m)
    best_t: dict[str, float] = {}
    for ent, t in reach:
        cur = best_t.get(ent.station_id)
        if cur is None or t < cur:
            best_t[ent.station_id] = t
    edfs = []
    for subway_id in sorted(best_t):
        n = snap.arrivals_between(subway_id, params.window_start_min, params.window_end_min)
        edfs.append((subway_id, edf(best_t[subway_id], n, params)))
    ptal_value = ptal([e for _, e in edfs], params)
    demand = float(demand_model.predict(station, month))
    if demand < 0:
        raise ValueError(f"demand model returned negative demand {demand} for {station.station_id}")
    return AccessScore(
        station_id=station.station_id,
        month=month,
        edfs=edfs,
        ptal=ptal_value,
        demand=demand,
        wptal=wptal(ptal_value, demand),
        n_entrances=len(reach),
    )


def score_all(
    snap: CitySnapshot,
    month: str,
    demand_model,
    params: AccessParams = AccessParams(),
) -> list[AccessScore]:
    """One AccessScore per cold-start/candidate station, sorted by station_id.

    A per-station failure is logged and skipped; the batch never aborts.
    """
    out = []
    for station in snap.stations:
        if station.status not in ("cold_start", "candidate"):
            continue
        try:
            out.append(score_station(station, snap, month, demand_model, params))
        except Exception as exc:  # noqa: BLE001 - batch continues by contract
            log.warning("skipping station %s: %s", station.station_id, exc)
    return sorted(out, key=lambda s: s.station_id)
