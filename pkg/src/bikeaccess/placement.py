"""Candidate generation, scoring, greedy selection under spacing constraints,
and incremental equity curves for new station placement."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .accessibility import AccessParams, AccessScore, score_station
from .equity import EquityReport, equity_report, predominant_ethnicity
from .geodata import CitySnapshot, GeoPoint, Station, build_feature_vector, haversine_m, zone_of

log = logging.getLogger(__name__)

WALKABLE_CLASSES = frozenset({"residential", "living_street", "tertiary", "secondary"})


@dataclass(frozen=True)
class PlacementParams:
    min_spacing_m: float = 305.0
    walkable_classes: frozenset[str] = WALKABLE_CLASSES
    equity_mode: str = "any"  # "any": low income OR minority-majority; "all": both
    top_n: int = 20

    def __post_init__(self):
        if self.min_spacing_m <= 0:
            raise ValueError("min_spacing_m must be positive")
        if self.equity_mode not in ("any", "all"):
            raise ValueError("equity_mode must be 'any' or 'all'")


@dataclass
class ScoredCandidate:
    candidate_id: str
    node_id: int
    location: GeoPoint
    demand: float = 0.0
    ptal: float = 0.0
    wptal: float = 0.0


def _zone_qualifies(zone, median_income_citywide: float, mode: str) -> bool:
    low_income = zone.median_income < median_income_citywide
    minority = predominant_ethnicity(zone) != "White"
    return (low_income or minority) if mode == "any" else (low_income and minority)


def candidate_sites(snap: CitySnapshot, params: PlacementParams = PlacementParams()) -> list[ScoredCandidate]:
    """Unscored candidate locations: network nodes on walkable-class edges,
    inside equity-qualifying zones, and at least min_spacing_m from every
    existing/cold-start station. Sorted by node id."""
    citywide = float(np.median([z.median_income for z in snap.zones])) if snap.zones else 0.0
    placed = [s.location for s in snap.stations if s.status in ("existing", "cold_start")]
    out = []
    for node_id in snap.network.nodes_for_classes(params.walkable_classes):
        loc = snap.network.nodes[node_id]
        zone = zone_of(loc, snap.zones)
        if zone is None or not _zone_qualifies(zone, citywide, params.equity_mode):
            continue
        if any(haversine_m(loc, p) < params.min_spacing_m for p in placed):
            continue
        out.append(
            ScoredCandidate(candidate_id=f"cand_{node_id:06d}", node_id=node_id, location=loc)
        )
    return out


def candidate_station(candidate: ScoredCandidate, snap: CitySnapshot) -> Station:
    """Materialize a candidate as an on-the-fly station with built features."""
    station = Station(
        station_id=candidate.candidate_id, location=candidate.location, status="candidate"
    )
    station.static_features = build_feature_vector(station, snap)
    return station


def score_candidates(
    candidates: list[ScoredCandidate],
    snap: CitySnapshot,
    month: str,
    demand_model,
    access_params: AccessParams = AccessParams(),
) -> list[ScoredCandidate]:
    """Score each candidate through the same pipeline as a real cold-start
    station; per-candidate failures are skipped with a warning."""
    out = []
    for cand in candidates:
        try:
            station = candidate_station(cand, snap)
            score = score_station(station, snap, month, demand_model, access_params)
        except Exception as exc:  # noqa: BLE001 - batch continues by contract
            log.warning("skipping candidate %s: %s", cand.candidate_id, exc)
            continue
        out.append(
            ScoredCandidate(
                candidate_id=cand.candidate_id,
                node_id=cand.node_id,
                location=cand.location,
                demand=score.demand,
                ptal=score.ptal,
                wptal=score.wptal,
            )
        )
    return out


def recommend(
    scored: list[ScoredCandidate],
    n: int,
    params: PlacementParams = PlacementParams(),
) -> list[ScoredCandidate]:
    """Greedy selection: repeatedly take the highest-wPTAL candidate at least
    min_spacing_m (haversine) from everything already selected; ties go to the
    smaller candidate_id. Output order is selection order."""
    remaining = sorted(scored, key=lambda c: (-c.wptal, c.candidate_id))
    selected: list[ScoredCandidate] = []
    for cand in remaining:
        if len(selected) >= n:
            break
        if all(haversine_m(cand.location, s.location) >= params.min_spacing_m for s in selected):
            selected.append(cand)
    return selected


@dataclass
class CurvePoint:
    increment: int  # requested number of added recommendations
    used: int  # how many were actually available
    report: EquityReport


def equity_curve(
    base_scores: list[AccessScore],
    recommendations: list[ScoredCandidate],
    increments: list[int],
    snap: CitySnapshot,
) -> list[CurvePoint]:
    """Equity report over base scores plus the first n recommendations, for each
    increment n. Each point is recomputed from scratch over the union set."""
    if any(b < a for a, b in zip(increments, increments[1:])):
        raise ValueError("increments must be ascending")
    points = []
    for n in increments:
        used = min(n, len(recommendations))
        if used < n:
            log.warning("increment %d exceeds available recommendations; using %d", n, used)
        chosen = recommendations[:used]
        scores = list(base_scores) + [
            AccessScore(
                station_id=c.candidate_id,
                month=base_scores[0].month if base_scores else "",
                ptal=c.ptal,
                demand=c.demand,
                wptal=c.wptal,
            )
            for c in chosen
        ]
        extra = {c.candidate_id: c.location for c in chosen}
        points.append(CurvePoint(increment=n, used=used, report=equity_report(scores, snap, extra)))
    return points
