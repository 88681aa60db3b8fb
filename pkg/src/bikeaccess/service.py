"""HTTP/JSON service for the planner UI: scoring, recommendations, and
ephemeral what-if scenarios over an immutable snapshot and a trained model.

The snapshot and model load once at startup; scenarios live in a size-capped
in-memory table guarded by a lock (single writer per scenario, many readers).
No randomness runs on the service path.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .accessibility import AccessParams, AccessScore, score_all, score_station
from .equity import equity_report, report_to_json
from .geodata import CitySnapshot, GeoPoint, Station, build_feature_vector, parse_month
from .placement import PlacementParams, candidate_sites, recommend, score_candidates
from .routing import BIKE, SnapError, snap as snap_to_node

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


def r6(x: float) -> float:
    """Round metrics to the same 6-decimal precision the CSV outputs use."""
    return float(f"{x:.6f}")


@dataclass
class Scenario:
    scenario_id: str
    month: str
    added: list[GeoPoint] = field(default_factory=list)
    removed_station_ids: list[str] = field(default_factory=list)
    cached_evaluation: dict | None = None


class ScenarioCreate(BaseModel):
    month: str


class CandidateEdit(BaseModel):
    add: list[list[float]] = []
    remove: list[list[float]] = []
    remove_station_ids: list[str] = []


class RecommendRequest(BaseModel):
    n: int
    month: str | None = None


def evaluate_whatif(
    scenario: Scenario,
    snap: CitySnapshot,
    demand_model,
    access_params: AccessParams = AccessParams(),
) -> dict:
    """Scores for added candidates plus equity before/after and Gini deltas.

    Unsnappable candidates produce per-candidate error entries; the evaluation
    continues. The after-set is base cold-start scores minus removals plus the
    scored additions.
    """
    base = score_all(snap, scenario.month, demand_model, access_params)
    removed = set(scenario.removed_station_ids)
    kept = [s for s in base if s.station_id not in removed]
    candidate_rows = []
    added_scores: list[AccessScore] = []
    extra_locations: dict[str, GeoPoint] = {}
    for i, loc in enumerate(scenario.added):
        cid = f"{scenario.scenario_id}_p{i:03d}"
        row = {"candidate_id": cid, "location": [loc.lon, loc.lat]}
        try:
            snap_to_node(loc, snap.network, BIKE)
            station = Station(station_id=cid, location=loc, status="candidate")
            station.static_features = build_feature_vector(station, snap)
            score = score_station(station, snap, scenario.month, demand_model, access_params)
        except (SnapError, ValueError) as exc:
            row.update({"ok": False, "error": str(exc)})
            candidate_rows.append(row)
            continue
        row.update(
            {
                "ok": True,
                "ptal": r6(score.ptal),
                "demand": r6(score.demand),
                "wptal": r6(score.wptal),
            }
        )
        candidate_rows.append(row)
        added_scores.append(score)
        extra_locations[cid] = loc
    before = equity_report(base, snap) if base else None
    after_scores = kept + added_scores
    after = equity_report(after_scores, snap, extra_locations) if after_scores else None

    def _variables(report):
        return report_to_json(report) if report else []

    def _gini(report, variable):
        if report is None:
            return None
        return report.by_variable[variable].gini

    deltas = {}
    for variable in ("ethnicity", "income"):
        gb, ga = _gini(before, variable), _gini(after, variable)
        deltas[variable] = None if gb is None or ga is None else r6(ga) - r6(gb)
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario_id": scenario.scenario_id,
        "month": scenario.month,
        "candidates": candidate_rows,
        "removed_station_ids": sorted(removed),
        "equity_before": _round_reports(_variables(before)),
        "equity_after": _round_reports(_variables(after)),
        "gini_deltas": deltas,
    }


def _round_reports(reports: list[dict]) -> list[dict]:
    out = []
    for rep in reports:
        out.append(
            {
                "variable": rep["variable"],
                "groups": [
                    {"label": g["label"], "w": g["w"], "mean_wptal": r6(g["mean_wptal"])}
                    for g in rep["groups"]
                ],
                "W": rep["W"],
                "mu": r6(rep["mu"]),
                "gini": None if rep["gini"] is None else r6(rep["gini"]),
            }
        )
    return out


def station_payload(snap: CitySnapshot, scores: list[AccessScore]) -> dict:
    by_id = {s.station_id: s for s in scores}
    rows = []
    for st in snap.stations:
        row = {
            "station_id": st.station_id,
            "location": [st.location.lon, st.location.lat],
            "status": st.status,
            "open_month": st.open_month,
            "ptal": None,
            "demand": None,
            "wptal": None,
            "n_entrances": None,
        }
        sc = by_id.get(st.station_id)
        if sc is not None:
            row.update(
                {
                    "ptal": r6(sc.ptal),
                    "demand": r6(sc.demand),
                    "wptal": r6(sc.wptal),
                    "n_entrances": sc.n_entrances,
                }
            )
        rows.append(row)
    wptals = sorted(sc.wptal for sc in scores)
    breaks = (
        [r6(float(q)) for q in np.percentile(wptals, [20, 40, 60, 80])] if wptals else []
    )
    return {"stations": rows, "wptal_breaks": breaks}


def create_app(
    snap: CitySnapshot,
    demand_model,
    access_params: AccessParams = AccessParams(),
    placement_params: PlacementParams = PlacementParams(),
    scenario_cap: int = 100,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="bikeaccess planner service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    state = {
        "scenarios": {},
        "next_id": 1,
        "score_cache": {},  # month -> list[AccessScore]
        "lock": threading.Lock(),
    }

    def scores_for(month: str) -> list[AccessScore]:
        with state["lock"]:
            cached = state["score_cache"].get(month)
        if cached is not None:
            return cached
        scores = score_all(snap, month, demand_model, access_params)
        with state["lock"]:
            state["score_cache"][month] = scores
        return scores

    def get_scenario(scenario_id: str) -> Scenario:
        with state["lock"]:
            sc = state["scenarios"].get(scenario_id)
        if sc is None:
            raise HTTPException(status_code=404, detail=f"unknown scenario {scenario_id}")
        return sc

    @app.get("/api/snapshot/summary")
    def snapshot_summary():
        return {
            "schema_version": SCHEMA_VERSION,
            "counts": {
                "stations": len(snap.stations),
                "entrances": len(snap.entrances),
                "schedules": len(snap.schedules),
                "zones": len(snap.zones),
                "pois": len(snap.pois),
                "nodes": len(snap.network.nodes),
                "edges": len(snap.network.edges),
            },
            "bbox": list(snap.bounding_box()),
        }

    @app.get("/api/stations")
    def stations(month: str):
        try:
            parse_month(month)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        payload = station_payload(snap, scores_for(month))
        return {"schema_version": SCHEMA_VERSION, "month": month, **payload}

    @app.get("/api/zones")
    def zones():
        return {
            "schema_version": SCHEMA_VERSION,
            "zones": [
                {
                    "zone_id": z.zone_id,
                    "polygon": [[p.lon, p.lat] for p in z.polygon],
                    "pop_white": z.pop_white,
                    "pop_black": z.pop_black,
                    "pop_asian": z.pop_asian,
                    "pop_hispanic": z.pop_hispanic,
                    "median_income": z.median_income,
                    "pop_density": z.pop_density,
                }
                for z in snap.zones
            ],
        }

    @app.post("/api/scenario")
    def create_scenario(req: ScenarioCreate):
        try:
            parse_month(req.month)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        with state["lock"]:
            if len(state["scenarios"]) >= scenario_cap:
                raise HTTPException(status_code=409, detail="scenario table full")
            sid = f"sc{state['next_id']:04d}"
            state["next_id"] += 1
            state["scenarios"][sid] = Scenario(scenario_id=sid, month=req.month)
        return {"schema_version": SCHEMA_VERSION, "scenario_id": sid, "month": req.month}

    @app.put("/api/scenario/{scenario_id}/candidates")
    def edit_candidates(scenario_id: str, edit: CandidateEdit):
        sc = get_scenario(scenario_id)
        with state["lock"]:
            for lon, lat in edit.add:
                sc.added.append(GeoPoint(lon, lat))
            for lon, lat in edit.remove:
                sc.added = [p for p in sc.added if not (p.lon == lon and p.lat == lat)]
            for sid in edit.remove_station_ids:
                if sid not in sc.removed_station_ids:
                    sc.removed_station_ids.append(sid)
            sc.cached_evaluation = None
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario_id": scenario_id,
            "month": sc.month,
            "added": [[p.lon, p.lat] for p in sc.added],
            "removed_station_ids": list(sc.removed_station_ids),
        }

    @app.get("/api/scenario/{scenario_id}/evaluate")
    def evaluate(scenario_id: str):
        sc = get_scenario(scenario_id)
        with state["lock"]:
            cached = sc.cached_evaluation
        if cached is not None:
            return cached
        payload = evaluate_whatif(sc, snap, demand_model, access_params)
        with state["lock"]:
            sc.cached_evaluation = payload
        return payload

    @app.post("/api/recommend")
    def recommend_endpoint(req: RecommendRequest):
        month = req.month
        if month is None:
            raise HTTPException(status_code=422, detail="month is required")
        try:
            parse_month(month)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        scored = score_candidates(
            candidate_sites(snap, placement_params), snap, month, demand_model, access_params
        )
        chosen = recommend(scored, req.n, placement_params)
        return {
            "schema_version": SCHEMA_VERSION,
            "month": month,
            "recommendations": [
                {
                    "rank": i + 1,
                    "candidate_id": c.candidate_id,
                    "lon": c.location.lon,
                    "lat": c.location.lat,
                    "demand": r6(c.demand),
                    "ptal": r6(c.ptal),
                    "wptal": r6(c.wptal),
                }
                for i, c in enumerate(chosen)
            ],
        }

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
