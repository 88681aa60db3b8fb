"""Shared fixtures: small deterministic cities and trained models.

Session-scoped so the expensive pieces (training, candidate scoring) run once.
"""

from __future__ import annotations

import pytest

from bikeaccess.accessibility import score_all
from bikeaccess.demand import (
    DemandPredictor,
    FeatureEmbeddings,
    TrainConfig,
    load_model,
    save_model,
    train,
)
from bikeaccess.geodata import Station, build_city_snapshot, save_city_snapshot, snapshot_from_dir
from bikeaccess.placement import PlacementParams, candidate_sites, recommend, score_candidates
from bikeaccess.synth import make_divided_city, make_linear_demand_city


def city_with_cold_starts(n_stations=20, n_cold=2, seed=3):
    """Linear-demand city with the first n_cold stations flipped to cold_start
    (rebuilt from scratch; the generator's snapshot is never mutated)."""
    snap, months = make_linear_demand_city(n_stations=n_stations, seed=seed)
    stations = []
    for i, s in enumerate(snap.stations):
        if i < n_cold:
            stations.append(
                Station(
                    station_id=s.station_id,
                    location=s.location,
                    status="cold_start",
                    open_month="2025-01",
                )
            )
        else:
            stations.append(
                Station(
                    station_id=s.station_id,
                    location=s.location,
                    status=s.status,
                    open_month=s.open_month,
                    observed_demand=dict(s.observed_demand),
                )
            )
    rebuilt = build_city_snapshot(
        snap.network, stations, snap.entrances, snap.schedules, snap.zones, snap.pois
    )
    return rebuilt, months


@pytest.fixture(scope="session")
def mini_city():
    return city_with_cold_starts()


@pytest.fixture(scope="session")
def mini_model(mini_city):
    snap, months = mini_city
    emb = FeatureEmbeddings(snap)
    params, history = train(TrainConfig(epochs=15, hidden_dim=8, seed=1), snap, emb, months)
    return DemandPredictor(params, snap, emb)


@pytest.fixture(scope="session")
def mini_city_dir(mini_city, tmp_path_factory):
    snap, _ = mini_city
    d = tmp_path_factory.mktemp("mini_city")
    save_city_snapshot(snap, d)
    return d


@pytest.fixture(scope="session")
def mini_config(mini_city_dir, mini_model, tmp_path_factory):
    """INI config + saved model file for CLI runs over the mini city."""
    d = tmp_path_factory.mktemp("cli")
    model_path = d / "model.npz"
    save_model(mini_model.params, model_path)
    cfg_path = d / "city.ini"
    cfg_path.write_text(
        f"""[paths]
network = {mini_city_dir}/network.geojson
stations = {mini_city_dir}/stations.csv
demand = {mini_city_dir}/demand.csv
entrances = {mini_city_dir}/entrances.csv
schedules = {mini_city_dir}/schedules.csv
zones = {mini_city_dir}/zones.geojson
pois = {mini_city_dir}/pois.csv
model = {model_path}

[train]
epochs = 5
hidden = 8
seed = 1
"""
    )
    return {"config": cfg_path, "model": model_path, "dir": d}


@pytest.fixture(scope="session")
def served(mini_city_dir, mini_config):
    """Service app over the file-loaded snapshot and the saved model, so its
    numbers line up exactly with CLI runs on the same files."""
    from fastapi.testclient import TestClient

    from bikeaccess.service import create_app

    snap = snapshot_from_dir(mini_city_dir)
    params = load_model(mini_config["model"])
    model = DemandPredictor(params, snap, FeatureEmbeddings(snap))
    app = create_app(snap, model)
    return {"snap": snap, "model": model, "app": app, "client": TestClient(app)}


@pytest.fixture(scope="session")
def divided_bundle():
    """The 20x20 divided city with a trained model, base scores, and the
    greedy recommendations — the equity-curve scenario inputs."""
    snap, months, eval_month = make_divided_city(seed=0)
    emb = FeatureEmbeddings(snap)
    params, history = train(
        TrainConfig(epochs=200, hidden_dim=32, seed=7), snap, emb, months
    )
    model = DemandPredictor(params, snap, emb)
    base = score_all(snap, eval_month, model)
    pparams = PlacementParams()
    sites = candidate_sites(snap, pparams)
    scored = score_candidates(sites, snap, eval_month, model)
    recs = recommend(scored, 8, pparams)
    return {
        "snap": snap,
        "months": months,
        "eval_month": eval_month,
        "embeddings": emb,
        "params": params,
        "history": history,
        "model": model,
        "base_scores": base,
        "sites": sites,
        "scored": scored,
        "recommendations": recs,
        "placement_params": pparams,
    }
