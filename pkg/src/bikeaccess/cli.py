"""Batch CLI over the pipeline plus the `serve` entry point.

Every subcommand reads one INI config file (sections [paths], [access],
[placement], [train], [serve]) and emits deterministic CSV/JSON; command-line
flags override config values.
"""

from __future__ import annotations

import configparser
import csv
import json
import logging
import sys
from pathlib import Path

import click

from .accessibility import AccessParams, AccessScore, score_all
from .demand import (
    DemandPredictor,
    FeatureEmbeddings,
    FileEmbeddings,
    TrainConfig,
    load_model,
    save_model,
    train,
)
from .equity import equity_report, report_to_json
from .geodata import GeoPoint, load_city_snapshot, parse_month, save_city_snapshot
from .placement import (
    PlacementParams,
    ScoredCandidate,
    candidate_sites,
    equity_curve,
    recommend as greedy_recommend,
    score_candidates,
)

log = logging.getLogger(__name__)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def read_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        if not Path(path).exists():
            raise click.ClickException(f"config file not found: {path}")
        cfg.read(path, encoding="utf-8")
    return cfg


def load_snapshot_from_config(cfg: configparser.ConfigParser):
    paths = cfg["paths"] if cfg.has_section("paths") else {}
    required = ("network", "stations", "entrances", "schedules", "zones", "pois")
    missing = [k for k in required if not paths.get(k)]
    if missing:
        raise click.ClickException(f"config [paths] missing keys: {', '.join(missing)}")
    return load_city_snapshot(
        network=paths["network"],
        stations=paths["stations"],
        entrances=paths["entrances"],
        schedules=paths["schedules"],
        zones=paths["zones"],
        pois=paths["pois"],
        demand=paths.get("demand") or None,
    )


def embeddings_from_config(cfg, snap, override: str | None):
    path = override if override is not None else (
        cfg.get("paths", "embeddings", fallback="") or None
    )
    if path:
        return FileEmbeddings.load(path)
    return FeatureEmbeddings(snap)


def access_params_from_config(cfg) -> AccessParams:
    sec = cfg["access"] if cfg.has_section("access") else {}
    return AccessParams(
        window_start_min=float(sec.get("window_start", 450)),
        window_end_min=float(sec.get("window_end", 570)),
        reliability_buffer_min=float(sec.get("reliability_buffer", 0.75)),
        edf_numerator=float(sec.get("edf_numerator", 30)),
        secondary_weight=float(sec.get("secondary_weight", 0.5)),
        entrance_radius_m=float(sec.get("entrance_radius", 500)),
    )


def placement_params_from_config(cfg, min_spacing=None, top_n=None) -> PlacementParams:
    sec = cfg["placement"] if cfg.has_section("placement") else {}
    return PlacementParams(
        min_spacing_m=float(min_spacing if min_spacing is not None else sec.get("min_spacing_m", 305)),
        equity_mode=sec.get("equity_filter", "any"),
        top_n=int(top_n if top_n is not None else sec.get("top_n", 20)),
    )


def _model_path(cfg, override):
    path = override or (cfg.get("paths", "model", fallback="") or None)
    if not path:
        raise click.ClickException("no model path: set --model or [paths] model")
    return path


def _predictor(cfg, snap, model_path, embeddings_override):
    params = load_model(model_path)
    emb = embeddings_from_config(cfg, snap, embeddings_override)
    return DemandPredictor(params, snap, emb)


def _write_rows(out: str, header: list[str], rows: list[list[str]]):
    with open(out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _write_json(out: str, payload) -> None:
    Path(out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


@click.group()
@click.option("--config", "config_path", default=None, help="INI config file.")
@click.option("-v", "--verbose", is_flag=True, help="Log at INFO level.")
@click.pass_context
def main(ctx, config_path, verbose):
    """Bike-to-subway accessibility, demand, equity, and placement pipeline."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)
    ctx.obj = read_config(config_path)


@main.command()
@click.option("--out", required=True, help="Directory for the normalized snapshot.")
@click.pass_obj
def ingest(cfg, out):
    """Validate all inputs and emit a normalized snapshot."""
    snap = load_snapshot_from_config(cfg)
    save_city_snapshot(snap, out)
    click.echo(
        f"snapshot: {len(snap.stations)} stations, {len(snap.entrances)} entrances, "
        f"{len(snap.zones)} zones, {len(snap.network.nodes)} nodes, "
        f"{len(snap.network.edges)} edges -> {out}"
    )


@main.command()
@click.option("--month", required=True)
@click.option("--out", required=True)
@click.pass_obj
def ptal(cfg, month, out):
    """PTAL per cold-start/candidate station (no demand weighting)."""
    parse_month(month)
    snap = load_snapshot_from_config(cfg)
    params = access_params_from_config(cfg)

    class _Zero:
        def predict(self, station, m):
            return 0.0

    scores = score_all(snap, month, _Zero(), params)
    _write_rows(
        out,
        ["station_id", "month", "ptal", "n_entrances"],
        [[s.station_id, s.month, _fmt(s.ptal), str(s.n_entrances)] for s in scores],
    )
    click.echo(f"{len(scores)} stations -> {out}")


@main.command("demand-train")
@click.option("--out", "model_out", default=None, help="Model file (.npz).")
@click.option("--epochs", type=int, default=None)
@click.option("--lr", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--hidden", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--months", default=None, help="Comma-separated YYYY-MM list (default: all labeled).")
@click.option("--history", "history_out", default=None, help="Loss history CSV.")
@click.option("--embeddings", "embeddings_override", default=None)
@click.pass_obj
def demand_train(cfg, model_out, epochs, lr, k, hidden, seed, months, history_out, embeddings_override):
    """Train the demand model on existing stations' observed demand."""
    snap = load_snapshot_from_config(cfg)
    sec = cfg["train"] if cfg.has_section("train") else {}
    config = TrainConfig(
        epochs=int(epochs if epochs is not None else sec.get("epochs", 200)),
        learning_rate=float(lr if lr is not None else sec.get("learning_rate", 0.002)),
        k=int(k if k is not None else sec.get("k", 5)),
        hidden_dim=int(hidden if hidden is not None else sec.get("hidden", 64)),
        seed=int(seed if seed is not None else sec.get("seed", 0)),
    )
    if months:
        labeled = [parse_month(m.strip()) for m in months.split(",") if m.strip()]
    else:
        labeled = sorted(
            {m for s in snap.stations if s.status == "existing" for m in s.observed_demand}
        )
    emb = embeddings_from_config(cfg, snap, embeddings_override)
    model_params, history = train(config, snap, emb, labeled)
    out = _model_path(cfg, model_out)
    save_model(model_params, out)
    if history_out:
        _write_rows(
            history_out,
            ["epoch", "mse"],
            [[str(i), f"{v!r}"] for i, v in enumerate(history)],
        )
    click.echo(
        f"trained on {len(labeled)} months: initial MSE {history[0]:.6f}, "
        f"final MSE {history[-1]:.6f} -> {out}"
    )


@main.command("demand-predict")
@click.option("--month", required=True)
@click.option("--model", "model_path", default=None)
@click.option("--out", required=True)
@click.option("--embeddings", "embeddings_override", default=None)
@click.pass_obj
def demand_predict(cfg, month, model_path, out, embeddings_override):
    """Predicted trips/month per cold-start/candidate station."""
    parse_month(month)
    snap = load_snapshot_from_config(cfg)
    model = _predictor(cfg, snap, _model_path(cfg, model_path), embeddings_override)
    rows = []
    for station in snap.stations:
        if station.status not in ("cold_start", "candidate"):
            continue
        rows.append([station.station_id, month, _fmt(model.predict(station, month))])
    _write_rows(out, ["station_id", "month", "demand"], rows)
    click.echo(f"{len(rows)} stations -> {out}")


@main.command()
@click.option("--month", required=True)
@click.option("--model", "model_path", default=None)
@click.option("--out", required=True)
@click.option("--embeddings", "embeddings_override", default=None)
@click.pass_obj
def wptal(cfg, month, model_path, out, embeddings_override):
    """Full accessibility scores (EDF-aggregated PTAL x predicted demand)."""
    parse_month(month)
    snap = load_snapshot_from_config(cfg)
    model = _predictor(cfg, snap, _model_path(cfg, model_path), embeddings_override)
    scores = score_all(snap, month, model, access_params_from_config(cfg))
    _write_rows(
        out,
        ["station_id", "month", "ptal", "demand", "wptal", "n_entrances"],
        [
            [s.station_id, s.month, _fmt(s.ptal), _fmt(s.demand), _fmt(s.wptal), str(s.n_entrances)]
            for s in scores
        ],
    )
    click.echo(f"{len(scores)} stations -> {out}")


def read_plan(path: str) -> tuple[list[AccessScore], dict[str, GeoPoint]]:
    """recommendations.csv rows as scores + locations (for equity --plan)."""
    scores = []
    locations = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            cid = row["candidate_id"]
            scores.append(
                AccessScore(
                    station_id=cid,
                    month="",
                    ptal=float(row["ptal"]),
                    demand=float(row["demand"]),
                    wptal=float(row["wptal"]),
                )
            )
            locations[cid] = GeoPoint(float(row["lon"]), float(row["lat"]))
    return scores, locations


@main.command()
@click.option("--month", required=True)
@click.option("--model", "model_path", default=None)
@click.option("--plan", "plan_path", default=None, help="recommendations.csv to include.")
@click.option("--out", required=True)
@click.option("--embeddings", "embeddings_override", default=None)
@click.pass_obj
def equity(cfg, month, model_path, plan_path, out, embeddings_override):
    """Equity report (group stats + Gini) over scored stations."""
    parse_month(month)
    snap = load_snapshot_from_config(cfg)
    model = _predictor(cfg, snap, _model_path(cfg, model_path), embeddings_override)
    scores = score_all(snap, month, model, access_params_from_config(cfg))
    extra = {}
    if plan_path:
        plan_scores, extra = read_plan(plan_path)
        scores = scores + plan_scores
    report = equity_report(scores, snap, extra)
    _write_json(out, report_to_json(report))
    for variable, rep in report.by_variable.items():
        click.echo(f"{variable}: gini={rep.gini if rep.gini is not None else 'undefined'}")


def _recommendation_rows(chosen: list[ScoredCandidate]) -> list[list[str]]:
    return [
        [
            str(i + 1),
            c.candidate_id,
            repr(c.location.lon),
            repr(c.location.lat),
            _fmt(c.demand),
            _fmt(c.ptal),
            _fmt(c.wptal),
        ]
        for i, c in enumerate(chosen)
    ]


@main.command()
@click.option("--month", required=True)
@click.option("--model", "model_path", default=None)
@click.option("--n", type=int, default=None, help="Number of stations to recommend.")
@click.option("--min-spacing", type=float, default=None)
@click.option("--out", required=True)
@click.option("--embeddings", "embeddings_override", default=None)
@click.pass_obj
def recommend(cfg, month, model_path, n, min_spacing, out, embeddings_override):
    """Greedy wPTAL-ranked placement under the spacing constraint."""
    parse_month(month)
    snap = load_snapshot_from_config(cfg)
    model = _predictor(cfg, snap, _model_path(cfg, model_path), embeddings_override)
    pparams = placement_params_from_config(cfg, min_spacing=min_spacing, top_n=n)
    scored = score_candidates(
        candidate_sites(snap, pparams), snap, month, model, access_params_from_config(cfg)
    )
    chosen = greedy_recommend(scored, pparams.top_n, pparams)
    _write_rows(
        out,
        ["rank", "candidate_id", "lon", "lat", "demand", "ptal", "wptal"],
        _recommendation_rows(chosen),
    )
    click.echo(f"{len(chosen)} recommendations -> {out}")


@main.command()
@click.option("--month", required=True)
@click.option("--model", "model_path", default=None)
@click.option("--n", type=int, default=None)
@click.option("--increments", required=True, help="Comma-separated counts, e.g. 0,4,8.")
@click.option("--out", required=True)
@click.option("--embeddings", "embeddings_override", default=None)
@click.pass_obj
def curve(cfg, month, model_path, n, increments, out, embeddings_override):
    """Equity Gini after incrementally adding recommended stations."""
    parse_month(month)
    snap = load_snapshot_from_config(cfg)
    model = _predictor(cfg, snap, _model_path(cfg, model_path), embeddings_override)
    pparams = placement_params_from_config(cfg, top_n=n)
    aparams = access_params_from_config(cfg)
    base = score_all(snap, month, model, aparams)
    scored = score_candidates(candidate_sites(snap, pparams), snap, month, model, aparams)
    chosen = greedy_recommend(scored, pparams.top_n, pparams)
    incs = [int(x) for x in increments.split(",") if x.strip() != ""]
    points = equity_curve(base, chosen, incs, snap)
    payload = {
        str(pt.increment): {"used": pt.used, "reports": report_to_json(pt.report)}
        for pt in points
    }
    _write_json(out, payload)
    for pt in points:
        income = pt.report.by_variable["income"].gini
        click.echo(f"increment {pt.increment}: income gini {income}")


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--model", "model_path", default=None)
@click.option("--embeddings", "embeddings_override", default=None)
@click.option("--ui", "ui_dir", default=None, help="Serve a built frontend directory at /.")
@click.pass_obj
def serve(cfg, host, port, model_path, embeddings_override, ui_dir):
    """Run the planner HTTP service (loads snapshot + trained model once)."""
    import uvicorn

    from .service import create_app

    snap = load_snapshot_from_config(cfg)
    model = _predictor(cfg, snap, _model_path(cfg, model_path), embeddings_override)
    sec = cfg["serve"] if cfg.has_section("serve") else {}
    app = create_app(
        snap,
        model,
        access_params=access_params_from_config(cfg),
        placement_params=placement_params_from_config(cfg),
        scenario_cap=int(sec.get("scenario_cap", 100)),
        static_dir=ui_dir or (sec.get("ui_dir", "") or None),
    )
    uvicorn.run(
        app,
        host=host or sec.get("host", "127.0.0.1"),
        port=int(port if port is not None else sec.get("port", 8000)),
        log_level="warning",
    )


if __name__ == "__main__":
    main()
