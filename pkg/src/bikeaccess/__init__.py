"""Bike-to-subway accessibility scoring, cold-start demand prediction,
equity analysis, and equitable station placement."""

from .geodata import (
    CitySnapshot,
    GeoPoint,
    Station,
    SubwayEntrance,
    Zone,
    build_feature_vector,
    haversine_m,
    load_city_snapshot,
    save_city_snapshot,
    snapshot_from_dir,
    zone_of,
)
from .routing import BIKE, WALK, PathResult, bike_time_min, reachable_entrances, shortest_path_m, snap
from .accessibility import AccessParams, AccessScore, edf, ptal, score_all, wptal
from .demand import (
    DemandPredictor,
    FeatureEmbeddings,
    FileEmbeddings,
    ModelParams,
    TrainConfig,
    attention_weights,
    build_local_graphs,
    infonce_intra,
    load_model,
    predict,
    save_model,
    standardize_features,
    train,
)
from .equity import EquityReport, assign_group, equity_report, gini, income_quartiles
from .placement import (
    PlacementParams,
    ScoredCandidate,
    candidate_sites,
    equity_curve,
    recommend,
    score_candidates,
)

__version__ = "0.1.0"
