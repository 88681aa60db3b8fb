"""End-to-end placement: candidate generation under walkability/spacing/equity
constraints, greedy wPTAL selection, and the incremental equity curve.

Mirrors the planning loop: adding recommended stations in the underserved
half lowers the income Gini step by step.
"""

from bikeaccess.accessibility import score_all
from bikeaccess.demand import DemandPredictor, FeatureEmbeddings, TrainConfig, train
from bikeaccess.placement import (
    PlacementParams,
    candidate_sites,
    equity_curve,
    recommend,
    score_candidates,
)
from bikeaccess.synth import make_divided_city

snap, months, eval_month = make_divided_city(seed=0)
embeddings = FeatureEmbeddings(snap)
params, _ = train(TrainConfig(epochs=200, hidden_dim=32, seed=7), snap, embeddings, months)
model = DemandPredictor(params, snap, embeddings)

base = score_all(snap, eval_month, model)
pparams = PlacementParams()  # 305 m spacing, walkable classes, equity filter

sites = candidate_sites(snap, pparams)
print(f"{len(sites)} candidate nodes pass walkability, zone, and spacing filters")

scored = score_candidates(sites, snap, eval_month, model)
recs = recommend(scored, 8, pparams)
print("\ngreedy selection (order matters, 305 m spacing enforced):")
for rank, c in enumerate(recs, 1):
    print(
        f"  {rank}. {c.candidate_id} at ({c.location.lon:.5f}, {c.location.lat:.5f})"
        f"  demand {c.demand:5.3f}  ptal {c.ptal:6.3f}  wptal {c.wptal:7.3f}"
    )

points = equity_curve(base, recs, [0, 2, 4, 6, 8], snap)
print("\nequity curve (lower Gini = more equitable):")
print("  added   income-Gini   ethnicity-Gini")
for pt in points:
    income = pt.report.by_variable["income"].gini
    eth = pt.report.by_variable["ethnicity"].gini
    print(f"  {pt.used:5d}   {income:11.4f}   {eth:14.4f}")
