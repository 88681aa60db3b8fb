"""Group accessibility by demographics and quantify disparity with the
weighted Gini coefficient on the divided synthetic city.

The city has a transit-rich high-income east half and a transit-poor
low-income west half, so the disparity is visible in both grouping variables.
"""

from bikeaccess.accessibility import score_all
from bikeaccess.demand import DemandPredictor, FeatureEmbeddings, TrainConfig, train
from bikeaccess.equity import equity_report
from bikeaccess.synth import make_divided_city

snap, months, eval_month = make_divided_city(seed=0)
embeddings = FeatureEmbeddings(snap)
params, _ = train(TrainConfig(epochs=200, hidden_dim=32, seed=7), snap, embeddings, months)
model = DemandPredictor(params, snap, embeddings)

scores = score_all(snap, eval_month, model)
print(f"scored {len(scores)} cold-start stations for {eval_month}\n")
for s in scores:
    print(f"  {s.station_id}: ptal {s.ptal:7.3f}  demand {s.demand:6.3f}  wptal {s.wptal:8.3f}")

report = equity_report(scores, snap)
for variable, rep in report.by_variable.items():
    print(f"\n{variable} groups (w = station count, mean wPTAL):")
    for g in rep.groups:
        print(f"  {g.key.label:>9}: w={g.w:2d}  mean={g.mean:9.3f}")
    print(f"  weighted mean {rep.mu:.3f}, Gini {rep.gini:.4f}")
