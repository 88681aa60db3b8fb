"""Exercise the planner HTTP API in-process (no sockets needed).

Covers the endpoints the web UI consumes: snapshot summary, station scores,
zones, what-if scenarios, and recommendations. To run the real server instead:
write the same snapshot to disk, point a config at it, and `bikeaccess serve`.
"""

import json

from fastapi.testclient import TestClient

from bikeaccess.demand import DemandPredictor, FeatureEmbeddings, TrainConfig, train
from bikeaccess.service import create_app
from bikeaccess.synth import make_divided_city

snap, months, eval_month = make_divided_city(seed=0)
embeddings = FeatureEmbeddings(snap)
params, _ = train(TrainConfig(epochs=60, hidden_dim=16, seed=7), snap, embeddings, months)
model = DemandPredictor(params, snap, embeddings)

client = TestClient(create_app(snap, model))

summary = client.get("/api/snapshot/summary").json()
print("GET /api/snapshot/summary ->", json.dumps(summary["counts"]))

stations = client.get("/api/stations", params={"month": eval_month}).json()
scored = [s for s in stations["stations"] if s["wptal"] is not None]
print(f"GET /api/stations?month={eval_month} -> {len(scored)} scored, "
      f"wptal quantile breaks {stations['wptal_breaks']}")

sid = client.post("/api/scenario", json={"month": eval_month}).json()["scenario_id"]
print("POST /api/scenario ->", sid)

pin = [snap.network.nodes[46].lon, snap.network.nodes[46].lat]
client.put(f"/api/scenario/{sid}/candidates", json={"add": [pin]})
evaluation = client.get(f"/api/scenario/{sid}/evaluate").json()
print(f"PUT pin at {pin} then GET evaluate ->")
for row in evaluation["candidates"]:
    print("  candidate:", row)
print("  gini deltas:", evaluation["gini_deltas"])

recs = client.post("/api/recommend", json={"n": 5, "month": eval_month}).json()
print("POST /api/recommend {n: 5} ->")
for row in recs["recommendations"]:
    print(f"  #{row['rank']} {row['candidate_id']} wptal={row['wptal']}")
