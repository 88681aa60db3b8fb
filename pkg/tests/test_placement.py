"""Placement: candidate generation, greedy selection vs enumeration oracle,
and the incremental equity curve."""

import itertools
import math

import numpy as np
import pytest

from bikeaccess.accessibility import AccessScore
from bikeaccess.demand import TableDemand
from bikeaccess.equity import equity_report
from bikeaccess.geodata import (
    GeoPoint,
    RoadEdge,
    RoadNetwork,
    Station,
    build_city_snapshot,
    haversine_m,
)
from bikeaccess.placement import (
    PlacementParams,
    ScoredCandidate,
    candidate_sites,
    candidate_station,
    equity_curve,
    recommend,
    score_candidates,
)

from tests.test_equity import zone_with

DEG = 1.0 / (6_371_000.0 * math.pi / 180.0)


def cand(cid, lon_m, lat_m, wptal):
    return ScoredCandidate(
        candidate_id=cid,
        node_id=0,
        location=GeoPoint(lon_m * DEG, lat_m * DEG),
        demand=1.0,
        ptal=wptal,
        wptal=wptal,
    )


# --- candidate_sites -----------------------------------------------------------


def test_candidate_sites_motorway_only_empty():
    nodes = {0: GeoPoint(0, 0), 1: GeoPoint(0.001, 0)}
    net = RoadNetwork(nodes, [RoadEdge(0, 1, 100.0, "motorway")])
    zones = [zone_with(f"z{i}", income=10.0 + i, offset=float(i) - 0.5) for i in range(4)]
    snap = build_city_snapshot(net, [], [], [], zones, [])
    assert candidate_sites(snap) == []


def qualifying_city(station_offset_m):
    """One walkable node in a low-income zone; one existing station nearby."""
    nodes = {0: GeoPoint(0, 0), 1: GeoPoint(100 * DEG, 0)}
    net = RoadNetwork(nodes, [RoadEdge(0, 1, 100.0, "residential")])
    zones = [
        zone_with("z0", income=10.0, offset=-0.5, pop_black=100),  # qualifies
        zone_with("z1", income=50.0, offset=1.5, pop_white=100),
        zone_with("z2", income=60.0, offset=2.5, pop_white=100),
        zone_with("z3", income=70.0, offset=3.5, pop_white=100),
    ]
    station = Station("s1", GeoPoint(station_offset_m * DEG, 0), "existing", open_month="2020-01")
    return build_city_snapshot(net, [station], [], [], zones, [])


def test_candidate_sites_spacing_from_existing():
    included = candidate_sites(qualifying_city(400.0))
    assert [c.node_id for c in included] == [0]  # node 1 is 300 m from the station
    excluded = candidate_sites(qualifying_city(200.0))
    assert [c.node_id for c in excluded] == []


def test_candidate_sites_equity_filter_modes():
    # rich White-majority zone: fails "any"; rich minority zone: passes "any" only
    nodes = {0: GeoPoint(0, 0), 1: GeoPoint(100 * DEG, 0)}
    net = RoadNetwork(nodes, [RoadEdge(0, 1, 100.0, "residential")])
    zones = [
        zone_with("z0", income=90.0, offset=-0.5, pop_asian=100),  # minority but rich
        zone_with("z1", income=10.0, offset=1.5, pop_white=100),
        zone_with("z2", income=20.0, offset=2.5, pop_white=100),
        zone_with("z3", income=30.0, offset=3.5, pop_white=100),
    ]
    snap = build_city_snapshot(net, [], [], [], zones, [])
    assert len(candidate_sites(snap, PlacementParams(equity_mode="any"))) == 2
    assert candidate_sites(snap, PlacementParams(equity_mode="all")) == []


def test_candidate_ids_sort_numerically():
    c = candidate_sites(qualifying_city(400.0))[0]
    assert c.candidate_id == "cand_000000"


# --- recommend -------------------------------------------------------------------


def test_recommend_spacing_tie_rule():
    a = cand("a", 0, 0, 5.0)
    b = cand("b", 200, 0, 5.0)  # within 305 m of a
    out = recommend([b, a], n=2)
    assert [c.candidate_id for c in out] == ["a"]


def test_recommend_greedy_blocks_second_best():
    sel = recommend(
        [cand("a", 0, 0, 5.0), cand("b", 250, 0, 4.0), cand("c", 5000, 0, 3.0)], n=3
    )
    assert [c.candidate_id for c in sel] == ["a", "c"]


def test_recommend_n_zero():
    assert recommend([cand("a", 0, 0, 5.0)], n=0) == []


def test_recommend_deterministic():
    rng = np.random.default_rng(1)
    cands = [
        cand(f"c{i:02d}", float(rng.uniform(0, 2000)), float(rng.uniform(0, 2000)), float(rng.uniform(0, 10)))
        for i in range(20)
    ]
    r1 = recommend(list(cands), 8)
    r2 = recommend(list(reversed(cands)), 8)
    assert [c.candidate_id for c in r1] == [c.candidate_id for c in r2]


def greedy_oracle(cands, n, spacing):
    """Enumerate every feasible subset; return the one whose key sequence
    (wptal desc, id asc; longer wins on prefix ties) is best."""

    def feasible(subset):
        return all(
            haversine_m(a.location, b.location) >= spacing
            for a, b in itertools.combinations(subset, 2)
        )

    def key_seq(subset):
        return [(-c.wptal, c.candidate_id) for c in sorted(subset, key=lambda c: (-c.wptal, c.candidate_id))]

    def better(sa, sb):
        # element-wise: smaller key wins; on prefix equality the longer wins
        for ka, kb in zip(sa, sb):
            if ka != kb:
                return ka < kb
        return len(sa) > len(sb)

    best = []
    best_key = []
    for r in range(0, min(n, len(cands)) + 1):
        for combo in itertools.combinations(cands, r):
            if feasible(combo):
                ks = key_seq(combo)
                if better(ks, best_key):
                    best = sorted(combo, key=lambda c: (-c.wptal, c.candidate_id))
                    best_key = ks
    return best


def test_recommend_matches_enumeration_oracle():
    rng = np.random.default_rng(77)
    for trial in range(50):
        m = int(rng.integers(2, 11))
        cands = [
            cand(
                f"c{i:02d}",
                float(rng.uniform(0, 1200)),
                float(rng.uniform(0, 1200)),
                float(np.round(rng.uniform(0, 10), 3)),
            )
            for i in range(m)
        ]
        n = int(rng.integers(1, m + 1))
        got = recommend(list(cands), n)
        want = greedy_oracle(cands, n, 305.0)
        assert [c.candidate_id for c in got] == [c.candidate_id for c in want], f"trial {trial}"


def test_recommend_replay_maximality():
    # no skipped higher-scoring candidate was feasible when it was skipped
    rng = np.random.default_rng(78)
    cands = [
        cand(f"c{i:02d}", float(rng.uniform(0, 1500)), float(rng.uniform(0, 1500)), float(rng.uniform(0, 10)))
        for i in range(30)
    ]
    sel = recommend(list(cands), 10)
    order = sorted(cands, key=lambda c: (-c.wptal, c.candidate_id))
    replay = []
    for c in order:
        if len(replay) >= 10:
            break
        if all(haversine_m(c.location, s.location) >= 305.0 for s in replay):
            replay.append(c)
    assert [c.candidate_id for c in sel] == [c.candidate_id for c in replay]


# --- scoring candidates -----------------------------------------------------------


def test_score_candidates_colocated_with_cold_start(divided_bundle):
    snap = divided_bundle["snap"]
    model = divided_bundle["model"]
    month = divided_bundle["eval_month"]
    cold = next(s for s in snap.stations if s.station_id == "cw00")
    node_id = next(
        nid for nid, pt in snap.network.nodes.items()
        if pt.lon == cold.location.lon and pt.lat == cold.location.lat
    )
    twin = ScoredCandidate(candidate_id="cand_twin", node_id=node_id, location=cold.location)
    [scored] = score_candidates([twin], snap, month, model)
    base = next(s for s in divided_bundle["base_scores"] if s.station_id == "cw00")
    assert scored.ptal == pytest.approx(base.ptal, abs=1e-9)
    assert scored.demand == pytest.approx(base.demand, abs=1e-9)
    assert scored.wptal == pytest.approx(base.wptal, abs=1e-9)


def test_score_candidates_no_entrance_zero_wptal(divided_bundle):
    snap = divided_bundle["snap"]
    remote = next(c for c in divided_bundle["scored"] if c.ptal == 0.0)
    assert remote.wptal == 0.0


def test_score_candidates_skips_failures(divided_bundle):
    snap = divided_bundle["snap"]

    class Broken:
        def predict(self, station, month):
            raise RuntimeError("boom")

    out = score_candidates(divided_bundle["sites"][:3], snap, "2025-01", Broken())
    assert out == []


def test_score_candidates_match_manual_pipeline(divided_bundle):
    from bikeaccess.accessibility import score_station

    snap = divided_bundle["snap"]
    model = divided_bundle["model"]
    month = divided_bundle["eval_month"]
    for c in divided_bundle["scored"][:3]:
        station = candidate_station(
            ScoredCandidate(candidate_id=c.candidate_id, node_id=c.node_id, location=c.location),
            snap,
        )
        direct = score_station(station, snap, month, model)
        assert c.ptal == pytest.approx(direct.ptal, abs=1e-12)
        assert c.wptal == pytest.approx(direct.wptal, abs=1e-12)


# --- equity curve ------------------------------------------------------------------


def test_equity_curve_zero_increment_is_base(divided_bundle):
    base = divided_bundle["base_scores"]
    snap = divided_bundle["snap"]
    [pt] = equity_curve(base, divided_bundle["recommendations"], [0], snap)
    direct = equity_report(base, snap)
    for variable in ("ethnicity", "income"):
        assert pt.report.by_variable[variable].gini == direct.by_variable[variable].gini


def test_equity_curve_matches_from_scratch(divided_bundle):
    base = divided_bundle["base_scores"]
    snap = divided_bundle["snap"]
    recs = divided_bundle["recommendations"]
    points = equity_curve(base, recs, [0, 3, 8], snap)
    for pt in points:
        chosen = recs[: pt.used]
        scores = list(base) + [
            AccessScore(station_id=c.candidate_id, month="2025-01", ptal=c.ptal,
                        demand=c.demand, wptal=c.wptal)
            for c in chosen
        ]
        direct = equity_report(scores, snap, {c.candidate_id: c.location for c in chosen})
        for variable in ("ethnicity", "income"):
            a = pt.report.by_variable[variable].gini
            b = direct.by_variable[variable].gini
            assert a == pytest.approx(b, abs=1e-12)


def test_equity_curve_increment_beyond_available(divided_bundle):
    base = divided_bundle["base_scores"]
    recs = divided_bundle["recommendations"]
    [pt] = equity_curve(base, recs, [999], divided_bundle["snap"])
    assert pt.increment == 999
    assert pt.used == len(recs)


def test_equity_curve_rejects_descending():
    with pytest.raises(ValueError):
        equity_curve([], [], [4, 0], None)


def test_divided_city_income_gini_strictly_improves(divided_bundle):
    base = divided_bundle["base_scores"]
    snap = divided_bundle["snap"]
    recs = divided_bundle["recommendations"]
    points = equity_curve(base, recs, [0, len(recs)], snap)
    first = points[0].report.by_variable["income"].gini
    last = points[-1].report.by_variable["income"].gini
    assert last < first
