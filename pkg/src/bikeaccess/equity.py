"""Group-level equity of accessibility: station grouping and weighted Gini.

Stations are grouped by the predominant ethnicity or the income quartile of
the zone they sit in; the Gini coefficient compares group mean wPTAL values
weighted by group station counts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .accessibility import AccessScore
from .geodata import CitySnapshot, GeoPoint, Station, Zone, zone_of

log = logging.getLogger(__name__)

ETHNICITY_LABELS = ("Asian", "Black", "Hispanic", "White")  # alphabetical tie order
INCOME_LABELS = ("low", "med_low", "med_high", "high")
VARIABLES = ("ethnicity", "income")


@dataclass(frozen=True)
class GroupKey:
    variable: str
    label: str

    def __post_init__(self):
        allowed = ETHNICITY_LABELS if self.variable == "ethnicity" else INCOME_LABELS
        if self.variable not in VARIABLES or self.label not in allowed:
            raise ValueError(f"invalid group {self.variable}/{self.label}")


@dataclass
class GroupStats:
    key: GroupKey
    w: int  # station count
    mean: float  # mean wPTAL


@dataclass
class VariableReport:
    variable: str
    groups: list[GroupStats]
    total_w: int
    mu: float
    gini: float | None  # None when mu == 0 (all-zero accessibility)


@dataclass
class EquityReport:
    by_variable: dict[str, VariableReport]
    unassigned: int = 0


def income_quartiles(zones: list[Zone]) -> tuple[float, float, float]:
    """25th/50th/75th percentiles of zone median incomes (linear interpolation)."""
    if len(zones) < 4:
        raise ValueError(f"income quartiles need >= 4 zones, got {len(zones)}")
    incomes = np.array([z.median_income for z in zones])
    q25, q50, q75 = np.percentile(incomes, [25, 50, 75])
    return float(q25), float(q50), float(q75)


def classify_income(income: float, quartiles: tuple[float, float, float]) -> str:
    q25, q50, q75 = quartiles
    if income <= q25:
        return "low"
    if income <= q50:
        return "med_low"
    if income <= q75:
        return "med_high"
    return "high"


def predominant_ethnicity(zone: Zone) -> str:
    """Largest of the four population counts; ties break alphabetically."""
    counts = zone.ethnicity_counts()
    return max(sorted(counts), key=lambda label: counts[label])


def assign_group(
    station_location: GeoPoint,
    zones: list[Zone],
    variable: str,
    quartiles: tuple[float, float, float] | None = None,
) -> GroupKey | None:
    """Group for a station location, or None when it lies outside all zones."""
    zone = zone_of(station_location, zones)
    if zone is None:
        return None
    if variable == "ethnicity":
        return GroupKey("ethnicity", predominant_ethnicity(zone))
    if variable == "income":
        if quartiles is None:
            quartiles = income_quartiles(zones)
        return GroupKey("income", classify_income(zone.median_income, quartiles))
    raise ValueError(f"unknown grouping variable {variable!r}")


def gini(groups: list[GroupStats]) -> float:
    """Station-count-weighted Gini over group means.

    G = sum_ij w_i w_j |m_i - m_j| / (2 W^2 mu). Undefined (raises) when the
    weighted mean is zero.
    """
    occupied = [g for g in groups if g.w > 0]
    if not occupied:
        raise ValueError("gini needs at least one occupied group")
    w = np.array([g.w for g in occupied], dtype=float)
    m = np.array([g.mean for g in occupied], dtype=float)
    total = w.sum()
    mu = float(w @ m) / total
    if mu <= 0:
        raise ValueError("gini undefined: weighted mean accessibility is zero")
    pair = np.abs(m[:, None] - m[None, :])
    return float((w[:, None] * w[None, :] * pair).sum() / (2.0 * total**2 * mu))


def equity_report(
    scores: list[AccessScore],
    snap: CitySnapshot,
    extra_locations: dict[str, GeoPoint] | None = None,
) -> EquityReport:
    """Group stats and Gini for both grouping variables over the given scores.

    Station locations resolve through the snapshot; extra_locations covers
    scored entries that are not snapshot stations (candidate sites). Stations
    outside every zone are counted as unassigned and excluded.
    """
    if not scores:
        raise ValueError("equity report needs at least one score")
    extra_locations = extra_locations or {}
    quartiles = income_quartiles(snap.zones)
    by_variable: dict[str, VariableReport] = {}
    unassigned_ids: set[str] = set()
    for variable in VARIABLES:
        buckets: dict[str, list[float]] = {}
        for sc in scores:
            if snap.has_station(sc.station_id):
                loc = snap.station(sc.station_id).location
            elif sc.station_id in extra_locations:
                loc = extra_locations[sc.station_id]
            else:
                raise KeyError(f"no location known for scored station {sc.station_id}")
            key = assign_group(loc, snap.zones, variable, quartiles)
            if key is None:
                unassigned_ids.add(sc.station_id)
                continue
            buckets.setdefault(key.label, []).append(sc.wptal)
        labels = ETHNICITY_LABELS if variable == "ethnicity" else INCOME_LABELS
        groups = [
            GroupStats(GroupKey(variable, label), w=len(vals), mean=float(np.mean(vals)))
            for label in labels
            if (vals := buckets.get(label))
        ]
        total_w = sum(g.w for g in groups)
        mu = sum(g.w * g.mean for g in groups) / total_w if total_w else 0.0
        try:
            g_value = gini(groups) if groups else None
        except ValueError:
            g_value = None
            log.warning("gini undefined for %s: weighted mean accessibility is zero", variable)
        by_variable[variable] = VariableReport(
            variable=variable, groups=groups, total_w=total_w, mu=mu, gini=g_value
        )
    if unassigned_ids:
        log.warning("%d stations outside all zones excluded from equity", len(unassigned_ids))
    return EquityReport(by_variable=by_variable, unassigned=len(unassigned_ids))


def report_to_json(report: EquityReport) -> list[dict]:
    """The equity_report.json shape: one object per grouping variable."""
    out = []
    for variable in VARIABLES:
        rep = report.by_variable[variable]
        out.append(
            {
                "variable": variable,
                "groups": [
                    {"label": g.key.label, "w": g.w, "mean_wptal": g.mean} for g in rep.groups
                ],
                "W": rep.total_w,
                "mu": rep.mu,
                "gini": rep.gini,
            }
        )
    return out
