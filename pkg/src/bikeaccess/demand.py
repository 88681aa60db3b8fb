"""Cold-start monthly demand prediction via dual-graph attention over neighbors.

The model embeds each station's [region embedding ‖ monthly context] through a
shared MLP, aggregates neighbor embeddings over a geographic-proximity graph
and a built-environment-similarity graph with learned softmax attention, and
reads out trips/month with a two-layer head. Everything is plain numpy with
hand-written gradients so that seeded training is bit-reproducible and every
parameter tensor is enumerable for finite-difference checks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geodata import (
    CitySnapshot,
    MONTHLY_DIM,
    Station,
    build_feature_vector,
    haversine_m,
    monthly_context,
    open_before,
)

log = logging.getLogger(__name__)

TEMPORAL_DIM = 3


class TrainingDiverged(RuntimeError):
    pass


def softmax(scores: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax (invariant to adding a constant)."""
    z = np.asarray(scores, dtype=float)
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def standardize_features(stations: list[Station]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-dimension zero mean / unit variance over the stations' static features.

    Uses the population std (divide by N); zero-variance dimensions map to
    all-zeros. Returns (matrix aligned with input order, means, stds).
    """
    if len(stations) < 2:
        raise ValueError("standardization needs at least 2 stations")
    x = np.stack([np.asarray(s.static_features, dtype=float) for s in stations])
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    return apply_standardization(x, mean, std), mean, std


def apply_standardization(x: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        z = (x - mean) / std
    return np.where(std > 0, z, 0.0)


def temporal_features(month: str, epoch_year: int) -> np.ndarray:
    """[sin(2*pi*m/12), cos(2*pi*m/12), year offset from the training epoch]."""
    year, m = int(month[:4]), int(month[5:7])
    ang = 2.0 * math.pi * m / 12.0
    return np.array([math.sin(ang), math.cos(ang), float(year - epoch_year)])


@dataclass
class LocalGraphs:
    """Neighbor ids for one target station, each list sorted by station_id
    (the canonical order fed to attention)."""

    proximity: list[str]
    similarity: list[str]


def build_local_graphs(target: Station, pool: list[Station], k: int) -> LocalGraphs:
    """k nearest pool stations by haversine and by standardized-feature distance.

    Ties break toward the smaller station_id; selected lists are re-sorted by
    id so downstream attention sees a canonical order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = [s for s in pool if s.station_id != target.station_id]
    if not pool:
        raise ValueError(f"empty neighbor pool for station {target.station_id}")
    by_dist = sorted(
        pool, key=lambda s: (haversine_m(target.location, s.location), s.station_id)
    )
    proximity = sorted(s.station_id for s in by_dist[:k])
    if len(pool) == 1:
        return LocalGraphs(proximity=proximity, similarity=[pool[0].station_id])
    z, mean, std = standardize_features(pool)
    zt = apply_standardization(np.asarray(target.static_features, dtype=float), mean, std)
    d = np.linalg.norm(z - zt, axis=1)
    order = sorted(range(len(pool)), key=lambda i: (d[i], pool[i].station_id))
    similarity = sorted(pool[i].station_id for i in order[:k])
    return LocalGraphs(proximity=proximity, similarity=similarity)


# ---------------------------------------------------------------------------
# parameters


@dataclass
class ModelParams:
    """All weight tensors plus the metadata needed to apply them."""

    region_dim: int
    hidden_dim: int
    k: int = 5
    epoch_year: int = 2020
    monthly_dim: int = MONTHLY_DIM
    temporal_dim: int = TEMPORAL_DIM
    # embedding MLP: [x_c ‖ x_u] -> H
    emb_w1: np.ndarray = None
    emb_b1: np.ndarray = None
    emb_w2: np.ndarray = None
    emb_b2: np.ndarray = None
    # shared linear map applied before attention scoring
    shared_w: np.ndarray = None
    # attention scorer: 2H -> H -> 1, ReLU hidden
    attn_w1: np.ndarray = None
    attn_b1: np.ndarray = None
    attn_v: np.ndarray = None
    attn_c: np.ndarray = None
    # readout head: concat -> H -> 1
    head_w1: np.ndarray = None
    head_b1: np.ndarray = None
    head_w2: np.ndarray = None
    head_b2: np.ndarray = None

    @property
    def input_dim(self) -> int:
        return self.region_dim + self.monthly_dim

    @property
    def concat_dim(self) -> int:
        return self.input_dim + self.temporal_dim + 2 * self.hidden_dim

    def tensors(self) -> list[tuple[str, np.ndarray]]:
        names = (
            "emb_w1", "emb_b1", "emb_w2", "emb_b2",
            "shared_w",
            "attn_w1", "attn_b1", "attn_v", "attn_c",
            "head_w1", "head_b1", "head_w2", "head_b2",
        )
        return [(n, getattr(self, n)) for n in names]


def init_params(region_dim: int, hidden_dim: int, seed: int, k: int = 5, epoch_year: int = 2020) -> ModelParams:
    """Seeded uniform [-0.1, 0.1] initialization; creation order is fixed so the
    same seed always yields bit-identical weights."""
    rng = np.random.default_rng(seed)
    h, f = hidden_dim, region_dim + MONTHLY_DIM
    c = f + TEMPORAL_DIM + 2 * h

    def u(*shape):
        return rng.uniform(-0.1, 0.1, size=shape)

    return ModelParams(
        region_dim=region_dim,
        hidden_dim=hidden_dim,
        k=k,
        epoch_year=epoch_year,
        emb_w1=u(h, f),
        emb_b1=u(h),
        emb_w2=u(h, h),
        emb_b2=u(h),
        shared_w=u(h, h),
        attn_w1=u(h, 2 * h),
        attn_b1=u(h),
        attn_v=u(h),
        attn_c=u(1),
        head_w1=u(h, c),
        head_b1=u(h),
        head_w2=u(h),
        head_b2=u(1),
    )


def save_model(params: ModelParams, path: str | Path) -> None:
    """npz serialization; float64 arrays round-trip bit-exactly."""
    meta = np.array(
        [params.region_dim, params.hidden_dim, params.monthly_dim, params.temporal_dim,
         params.k, params.epoch_year],
        dtype=np.int64,
    )
    np.savez(Path(path), _meta=meta, **dict(params.tensors()))


def load_model(path: str | Path) -> ModelParams:
    with np.load(Path(path)) as data:
        meta = data["_meta"]
        params = ModelParams(
            region_dim=int(meta[0]),
            hidden_dim=int(meta[1]),
            monthly_dim=int(meta[2]),
            temporal_dim=int(meta[3]),
            k=int(meta[4]),
            epoch_year=int(meta[5]),
        )
        for name, _ in params.tensors():
            setattr(params, name, np.array(data[name]))
    return params


# ---------------------------------------------------------------------------
# region embeddings


class FileEmbeddings:
    """Embeddings read from embeddings.csv (station_id,e0,...,e{D-1})."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise ValueError("no embeddings")
        dims = {v.shape[0] for v in vectors.values()}
        if len(dims) != 1:
            raise ValueError(f"inconsistent embedding dimensions {sorted(dims)}")
        self.vectors = vectors
        self.dim = dims.pop()

    @classmethod
    def load(cls, path: str | Path) -> "FileEmbeddings":
        import csv as _csv

        vectors = {}
        with Path(path).open(encoding="utf-8", newline="") as fh:
            reader = _csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "station_id":
                raise ValueError(f"{path}: expected header station_id,e0,...")
            width = len(header) - 1
            for row in reader:
                if len(row) != width + 1:
                    raise ValueError(f"{path}: ragged row for {row[0] if row else '?'}")
                vectors[row[0]] = np.array([float(x) for x in row[1:]])
        return cls(vectors)

    def vector(self, station: Station) -> np.ndarray:
        v = self.vectors.get(station.station_id)
        if v is None:
            raise KeyError(f"no embedding for station {station.station_id}")
        return v


class FeatureEmbeddings:
    """Identity fallback: the 29 static features standardized over the existing
    fleet stand in for a learned region embedding. Anchoring the statistics to
    existing stations keeps the transform stable when cold-start stations or
    candidate sites are added or removed, and works for any station, including
    candidates generated on the fly."""

    def __init__(self, snap: CitySnapshot):
        fleet = [s for s in snap.stations if s.status == "existing"]
        if len(fleet) < 2:
            raise ValueError("feature embeddings need at least 2 existing stations")
        _, self.mean, self.std = standardize_features(fleet)
        self.snap = snap
        self.dim = self.mean.shape[0]

    def vector(self, station: Station) -> np.ndarray:
        f = station.static_features
        if f is None:
            f = build_feature_vector(station, self.snap)
        return apply_standardization(np.asarray(f, dtype=float), self.mean, self.std)


# ---------------------------------------------------------------------------
# forward / backward


@dataclass
class SampleBatch:
    """Dense arrays for samples sharing neighbor counts (kp, kb)."""

    zt: np.ndarray  # (n, F) target [x_c ‖ x_u]
    tfeat: np.ndarray  # (n, 3)
    zp: np.ndarray  # (n, kp, F) proximity neighbors
    zb: np.ndarray  # (n, kb, F) similarity neighbors


def _mm(x: np.ndarray, w_t: np.ndarray) -> np.ndarray:
    """x @ w_t with leading dims flattened into one large GEMM."""
    lead = x.shape[:-1]
    out = x.reshape(-1, x.shape[-1]) @ w_t
    return out.reshape(*lead, w_t.shape[-1])


def _emb_forward(params: ModelParams, x: np.ndarray):
    q = _mm(x, params.emb_w1.T) + params.emb_b1
    r = np.maximum(q, 0.0)
    return q, r, _mm(r, params.emb_w2.T) + params.emb_b2


def _attn_forward(params: ModelParams, gt: np.ndarray, gn: np.ndarray):
    # gt (n, H) broadcast against each neighbor row of gn (n, k, H)
    n, k, h = gn.shape
    cc = np.concatenate([np.broadcast_to(gt[:, None, :], (n, k, h)), gn], axis=-1)
    d = _mm(cc, params.attn_w1.T) + params.attn_b1
    f = np.maximum(d, 0.0)
    scores = f @ params.attn_v + params.attn_c[0]
    return cc, d, f, scores


def forward(params: ModelParams, batch: SampleBatch):
    """Raw (unclamped) predictions for a batch, plus the cache for backward."""
    qt, rt, ht = _emb_forward(params, batch.zt)
    qp, rp, hp = _emb_forward(params, batch.zp)
    qb, rb, hb = _emb_forward(params, batch.zb)
    w = params.shared_w
    gt = ht @ w.T
    gp = _mm(hp, w.T)
    gb = _mm(hb, w.T)
    ccp, dp, fp, ep = _attn_forward(params, gt, gp)
    ccb, db, fb, eb = _attn_forward(params, gt, gb)
    epsp = softmax(ep)
    epsb = softmax(eb)
    sp = (epsp[..., None] * hp).sum(axis=1)
    sb = (epsb[..., None] * hb).sum(axis=1)
    xcat = np.concatenate([batch.zt, batch.tfeat, sp, sb], axis=1)
    kpre = xcat @ params.head_w1.T + params.head_b1
    lhid = np.maximum(kpre, 0.0)
    yraw = lhid @ params.head_w2 + params.head_b2[0]
    cache = dict(
        qt=qt, rt=rt, ht=ht, qp=qp, rp=rp, hp=hp, qb=qb, rb=rb, hb=hb,
        gt=gt, ccp=ccp, dp=dp, fp=fp, epsp=epsp, ccb=ccb, db=db, fb=fb, epsb=epsb,
        sp=sp, sb=sb, xcat=xcat, kpre=kpre, lhid=lhid,
    )
    return yraw, cache


def _zero_grads(params: ModelParams) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(t) for name, t in params.tensors()}


def backward(params: ModelParams, batch: SampleBatch, cache: dict, dy: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of sum(dy * yraw) w.r.t. every parameter tensor."""
    g = _zero_grads(params)
    h = params.hidden_dim
    lhid, kpre, xcat = cache["lhid"], cache["kpre"], cache["xcat"]
    g["head_w2"] += lhid.T @ dy
    g["head_b2"] += np.array([dy.sum()])
    dl = dy[:, None] * params.head_w2[None, :]
    dk = dl * (kpre > 0)
    g["head_w1"] += dk.T @ xcat
    g["head_b1"] += dk.sum(axis=0)
    dxcat = dk @ params.head_w1
    base = params.input_dim + params.temporal_dim
    dsp = dxcat[:, base : base + h]
    dsb = dxcat[:, base + h :]

    dgt = np.zeros_like(cache["gt"])
    dhp = np.zeros_like(cache["hp"])
    dhb = np.zeros_like(cache["hb"])
    dht = np.zeros_like(cache["ht"])

    for ds, hn, eps, cc, dpre, fact, dhn in (
        (dsp, cache["hp"], cache["epsp"], cache["ccp"], cache["dp"], cache["fp"], dhp),
        (dsb, cache["hb"], cache["epsb"], cache["ccb"], cache["db"], cache["fb"], dhb),
    ):
        k = hn.shape[1]
        deps = (ds[:, None, :] * hn).sum(axis=-1)
        dhn += eps[..., None] * ds[:, None, :]
        de = eps * (deps - (eps * deps).sum(axis=-1, keepdims=True))
        g["attn_v"] += de.reshape(-1) @ fact.reshape(-1, h)
        g["attn_c"] += np.array([de.sum()])
        df = de[..., None] * params.attn_v
        dd = (df * (dpre > 0)).reshape(-1, h)
        cc2 = cc.reshape(-1, 2 * h)
        g["attn_w1"] += dd.T @ cc2
        g["attn_b1"] += dd.sum(axis=0)
        dcc = (dd @ params.attn_w1).reshape(-1, k, 2 * h)
        dgt += dcc[..., :h].sum(axis=1)
        dgn = dcc[..., h:].reshape(-1, h)
        g["shared_w"] += dgn.T @ hn.reshape(-1, h)
        dhn += (dgn @ params.shared_w).reshape(hn.shape)

    g["shared_w"] += dgt.T @ cache["ht"]
    dht += dgt @ params.shared_w

    f_in = params.input_dim
    for x, q, r, dh in (
        (batch.zt, cache["qt"], cache["rt"], dht),
        (batch.zp, cache["qp"], cache["rp"], dhp),
        (batch.zb, cache["qb"], cache["rb"], dhb),
    ):
        dh2 = dh.reshape(-1, h)
        g["emb_w2"] += dh2.T @ r.reshape(-1, h)
        g["emb_b2"] += dh2.sum(axis=0)
        dr = dh @ params.emb_w2
        dq = (dr * (q > 0)).reshape(-1, h)
        g["emb_w1"] += dq.T @ x.reshape(-1, f_in)
        g["emb_b1"] += dq.sum(axis=0)
    return g


def attention_weights(h_target: np.ndarray, neighbor_hs: np.ndarray, params: ModelParams) -> np.ndarray:
    """Softmax attention coefficients of the target over its neighbors.

    Positive, sum to 1, and shift-invariant in the raw scores.
    """
    neighbor_hs = np.atleast_2d(np.asarray(neighbor_hs, dtype=float))
    if neighbor_hs.shape[0] == 0:
        raise ValueError("attention needs at least one neighbor")
    gt = (params.shared_w @ np.asarray(h_target, dtype=float))[None, :]
    gn = neighbor_hs @ params.shared_w.T
    _, _, _, scores = _attn_forward(params, gt, gn[None, :, :])
    return softmax(scores[0])


# ---------------------------------------------------------------------------
# sample assembly


def active_pool(snap: CitySnapshot, month: str) -> list[Station]:
    """Stations with ridership history before `month` (candidates never qualify)."""
    return [s for s in snap.stations if open_before(s, month)]


def make_sample(
    target: Station,
    month: str,
    snap: CitySnapshot,
    embeddings,
    k: int,
    epoch_year: int,
    zrow_cache: dict[tuple[str, str], np.ndarray] | None = None,
) -> SampleBatch:
    pool = [s for s in active_pool(snap, month) if s.station_id != target.station_id]
    if not pool:
        raise ValueError(f"no neighbor pool for station {target.station_id} at {month}")
    graphs = build_local_graphs(target, pool, k)
    by_id = {s.station_id: s for s in pool}

    def z_row(s: Station) -> np.ndarray:
        key = (s.station_id, month)
        if zrow_cache is not None and key in zrow_cache:
            return zrow_cache[key]
        row = np.concatenate([embeddings.vector(s), monthly_context(s, snap, month)])
        if zrow_cache is not None:
            zrow_cache[key] = row
        return row

    zt = z_row(target)
    zp = np.stack([z_row(by_id[j]) for j in graphs.proximity])
    zb = np.stack([z_row(by_id[j]) for j in graphs.similarity])
    return SampleBatch(
        zt=zt[None, :],
        tfeat=temporal_features(month, epoch_year)[None, :],
        zp=zp[None, :, :],
        zb=zb[None, :, :],
    )


def predict(
    target: Station,
    month: str,
    snap: CitySnapshot,
    embeddings,
    params: ModelParams,
) -> float:
    """Non-negative trips/month for one station (raw output clamped at 0)."""
    if embeddings.dim != params.region_dim:
        raise ValueError(
            f"embedding dim {embeddings.dim} does not match model region_dim {params.region_dim}"
        )
    batch = make_sample(target, month, snap, embeddings, params.k, params.epoch_year)
    yraw, _ = forward(params, batch)
    return float(max(0.0, yraw[0]))


class DemandPredictor:
    """Bundles trained parameters with the snapshot and embedding source.

    Caches neighbor context rows keyed by (station_id, month); safe because the
    snapshot is immutable and on-the-fly candidate ids are unique.
    """

    def __init__(self, params: ModelParams, snap: CitySnapshot, embeddings):
        self.params = params
        self.snap = snap
        self.embeddings = embeddings
        self._zrow_cache: dict[tuple[str, str], np.ndarray] = {}

    def predict(self, station: Station, month: str) -> float:
        if self.embeddings.dim != self.params.region_dim:
            raise ValueError(
                f"embedding dim {self.embeddings.dim} does not match model "
                f"region_dim {self.params.region_dim}"
            )
        batch = make_sample(
            station, month, self.snap, self.embeddings, self.params.k,
            self.params.epoch_year, zrow_cache=self._zrow_cache,
        )
        yraw, _ = forward(self.params, batch)
        return float(max(0.0, yraw[0]))


class TableDemand:
    """Fixed demand lookup, mainly for tests and what-if plumbing."""

    def __init__(self, table: dict[str, float], default: float = 0.0):
        self.table = dict(table)
        self.default = default

    def predict(self, station: Station, month: str) -> float:
        return float(self.table.get(station.station_id, self.default))


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    epochs: int = 200
    learning_rate: float = 0.002
    k: int = 5
    hidden_dim: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


def _group_batches(samples: list[tuple[SampleBatch, float]]):
    """Merge single-sample batches into dense groups keyed by neighbor counts."""
    groups: dict[tuple[int, int], list[tuple[SampleBatch, float]]] = {}
    for b, y in samples:
        groups.setdefault((b.zp.shape[1], b.zb.shape[1]), []).append((b, y))
    out = []
    for key in sorted(groups):
        items = groups[key]
        merged = SampleBatch(
            zt=np.concatenate([b.zt for b, _ in items]),
            tfeat=np.concatenate([b.tfeat for b, _ in items]),
            zp=np.concatenate([b.zp for b, _ in items]),
            zb=np.concatenate([b.zb for b, _ in items]),
        )
        out.append((merged, np.array([y for _, y in items])))
    return out


def mse_loss_and_grads(params: ModelParams, groups) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error over all samples and its analytic gradients."""
    n_total = sum(len(y) for _, y in groups)
    total = 0.0
    grads = _zero_grads(params)
    for batch, y in groups:
        yraw, cache = forward(params, batch)
        resid = yraw - y
        total += float((resid**2).sum())
        g = backward(params, batch, cache, 2.0 * resid / n_total)
        for name in grads:
            grads[name] += g[name]
    return total / n_total, grads


def mse_loss(params: ModelParams, groups) -> float:
    n_total = sum(len(y) for _, y in groups)
    total = 0.0
    for batch, y in groups:
        yraw, _ = forward(params, batch)
        total += float(((yraw - y) ** 2).sum())
    return total / n_total


def build_training_set(
    snap: CitySnapshot, embeddings, labeled_months: list[str], k: int, epoch_year: int
):
    """(SampleBatch, trips) pairs from existing stations' observed demand,
    ordered by (station_id, month) for determinism."""
    samples = []
    zrow_cache: dict[tuple[str, str], np.ndarray] = {}
    for s in snap.stations:
        if s.status != "existing":
            continue
        for m in labeled_months:
            if m in s.observed_demand:
                batch = make_sample(s, m, snap, embeddings, k, epoch_year, zrow_cache=zrow_cache)
                samples.append((batch, s.observed_demand[m]))
    return samples


def train(
    config: TrainConfig,
    snap: CitySnapshot,
    embeddings,
    labeled_months: list[str],
) -> tuple[ModelParams, list[float]]:
    """Full-batch Adam on MSE. Returns the parameters and a loss history of
    length epochs + 1 (initial loss first)."""
    months = sorted(set(labeled_months))
    epoch_year = min(int(m[:4]) for m in months) if months else 2020
    samples = build_training_set(snap, embeddings, months, config.k, epoch_year)
    if not samples:
        raise ValueError("no labeled (station, month, trips) triples to train on")
    groups = _group_batches(samples)
    params = init_params(
        embeddings.dim, config.hidden_dim, config.seed, k=config.k, epoch_year=epoch_year
    )
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m_state = _zero_grads(params)
    v_state = _zero_grads(params)
    history: list[float] = []
    for step in range(1, config.epochs + 1):
        loss, grads = mse_loss_and_grads(params, groups)
        if not math.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss {loss} at epoch {step - 1}")
        history.append(loss)
        for name, tensor in params.tensors():
            gr = grads[name]
            m_state[name] = beta1 * m_state[name] + (1 - beta1) * gr
            v_state[name] = beta2 * v_state[name] + (1 - beta2) * gr**2
            mhat = m_state[name] / (1 - beta1**step)
            vhat = v_state[name] / (1 - beta2**step)
            tensor -= config.learning_rate * mhat / (np.sqrt(vhat) + eps)
    final = mse_loss(params, groups)
    if not math.isfinite(final):
        raise TrainingDiverged(f"non-finite loss {final} after {config.epochs} epochs")
    history.append(final)
    return params, history


# ---------------------------------------------------------------------------
# contrastive utility


def infonce_intra(
    anchor: np.ndarray,
    positive: np.ndarray,
    negatives: list[np.ndarray],
    tau: float,
) -> float:
    """InfoNCE loss for one anchor against its positive and a negative set.

    Empty negatives give 0 (perfect discrimination). Inputs are expected to be
    unit-normalized; tau must be positive.
    """
    if tau <= 0:
        raise ValueError(f"temperature must be > 0, got {tau}")
    anchor = np.asarray(anchor, dtype=float)
    s_pos = float(anchor @ np.asarray(positive, dtype=float)) / tau
    if not negatives:
        return 0.0
    scores = np.array([s_pos] + [float(anchor @ np.asarray(z, dtype=float)) / tau for z in negatives])
    m = scores.max()
    return float(m + np.log(np.exp(scores - m).sum()) - s_pos)
