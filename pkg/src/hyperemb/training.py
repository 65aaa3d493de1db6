"""Losses, score functions, negative sampling, gradients, and the training loop.

Gradients are hand-written reverse-mode through the layer equations; the
finite-difference oracle in the test suite checks every variant,
activation, and loss combination against them.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import expit, logsumexp, softmax

from .errors import ConfigError, DataError, HypergraphWarning, NumericError
from .evaluation import auc, multiclass_auc
from .features import RngLike, as_rng, init_hyperedge_features, init_node_features
from .hypergraph import Hypergraph
from .model import (
    EmbeddingState,
    ModelParams,
    PropagationOperators,
    VariantKind,
    activate,
    build_operators,
    default_dims,
    forward,
    init_params,
)

SCORE_FNS = ("mean-pairwise", "max-min")
OPTIMIZERS = ("adam", "sgd")
TASKS = ("hyperedge-pred", "node-class")


@dataclass
class TrainConfig:
    """Everything a single run needs besides the data itself."""

    variant: VariantKind = field(default_factory=VariantKind)
    layers: int = 2
    lr: float = 0.01
    epochs: int = 200
    optimizer: str = "adam"
    split_fraction: float = 0.8
    alpha: float = 0.5
    score_fn: str = "mean-pairwise"
    seed: int = 0
    normalize: bool = True  # cosine scores; False switches to raw dot products
    score_mode: str = "plain"  # "dependent" scores psi-projected embeddings instead
    feature_rank: int = 32  # rank F when features must be bootstrapped
    width: Optional[int] = None  # hidden width override; defaults to the feature dim

    def __post_init__(self):
        if not 0 < self.split_fraction < 1:
            raise ConfigError(f"split_fraction must be in (0, 1), got {self.split_fraction}")
        if not 0 <= self.alpha <= 1:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        if self.layers < 1:
            raise ConfigError(f"layers must be >= 1, got {self.layers}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}; expected one of {OPTIMIZERS}")
        if self.score_fn not in SCORE_FNS:
            raise ConfigError(f"unknown score_fn {self.score_fn!r}; expected one of {SCORE_FNS}")
        if self.score_mode not in ("plain", "dependent"):
            raise ConfigError(f"unknown score_mode {self.score_mode!r}")
        if self.feature_rank < 1:
            raise ConfigError(f"feature_rank must be >= 1, got {self.feature_rank}")


def _normalize_rows(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit rows plus the original norms; zero rows pass through with a warning."""
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        warnings.warn(
            "zero embedding vector left unnormalized in pairwise score",
            HypergraphWarning,
            stacklevel=3,
        )
    safe = np.where(norms > 0, norms, 1.0)
    return x / safe[:, np.newaxis], norms


def score_mean_pairwise(embs, normalize: bool = True) -> float:
    """Mean pairwise similarity over all vector pairs of the set.

    With ``normalize`` (default) each vector is scaled to unit length
    first, so this is the mean pairwise cosine.
    """
    x = np.atleast_2d(np.asarray(embs, dtype=np.float64))
    k = x.shape[0]
    if k < 2:
        raise DataError(f"mean-pairwise score needs at least 2 vectors, got {k}")
    xh = _normalize_rows(x)[0] if normalize else x
    s = xh.sum(axis=0)
    t = k * (k - 1) / 2.0
    return float((s @ s - np.einsum("ij,ij->", xh, xh)) / (2.0 * t))


def score_mean_pairwise_grad(embs, normalize: bool = True) -> tuple[float, np.ndarray]:
    """Score plus its gradient with respect to every input vector."""
    x = np.atleast_2d(np.asarray(embs, dtype=np.float64))
    k = x.shape[0]
    if k < 2:
        raise DataError(f"mean-pairwise score needs at least 2 vectors, got {k}")
    if normalize:
        xh, norms = _normalize_rows(x)
    else:
        xh, norms = x, None
    s = xh.sum(axis=0)
    t = k * (k - 1) / 2.0
    score = float((s @ s - np.einsum("ij,ij->", xh, xh)) / (2.0 * t))
    d_xh = (s[np.newaxis, :] - xh) / t
    if not normalize:
        return score, d_xh
    # chain through x -> x/|x|: (I - xh xh^T)/|x|, identity on zero rows
    grad = np.empty_like(d_xh)
    for i in range(k):
        if norms[i] > 0:
            g = d_xh[i]
            grad[i] = (g - xh[i] * (xh[i] @ g)) / norms[i]
        else:
            grad[i] = d_xh[i]
    return score, grad


def score_maxmin(embs) -> float:
    """Negated mean per-dimension range: tighter clusters score higher."""
    x = np.atleast_2d(np.asarray(embs, dtype=np.float64))
    if x.shape[0] < 1:
        raise DataError("max-min score needs at least one vector")
    return float(-(x.max(axis=0) - x.min(axis=0)).mean())


def score_maxmin_grad(embs) -> tuple[float, np.ndarray]:
    """Score plus a subgradient routed to the per-dimension argmax/argmin rows."""
    x = np.atleast_2d(np.asarray(embs, dtype=np.float64))
    if x.shape[0] < 1:
        raise DataError("max-min score needs at least one vector")
    d = x.shape[1]
    hi = x.argmax(axis=0)
    lo = x.argmin(axis=0)
    score = float(-(x[hi, np.arange(d)] - x[lo, np.arange(d)]).mean())
    grad = np.zeros_like(x)
    np.subtract.at(grad, (hi, np.arange(d)), 1.0 / d)
    np.add.at(grad, (lo, np.arange(d)), 1.0 / d)
    return score, grad


def score_vertex_set(embs, score_fn: str, normalize: bool = True) -> float:
    if score_fn == "mean-pairwise":
        return score_mean_pairwise(embs, normalize=normalize)
    if score_fn == "max-min":
        return score_maxmin(embs)
    raise ConfigError(f"unknown score_fn {score_fn!r}")


def _score_vertex_set_grad(embs, score_fn: str, normalize: bool) -> tuple[float, np.ndarray]:
    if score_fn == "mean-pairwise":
        return score_mean_pairwise_grad(embs, normalize=normalize)
    if score_fn == "max-min":
        return score_maxmin_grad(embs)
    raise ConfigError(f"unknown score_fn {score_fn!r}")


def score_sets(
    z_final: np.ndarray,
    examples: Sequence[Sequence[int]],
    cfg: TrainConfig,
    params: ModelParams,
    variant: VariantKind,
) -> np.ndarray:
    """Eval-mode scores for a batch of vertex sets under the config's scorer."""
    members = [tuple(e) for e in examples]
    scores, _ = _score_examples(z_final, members, cfg, params, variant, None, training=False)
    return scores


def sample_negatives(
    g: Hypergraph,
    count: int,
    alpha: float,
    rng: RngLike = 0,
    source_edges: Optional[Sequence[Sequence[int]]] = None,
    forbid: Optional[Iterable[Iterable[int]]] = None,
) -> list[tuple[int, ...]]:
    """Forge ``count`` negative vertex sets from observed hyperedges.

    Each negative keeps ceil(alpha*|e|) members of a uniformly chosen
    source hyperedge (capped at |e|-1 so at least one node is replaced)
    and fills the rest uniformly from outside e.  A candidate equal to
    any observed hyperedge (or any set in ``forbid``) is resampled; 100
    consecutive failures abort.
    """
    if not 0 <= alpha <= 1:
        raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    sources = [tuple(e) for e in (source_edges if source_edges is not None else g.edge_members)]
    if not sources:
        raise DataError("no source hyperedges to derive negatives from")
    max_size = max(len(e) for e in sources)
    if g.num_nodes <= max_size:
        raise DataError(
            f"cannot sample negatives: largest source hyperedge has {max_size} of {g.num_nodes} nodes"
        )
    rng = as_rng(rng)
    forbidden = set(g.edge_sets())
    if forbid is not None:
        forbidden |= {frozenset(e) for e in forbid}
    all_nodes = np.arange(g.num_nodes)
    out: list[tuple[int, ...]] = []
    failures = 0
    while len(out) < count:
        e = sources[int(rng.integers(len(sources)))]
        members = np.asarray(e)
        keep = min(math.ceil(alpha * len(e)), len(e) - 1)
        kept = rng.choice(members, size=keep, replace=False) if keep else np.empty(0, dtype=np.int64)
        pool = np.setdiff1d(all_nodes, members, assume_unique=False)
        fill = len(e) - keep
        if fill > pool.size:
            failures += 1
            if failures >= 100:
                raise DataError("negative sampling failed 100 times in a row")
            continue
        filled = rng.choice(pool, size=fill, replace=False)
        candidate = tuple(sorted(int(v) for v in np.concatenate([kept, filled])))
        if frozenset(candidate) in forbidden:
            failures += 1
            if failures >= 100:
                raise DataError("negative sampling failed 100 times in a row")
            continue
        failures = 0
        out.append(candidate)
    return out


@dataclass
class LabeledHyperedgeSet:
    """Positive hyperedges plus forged negatives, labeled 1/0."""

    positives: list[tuple[int, ...]]
    negatives: list[tuple[int, ...]]

    def __post_init__(self):
        pos_sets = {frozenset(e) for e in self.positives}
        for e in self.negatives:
            if frozenset(e) in pos_sets:
                raise DataError(f"negative {tuple(e)} duplicates a positive")

    @property
    def examples(self) -> list[tuple[int, ...]]:
        return list(self.positives) + list(self.negatives)

    @property
    def labels(self) -> np.ndarray:
        return np.concatenate(
            [np.ones(len(self.positives)), np.zeros(len(self.negatives))]
        )


def build_labeled_set(
    g: Hypergraph,
    alpha: float,
    rng: RngLike = 0,
    positives: Optional[Sequence[Sequence[int]]] = None,
    forbid: Optional[Iterable[Iterable[int]]] = None,
    min_size: int = 2,
) -> LabeledHyperedgeSet:
    """Label the (filtered) positives 1 and an equal count of forged negatives 0.

    Positives smaller than ``min_size`` are dropped with a warning —
    pairwise scores are undefined on singletons.
    """
    rng = as_rng(rng)
    pos = [tuple(sorted(e)) for e in (positives if positives is not None else g.edge_members)]
    kept = [e for e in pos if len(e) >= min_size]
    if len(kept) < len(pos):
        warnings.warn(
            f"dropped {len(pos) - len(kept)} hyperedge(s) smaller than {min_size}",
            HypergraphWarning,
            stacklevel=2,
        )
    if not kept:
        raise DataError(f"no hyperedges of size >= {min_size} to label")
    negatives = sample_negatives(
        g, len(kept), alpha, rng, source_edges=kept, forbid=forbid
    )
    return LabeledHyperedgeSet(positives=kept, negatives=negatives)


def hyperedge_bce_loss(scores, labels) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy of sigmoid(score) vs labels, plus d(loss)/d(score).

    Evaluated in the softplus form, so extreme scores stay finite.
    """
    f = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if f.size == 0:
        raise DataError("empty batch")
    if f.shape != y.shape:
        raise DataError(f"scores/labels shape mismatch: {f.shape} vs {y.shape}")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError("labels must be 0/1")
    per_example = np.maximum(f, 0.0) - f * y + np.log1p(np.exp(-np.abs(f)))
    grad = (expit(f) - y) / f.size
    return float(per_example.mean()), grad


def node_ce_loss(logits, labels, mask) -> tuple[float, np.ndarray]:
    """Masked softmax cross-entropy over labeled nodes; gradient is zero elsewhere."""
    z = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    mask = np.asarray(mask, dtype=bool)
    if z.ndim != 2:
        raise DataError(f"logits must be 2-d, got shape {z.shape}")
    if mask.shape != (z.shape[0],) or labels.shape != (z.shape[0],):
        raise DataError("labels/mask must be 1-d with one entry per logits row")
    n_l = int(mask.sum())
    if n_l == 0:
        raise DataError("mask selects no labeled nodes")
    y = labels[mask]
    if y.min() < 0 or y.max() >= z.shape[1]:
        raise DataError(f"labels must be in [0, {z.shape[1]}), got range [{y.min()}, {y.max()}]")
    sub = z[mask]
    lse = logsumexp(sub, axis=1)
    loss = float((lse - sub[np.arange(n_l), y]).mean())
    grad = np.zeros_like(z)
    sub_grad = softmax(sub, axis=1)
    sub_grad[np.arange(n_l), y] -= 1.0
    grad[mask] = sub_grad / n_l
    return loss, grad


@dataclass
class ParamGrads:
    """Gradient holder mirroring ModelParams' shapes."""

    w: list[np.ndarray]
    w_e: list[np.ndarray]
    psi: np.ndarray
    head: Optional[np.ndarray] = None

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        out = [(f"w_{k}", a) for k, a in enumerate(self.w)]
        out += [(f"we_{k}", a) for k, a in enumerate(self.w_e)]
        out.append(("psi", self.psi))
        if self.head is not None:
            out.append(("head", self.head))
        return out

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "ParamGrads":
        return cls(
            w=[np.zeros_like(a) for a in params.w],
            w_e=[np.zeros_like(a) for a in params.w_e],
            psi=np.zeros_like(params.psi),
            head=None if params.head is None else np.zeros_like(params.head),
        )


def backward(
    state: EmbeddingState,
    ops: PropagationOperators,
    params: ModelParams,
    variant: VariantKind,
    d_z_final: np.ndarray,
    d_y_final: Optional[np.ndarray] = None,
    d_psi: Optional[np.ndarray] = None,
    d_head: Optional[np.ndarray] = None,
) -> ParamGrads:
    """Reverse-mode gradients for every weight matrix.

    Walks the layers backwards, undoing the Y update before the Z update
    of the same layer; for the base variant the Y update's B_e Z(k+1)
    term feeds extra gradient back into Z(k+1).  psi/head gradients are
    computed by the scoring/classification heads and passed through so
    the result covers the full parameter set.
    """
    if state.layers != params.layers or not state.agg_z:
        raise DataError("forward caches missing or layer counts disagree")
    grads = ParamGrads.zeros_like(params)
    if d_psi is not None:
        grads.psi = np.asarray(d_psi, dtype=np.float64)
    if d_head is not None:
        if params.head is None:
            raise DataError("head gradient supplied but params have no head")
        grads.head = np.asarray(d_head, dtype=np.float64)

    dz = np.asarray(d_z_final, dtype=np.float64)
    if d_y_final is not None:
        dy = np.asarray(d_y_final, dtype=np.float64)
    else:
        dy = np.zeros_like(state.y[-1])
    for k in reversed(range(params.layers)):
        gy = dy * state.deriv_y[k]
        grads.w_e[k] = state.agg_y[k].T @ gy
        dv = gy @ params.w_e[k].T
        dy_prev = ops.s_e.T @ dv
        if ops.b_e is not None:
            dz = dz + ops.b_e.T @ dv
        gz = dz * state.deriv_z[k]
        grads.w[k] = state.agg_z[k].T @ gz
        du = gz @ params.w[k].T
        dz_prev = ops.s_v.T @ du
        if ops.b_v is not None:
            dy_prev = dy_prev + ops.b_v.T @ du
        dz, dy = dz_prev, dy_prev
    return grads


@dataclass
class OptimizerState:
    """First/second moment buffers (adam) or nothing (sgd), keyed like named_arrays."""

    kind: str
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def init_optimizer(kind: str, params: ModelParams) -> OptimizerState:
    if kind not in OPTIMIZERS:
        raise ConfigError(f"unknown optimizer {kind!r}; expected one of {OPTIMIZERS}")
    state = OptimizerState(kind=kind)
    if kind == "adam":
        for name, a in params.named_arrays():
            state.m[name] = np.zeros_like(a)
            state.v[name] = np.zeros_like(a)
    return state


def optimizer_step(
    opt: OptimizerState,
    params: ModelParams,
    grads: ParamGrads,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """In-place parameter update; lr=0 is an exact no-op on the weights."""
    named_grads = dict(grads.named_arrays())
    if opt.kind == "sgd":
        for name, a in params.named_arrays():
            a -= lr * named_grads[name]
        return
    opt.t += 1
    for name, a in params.named_arrays():
        g = named_grads[name]
        opt.m[name] = beta1 * opt.m[name] + (1.0 - beta1) * g
        opt.v[name] = beta2 * opt.v[name] + (1.0 - beta2) * g * g
        m_hat = opt.m[name] / (1.0 - beta1**opt.t)
        v_hat = opt.v[name] / (1.0 - beta2**opt.t)
        a -= lr * m_hat / (np.sqrt(v_hat) + eps)


def _score_examples(
    z_final: np.ndarray,
    examples: Sequence[tuple[int, ...]],
    cfg: TrainConfig,
    params: ModelParams,
    variant: VariantKind,
    rng: Optional[np.random.Generator],
    training: bool,
) -> tuple[np.ndarray, list[dict]]:
    """Score every vertex set; caches carry what gradient distribution needs."""
    scores = np.empty(len(examples))
    caches: list[dict] = []
    for t, members in enumerate(examples):
        idx = list(members)
        rows = z_final[idx]
        cache: dict = {"idx": idx}
        if cfg.score_mode == "dependent":
            y_c = rows.mean(axis=0)
            cat = np.concatenate([rows, np.repeat(y_c[np.newaxis, :], len(idx), axis=0)], axis=1)
            x, deriv = activate(
                variant.sigma_v, cat @ params.psi, rng, training, variant.rrelu_range
            )
            cache.update(cat=cat, deriv=deriv, rows=x)
        else:
            cache.update(rows=rows)
        scores[t] = score_vertex_set(cache["rows"], cfg.score_fn, normalize=cfg.normalize)
        caches.append(cache)
    return scores, caches


def _distribute_score_grads(
    caches: list[dict],
    d_scores: np.ndarray,
    z_shape: tuple[int, int],
    cfg: TrainConfig,
    params: ModelParams,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Turn per-example score gradients into gradients on Z(final) and psi."""
    d_z = np.zeros(z_shape)
    d_psi = np.zeros_like(params.psi) if cfg.score_mode == "dependent" else None
    d = z_shape[1]
    for cache, ds in zip(caches, d_scores):
        _, g_rows = _score_vertex_set_grad(cache["rows"], cfg.score_fn, cfg.normalize)
        g_rows = g_rows * ds
        idx = cache["idx"]
        if cfg.score_mode == "dependent":
            g_pre = g_rows * cache["deriv"]
            d_psi += cache["cat"].T @ g_pre
            g_cat = g_pre @ params.psi.T
            np.add.at(d_z, idx, g_cat[:, :d])
            g_yc = g_cat[:, d:].sum(axis=0) / len(idx)  # mean over members
            np.add.at(d_z, idx, np.broadcast_to(g_yc, (len(idx), d)))
        else:
            np.add.at(d_z, idx, g_rows)
    return d_z, d_psi


@dataclass
class TrainState:
    """Everything a finished (or halted) run carries."""

    params: ModelParams
    optimizer: OptimizerState
    epoch: int
    log: list[tuple[float, float]]
    wall_ms: list[float]
    rng: np.random.Generator
    ops: PropagationOperators
    z0: np.ndarray
    y0: np.ndarray
    variant: VariantKind
    final: Optional[EmbeddingState] = None


def train(
    g: Hypergraph,
    cfg: TrainConfig,
    task: str = "hyperedge-pred",
    data=None,
    eval_data=None,
    z0=None,
    y0=None,
) -> TrainState:
    """Full-batch training for hyperedge prediction or node classification.

    ``data`` is a LabeledHyperedgeSet for hyperedge prediction (built
    from the graph's own edges when omitted) or a (labels, mask) pair
    for node classification.  ``eval_data`` swaps the per-epoch logged
    metric onto held-out examples (a LabeledHyperedgeSet) or a held-out
    mask.  The log holds one (loss, metric) pair per epoch and is
    bitwise reproducible for a fixed seed; a non-finite loss halts with
    the offending epoch attached.
    """
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}; expected one of {TASKS}")
    variant = cfg.variant
    rng = np.random.default_rng(cfg.seed)

    rank = max(1, min(cfg.feature_rank, g.num_nodes))
    if z0 is None:
        z0 = init_node_features(g, rank, rng=rng)
    else:
        z0 = np.asarray(z0, dtype=np.float64)
    if y0 is None:
        y0 = init_hyperedge_features(g, z0, rank, rng=rng)
    else:
        y0 = np.asarray(y0, dtype=np.float64)

    n_classes = None
    labels = mask = metric_mask = None
    labeled = None
    if task == "node-class":
        if data is None:
            raise DataError("node classification needs (labels, mask) data")
        labels, mask = data
        labels = np.asarray(labels)
        mask = np.asarray(mask, dtype=bool)
        valid = labels[labels >= 0]
        if valid.size == 0:
            raise DataError("no labeled nodes")
        n_classes = int(valid.max()) + 1
        metric_mask = mask if eval_data is None else np.asarray(eval_data, dtype=bool)
    else:
        if data is None:
            data = build_labeled_set(g, cfg.alpha, rng)
        labeled = data
        examples = labeled.examples
        ex_labels = labeled.labels

    dims_z, dims_y = default_dims(z0.shape[1], y0.shape[1], cfg.layers, cfg.width)
    params = init_params(dims_z, dims_y, variant, rng=rng, n_classes=n_classes)
    ops = build_operators(g, variant)
    opt = init_optimizer(cfg.optimizer, params)
    state = TrainState(
        params=params,
        optimizer=opt,
        epoch=0,
        log=[],
        wall_ms=[],
        rng=rng,
        ops=ops,
        z0=z0,
        y0=y0,
        variant=variant,
    )

    for epoch in range(cfg.epochs):
        t_start = time.perf_counter()
        st = forward(ops, params, z0, y0, variant, rng=rng, training=True)
        if task == "hyperedge-pred":
            scores, caches = _score_examples(
                st.z_final, examples, cfg, params, variant, rng, training=True
            )
            loss, d_scores = hyperedge_bce_loss(scores, ex_labels)
            _check_finite(loss, epoch, state)
            d_z, d_psi = _distribute_score_grads(
                caches, d_scores, st.z_final.shape, cfg, params
            )
            grads = backward(st, ops, params, variant, d_z, d_psi=d_psi)
            if eval_data is None:
                metric = auc(scores, ex_labels)
            else:
                eval_scores, _ = _score_examples(
                    st.z_final, eval_data.examples, cfg, params, variant, None, training=False
                )
                metric = auc(eval_scores, eval_data.labels)
        else:
            logits = st.z_final @ params.head
            loss, d_logits = node_ce_loss(logits, labels, mask)
            _check_finite(loss, epoch, state)
            d_z = d_logits @ params.head.T
            d_head = st.z_final.T @ d_logits
            grads = backward(st, ops, params, variant, d_z, d_head=d_head)
            metric = multiclass_auc(softmax(logits, axis=1), labels, metric_mask)
        optimizer_step(opt, params, grads, cfg.lr)
        state.epoch = epoch + 1
        state.log.append((float(loss), float(metric)))
        state.wall_ms.append((time.perf_counter() - t_start) * 1000.0)

    state.final = forward(ops, params, z0, y0, variant, training=False)
    return state


def _check_finite(loss: float, epoch: int, state: TrainState) -> None:
    if not np.isfinite(loss):
        err = NumericError(f"non-finite loss {loss} at epoch {epoch}", epoch=epoch)
        err.state = state
        raise err
