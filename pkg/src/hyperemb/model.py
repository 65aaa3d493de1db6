"""Layer family for joint node/hyperedge embeddings.

The base layer couples the two streams:

    Z(k+1) = sigma_v((S_v Z(k) + B_v Y(k)) W(k))
    Y(k+1) = sigma_e((S_e Y(k) + B_e Z(k+1)) W_e(k))

where the Y update reads the freshly computed Z(k+1).  The four variants
(p2, plusplus, wt, h2) swap in different propagation operators and drop
the cross-stream B terms, so their streams evolve independently.  All
operators are precomputed sparse matrices, built once per (graph,
variant) and reused for every epoch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.special import erf

from .errors import ConfigError, DataError
from .features import RngLike, as_rng
from .hypergraph import Hypergraph, canonical, incidence_matrix, transition_matrices

VARIANT_TAGS = ("base", "p2", "plusplus", "wt", "h2")
ACTIVATION_TAGS = ("tanh", "leaky-relu", "gelu", "selu", "rrelu")

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772
LEAKY_SLOPE = 0.01
RRELU_RANGE = (1.0 / 8.0, 1.0 / 3.0)


@dataclass(frozen=True)
class VariantKind:
    """Which operator family to build and which nonlinearities to apply."""

    tag: str = "base"
    sigma_v: str = "tanh"
    sigma_e: str = "tanh"
    rrelu_range: tuple[float, float] = RRELU_RANGE

    def __post_init__(self):
        object.__setattr__(self, "tag", str(self.tag).lower())
        if self.tag not in VARIANT_TAGS:
            raise ConfigError(f"unknown variant {self.tag!r}; expected one of {VARIANT_TAGS}")
        for name in ("sigma_v", "sigma_e"):
            a = str(getattr(self, name)).lower()
            object.__setattr__(self, name, a)
            if a not in ACTIVATION_TAGS:
                raise ConfigError(f"unknown activation {a!r}; expected one of {ACTIVATION_TAGS}")
        lo, hi = self.rrelu_range
        if not 0 <= lo < hi < 1:
            raise ConfigError(f"rrelu slope range must satisfy 0 <= lo < hi < 1, got {self.rrelu_range}")

    @property
    def coupled(self) -> bool:
        return self.tag == "base"


def activate(
    tag: str,
    x: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    training: bool = False,
    rrelu_range: tuple[float, float] = RRELU_RANGE,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the tagged nonlinearity; return (value, elementwise derivative).

    The derivative is evaluated at x and cached by the caller for the
    backward pass.  rrelu draws per-element negative slopes from ``rng``
    in training mode and uses the fixed midpoint slope in eval mode.
    """
    if tag == "tanh":
        t = np.tanh(x)
        return t, 1.0 - t * t
    if tag == "leaky-relu":
        pos = x > 0
        deriv = np.where(pos, 1.0, LEAKY_SLOPE)
        return np.where(pos, x, LEAKY_SLOPE * x), deriv
    if tag == "gelu":
        cdf = 0.5 * (1.0 + erf(x / np.sqrt(2.0)))
        pdf = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
        return x * cdf, cdf + x * pdf
    if tag == "selu":
        pos = x > 0
        ex = np.exp(np.minimum(x, 0.0))
        value = SELU_LAMBDA * np.where(pos, x, SELU_ALPHA * (ex - 1.0))
        deriv = SELU_LAMBDA * np.where(pos, 1.0, SELU_ALPHA * ex)
        return value, deriv
    if tag == "rrelu":
        lo, hi = rrelu_range
        if training:
            if rng is None:
                raise ConfigError("rrelu in training mode needs a random generator")
            slope = rng.uniform(lo, hi, size=x.shape)
        else:
            slope = (lo + hi) / 2.0
        pos = x >= 0
        deriv = np.where(pos, 1.0, slope)
        return np.where(pos, x, slope * x), deriv
    raise ConfigError(f"unknown activation {tag!r}")


@dataclass(frozen=True)
class PropagationOperators:
    """Precomputed sparse operators for one (graph, variant) pair.

    b_v and b_e are None for the decoupled variants.
    """

    tag: str
    s_v: sparse.csr_array
    s_e: sparse.csr_array
    b_v: Optional[sparse.csr_array] = None
    b_e: Optional[sparse.csr_array] = None

    @property
    def num_nodes(self) -> int:
        return self.s_v.shape[0]

    @property
    def num_hyperedges(self) -> int:
        return self.s_e.shape[0]


def build_operators(g: Hypergraph, variant: VariantKind | str) -> PropagationOperators:
    """Assemble the sparse propagation operators for the given variant."""
    if isinstance(variant, str):
        variant = VariantKind(tag=variant)
    h = incidence_matrix(g)
    d = np.asarray(h.sum(axis=1)).reshape(-1)
    d_e = np.asarray(h.sum(axis=0)).reshape(-1)
    d_inv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
    de_inv = 1.0 / d_e
    p, p_e = transition_matrices(g)

    hd = canonical(h.multiply(d_inv[:, np.newaxis]))  # D^-1 H
    hde = canonical(h.multiply(de_inv[np.newaxis, :]))  # H De^-1
    hdd = canonical(hd.multiply(de_inv[np.newaxis, :]))  # D^-1 H De^-1

    tag = variant.tag
    if tag == "base":
        s_v = hd @ p_e @ hdd.T
        s_e = hde.T @ p @ hdd
        return PropagationOperators(
            tag, canonical(s_v), canonical(s_e), b_v=hd, b_e=canonical(hde.T)
        )
    if tag == "p2":
        s_v = hdd @ hd.T + p + p @ p
        s_e = hde.T @ hdd + p_e + p_e @ p_e
    elif tag == "plusplus":
        s_v = hd @ p_e @ hdd.T + p
        s_e = hde.T @ p @ hdd + p_e
    elif tag == "wt":
        s_v = hd @ p_e @ hd.T
        s_e = hde.T @ p @ hde
    elif tag == "h2":
        s_v = h @ h.T + p
        s_e = h.T @ h + p_e
    else:  # pragma: no cover - guarded by VariantKind
        raise ConfigError(f"unknown variant {tag!r}")
    return PropagationOperators(tag, canonical(s_v), canonical(s_e))


@dataclass
class ModelParams:
    """Learned weights: per-layer W / W_e, the psi projection, optional classifier head."""

    w: list[np.ndarray]
    w_e: list[np.ndarray]
    psi: np.ndarray
    head: Optional[np.ndarray] = None

    @property
    def layers(self) -> int:
        return len(self.w)

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        """Deterministic (name, array) listing of every weight matrix."""
        out = [(f"w_{k}", a) for k, a in enumerate(self.w)]
        out += [(f"we_{k}", a) for k, a in enumerate(self.w_e)]
        out.append(("psi", self.psi))
        if self.head is not None:
            out.append(("head", self.head))
        return out

    def copy(self) -> "ModelParams":
        return ModelParams(
            w=[a.copy() for a in self.w],
            w_e=[a.copy() for a in self.w_e],
            psi=self.psi.copy(),
            head=None if self.head is None else self.head.copy(),
        )


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def default_dims(
    f_z: int, f_y: int, layers: int, width: Optional[int] = None
) -> tuple[list[int], list[int]]:
    """Uniform layer widths: every hidden/output dim equals the node feature dim unless overridden."""
    if layers < 1:
        raise ConfigError(f"need at least one layer, got {layers}")
    width = f_z if width is None else int(width)
    if width < 1:
        raise ConfigError(f"layer width must be >= 1, got {width}")
    dims_z = [int(f_z)] + [width] * layers
    dims_y = [int(f_y)] + [width] * layers
    return dims_z, dims_y


def init_params(
    dims_z: Sequence[int],
    dims_y: Sequence[int],
    variant: VariantKind,
    rng: RngLike = 0,
    psi_dim: Optional[int] = None,
    n_classes: Optional[int] = None,
) -> ModelParams:
    """Seeded uniform(+-sqrt(6/(fan_in+fan_out))) weights for the whole stack.

    dims_z/dims_y list the widths of Z(0..L) and Y(0..L).  The base
    variant's Y update adds B_e Z(k+1) to S_e Y(k), which forces
    dims_y[k] == dims_z[k+1]; violations are rejected here rather than
    mid-forward.
    """
    rng = as_rng(rng)
    if len(dims_z) != len(dims_y) or len(dims_z) < 2:
        raise ConfigError(
            f"dims_z and dims_y must share a length >= 2, got {len(dims_z)} and {len(dims_y)}"
        )
    layers = len(dims_z) - 1
    if variant.coupled:
        for k in range(layers):
            if dims_y[k] != dims_z[k + 1]:
                raise ConfigError(
                    "base variant requires matching widths for S_e Y(k) + B_e Z(k+1): "
                    f"dims_y[{k}]={dims_y[k]} vs dims_z[{k + 1}]={dims_z[k + 1]}"
                )
    w = [_glorot(rng, dims_z[k], dims_z[k + 1]) for k in range(layers)]
    w_e = [_glorot(rng, dims_y[k], dims_y[k + 1]) for k in range(layers)]
    d_cat = dims_z[-1] + dims_y[-1]
    psi_dim = dims_z[-1] if psi_dim is None else int(psi_dim)
    if psi_dim < 1:
        raise ConfigError(f"psi output dim must be >= 1, got {psi_dim}")
    psi = _glorot(rng, d_cat, psi_dim)
    head = None
    if n_classes is not None:
        if n_classes < 2:
            raise ConfigError(f"classifier head needs >= 2 classes, got {n_classes}")
        head = _glorot(rng, dims_z[-1], n_classes)
    return ModelParams(w=w, w_e=w_e, psi=psi, head=head)


@dataclass
class EmbeddingState:
    """Per-layer embeddings plus the caches the backward pass consumes.

    z[k]/y[k] are the layer inputs and outputs (z[0] = input features);
    agg_z[k]/agg_y[k] are the pre-weight aggregates fed into W(k)/W_e(k);
    deriv_z[k]/deriv_y[k] are the activation derivatives at the layer-k
    pre-activations (rrelu's sampled slopes live inside these).
    """

    z: list[np.ndarray]
    y: list[np.ndarray]
    agg_z: list[np.ndarray]
    agg_y: list[np.ndarray]
    deriv_z: list[np.ndarray]
    deriv_y: list[np.ndarray]

    @property
    def layers(self) -> int:
        return len(self.agg_z)

    @property
    def z_final(self) -> np.ndarray:
        return self.z[-1]

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]


def forward(
    ops: PropagationOperators,
    params: ModelParams,
    z0: np.ndarray,
    y0: np.ndarray,
    variant: VariantKind,
    rng: RngLike = None,
    training: bool = False,
) -> EmbeddingState:
    """Run all layers, caching everything the backward pass needs."""
    z0 = np.asarray(z0, dtype=np.float64)
    y0 = np.asarray(y0, dtype=np.float64)
    if z0.ndim != 2 or z0.shape[0] != ops.num_nodes:
        raise DataError(f"z0 must be ({ops.num_nodes}, *), got {z0.shape}")
    if y0.ndim != 2 or y0.shape[0] != ops.num_hyperedges:
        raise DataError(f"y0 must be ({ops.num_hyperedges}, *), got {y0.shape}")
    if z0.shape[1] != params.w[0].shape[0]:
        raise DataError(
            f"z0 width {z0.shape[1]} does not match W(0) input dim {params.w[0].shape[0]}"
        )
    if y0.shape[1] != params.w_e[0].shape[0]:
        raise DataError(
            f"y0 width {y0.shape[1]} does not match W_e(0) input dim {params.w_e[0].shape[0]}"
        )
    if variant.tag != ops.tag:
        raise ConfigError(f"operators built for {ops.tag!r} but forward asked for {variant.tag!r}")
    rng = as_rng(rng) if training else None

    state = EmbeddingState(z=[z0], y=[y0], agg_z=[], agg_y=[], deriv_z=[], deriv_y=[])
    for k in range(params.layers):
        agg_z = ops.s_v @ state.z[k]
        if ops.b_v is not None:
            agg_z = agg_z + ops.b_v @ state.y[k]
        z_next, dz = activate(
            variant.sigma_v, agg_z @ params.w[k], rng, training, variant.rrelu_range
        )
        agg_y = ops.s_e @ state.y[k]
        if ops.b_e is not None:
            agg_y = agg_y + ops.b_e @ z_next
        y_next, dy = activate(
            variant.sigma_e, agg_y @ params.w_e[k], rng, training, variant.rrelu_range
        )
        state.z.append(z_next)
        state.y.append(y_next)
        state.agg_z.append(agg_z)
        state.agg_y.append(agg_y)
        state.deriv_z.append(dz)
        state.deriv_y.append(dy)
    return state


def dependent_embeddings(
    z_rows: np.ndarray, y_rows: np.ndarray, params: ModelParams, variant: VariantKind
) -> np.ndarray:
    """Batched psi([z_i ; y_e]): one output row per input row pair (eval-mode activation)."""
    z_rows = np.atleast_2d(np.asarray(z_rows, dtype=np.float64))
    y_rows = np.atleast_2d(np.asarray(y_rows, dtype=np.float64))
    if z_rows.shape[0] != y_rows.shape[0]:
        raise DataError(
            f"need matching row counts, got {z_rows.shape[0]} and {y_rows.shape[0]}"
        )
    cat = np.concatenate([z_rows, y_rows], axis=1)
    if cat.shape[1] != params.psi.shape[0]:
        raise DataError(
            f"concatenated width {cat.shape[1]} does not match psi input dim {params.psi.shape[0]}"
        )
    value, _ = activate(variant.sigma_v, cat @ params.psi, rrelu_range=variant.rrelu_range)
    return value


def hyperedge_dependent_embedding(
    z_i: np.ndarray, y_e: np.ndarray, params: ModelParams, variant: VariantKind
) -> np.ndarray:
    """psi over the concatenation of one node and one hyperedge embedding.

    The node need not belong to the hyperedge; any (z_i, y_e) pair is a
    valid query.
    """
    z_i = np.asarray(z_i, dtype=np.float64).reshape(1, -1)
    y_e = np.asarray(y_e, dtype=np.float64).reshape(1, -1)
    return dependent_embeddings(z_i, y_e, params, variant)[0]


def export_embedding_set(
    g: Hypergraph,
    state: EmbeddingState,
    params: ModelParams,
    node: int,
    variant: VariantKind,
) -> np.ndarray:
    """The node's hyperedge-dependent embeddings, one row per incident hyperedge.

    Rows follow ascending hyperedge index; a node in no hyperedge yields
    a 0-row matrix.  Row count always equals the node's hyperedge degree.
    """
    if not 0 <= node < g.num_nodes:
        raise DataError(f"node {node} outside [0, {g.num_nodes})")
    edges = g.node_edges[node]
    if not edges:
        return np.zeros((0, params.psi.shape[1]))
    z_rows = np.repeat(state.z_final[node][np.newaxis, :], len(edges), axis=0)
    y_rows = state.y_final[list(edges), :]
    return dependent_embeddings(z_rows, y_rows, params, variant)


def save_checkpoint(
    path, params: ModelParams, meta: Optional[dict] = None
) -> None:
    """Versioned .npz dump of every weight matrix plus a JSON metadata blob."""
    arrays = dict(params.named_arrays())
    arrays["format_version"] = np.asarray(1, dtype=np.int64)
    arrays["layer_count"] = np.asarray(params.layers, dtype=np.int64)
    arrays["meta_json"] = np.frombuffer(
        json.dumps(meta or {}, sort_keys=True).encode("utf-8"), dtype=np.uint8
    )
    np.savez(path, **arrays)


def load_checkpoint(path) -> tuple[ModelParams, dict]:
    """Bit-exact inverse of save_checkpoint."""
    try:
        blob = np.load(path)
    except FileNotFoundError:
        raise DataError(f"checkpoint {path} does not exist")
    except (OSError, ValueError) as exc:
        raise DataError(f"checkpoint {path} is not a readable archive ({exc})")
    with blob:
        version = int(blob["format_version"])
        if version != 1:
            raise DataError(f"unsupported checkpoint version {version}")
        layers = int(blob["layer_count"])
        w = [blob[f"w_{k}"] for k in range(layers)]
        w_e = [blob[f"we_{k}"] for k in range(layers)]
        psi = blob["psi"]
        head = blob["head"] if "head" in blob.files else None
        meta = json.loads(bytes(blob["meta_json"]).decode("utf-8"))
    return ModelParams(w=w, w_e=w_e, psi=psi, head=head), meta
