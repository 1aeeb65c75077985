"""A graph neural network whose node states are intervals in [0, 1].

Each node carries an interval per hidden dimension.  A layer updates node v
by meeting its self state (scaled by 1 + epsilon) with the meet-aggregate of
its neighbors' states, then passing the result through an MLP whose paired
output halves are squashed by sigmoids and re-ordered into a valid interval:

    h_v  <-  interval(MLP(meet((1 + eps) * h_v, aggregate({h_u: u ~ v}))))

Graph-level readout concatenates per-layer node sums (or averages), applies
dropout, and classifies with a single affine map.  Interval validity
(0 <= lo <= hi <= 1) is asserted exactly after every stage of every layer;
these checks are always on.

Isolated nodes aggregate their own previous state (their padded neighbor row
points back at them), which keeps the aggregation total without special
cases downstream.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .autodiff import BatchNormState, Tape, Tensor
from .graphs import Dataset, normalize_features
from .intervals import Aggregator

__all__ = [
    "ModelConfig",
    "GraphBatch",
    "IntervalGNN",
    "IntervalStateError",
    "BatchBuilder",
    "prepare_batch",
    "predict",
    "accuracy",
    "eval_batches",
    "batch_accuracy",
]

READOUTS = ("sum", "avg")


class IntervalStateError(RuntimeError):
    """A node state stopped being a valid interval in [0, 1]."""


def _check_state(arr: np.ndarray, where: str) -> None:
    lo, hi = arr[..., 0], arr[..., 1]
    ok = (0.0 <= lo) & (lo <= hi) & (hi <= 1.0)
    if not ok.all():
        bad = int((~ok).sum())
        raise IntervalStateError(f"{bad} invalid interval state(s) after {where}")


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    """Architecture and input-space description.

    ``feature_dim`` counts interval-valued input features (normalized to
    [0, 1]); ``tag_vocab_size`` one-hot tags are appended as degenerate
    intervals, so layer 0 states have feature_dim + tag_vocab_size
    dimensions.  ``epsilon_init`` seeds the per-layer self-weight
    1 + epsilon; learnable epsilons become parameters.
    """

    num_classes: int
    feature_dim: int
    tag_vocab_size: int
    num_layers: int = 5
    hidden_dim: int = 32
    mlp_hidden_layers: int = 2
    aggregator: Aggregator = Aggregator.AGR_NEW
    epsilon_init: float = 0.0
    epsilon_learnable: bool = False
    readout: str = "sum"
    dropout: float = 0.5

    def __post_init__(self) -> None:
        if self.num_classes < 2:
            raise ValueError("a classifier needs at least two classes")
        if self.feature_dim < 0 or self.tag_vocab_size < 1:
            raise ValueError("invalid input dimensions")
        if self.num_layers < 1 or self.hidden_dim < 1 or self.mlp_hidden_layers < 0:
            raise ValueError("invalid architecture sizes")
        if self.readout not in READOUTS:
            raise ValueError(f"readout must be one of {READOUTS}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")

    @property
    def input_dim(self) -> int:
        return self.feature_dim + self.tag_vocab_size

    @property
    def readout_dim(self) -> int:
        return 2 * (self.input_dim + self.num_layers * self.hidden_dim)


# ---------------------------------------------------------------------------
# batching
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class GraphBatch:
    """A block of graphs flattened into one node table.

    ``x0`` holds layer-0 interval states [total_nodes, input_dim, 2];
    ``nbr_idx``/``nbr_mask`` form the padded neighbor table (isolated nodes
    point at themselves); ``segments`` maps each node to its graph slot.
    """

    x0: np.ndarray
    nbr_idx: np.ndarray
    nbr_mask: np.ndarray
    segments: np.ndarray
    labels: np.ndarray
    node_counts: np.ndarray

    @property
    def num_graphs(self) -> int:
        return len(self.labels)


class BatchBuilder:
    """Precomputes each graph's node block once so that repeated batch
    assembly (every epoch and every evaluation pass) reduces to offset
    arithmetic and concatenation.

    Interval features are normalized with the dataset's fitted statistics;
    tags become one-hot degenerate intervals ([1, 1] at the tag's slot,
    [0, 0] elsewhere).  Isolated nodes point at themselves in the neighbor
    table so their aggregation is an identity.
    """

    def __init__(self, ds: Dataset):
        if ds.feature_dim > 0 and ds.norm_stats is None:
            raise ValueError("dataset has interval features but no normalization stats")
        self.ds = ds
        self._x: list[np.ndarray] = []
        self._idx: list[np.ndarray] = []  # graph-local padded neighbor tables
        self._mask: list[np.ndarray] = []
        self._labels = np.array([g.label for g in ds.graphs], dtype=np.int64)
        self._counts = np.array([g.num_nodes for g in ds.graphs], dtype=np.int64)
        for gi, g in enumerate(ds.graphs):
            n = g.num_nodes
            onehot = np.zeros((n, ds.tag_vocab_size, 2), dtype=np.float64)
            onehot[np.arange(n), g.node_tags, :] = 1.0
            if ds.feature_dim > 0:
                block = np.concatenate([normalize_features(ds, gi), onehot], axis=1)
            else:
                block = onehot
            _check_state(block, "input assembly")
            self._x.append(block)
            width = max(1, max(len(nbrs) for nbrs in g.adjacency))
            idx = np.zeros((n, width), dtype=np.int64)
            mask = np.zeros((n, width), dtype=bool)
            for v, nbrs in enumerate(g.adjacency):
                entries = nbrs if nbrs else (v,)
                idx[v, : len(entries)] = entries
                mask[v, : len(entries)] = True
            self._idx.append(idx)
            self._mask.append(mask)

    def batch(self, indices) -> GraphBatch:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size == 0:
            raise ValueError("a batch needs at least one graph")
        counts = self._counts[indices]
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        total = int(counts.sum())
        width = max(self._idx[int(gi)].shape[1] for gi in indices)
        nbr_idx = np.zeros((total, width), dtype=np.int64)
        nbr_mask = np.zeros((total, width), dtype=bool)
        for gi, off, n in zip(indices, offsets, counts):
            idx, mask = self._idx[int(gi)], self._mask[int(gi)]
            w = idx.shape[1]
            nbr_idx[off : off + n, :w] = idx + off
            nbr_mask[off : off + n, :w] = mask
        return GraphBatch(
            x0=np.concatenate([self._x[int(gi)] for gi in indices], axis=0),
            nbr_idx=nbr_idx,
            nbr_mask=nbr_mask,
            segments=np.repeat(np.arange(indices.size, dtype=np.int64), counts),
            labels=self._labels[indices],
            node_counts=counts,
        )

    def chunks(self, indices, chunk: int = 128) -> list[GraphBatch]:
        """Fixed evaluation batches for an index set."""
        indices = np.asarray(indices, dtype=np.int64)
        return [self.batch(indices[start : start + chunk]) for start in range(0, indices.size, chunk)]


def prepare_batch(ds: Dataset, indices) -> GraphBatch:
    """Assemble the flattened node table for the given graph indices (a
    one-shot :class:`BatchBuilder`)."""
    return BatchBuilder(ds).batch(indices)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

class _Linear:
    """Affine parameters initialized uniformly in +-1/sqrt(fan_in)."""

    def __init__(self, fan_in: int, fan_out: int, rng: np.random.Generator | None):
        bound = 1.0 / np.sqrt(fan_in)
        if rng is None:
            self.w = Tensor(np.zeros((fan_in, fan_out)))
            self.b = Tensor(np.zeros(fan_out))
        else:
            self.w = Tensor(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.b = Tensor(rng.uniform(-bound, bound, size=fan_out))

    def params(self) -> list[Tensor]:
        return [self.w, self.b]


class _IntervalMLP:
    """Linear -> batchnorm -> relu blocks, then a final linear producing the
    2*hidden_dim endpoint candidates."""

    def __init__(self, fan_in: int, hidden: int, n_hidden_layers: int, rng):
        self.hidden_linears: list[_Linear] = []
        self.bn_gammas: list[Tensor] = []
        self.bn_betas: list[Tensor] = []
        self.bn_states: list[BatchNormState] = []
        width = fan_in
        for _ in range(n_hidden_layers):
            self.hidden_linears.append(_Linear(width, hidden, rng))
            self.bn_gammas.append(Tensor(np.ones(hidden)))
            self.bn_betas.append(Tensor(np.zeros(hidden)))
            self.bn_states.append(BatchNormState.fresh(hidden))
            width = hidden
        self.out = _Linear(width, 2 * hidden, rng)

    def params(self) -> list[Tensor]:
        out: list[Tensor] = []
        for lin, gamma, beta in zip(self.hidden_linears, self.bn_gammas, self.bn_betas):
            out.extend(lin.params())
            out.extend([gamma, beta])
        out.extend(self.out.params())
        return out

    def forward(self, tape: Tape, x: Tensor, train: bool) -> Tensor:
        for lin, gamma, beta, state in zip(self.hidden_linears, self.bn_gammas, self.bn_betas, self.bn_states):
            x = ad.linear(tape, x, lin.w, lin.b)
            x = ad.batchnorm(tape, x, gamma, beta, state, train)
            x = ad.relu(tape, x)
        return ad.linear(tape, x, self.out.w, self.out.b)


class IntervalGNN:
    """The interval-state graph network: parameters, forward pass, loss.

    Construction with an rng draws initial weights (aggregator-independent,
    so equal seeds give bit-identical starts across aggregation variants);
    ``rng=None`` zero-initializes, for loading checkpoints.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator | None):
        self.config = config
        self.mlps: list[_IntervalMLP] = []
        width = config.input_dim
        for _ in range(config.num_layers):
            self.mlps.append(_IntervalMLP(2 * width, config.hidden_dim, config.mlp_hidden_layers, rng))
            width = config.hidden_dim
        self.classifier = _Linear(config.readout_dim, config.num_classes, rng)
        eps0 = np.asarray(config.epsilon_init, dtype=np.float64)
        self.epsilons = [Tensor(eps0.copy()) for _ in range(config.num_layers)]
        self.last_forward_stats: dict[str, float] = {}

    def params(self) -> list[Tensor]:
        out: list[Tensor] = []
        for mlp in self.mlps:
            out.extend(mlp.params())
        out.extend(self.classifier.params())
        if self.config.epsilon_learnable:
            out.extend(self.epsilons)
        return out

    # -- forward ------------------------------------------------------------

    def _layer(self, tape: Tape, h: Tensor, batch: GraphBatch, k: int, train: bool) -> Tensor:
        cfg = self.config
        one_plus = ad.add_const(tape, self.epsilons[k], 1.0)
        scaled = ad.scale(tape, h, one_plus)
        s_lo, s_hi = ad.take_last(tape, scaled, 0), ad.take_last(tape, scaled, 1)
        lo = ad.clip01(tape, ad.minimum(tape, s_lo, s_hi))
        hi = ad.clip01(tape, ad.maximum(tape, s_lo, s_hi))
        self_state = ad.stack_last(tape, lo, hi)
        _check_state(self_state.data, f"self scaling in layer {k + 1}")

        agg = ad.interval_meet_aggregate(tape, h, batch.nbr_idx, batch.nbr_mask, cfg.aggregator)
        _check_state(agg.data, f"neighbor aggregation in layer {k + 1}")
        if cfg.aggregator is Aggregator.AGR_NEW:
            self.last_forward_stats[f"widened_frac_layer{k + 1}"] = float(
                (agg.data[..., 1] == 1.0).mean()
            )

        met = ad.interval_meet_pair(tape, self_state, agg, cfg.aggregator)
        _check_state(met.data, f"self/neighbor meet in layer {k + 1}")

        n = met.data.shape[0]
        x = ad.reshape(tape, met, (n, met.data.shape[1] * 2))
        x = self.mlps[k].forward(tape, x, train)
        a = ad.slice_cols(tape, x, 0, cfg.hidden_dim)
        b = ad.slice_cols(tape, x, cfg.hidden_dim, 2 * cfg.hidden_dim)
        sa, sb = ad.sigmoid(tape, a), ad.sigmoid(tape, b)
        new_lo = ad.minimum(tape, sa, sb)
        new_hi = ad.maximum(tape, sa, sb)
        out = ad.stack_last(tape, new_lo, new_hi)
        _check_state(out.data, f"state update in layer {k + 1}")
        return out

    def forward(
        self,
        tape: Tape,
        batch: GraphBatch,
        train: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Class logits [num_graphs, num_classes]."""
        cfg = self.config
        _check_state(batch.x0, "batch input")
        h = Tensor(batch.x0)
        states = [h]
        for k in range(cfg.num_layers):
            h = self._layer(tape, h, batch, k, train)
            states.append(h)

        parts = []
        for s in states:
            n, d = s.data.shape[0], s.data.shape[1]
            flat = ad.reshape(tape, s, (n, 2 * d))
            pooled = ad.segment_sum(tape, flat, batch.segments, batch.num_graphs)
            if cfg.readout == "avg":
                pooled = ad.mul_const(tape, pooled, (1.0 / batch.node_counts)[:, None])
            parts.append(pooled)
        readout = ad.concat(tape, parts, axis=1)
        readout = ad.dropout(tape, readout, cfg.dropout, rng, train)
        return ad.linear(tape, readout, self.classifier.w, self.classifier.b)

    def loss(self, tape: Tape, batch: GraphBatch, train: bool, rng=None) -> tuple[Tensor, Tensor]:
        """(summed cross-entropy, logits) for a batch."""
        logits = self.forward(tape, batch, train, rng)
        return ad.softmax_xent(tape, logits, batch.labels), logits

    # -- persistence ----------------------------------------------------------

    _CONFIG_SCALARS = (
        "num_classes",
        "feature_dim",
        "tag_vocab_size",
        "num_layers",
        "hidden_dim",
        "mlp_hidden_layers",
        "epsilon_init",
        "epsilon_learnable",
        "dropout",
    )

    def named_arrays(self) -> dict[str, np.ndarray]:
        """Every parameter, batchnorm statistic, and config field by name."""
        out: dict[str, np.ndarray] = {}
        for field in self._CONFIG_SCALARS:
            out[f"config/{field}"] = np.asarray(getattr(self.config, field))
        out["config/aggregator"] = np.asarray(self.config.aggregator.value)
        out["config/readout"] = np.asarray(self.config.readout)
        for k, mlp in enumerate(self.mlps):
            prefix = f"layer{k}"
            out[f"{prefix}/epsilon"] = self.epsilons[k].data
            for i, (lin, gamma, beta, state) in enumerate(
                zip(mlp.hidden_linears, mlp.bn_gammas, mlp.bn_betas, mlp.bn_states)
            ):
                out[f"{prefix}/lin{i}/w"] = lin.w.data
                out[f"{prefix}/lin{i}/b"] = lin.b.data
                out[f"{prefix}/bn{i}/gamma"] = gamma.data
                out[f"{prefix}/bn{i}/beta"] = beta.data
                out[f"{prefix}/bn{i}/running_mean"] = state.running_mean
                out[f"{prefix}/bn{i}/running_var"] = state.running_var
                out[f"{prefix}/bn{i}/update_count"] = np.asarray(state.update_count)
            out[f"{prefix}/out/w"] = mlp.out.w.data
            out[f"{prefix}/out/b"] = mlp.out.b.data
        out["classifier/w"] = self.classifier.w.data
        out["classifier/b"] = self.classifier.b.data
        return out

    def save(self, path) -> Path:
        return ad.save_checkpoint(path, self.named_arrays())

    @classmethod
    def load(cls, path) -> "IntervalGNN":
        arrays = ad.load_checkpoint(path)
        try:
            config = ModelConfig(
                num_classes=int(arrays["config/num_classes"]),
                feature_dim=int(arrays["config/feature_dim"]),
                tag_vocab_size=int(arrays["config/tag_vocab_size"]),
                num_layers=int(arrays["config/num_layers"]),
                hidden_dim=int(arrays["config/hidden_dim"]),
                mlp_hidden_layers=int(arrays["config/mlp_hidden_layers"]),
                aggregator=Aggregator.from_name(str(arrays["config/aggregator"])),
                epsilon_init=float(arrays["config/epsilon_init"]),
                epsilon_learnable=bool(arrays["config/epsilon_learnable"]),
                readout=str(arrays["config/readout"]),
                dropout=float(arrays["config/dropout"]),
            )
        except KeyError as exc:
            raise ad.CheckpointError(f"checkpoint is missing {exc}") from exc
        model = cls(config, rng=None)
        model._load_arrays(arrays)
        return model

    def _load_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        def fetch(name: str, like: np.ndarray) -> np.ndarray:
            if name not in arrays:
                raise ad.CheckpointError(f"checkpoint is missing array '{name}'")
            got = np.asarray(arrays[name], dtype=np.float64)
            if got.shape != like.shape:
                raise ad.CheckpointError(
                    f"checkpoint array '{name}' has shape {got.shape}, expected {like.shape}"
                )
            return got

        for k, mlp in enumerate(self.mlps):
            prefix = f"layer{k}"
            self.epsilons[k].data = fetch(f"{prefix}/epsilon", self.epsilons[k].data)
            for i, (lin, gamma, beta, state) in enumerate(
                zip(mlp.hidden_linears, mlp.bn_gammas, mlp.bn_betas, mlp.bn_states)
            ):
                lin.w.data = fetch(f"{prefix}/lin{i}/w", lin.w.data)
                lin.b.data = fetch(f"{prefix}/lin{i}/b", lin.b.data)
                gamma.data = fetch(f"{prefix}/bn{i}/gamma", gamma.data)
                beta.data = fetch(f"{prefix}/bn{i}/beta", beta.data)
                state.running_mean = fetch(f"{prefix}/bn{i}/running_mean", state.running_mean)
                state.running_var = fetch(f"{prefix}/bn{i}/running_var", state.running_var)
                state.update_count = int(arrays.get(f"{prefix}/bn{i}/update_count", 0))
            mlp.out.w.data = fetch(f"{prefix}/out/w", mlp.out.w.data)
            mlp.out.b.data = fetch(f"{prefix}/out/b", mlp.out.b.data)
        self.classifier.w.data = fetch("classifier/w", self.classifier.w.data)
        self.classifier.b.data = fetch("classifier/b", self.classifier.b.data)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_batches(ds: Dataset, indices, chunk: int = 128) -> list[GraphBatch]:
    """The evaluation batches for a fixed index set, for reuse across epochs."""
    return BatchBuilder(ds).chunks(indices, chunk)


def batch_accuracy(model: IntervalGNN, batches: list[GraphBatch]) -> float:
    """Fraction of correctly classified graphs over prepared batches,
    with the model in evaluation mode (running batchnorm statistics, no
    dropout)."""
    correct = total = 0
    for batch in batches:
        logits = model.forward(Tape(), batch, train=False)
        correct += int((np.argmax(logits.data, axis=1) == batch.labels).sum())
        total += batch.labels.size
    if total == 0:
        raise ValueError("accuracy needs at least one graph")
    return correct / total


def predict(model: IntervalGNN, ds: Dataset, indices, chunk: int = 128) -> np.ndarray:
    """Predicted class per graph, evaluated in chunks with the model in
    evaluation mode (running batchnorm statistics, no dropout)."""
    indices = np.asarray(indices, dtype=np.int64)
    preds = []
    for start in range(0, indices.size, chunk):
        batch = prepare_batch(ds, indices[start : start + chunk])
        logits = model.forward(Tape(), batch, train=False)
        preds.append(np.argmax(logits.data, axis=1))
    return np.concatenate(preds) if preds else np.zeros(0, dtype=np.int64)


def accuracy(model: IntervalGNN, ds: Dataset, indices, chunk: int = 128) -> float:
    """Fraction of graphs whose predicted class matches the label."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise ValueError("accuracy needs at least one graph")
    preds = predict(model, ds, indices, chunk)
    labels = np.array([ds.graphs[int(i)].label for i in indices])
    return float((preds == labels).mean())
