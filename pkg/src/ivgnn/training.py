"""Training loops, stratified cross-validation, aggregator comparison, and
the complexity benchmark.

Randomness is split into named streams per (seed, repeat, fold): stream 0
draws initial parameters and stream 1 drives epoch shuffling and dropout.
Because initialization never consults the aggregator, equal seeds give
bit-identical starting parameters across aggregation variants, making
comparisons controlled; the fold splits likewise depend only on the seed.

The "best" cross-validation accuracy follows the protocol of averaging the
per-epoch test-accuracy curve over folds and repeats and taking the maximum
over epochs; the reported std is the population standard deviation of the
per-(fold, repeat) accuracies at that shared best epoch.  Each fold report
additionally keeps the fold's own best epoch.

Evaluation purity is instrumented: batchnorm running statistics advance only
during training batches, and every fold asserts that the observed update
count equals the number of training batches times the number of batchnorm
layers before returning.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import time
from pathlib import Path

import numpy as np

from .autodiff import Adam, Tape, lr_schedule
from .graphs import Dataset, FoldSplit, fit_normalization, from_raw_graphs, stratified_kfold
from .intervals import Aggregator
from .model import BatchBuilder, IntervalGNN, ModelConfig, batch_accuracy, prepare_batch
from .synthetic import gen_er_graph

__all__ = [
    "TrainConfig",
    "FoldReport",
    "ExperimentSummary",
    "TrainingDivergedError",
    "train_fold",
    "train_single",
    "cross_validate",
    "compare_aggregators",
    "summarize_reports",
    "complexity_bench",
    "BenchRow",
    "linear_fit",
    "write_results_csv",
    "write_curves_csv",
    "write_summary_csv",
    "write_bench_csv",
    "format_summary_table",
]


class TrainingDivergedError(RuntimeError):
    """Training produced a non-finite value; the fold was aborted."""


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Optimization settings.  Defaults are desk-scale (epochs 100,
    repeats 1); larger studies raise them explicitly."""

    seed: int
    epochs: int = 100
    batch_size: int = 16
    base_lr: float = 0.01
    folds: int = 10
    repeats: int = 1
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.folds < 2:
            raise ValueError("cross-validation needs at least 2 folds")
        if self.repeats < 1 or self.jobs < 1:
            raise ValueError("repeats and jobs must be at least 1")


@dataclasses.dataclass(frozen=True)
class FoldReport:
    """Per-epoch accuracy trajectories of one (fold, repeat) run."""

    fold: int
    repeat: int
    train_acc: np.ndarray
    test_acc: np.ndarray
    train_loss: np.ndarray
    best_epoch: int
    best_test_acc: float
    bn_updates: int
    expected_bn_updates: int


@dataclasses.dataclass(frozen=True)
class ExperimentSummary:
    """Cross-validation outcome for one aggregation variant."""

    variant: str
    folds: int
    repeats: int
    epochs: int
    best_epoch: int
    mean_best_acc: float
    std_best_acc: float
    mean_train_curve: np.ndarray
    mean_test_curve: np.ndarray
    reports: tuple[FoldReport, ...]


def _require_compatible(ds: Dataset, model_cfg: ModelConfig) -> None:
    if (
        model_cfg.num_classes != ds.num_classes
        or model_cfg.feature_dim != ds.feature_dim
        or model_cfg.tag_vocab_size != ds.tag_vocab_size
    ):
        raise ValueError(
            "model config does not match the dataset: "
            f"classes {model_cfg.num_classes}/{ds.num_classes}, "
            f"features {model_cfg.feature_dim}/{ds.feature_dim}, "
            f"tags {model_cfg.tag_vocab_size}/{ds.tag_vocab_size}"
        )


def train_fold(
    ds: Dataset,
    split: FoldSplit,
    fold: int,
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    repeat: int = 0,
) -> FoldReport:
    """Train one fold: normalization is fit on the fold's training subset,
    parameters start from the (seed, repeat, fold) init stream, and batches
    are reshuffled each epoch from the train stream."""
    return train_single(ds, split, fold, model_cfg, train_cfg, repeat)[1]


def train_single(
    ds: Dataset,
    split: FoldSplit,
    fold: int,
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    repeat: int = 0,
) -> tuple[IntervalGNN, FoldReport]:
    """:func:`train_fold` that also returns the trained model."""
    _require_compatible(ds, model_cfg)
    train_idx = split.train_indices(fold)
    test_idx = split.test_indices(fold)
    ds_fold = fit_normalization(ds, train_idx) if ds.feature_dim > 0 else ds

    init_rng = np.random.default_rng([train_cfg.seed, repeat, fold, 0])
    train_rng = np.random.default_rng([train_cfg.seed, repeat, fold, 1])
    model = IntervalGNN(model_cfg, init_rng)
    opt = Adam(model.params(), lr=train_cfg.base_lr)
    # per-graph node blocks are training-invariant: build them once per fold
    builder = BatchBuilder(ds_fold)
    train_eval = builder.chunks(train_idx)
    test_eval = builder.chunks(test_idx)

    epochs = train_cfg.epochs
    train_acc = np.zeros(epochs)
    test_acc = np.zeros(epochs)
    train_loss = np.zeros(epochs)
    batches_per_epoch = 0
    for epoch in range(epochs):
        opt.lr = lr_schedule(train_cfg.base_lr, epoch)
        order = train_rng.permutation(train_idx)
        total_loss = 0.0
        batches_per_epoch = 0
        for start in range(0, order.size, train_cfg.batch_size):
            batch = builder.batch(order[start : start + train_cfg.batch_size])
            tape = Tape()
            try:
                loss, _ = model.loss(tape, batch, train=True, rng=train_rng)
                tape.backward(loss)
            except FloatingPointError as exc:
                raise TrainingDivergedError(
                    f"fold {fold}, repeat {repeat}, epoch {epoch}: {exc}"
                ) from exc
            opt.step()
            opt.zero_grad()
            total_loss += float(loss.data)
            batches_per_epoch += 1
        train_loss[epoch] = total_loss / order.size
        train_acc[epoch] = batch_accuracy(model, train_eval)
        test_acc[epoch] = batch_accuracy(model, test_eval)

    bn_updates = sum(state.update_count for mlp in model.mlps for state in mlp.bn_states)
    expected = epochs * batches_per_epoch * model_cfg.num_layers * model_cfg.mlp_hidden_layers
    if bn_updates != expected:
        raise RuntimeError(
            f"evaluation purity violated: {bn_updates} batchnorm updates, expected {expected}"
        )

    best_epoch = int(np.argmax(test_acc))
    report = FoldReport(
        fold=fold,
        repeat=repeat,
        train_acc=train_acc,
        test_acc=test_acc,
        train_loss=train_loss,
        best_epoch=best_epoch,
        best_test_acc=float(test_acc[best_epoch]),
        bn_updates=bn_updates,
        expected_bn_updates=expected,
    )
    return model, report


def summarize_reports(
    variant: str, train_cfg: TrainConfig, reports: list[FoldReport]
) -> ExperimentSummary:
    """Aggregate fold reports into mean curves and the shared-best-epoch
    accuracy statistics."""
    test_curves = np.stack([r.test_acc for r in reports])
    train_curves = np.stack([r.train_acc for r in reports])
    mean_test_curve = test_curves.mean(axis=0)
    best_epoch = int(np.argmax(mean_test_curve))
    at_best = test_curves[:, best_epoch]
    return ExperimentSummary(
        variant=variant,
        folds=train_cfg.folds,
        repeats=train_cfg.repeats,
        epochs=train_cfg.epochs,
        best_epoch=best_epoch,
        mean_best_acc=float(at_best.mean()),
        std_best_acc=float(at_best.std()),  # population std over fold x repeat
        mean_train_curve=train_curves.mean(axis=0),
        mean_test_curve=mean_test_curve,
        reports=tuple(reports),
    )


def cross_validate(ds: Dataset, model_cfg: ModelConfig, train_cfg: TrainConfig) -> ExperimentSummary:
    """Stratified k-fold cross-validation, repeated ``repeats`` times.

    Folds are independent, so with jobs > 1 they run on a thread pool;
    results are assembled in (repeat, fold) order either way and are
    identical to the single-threaded run.
    """
    _require_compatible(ds, model_cfg)
    split = stratified_kfold(ds, train_cfg.folds, train_cfg.seed)
    tasks = [(repeat, fold) for repeat in range(train_cfg.repeats) for fold in range(train_cfg.folds)]
    if train_cfg.jobs == 1:
        reports = [
            train_fold(ds, split, fold, model_cfg, train_cfg, repeat=repeat)
            for repeat, fold in tasks
        ]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=train_cfg.jobs) as pool:
            futures = [
                pool.submit(train_fold, ds, split, fold, model_cfg, train_cfg, repeat=repeat)
                for repeat, fold in tasks
            ]
            reports = [f.result() for f in futures]
    return summarize_reports(model_cfg.aggregator.value, train_cfg, reports)


def compare_aggregators(
    ds: Dataset, model_cfg: ModelConfig, train_cfg: TrainConfig
) -> list[ExperimentSummary]:
    """Cross-validate once per aggregation variant under identical seeds,
    splits, initial parameters, and batch orders."""
    summaries = []
    for variant in Aggregator:
        cfg = dataclasses.replace(model_cfg, aggregator=variant)
        summaries.append(cross_validate(ds, cfg, train_cfg))
    return summaries


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def write_results_csv(path, dataset_name: str, summaries: list[ExperimentSummary]) -> None:
    """One row per (variant, repeat, fold).  ``best_epoch`` is the variant's
    shared best epoch, so the summary mean is the arithmetic mean of the
    rows' best accuracies."""
    lines = ["dataset,variant,fold,repeat,best_epoch,best_test_acc,final_train_acc"]
    for summary in summaries:
        for r in summary.reports:
            lines.append(
                ",".join(
                    [
                        dataset_name,
                        summary.variant,
                        str(r.fold),
                        str(r.repeat),
                        str(summary.best_epoch),
                        _fmt(r.test_acc[summary.best_epoch]),
                        _fmt(r.train_acc[-1]),
                    ]
                )
            )
    Path(path).write_text("\n".join(lines) + "\n")


def write_curves_csv(path, summary: ExperimentSummary) -> None:
    lines = ["epoch,mean_train_acc,mean_test_acc"]
    for epoch in range(summary.epochs):
        lines.append(
            f"{epoch},{_fmt(summary.mean_train_curve[epoch])},{_fmt(summary.mean_test_curve[epoch])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(path, dataset_name: str, summaries: list[ExperimentSummary]) -> None:
    lines = ["dataset,variant,mean_best_acc,std_best_acc,best_epoch"]
    for s in summaries:
        lines.append(
            f"{dataset_name},{s.variant},{_fmt(s.mean_best_acc)},{_fmt(s.std_best_acc)},{s.best_epoch}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_bench_csv(path, rows: "list[BenchRow]") -> None:
    lines = [
        "num_nodes,num_edges,hidden_dim,num_layers,seconds_per_epoch,"
        "activation_elements,param_scalars"
    ]
    for r in rows:
        lines.append(
            f"{r.num_nodes},{r.num_edges},{r.hidden_dim},{r.num_layers},"
            f"{_fmt(r.seconds_per_epoch)},{r.activation_elements},{r.param_scalars}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def format_summary_table(summaries: list[ExperimentSummary]) -> str:
    lines = ["variant      mean_best_acc  std_best_acc  best_epoch"]
    for s in summaries:
        lines.append(
            f"{s.variant:<12} {s.mean_best_acc:>13.4f} {s.std_best_acc:>13.4f} {s.best_epoch:>11}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# complexity benchmark
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class BenchRow:
    """One timing measurement: a full-batch training epoch on a single
    random graph."""

    num_nodes: int
    num_edges: int
    hidden_dim: int
    num_layers: int
    seconds_per_epoch: float
    activation_elements: int
    param_scalars: int


def complexity_bench(
    sizes: list[int],
    hidden_dims: list[int],
    seed: int,
    num_layers: int = 5,
    repeats: int = 3,
) -> list[BenchRow]:
    """Per-epoch wall time and activation footprint over a grid of graph
    sizes and hidden widths.

    The workload at each size is eight distinct Erdos-Renyi draws with
    edge probability 2/(|V|-1) (constant expected degree, so edges grow
    linearly with nodes); the batch is large enough that array math, not
    per-call overhead, dominates the timings.  An epoch is one full-batch
    forward/backward/update; the median of ``repeats`` timed epochs is
    reported after one untimed warmup.  ``num_edges`` in each row counts
    edges over the whole workload.
    """
    if sorted(sizes) != list(sizes):
        raise ValueError("sizes must be ascending")
    graphs_per_size = 8
    rng = np.random.default_rng(seed)
    rows: list[BenchRow] = []
    for n_nodes in sizes:
        p = min(1.0, 2.0 / max(1, n_nodes - 1))
        raw = [
            (gen_er_graph(n_nodes, p, rng), [0] * n_nodes, i % 2)
            for i in range(graphs_per_size)
        ]
        ds = from_raw_graphs(raw)
        for hidden in hidden_dims:
            cfg = ModelConfig(
                num_classes=2,
                feature_dim=0,
                tag_vocab_size=1,
                num_layers=num_layers,
                hidden_dim=hidden,
            )
            model = IntervalGNN(cfg, np.random.default_rng([seed, n_nodes, hidden]))
            opt = Adam(model.params(), lr=0.01)
            batch = prepare_batch(ds, np.arange(graphs_per_size))
            drop_rng = np.random.default_rng([seed, 1])

            def one_epoch() -> int:
                tape = Tape()
                loss, _ = model.loss(tape, batch, train=True, rng=drop_rng)
                tape.backward(loss)
                opt.step()
                opt.zero_grad()
                return tape.activation_elements

            activations = one_epoch()  # warmup
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                one_epoch()
                times.append(time.perf_counter() - start)
            rows.append(
                BenchRow(
                    num_nodes=n_nodes,
                    num_edges=sum(g.num_edges for g in ds.graphs),
                    hidden_dim=hidden,
                    num_layers=num_layers,
                    seconds_per_epoch=float(np.median(times)),
                    activation_elements=activations,
                    param_scalars=sum(p.data.size for p in model.params()),
                )
            )
    return rows


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares line fit; returns (slope, intercept, r_squared)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
