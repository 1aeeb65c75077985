"""Interval-valued graph networks: an interval algebra on the unit square,
a reverse-mode tape over its aggregation operators, a message-passing
classifier built from them, and the training/benchmark harness around it.

The usual entry points:

- :mod:`ivgnn.intervals` — the algebra (three meet/join variants, the total
  order, grid checkers for their laws).
- :mod:`ivgnn.graphs` — datasets of tagged, interval-featured graphs; text
  I/O, feature assignment, normalization, stratified folds.
- :mod:`ivgnn.synthetic` — random-graph dataset generators with
  density/clustering labelling rules.
- :mod:`ivgnn.autodiff` — the tape, differentiable primitives (including
  the interval aggregation kernels), Adam, and checkpoints.
- :mod:`ivgnn.model` — the interval message-passing network.
- :mod:`ivgnn.training` — fold training, cross-validation, aggregator
  comparison, CSV reports, and the complexity benchmark.
- :mod:`ivgnn.cli` — the ``ivgnn`` command.
"""

from .autodiff import Adam, CheckpointError, Tape, Tensor, lr_schedule
from .graphs import (
    Dataset,
    FoldSplit,
    Graph,
    fit_normalization,
    from_raw_graphs,
    intervalize_tags,
    load_tu_dataset,
    save_tu_dataset,
    stratified_kfold,
)
from .intervals import (
    Aggregator,
    UnitInterval,
    agr,
    check_axioms,
    check_order_properties,
    join,
    leq_new,
    meet,
)
from .model import GraphBatch, IntervalGNN, ModelConfig, accuracy, predict, prepare_batch
from .synthetic import BUILDERS, SynthConfig, build_synthetic1, build_synthetic2
from .training import (
    ExperimentSummary,
    FoldReport,
    TrainConfig,
    compare_aggregators,
    complexity_bench,
    cross_validate,
    train_fold,
)

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "Aggregator",
    "BUILDERS",
    "CheckpointError",
    "Dataset",
    "ExperimentSummary",
    "FoldReport",
    "FoldSplit",
    "Graph",
    "GraphBatch",
    "IntervalGNN",
    "ModelConfig",
    "SynthConfig",
    "Tape",
    "Tensor",
    "TrainConfig",
    "UnitInterval",
    "accuracy",
    "agr",
    "build_synthetic1",
    "build_synthetic2",
    "check_axioms",
    "check_order_properties",
    "compare_aggregators",
    "complexity_bench",
    "cross_validate",
    "fit_normalization",
    "from_raw_graphs",
    "intervalize_tags",
    "join",
    "leq_new",
    "load_tu_dataset",
    "lr_schedule",
    "meet",
    "predict",
    "prepare_batch",
    "save_tu_dataset",
    "stratified_kfold",
    "train_fold",
    "__version__",
]
