"""Graph containers, the text dataset format, and split/normalization tools.

Datasets are stored in a single text file:

    line 1:            number of graphs
    per graph:         "n label" on one line, then n node lines
    node line:         "tag m u_1 ... u_m"   (m neighbor indices, zero-based)

Adjacency must be symmetric, with no self loops and no duplicate edges.  Node
tags and graph labels may be arbitrary integers in the file; both are remapped
to dense ranges on load.

An optional sidecar file with the same stem and extension ``.ivl`` carries one
"lo hi" line per node (graphs in order), giving every node a one-dimensional
raw interval feature.  When the sidecar is present it defines the features;
otherwise features can be derived from tags with :func:`intervalize_tags`.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .intervals import NormalizationRangeError


class ParseError(ValueError):
    """Malformed dataset text; the message carries a 1-based line number."""


def _fail(path: Path, line_no: int, msg: str) -> "ParseError":
    return ParseError(f"{path.name}, line {line_no}: {msg}")


@dataclasses.dataclass(frozen=True, eq=False)
class Graph:
    """An undirected labelled graph with tagged, interval-featured nodes.

    ``adjacency`` holds one sorted neighbor tuple per node.  ``node_features``
    has shape [n, d, 2] with lo = [..., 0] and hi = [..., 1]; d may be zero
    when features have not been assigned yet.
    """

    adjacency: tuple[tuple[int, ...], ...]
    node_tags: tuple[int, ...]
    node_features: np.ndarray
    label: int

    def __post_init__(self) -> None:
        n = len(self.adjacency)
        if n == 0:
            raise ValueError("graph must have at least one node")
        if len(self.node_tags) != n:
            raise ValueError("node_tags length does not match node count")
        feats = self.node_features
        if feats.shape[0] != n or feats.ndim != 3 or feats.shape[2] != 2:
            raise ValueError(f"node_features must have shape [n, d, 2], got {feats.shape}")
        if feats.size and not (feats[..., 0] <= feats[..., 1]).all():
            raise ValueError("node feature intervals must satisfy lo <= hi")
        neighbor_sets = [set(nbrs) for nbrs in self.adjacency]
        for v, nbrs in enumerate(self.adjacency):
            if len(neighbor_sets[v]) != len(nbrs):
                raise ValueError(f"duplicate neighbor entries at node {v}")
            for u in nbrs:
                if not 0 <= u < n:
                    raise ValueError(f"neighbor index {u} out of range at node {v}")
                if u == v:
                    raise ValueError(f"self loop at node {v}")
                if v not in neighbor_sets[u]:
                    raise ValueError(f"asymmetric adjacency between {v} and {u}")

    @property
    def num_nodes(self) -> int:
        return len(self.adjacency)

    @property
    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.adjacency == other.adjacency
            and self.node_tags == other.node_tags
            and self.label == other.label
            and self.node_features.shape == other.node_features.shape
            and bool(np.array_equal(self.node_features, other.node_features))
        )


@dataclasses.dataclass(frozen=True, eq=False)
class Dataset:
    """A graph classification dataset with dense labels and tags.

    ``norm_stats`` is None until :func:`fit_normalization` attaches the
    per-dimension (min, max) feature statistics of a training subset.
    """

    graphs: tuple[Graph, ...]
    num_classes: int
    tag_vocab_size: int
    feature_dim: int
    norm_stats: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.graphs:
            raise ValueError("dataset must contain at least one graph")
        if self.num_classes < 1:
            raise ValueError("dataset must have at least one class")
        for g in self.graphs:
            if not 0 <= g.label < self.num_classes:
                raise ValueError(f"graph label {g.label} outside [0, {self.num_classes})")
            if any(not 0 <= t < self.tag_vocab_size for t in g.node_tags):
                raise ValueError("node tag outside the dense vocabulary")
            if g.node_features.shape[1] != self.feature_dim:
                raise ValueError("inconsistent feature dimension across graphs")
        if self.norm_stats is not None:
            stats = self.norm_stats
            if stats.shape != (self.feature_dim, 2):
                raise ValueError(f"norm_stats must have shape [{self.feature_dim}, 2]")
            if not (stats[:, 0] < stats[:, 1]).all():
                raise NormalizationRangeError("normalization stats must satisfy min < max")

    def __len__(self) -> int:
        return len(self.graphs)

    def labels(self) -> np.ndarray:
        return np.array([g.label for g in self.graphs], dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.graphs == other.graphs
            and self.num_classes == other.num_classes
            and self.tag_vocab_size == other.tag_vocab_size
            and self.feature_dim == other.feature_dim
        )


@dataclasses.dataclass(frozen=True)
class FoldSplit:
    """Stratified k-fold assignment: per fold, (train, test) index arrays."""

    k: int
    seed: int
    folds: tuple[tuple[np.ndarray, np.ndarray], ...]

    def train_indices(self, fold: int) -> np.ndarray:
        return self.folds[fold][0]

    def test_indices(self, fold: int) -> np.ndarray:
        return self.folds[fold][1]


# ---------------------------------------------------------------------------
# dense remapping helpers
# ---------------------------------------------------------------------------

def _dense_map(values: Iterable[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(sorted(set(values)))}


def from_raw_graphs(
    raw: Sequence[tuple[tuple[tuple[int, ...], ...], Sequence[int], int]],
    features: Sequence[np.ndarray] | None = None,
) -> Dataset:
    """Assemble a Dataset from (adjacency, tags, label) triples, remapping
    tags and labels to dense ranges.  ``features`` optionally supplies one
    [n, d, 2] array per graph; otherwise graphs start featureless."""
    label_map = _dense_map(label for _, _, label in raw)
    tag_map = _dense_map(t for _, tags, _ in raw for t in tags)
    feature_dim = 0
    if features is not None:
        dims = {f.shape[1] for f in features}
        if len(dims) != 1:
            raise ValueError("inconsistent feature dimensions")
        feature_dim = dims.pop()
    graphs = []
    for gi, (adjacency, tags, label) in enumerate(raw):
        n = len(adjacency)
        feats = (
            np.asarray(features[gi], dtype=np.float64)
            if features is not None
            else np.zeros((n, 0, 2), dtype=np.float64)
        )
        graphs.append(
            Graph(
                adjacency=tuple(tuple(sorted(nbrs)) for nbrs in adjacency),
                node_tags=tuple(tag_map[t] for t in tags),
                node_features=feats,
                label=label_map[label],
            )
        )
    return Dataset(
        graphs=tuple(graphs),
        num_classes=len(label_map),
        tag_vocab_size=len(tag_map),
        feature_dim=feature_dim,
    )


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".ivl")


def load_tu_dataset(path: str | Path) -> Dataset:
    """Parse a dataset text file (and its ``.ivl`` sidecar when present)."""
    path = Path(path)
    lines = path.read_text().splitlines()

    def tokens(line_no: int) -> list[str]:
        if line_no > len(lines):
            raise _fail(path, line_no, "unexpected end of file")
        toks = lines[line_no - 1].split()
        if not toks:
            raise _fail(path, line_no, "blank line inside dataset")
        return toks

    def ints(line_no: int, expect: int | None = None) -> list[int]:
        toks = tokens(line_no)
        if expect is not None and len(toks) != expect:
            raise _fail(path, line_no, f"expected {expect} integers, found {len(toks)}")
        out = []
        for tok in toks:
            try:
                out.append(int(tok))
            except ValueError:
                raise _fail(path, line_no, f"non-integer token {tok!r}") from None
        return out

    line = 1
    (count,) = ints(line, 1)
    if count < 1:
        raise _fail(path, line, "dataset must contain at least one graph")
    raw = []
    node_lines: list[int] = []
    total_nodes = 0
    for gi in range(count):
        line += 1
        header = ints(line, 2)
        n, label = header
        if n < 1:
            raise _fail(path, line, f"graph {gi} must have at least one node")
        adjacency: list[list[int]] = []
        tags: list[int] = []
        for v in range(n):
            line += 1
            row = ints(line)
            if len(row) < 2:
                raise _fail(path, line, "node line needs a tag and a neighbor count")
            tag, m, nbrs = row[0], row[1], row[2:]
            if m < 0 or len(nbrs) != m:
                raise _fail(path, line, f"expected {m} neighbor indices, found {len(nbrs)}")
            for u in nbrs:
                if not 0 <= u < n:
                    raise _fail(path, line, f"neighbor index {u} out of range [0, {n})")
                if u == v:
                    raise _fail(path, line, f"self loop at node {v}")
            if len(set(nbrs)) != len(nbrs):
                raise _fail(path, line, f"duplicate neighbor at node {v}")
            adjacency.append(nbrs)
            tags.append(tag)
            node_lines.append(line)
        for v, nbrs in enumerate(adjacency):
            for u in nbrs:
                if v not in adjacency[u]:
                    raise _fail(
                        path,
                        node_lines[total_nodes + v],
                        f"asymmetric adjacency: node {v} lists {u} but not vice versa",
                    )
        total_nodes += n
        raw.append((tuple(tuple(nbrs) for nbrs in adjacency), tags, label))
    for extra in range(line, len(lines)):
        if lines[extra].split():
            raise _fail(path, extra + 1, "trailing content after the last graph")

    features = None
    side = sidecar_path(path)
    if side.exists():
        features = _load_sidecar(side, [len(adj) for adj, _, _ in raw])
    return from_raw_graphs(raw, features)


def _load_sidecar(side: Path, node_counts: list[int]) -> list[np.ndarray]:
    lines = [ln for ln in side.read_text().splitlines()]
    needed = sum(node_counts)
    rows = []
    for line_no, text in enumerate(lines, start=1):
        toks = text.split()
        if not toks:
            continue
        if len(toks) != 2:
            raise _fail(side, line_no, f"expected 'lo hi', found {len(toks)} tokens")
        try:
            lo, hi = float(toks[0]), float(toks[1])
        except ValueError:
            raise _fail(side, line_no, f"non-numeric token in {text!r}") from None
        if not np.isfinite([lo, hi]).all() or lo > hi:
            raise _fail(side, line_no, f"invalid interval [{lo}, {hi}]")
        rows.append((lo, hi))
        if len(rows) > needed:
            raise _fail(side, line_no, f"more intervals than the {needed} nodes")
    if len(rows) != needed:
        raise _fail(side, len(lines) + 1, f"expected {needed} intervals, found {len(rows)}")
    out = []
    at = 0
    for n in node_counts:
        out.append(np.array(rows[at : at + n], dtype=np.float64).reshape(n, 1, 2))
        at += n
    return out


def save_tu_dataset(ds: Dataset, path: str | Path) -> None:
    """Write the dataset text file, plus the ``.ivl`` sidecar when the
    dataset carries one-dimensional features."""
    if ds.feature_dim > 1:
        raise ValueError("the sidecar format is one-dimensional; cannot save feature_dim > 1")
    path = Path(path)
    lines = [str(len(ds.graphs))]
    for g in ds.graphs:
        lines.append(f"{g.num_nodes} {g.label}")
        for v in range(g.num_nodes):
            nbrs = g.adjacency[v]
            lines.append(" ".join([str(g.node_tags[v]), str(len(nbrs)), *map(str, nbrs)]))
    path.write_text("\n".join(lines) + "\n")
    if ds.feature_dim == 1:
        rows = []
        for g in ds.graphs:
            for v in range(g.num_nodes):
                lo, hi = g.node_features[v, 0]
                rows.append(f"{float(lo)!r} {float(hi)!r}")
        sidecar_path(path).write_text("\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# feature assignment and normalization
# ---------------------------------------------------------------------------

def intervalize_tags(ds: Dataset, mode: str, seed: int | None = None) -> Dataset:
    """Derive one-dimensional raw interval features from node tags.

    ``biased`` surrounds each tag c with [c - |k1|, c + |k2|], k1 and k2 drawn
    per node from the standard normal; ``degenerate`` uses the point interval
    [c, c].  Existing features are replaced.
    """
    if mode not in ("biased", "degenerate"):
        raise ValueError(f"mode must be 'biased' or 'degenerate', got {mode!r}")
    rng = None
    if mode == "biased":
        if seed is None:
            raise ValueError("biased intervalization requires a seed")
        rng = np.random.default_rng(seed)
    graphs = []
    for g in ds.graphs:
        c = np.array(g.node_tags, dtype=np.float64)
        if mode == "biased":
            k = np.abs(rng.standard_normal((g.num_nodes, 2)))
            feats = np.stack([c - k[:, 0], c + k[:, 1]], axis=1)
        else:
            feats = np.stack([c, c], axis=1)
        graphs.append(dataclasses.replace(g, node_features=feats.reshape(-1, 1, 2)))
    return Dataset(
        graphs=tuple(graphs),
        num_classes=ds.num_classes,
        tag_vocab_size=ds.tag_vocab_size,
        feature_dim=1,
    )


def fit_normalization(ds: Dataset, train_indices: Sequence[int]) -> Dataset:
    """Attach per-dimension (min, max) endpoint statistics computed over the
    training graphs only.  Test-time feature values outside the range clamp
    into [0, 1] at normalization time."""
    idx = np.asarray(train_indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("cannot fit normalization on an empty training set")
    if idx.min() < 0 or idx.max() >= len(ds.graphs):
        raise ValueError("training index out of range")
    if ds.feature_dim == 0:
        raise ValueError("dataset has no features; assign them first (intervalize)")
    los = np.concatenate([ds.graphs[i].node_features[:, :, 0] for i in idx])
    his = np.concatenate([ds.graphs[i].node_features[:, :, 1] for i in idx])
    stats = np.stack([los.min(axis=0), his.max(axis=0)], axis=1)
    if not (stats[:, 0] < stats[:, 1]).all():
        flat = np.flatnonzero(~(stats[:, 0] < stats[:, 1]))
        raise NormalizationRangeError(
            f"feature dimension(s) {flat.tolist()} are constant on the training set"
        )
    return dataclasses.replace(ds, norm_stats=stats)


def normalize_features(ds: Dataset, graph_index: int) -> np.ndarray:
    """The graph's features mapped into [0, 1] by the fitted statistics,
    shape [n, d, 2]."""
    if ds.norm_stats is None:
        raise ValueError("normalization statistics not fitted")
    feats = ds.graphs[graph_index].node_features
    mn = ds.norm_stats[:, 0][None, :, None]
    mx = ds.norm_stats[:, 1][None, :, None]
    return np.clip((feats - mn) / (mx - mn), 0.0, 1.0)


# ---------------------------------------------------------------------------
# splits
# ---------------------------------------------------------------------------

def stratified_kfold(ds: Dataset, k: int, seed: int) -> FoldSplit:
    """Deal each class round-robin into k folds after a seeded shuffle, so
    per-fold class counts stay within one graph of proportional."""
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    labels = ds.labels()
    rng = np.random.default_rng(seed)
    fold_members: list[list[int]] = [[] for _ in range(k)]
    for cls in range(ds.num_classes):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise ValueError(
                f"class {cls} has {members.size} graphs, fewer than the {k} folds"
            )
        members = members[rng.permutation(members.size)]
        for pos, gi in enumerate(members):
            fold_members[pos % k].append(int(gi))
    everything = np.arange(len(ds.graphs))
    folds = []
    for i in range(k):
        test = np.array(sorted(fold_members[i]), dtype=np.int64)
        train = np.setdiff1d(everything, test)
        folds.append((train, test))
    return FoldSplit(k=k, seed=seed, folds=tuple(folds))


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------

def format_dataset_stats(ds: Dataset) -> str:
    """Plain-text dataset summary: size, classes, mean node count, tags."""
    sizes = [g.num_nodes for g in ds.graphs]
    return "\n".join(
        [
            f"graphs {len(ds.graphs)}",
            f"classes {ds.num_classes}",
            f"avg_nodes {np.mean(sizes):.2f}",
            f"tags {ds.tag_vocab_size}",
        ]
    )
