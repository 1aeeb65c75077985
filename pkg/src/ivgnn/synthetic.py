"""Synthetic graph classification datasets built from topological rules.

Graphs are Erdos-Renyi draws with the node count and edge probability sampled
per graph.  Two labelling rules produce two dataset families over identical
underlying graphs (equal configs draw the identical graph list, so the rules
can be compared on shared structure):

* density rule: a graph is labelled 1 when its edge density |E| / |V| falls
  below the dataset-wide average.  Node tags mark below-average degree, and
  each node's raw feature interval spans its neighbors' degrees.
* clustering rule: a graph is labelled 1 when its mean clustering coefficient
  falls below the dataset-wide average.  Node tags are degrees, and each
  node's raw feature interval spans its neighbors' clustering coefficients.

Both label rules need the dataset-wide average, so labelling is a second pass
over the generated graphs.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .graphs import Dataset, from_raw_graphs


@dataclasses.dataclass(frozen=True)
class SynthConfig:
    """Generator settings: dataset size, per-graph node-count range
    (inclusive), edge-probability range, and the seed."""

    size: int
    seed: int
    node_range: tuple[int, int] = (10, 30)
    edge_prob_range: tuple[float, float] = (0.1, 0.4)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("size must be positive")
        lo, hi = self.node_range
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid node range {self.node_range}")
        plo, phi = self.edge_prob_range
        if not 0.0 <= plo <= phi <= 1.0:
            raise ValueError(f"invalid edge probability range {self.edge_prob_range}")


def gen_er_graph(n: int, p: float, rng: np.random.Generator) -> tuple[tuple[int, ...], ...]:
    """One Erdos-Renyi adjacency: each of the n(n-1)/2 pairs (in lexicographic
    order) is an edge with probability p.  Consumes exactly one uniform draw
    per pair, so results are reproducible from the generator state."""
    if n < 1:
        raise ValueError("graph needs at least one node")
    nbrs: list[list[int]] = [[] for _ in range(n)]
    if n > 1:
        draws = rng.random(n * (n - 1) // 2)
        at = 0
        for i in range(n - 1):
            for j in range(i + 1, n):
                if draws[at] < p:
                    nbrs[i].append(j)
                    nbrs[j].append(i)
                at += 1
    return tuple(tuple(row) for row in nbrs)


# ---------------------------------------------------------------------------
# topological measures
# ---------------------------------------------------------------------------

def density(adjacency: tuple[tuple[int, ...], ...]) -> float:
    """Edges per node, |E| / |V|."""
    edges = sum(len(nbrs) for nbrs in adjacency) // 2
    return edges / len(adjacency)


def local_clustering(adjacency: tuple[tuple[int, ...], ...], u: int) -> float:
    """Fraction of realized links among u's neighbors; 0 when deg(u) < 2."""
    nbrs = adjacency[u]
    d = len(nbrs)
    if d < 2:
        return 0.0
    links = 0
    for idx, x in enumerate(nbrs):
        x_nbrs = set(adjacency[x])
        links += sum(1 for y in nbrs[idx + 1 :] if y in x_nbrs)
    return links / (d * (d - 1) / 2)


def graph_clustering(adjacency: tuple[tuple[int, ...], ...]) -> float:
    """Mean local clustering coefficient over all nodes."""
    return float(np.mean([local_clustering(adjacency, u) for u in range(len(adjacency))]))


# ---------------------------------------------------------------------------
# per-node interval features
# ---------------------------------------------------------------------------

def neighbor_degree_features(adjacency: tuple[tuple[int, ...], ...]) -> np.ndarray:
    """Raw interval per node from neighbor degrees: [d_min, d_max] with two or
    more neighbors, [-1, d_max] with exactly one, [-1, 0] when isolated."""
    degrees = [len(nbrs) for nbrs in adjacency]
    out = np.empty((len(adjacency), 1, 2), dtype=np.float64)
    for v, nbrs in enumerate(adjacency):
        if len(nbrs) > 1:
            ds = [degrees[u] for u in nbrs]
            out[v, 0] = (min(ds), max(ds))
        elif len(nbrs) == 1:
            out[v, 0] = (-1.0, degrees[nbrs[0]])
        else:
            out[v, 0] = (-1.0, 0.0)
    return out


def neighbor_clustering_features(adjacency: tuple[tuple[int, ...], ...]) -> np.ndarray:
    """Raw interval per node spanning neighbors' clustering coefficients;
    isolated nodes get [0, 0]."""
    coeffs = [local_clustering(adjacency, u) for u in range(len(adjacency))]
    out = np.empty((len(adjacency), 1, 2), dtype=np.float64)
    for v, nbrs in enumerate(adjacency):
        if nbrs:
            cs = [coeffs[u] for u in nbrs]
            out[v, 0] = (min(cs), max(cs))
        else:
            out[v, 0] = (0.0, 0.0)
    return out


# ---------------------------------------------------------------------------
# dataset builders
# ---------------------------------------------------------------------------

def _generate_graphs(cfg: SynthConfig) -> list[tuple[tuple[int, ...], ...]]:
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.node_range
    plo, phi = cfg.edge_prob_range
    graphs = []
    for _ in range(cfg.size):
        n = int(rng.integers(lo, hi + 1))
        p = float(rng.uniform(plo, phi))
        graphs.append(gen_er_graph(n, p, rng))
    return graphs


def build_synthetic1(cfg: SynthConfig) -> Dataset:
    """The density-rule dataset.

    Labels: 1 when the graph's density is below the dataset average.
    Tags: 1 when the node's degree is below the dataset-wide average degree.
    Features: neighbor-degree intervals (see
    :func:`neighbor_degree_features`).
    """
    graphs = _generate_graphs(cfg)
    densities = [density(adj) for adj in graphs]
    avg_density = float(np.mean(densities))
    all_degrees = np.concatenate([[len(nbrs) for nbrs in adj] for adj in graphs])
    avg_degree = float(all_degrees.mean())
    raw, features = [], []
    for adj, dens in zip(graphs, densities):
        tags = [1 if len(nbrs) < avg_degree else 0 for nbrs in adj]
        raw.append((adj, tags, 1 if dens < avg_density else 0))
        features.append(neighbor_degree_features(adj))
    return from_raw_graphs(raw, features)


def build_synthetic2(cfg: SynthConfig) -> Dataset:
    """The clustering-rule dataset.

    Labels: 1 when the graph's mean clustering coefficient is below the
    dataset average.  Tags: node degrees.  Features: neighbor-clustering
    intervals (see :func:`neighbor_clustering_features`).
    """
    graphs = _generate_graphs(cfg)
    coeffs = [graph_clustering(adj) for adj in graphs]
    avg_coeff = float(np.mean(coeffs))
    raw, features = [], []
    for adj, c in zip(graphs, coeffs):
        tags = [len(nbrs) for nbrs in adj]
        raw.append((adj, tags, 1 if c < avg_coeff else 0))
        features.append(neighbor_clustering_features(adj))
    return from_raw_graphs(raw, features)


BUILDERS = {
    "density": build_synthetic1,
    "clustering": build_synthetic2,
}
