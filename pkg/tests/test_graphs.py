"""Dataset container tests: text parsing, sidecars, intervalization,
normalization, and stratified folds."""

import numpy as np
import pytest

from ivgnn import graphs as gr
from ivgnn.intervals import NormalizationRangeError

# A two-graph fixture: a triangle (label 1) and a 2-path (label 0), with
# sparse tag values {3, 7} that must remap to {0, 1}.
MINI = """2
3 1
3 2 1 2
3 2 0 2
7 2 0 1
2 0
7 1 1
3 1 0
"""

MINI_IVL = """0.5 1.5
-1.0 0.25
2.0 2.0
0.0 3.0
1.0 1.0
"""


def write_mini(tmp_path, with_sidecar=False):
    path = tmp_path / "mini.txt"
    path.write_text(MINI)
    if with_sidecar:
        (tmp_path / "mini.ivl").write_text(MINI_IVL)
    return path


def test_load_mini(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path))
    assert len(ds) == 2
    assert ds.num_classes == 2
    assert ds.tag_vocab_size == 2
    assert ds.feature_dim == 0
    tri, path2 = ds.graphs
    assert tri.num_nodes == 3 and tri.num_edges == 3
    assert tri.adjacency == ((1, 2), (0, 2), (0, 1))
    assert tri.node_tags == (0, 0, 1)  # 3 -> 0, 7 -> 1
    assert tri.label == 1
    assert path2.num_nodes == 2 and path2.label == 0
    assert path2.node_tags == (1, 0)


def test_load_sidecar(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path, with_sidecar=True))
    assert ds.feature_dim == 1
    tri, path2 = ds.graphs
    assert tri.node_features[1, 0].tolist() == [-1.0, 0.25]
    assert path2.node_features[0, 0].tolist() == [0.0, 3.0]


@pytest.mark.parametrize(
    "mutate,line,fragment",
    [
        (lambda t: t.replace("3 2 1 2", "3 2 1 x"), 3, "non-integer"),
        (lambda t: t.replace("3 2 1 2", "3 3 1 2"), 3, "expected 3 neighbor"),
        (lambda t: t.replace("3 2 1 2", "3 2 1 5"), 3, "out of range"),
        (lambda t: t.replace("3 2 1 2", "3 2 0 2"), 3, "self loop"),
        (lambda t: t.replace("3 2 1 2", "3 2 2 2"), 3, "duplicate neighbor"),
        (lambda t: t.replace("3 2 0 2", "3 1 2", 1), 3, "asymmetric"),
        (lambda t: t.replace("2\n", "x\n", 1), 1, "non-integer"),
        (lambda t: t + "9 9\n", 9, "trailing content"),
        (lambda t: t[: t.rfind("3 1 0")], 8, "unexpected end of file"),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, mutate, line, fragment):
    path = tmp_path / "broken.txt"
    path.write_text(mutate(MINI))
    with pytest.raises(gr.ParseError) as err:
        gr.load_tu_dataset(path)
    assert f"line {line}" in str(err.value)
    assert fragment in str(err.value)


def test_sidecar_errors(tmp_path):
    path = write_mini(tmp_path)
    side = tmp_path / "mini.ivl"
    side.write_text("0.5 0.4\n" * 5)
    with pytest.raises(gr.ParseError) as err:
        gr.load_tu_dataset(path)
    assert "line 1" in str(err.value)
    side.write_text("0.1 0.2\n" * 4)
    with pytest.raises(gr.ParseError) as err:
        gr.load_tu_dataset(path)
    assert "expected 5 intervals" in str(err.value)


def test_graph_validation():
    with pytest.raises(ValueError):
        gr.Graph(
            adjacency=((1,), ()),  # asymmetric
            node_tags=(0, 0),
            node_features=np.zeros((2, 0, 2)),
            label=0,
        )
    with pytest.raises(ValueError):
        gr.Graph(
            adjacency=((1,), (0,)),
            node_tags=(0, 0),
            node_features=np.array([[[0.5, 0.2]], [[0.0, 0.0]]]),  # lo > hi
            label=0,
        )


def test_roundtrip(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path, with_sidecar=True))
    out = tmp_path / "copy.txt"
    gr.save_tu_dataset(ds, out)
    again = gr.load_tu_dataset(out)
    assert again == ds
    # once more: saving the reloaded dataset is byte-stable
    out2 = tmp_path / "copy2.txt"
    gr.save_tu_dataset(again, out2)
    assert out2.read_text() == out.read_text()
    assert gr.sidecar_path(out2).read_text() == gr.sidecar_path(out).read_text()


def test_intervalize_degenerate(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path))
    out = gr.intervalize_tags(ds, "degenerate")
    assert out.feature_dim == 1
    for g in out.graphs:
        for v in range(g.num_nodes):
            lo, hi = g.node_features[v, 0]
            assert lo == hi == float(g.node_tags[v])


def test_intervalize_biased(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path))
    out1 = gr.intervalize_tags(ds, "biased", seed=5)
    out2 = gr.intervalize_tags(ds, "biased", seed=5)
    out3 = gr.intervalize_tags(ds, "biased", seed=6)
    assert out1 == out2
    assert out1 != out3
    for g in out1.graphs:
        c = np.array(g.node_tags, dtype=float)
        lo = g.node_features[:, 0, 0]
        hi = g.node_features[:, 0, 1]
        assert (lo <= c).all() and (c <= hi).all()
    with pytest.raises(ValueError):
        gr.intervalize_tags(ds, "biased")  # seed required
    with pytest.raises(ValueError):
        gr.intervalize_tags(ds, "uniform")


def test_fit_normalization(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path, with_sidecar=True))
    fitted = gr.fit_normalization(ds, [0, 1])
    # train pool endpoints: lows {0.5,-1,2,0,1}, highs {1.5,0.25,2,3,1}
    assert fitted.norm_stats[0].tolist() == [-1.0, 3.0]
    feats = gr.normalize_features(fitted, 0)
    assert feats[0, 0].tolist() == [1.5 / 4.0, 2.5 / 4.0]
    # fitting only on the second graph changes the stats (train-only data)
    fitted1 = gr.fit_normalization(ds, [1])
    assert fitted1.norm_stats[0].tolist() == [0.0, 3.0]
    # out-of-range test features clamp into [0, 1]
    feats = gr.normalize_features(fitted1, 0)
    assert feats[1, 0].tolist() == [0.0, 0.25 / 3.0]
    assert (feats[:, :, 0] >= 0).all() and (feats[:, :, 1] <= 1).all()


def test_fit_normalization_errors(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path))
    with pytest.raises(ValueError):
        gr.fit_normalization(ds, [0])  # no features yet
    degen = gr.intervalize_tags(ds, "degenerate")
    with pytest.raises(ValueError):
        gr.fit_normalization(degen, [])
    with pytest.raises(ValueError):
        gr.fit_normalization(degen, [7])
    # constant dimension: only graph 0 of the degenerate triangle with equal tags
    uniform = gr.from_raw_graphs([(((1,), (0,)), [4, 4], 0), (((1,), (0,)), [4, 4], 1)])
    uniform = gr.intervalize_tags(uniform, "degenerate")
    with pytest.raises(NormalizationRangeError):
        gr.fit_normalization(uniform, [0, 1])


def _toy_dataset(per_class=(12, 17)):
    raw = []
    for cls, count in enumerate(per_class):
        for _ in range(count):
            raw.append(((((1,), (0,))), [0, 1], cls))
    return gr.from_raw_graphs(raw)


def test_stratified_kfold_balance_and_coverage():
    ds = _toy_dataset()
    split = gr.stratified_kfold(ds, 5, seed=3)
    labels = ds.labels()
    all_test = np.concatenate([test for _, test in split.folds])
    assert sorted(all_test.tolist()) == list(range(len(ds)))
    for train, test in split.folds:
        assert np.intersect1d(train, test).size == 0
        assert np.union1d(train, test).size == len(ds)
        for cls, count in enumerate((12, 17)):
            in_fold = int((labels[test] == cls).sum())
            ideal = count / 5
            assert abs(in_fold - ideal) <= 1.0


def test_stratified_kfold_determinism_and_errors():
    ds = _toy_dataset()
    s1 = gr.stratified_kfold(ds, 5, seed=3)
    s2 = gr.stratified_kfold(ds, 5, seed=3)
    s3 = gr.stratified_kfold(ds, 5, seed=4)
    for (tr1, te1), (tr2, te2) in zip(s1.folds, s2.folds):
        assert np.array_equal(tr1, tr2) and np.array_equal(te1, te2)
    assert any(
        not np.array_equal(te1, te3)
        for (_, te1), (_, te3) in zip(s1.folds, s3.folds)
    )
    with pytest.raises(ValueError):
        gr.stratified_kfold(ds, 1, seed=0)
    with pytest.raises(ValueError):
        gr.stratified_kfold(_toy_dataset(per_class=(3, 20)), 5, seed=0)


def test_dataset_stats_format(tmp_path):
    ds = gr.load_tu_dataset(write_mini(tmp_path))
    text = gr.format_dataset_stats(ds)
    assert text.splitlines() == [
        "graphs 2",
        "classes 2",
        "avg_nodes 2.50",
        "tags 2",
    ]
