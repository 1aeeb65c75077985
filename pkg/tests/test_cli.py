"""End-to-end tests of the command-line interface: exit codes, file
outputs, config-file merging, and byte-level determinism."""

import subprocess
import sys

import pytest

from ivgnn.cli import main
from ivgnn.graphs import load_tu_dataset


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    rc = main(["gen-synth", "--rule", "density", "--size", "16", "--seed", "3", "--out", str(out)])
    assert rc == 0
    return out


FAST = ["--epochs", "2", "--batch", "8", "--hidden", "3", "--layers", "1", "--folds", "2"]


def _fast(cmd, data_dir, *extra):
    return [cmd, "--data", str(data_dir / "dataset.txt"), "--seed", "1", *FAST, *extra]


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 1
    err = capsys.readouterr().err
    assert err.startswith("usage: ivgnn {gen-synth,")


def test_unknown_subcommand_and_flag(capsys):
    assert main(["frobnicate"]) == 1
    assert main(["stats", "--bogus", "x"]) == 1
    assert "usage:" in capsys.readouterr().err


def test_seed_is_required_for_randomized_commands(data_dir, capsys):
    rc = main(["cv", "--data", str(data_dir / "dataset.txt"), *FAST])
    assert rc == 1
    assert "--seed is required" in capsys.readouterr().err
    assert main(["gen-synth", "--rule", "density", "--out", "x"]) == 1


def test_runtime_failures_exit_2(tmp_path, data_dir, capsys):
    assert main(["stats", "--data", str(tmp_path / "missing.txt")]) == 2
    # more folds than the smaller class can fill is a data-dependent failure
    rc = main(
        ["cv", "--data", str(data_dir / "dataset.txt"), "--seed", "1", "--folds", "50"]
    )
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_entry_point_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ivgnn.cli", "stats", "--data", str(tmp_path / "nope.txt")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "error:" in proc.stderr


# ---------------------------------------------------------------------------
# gen-synth / stats / intervalize
# ---------------------------------------------------------------------------

def test_gen_synth_outputs_and_stats_roundtrip(data_dir, capsys):
    assert (data_dir / "dataset.txt").exists()
    assert (data_dir / "dataset.ivl").exists()
    stats_file = (data_dir / "stats.txt").read_text()
    assert main(["stats", "--data", str(data_dir / "dataset.txt")]) == 0
    printed = capsys.readouterr().out
    assert printed == stats_file


def test_gen_synth_deterministic(tmp_path, data_dir):
    again = tmp_path / "again"
    args = ["gen-synth", "--rule", "density", "--size", "16", "--seed", "3", "--out", str(again)]
    assert main(args) == 0
    for name in ("dataset.txt", "dataset.ivl", "stats.txt"):
        assert (again / name).read_bytes() == (data_dir / name).read_bytes()


def test_intervalize_modes(tmp_path, data_dir):
    src = str(data_dir / "dataset.txt")
    deg = tmp_path / "deg.txt"
    assert main(["intervalize", "--data", src, "--mode", "degenerate", "--out", str(deg)]) == 0
    ds = load_tu_dataset(deg)
    assert ds.feature_dim == 1
    g = ds.graphs[0]
    assert (g.node_features[:, 0, 0] == g.node_features[:, 0, 1]).all()

    assert main(["intervalize", "--data", src, "--mode", "biased", "--out", str(tmp_path / "b.txt")]) == 1
    rc = main(
        ["intervalize", "--data", src, "--mode", "biased", "--seed", "5", "--out", str(tmp_path / "b.txt")]
    )
    assert rc == 0
    biased = load_tu_dataset(tmp_path / "b.txt")
    assert (biased.graphs[0].node_features[:, 0, 0] <= biased.graphs[0].node_features[:, 0, 1]).all()


# ---------------------------------------------------------------------------
# train / cv / compare
# ---------------------------------------------------------------------------

def test_train_writes_model_and_curves(tmp_path, data_dir, capsys):
    out = tmp_path / "run"
    assert main(_fast("train", data_dir, "--out", str(out))) == 0
    assert "best test acc" in capsys.readouterr().out
    assert (out / "model.npz").exists()
    curves = (out / "curves.csv").read_text().splitlines()
    assert curves[0] == "epoch,mean_train_acc,mean_test_acc"
    assert len(curves) == 3


def test_cv_outputs_and_rerun_determinism(tmp_path, data_dir):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(_fast("cv", data_dir, "--out", str(out_a))) == 0
    assert main(_fast("cv", data_dir, "--out", str(out_b))) == 0
    for name in ("results.csv", "curves.csv", "summary.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    header = (out_a / "results.csv").read_text().splitlines()[0]
    assert header == "dataset,variant,fold,repeat,best_epoch,best_test_acc,final_train_acc"


def test_compare_outputs_with_plot(tmp_path, data_dir):
    out = tmp_path / "cmp"
    assert main(_fast("compare", data_dir, "--out", str(out), "--plot")) == 0
    for name in (
        "results.csv",
        "summary.csv",
        "curves_agr_0.csv",
        "curves_agr_e.csv",
        "curves_agr_new.csv",
    ):
        assert (out / name).exists()
    svg = (out / "curves.svg").read_bytes()
    assert svg.lstrip().startswith(b"<?xml")
    summary_lines = (out / "summary.csv").read_text().splitlines()
    assert [line.split(",")[1] for line in summary_lines[1:]] == ["agr_0", "agr_e", "agr_new"]


def test_compare_plot_requires_out(data_dir, capsys):
    assert main(_fast("compare", data_dir, "--plot")) == 1
    assert "--plot requires --out" in capsys.readouterr().err


def test_plot_is_deterministic(tmp_path, data_dir):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(_fast("compare", data_dir, "--out", str(out), "--plot")) == 0
    assert (out_a / "curves.svg").read_bytes() == (out_b / "curves.svg").read_bytes()


def test_epsilon_flag(tmp_path, data_dir, capsys):
    assert main(_fast("train", data_dir, "--epsilon", "learnable")) == 0
    assert main(_fast("train", data_dir, "--epsilon", "fixed:0.25")) == 0
    assert main(_fast("train", data_dir, "--epsilon", "sometimes")) == 1
    assert "--epsilon" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def test_config_file_supplies_and_flags_override(tmp_path, data_dir, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nepochs = 2\nbatch = 8\nhidden = 3\nlayers = 1\nfolds = 2\nseed = 1\n")
    data = str(data_dir / "dataset.txt")
    out = tmp_path / "from_cfg"
    assert main(["cv", "--data", data, "--config", str(cfg), "--out", str(out)]) == 0
    assert len((out / "curves.csv").read_text().splitlines()) == 3  # header + 2 epochs

    out2 = tmp_path / "override"
    rc = main(["cv", "--data", data, "--config", str(cfg), "--epochs", "3", "--out", str(out2)])
    assert rc == 0
    assert len((out2 / "curves.csv").read_text().splitlines()) == 4  # flag wins


def test_config_file_rejects_unknown_and_malformed_keys(tmp_path, data_dir, capsys):
    data = str(data_dir / "dataset.txt")
    bad = tmp_path / "bad.cfg"
    bad.write_text("seed = 1\nwibble = 9\n")
    assert main(["cv", "--data", data, "--config", str(bad)]) == 1
    assert "unknown config key" in capsys.readouterr().err

    malformed = tmp_path / "malformed.cfg"
    malformed.write_text("seed 1\n")
    assert main(["cv", "--data", data, "--config", str(malformed)]) == 1

    dupes = tmp_path / "dupes.cfg"
    dupes.write_text("seed = 1\nseed = 2\n")
    assert main(["cv", "--data", data, "--config", str(dupes)]) == 1
    assert main(["cv", "--data", data, "--config", str(tmp_path / "missing.cfg")]) == 1


# ---------------------------------------------------------------------------
# axioms / bench
# ---------------------------------------------------------------------------

def test_axioms_passes_on_coarse_grid(capsys):
    assert main(["axioms", "--grid", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "aggregator agr_new" in out
    assert "interval order" in out
    assert main(["axioms", "--grid", "0.7"]) == 1


def test_axioms_single_variant_selection(capsys):
    assert main(["axioms", "--variant", "agr_new", "--grid", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "aggregator agr_new" in out
    assert "aggregator agr_0" not in out
    assert "interval order" in out

    assert main(["axioms", "--variant", "agr_0", "--grid", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "aggregator agr_0" in out
    assert "interval order" not in out  # the total order belongs to agr_new

    assert main(["axioms", "--variant", "bogus"]) == 1


def test_data_accepts_generated_directory(data_dir, capsys):
    assert main(["stats", "--data", str(data_dir)]) == 0
    from_dir = capsys.readouterr().out
    assert main(["stats", "--data", str(data_dir / "dataset.txt")]) == 0
    assert capsys.readouterr().out == from_dir

    rc = main(["cv", "--data", str(data_dir), "--seed", "1", *FAST])
    assert rc == 0


def test_bench_writes_csv(tmp_path, capsys):
    out = tmp_path / "bench"
    rc = main(
        [
            "bench",
            "--seed",
            "2",
            "--sizes",
            "8,12",
            "--hidden",
            "3",
            "--layers",
            "1",
            "--repeats",
            "1",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    lines = (out / "bench.csv").read_text().splitlines()
    assert lines[0].startswith("num_nodes,num_edges,hidden_dim")
    assert len(lines) == 3
    assert "time vs nodes" in capsys.readouterr().out
    assert main(["bench", "--seed", "2", "--sizes", "12,8", "--hidden", "3"]) == 1
    assert main(["bench", "--seed", "2", "--sizes", "8,x", "--hidden", "3"]) == 1
