"""Command-line interface.

Subcommands: gen-synth, intervalize, train, cv, compare, axioms, bench,
stats.  Exit codes: 0 on success, 1 on usage errors (a one-line synopsis
goes to stderr), 2 on runtime failures.  Every option may also be supplied
through ``--config FILE`` holding ``key = value`` lines; explicit flags win
over the file, and unknown keys are rejected.  Commands that draw random
numbers require ``--seed``, and given identical flags every command writes
identical bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .graphs import (
    format_dataset_stats,
    intervalize_tags,
    load_tu_dataset,
    save_tu_dataset,
    stratified_kfold,
)
from .intervals import (
    Aggregator,
    check_axioms,
    check_order_properties,
    format_axiom_report,
    format_order_report,
)
from .model import ModelConfig
from .synthetic import BUILDERS, SynthConfig
from .training import (
    TrainConfig,
    complexity_bench,
    compare_aggregators,
    cross_validate,
    format_summary_table,
    linear_fit,
    summarize_reports,
    train_single,
    write_bench_csv,
    write_curves_csv,
    write_results_csv,
    write_summary_csv,
)

_SYNOPSIS = (
    "usage: ivgnn {gen-synth,intervalize,train,cv,compare,axioms,bench,stats} "
    "[options] (see --help)"
)


class UsageError(Exception):
    """Bad command line or config file; exits with status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); route to our codes
        raise UsageError(message)


# ---------------------------------------------------------------------------
# option registry: one table per subcommand, merged with the config file
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class _Opt:
    name: str
    kind: str  # int | float | str | flag
    default: object = None
    required: bool = False
    choices: tuple = ()
    help: str = ""

    @property
    def dest(self) -> str:
        return self.name.lstrip("-").replace("-", "_")


_VARIANT_NAMES = tuple(v.value for v in Aggregator)

_DATA = _Opt("--data", "str", required=True, help="dataset text file")
_SEED = _Opt("--seed", "int", required=True, help="random seed")
_OUT_REQ = _Opt("--out", "str", required=True, help="output location")
_OUT_OPT = _Opt("--out", "str", help="output directory (optional)")

_FIT_OPTS = (
    _DATA,
    _SEED,
    _Opt("--epochs", "int", 100, help="training epochs"),
    _Opt("--batch", "int", 16, help="minibatch size"),
    _Opt("--lr", "float", 0.01, help="base learning rate"),
    _Opt("--hidden", "int", 32, help="hidden width"),
    _Opt("--layers", "int", 5, help="aggregation layers"),
    _Opt("--aggregator", "str", "agr_new", choices=_VARIANT_NAMES, help="aggregation variant"),
    _Opt("--epsilon", "str", "fixed:0.0", help="fixed:<value> or learnable"),
    _Opt("--readout", "str", "sum", choices=("sum", "avg"), help="graph readout"),
    _Opt("--mode", "str", choices=("biased", "degenerate"), help="re-derive features from tags"),
    _Opt("--folds", "int", 10, help="cross-validation folds"),
    _Opt("--jobs", "int", 1, help="parallel fold workers"),
)

_OPTIONS: dict[str, tuple[_Opt, ...]] = {
    "gen-synth": (
        _Opt("--rule", "str", required=True, choices=tuple(BUILDERS), help="labelling rule"),
        _Opt("--size", "int", 200, help="number of graphs"),
        _SEED,
        _OUT_REQ,
    ),
    "intervalize": (
        _DATA,
        _Opt("--mode", "str", required=True, choices=("biased", "degenerate")),
        _Opt("--seed", "int", help="random seed (required for biased mode)"),
        _OUT_REQ,
    ),
    "train": _FIT_OPTS + (_OUT_OPT,),
    "cv": _FIT_OPTS + (_Opt("--repeats", "int", 1, help="repeated CV rounds"), _OUT_OPT),
    "compare": _FIT_OPTS
    + (
        _Opt("--repeats", "int", 1, help="repeated CV rounds"),
        _Opt("--plot", "flag", False, help="also write an SVG accuracy plot"),
        _OUT_OPT,
    ),
    "axioms": (
        _Opt("--grid", "float", 0.05, help="endpoint grid step"),
        _Opt(
            "--variant",
            "str",
            "all",
            choices=("agr_0", "agr_e", "agr_new", "all"),
            help="aggregator to check (default: all three)",
        ),
    ),
    "bench": (
        _SEED,
        _Opt("--sizes", "str", "50,100,200,400", help="comma-separated node counts"),
        _Opt("--hidden", "str", "32,64", help="comma-separated hidden widths"),
        _Opt("--layers", "int", 5, help="aggregation layers"),
        _Opt("--repeats", "int", 3, help="timed epochs per cell"),
        _OUT_OPT,
    ),
    "stats": (_DATA,),
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="ivgnn", allow_abbrev=False, description=__doc__)
    sub = parser.add_subparsers(dest="cmd", parser_class=_Parser)
    for cmd, opts in _OPTIONS.items():
        p = sub.add_parser(cmd, allow_abbrev=False)
        p.add_argument("--config", default=None, help="key = value option file")
        for o in opts:
            if o.kind == "flag":
                p.add_argument(o.name, action="store_const", const=True, default=None, help=o.help)
            else:
                p.add_argument(o.name, type=str, default=None, help=o.help)
    return parser


def _convert(opt: _Opt, raw) -> object:
    if not isinstance(raw, str):
        return raw
    try:
        if opt.kind == "int":
            value: object = int(raw)
        elif opt.kind == "float":
            value = float(raw)
        elif opt.kind == "flag":
            lowered = raw.strip().lower()
            if lowered not in ("true", "false"):
                raise ValueError
            value = lowered == "true"
        else:
            value = raw
    except ValueError:
        raise UsageError(f"{opt.name}: cannot interpret {raw!r} as {opt.kind}") from None
    if opt.choices and value not in opt.choices:
        raise UsageError(f"{opt.name}: {raw!r} is not one of {', '.join(opt.choices)}")
    return value


def _parse_config(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"--config: {exc}") from None
    values: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}, line {line_no}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise UsageError(f"{path}, line {line_no}: expected 'key = value'")
        if key in values:
            raise UsageError(f"{path}, line {line_no}: duplicate key {key!r}")
        values[key] = value
    return values


def _merge(ns: argparse.Namespace, opts: tuple[_Opt, ...], config: dict[str, str]) -> dict:
    values: dict[str, object] = {}
    known = set()
    for o in opts:
        known.add(o.dest)
        raw = getattr(ns, o.dest)
        if raw is None and o.dest in config:
            raw = config[o.dest]
        values[o.dest] = o.default if raw is None else _convert(o, raw)
        if values[o.dest] is None and o.required:
            raise UsageError(f"{o.name} is required")
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    return values


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def _parse_epsilon(text: str) -> tuple[float, bool]:
    if text == "learnable":
        return 0.0, True
    if text.startswith("fixed:"):
        try:
            return float(text[len("fixed:") :]), False
        except ValueError:
            pass
    raise UsageError(f"--epsilon: expected fixed:<value> or learnable, got {text!r}")


def _data_path(text: str) -> Path:
    """Resolve --data: a directory produced by gen-synth holds dataset.txt."""
    path = Path(text)
    return path / "dataset.txt" if path.is_dir() else path


def _load_dataset(values: dict):
    ds = load_tu_dataset(_data_path(values["data"]))
    if values.get("mode"):
        ds = intervalize_tags(ds, values["mode"], values["seed"])
    return ds


def _configs(values: dict, ds) -> tuple[ModelConfig, TrainConfig]:
    eps_init, eps_learnable = _parse_epsilon(values["epsilon"])
    try:
        model_cfg = ModelConfig(
            num_classes=ds.num_classes,
            feature_dim=ds.feature_dim,
            tag_vocab_size=ds.tag_vocab_size,
            num_layers=values["layers"],
            hidden_dim=values["hidden"],
            aggregator=Aggregator.from_name(values["aggregator"]),
            epsilon_init=eps_init,
            epsilon_learnable=eps_learnable,
            readout=values["readout"],
        )
        train_cfg = TrainConfig(
            seed=values["seed"],
            epochs=values["epochs"],
            batch_size=values["batch"],
            base_lr=values["lr"],
            folds=values["folds"],
            repeats=values.get("repeats", 1),
            jobs=values["jobs"],
        )
    except ValueError as exc:  # invalid flag combinations are usage errors
        raise UsageError(str(exc)) from None
    return model_cfg, train_cfg


def _out_dir(values: dict) -> Path | None:
    if not values.get("out"):
        return None
    out = Path(values["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _plot_curves(path: Path, summaries) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "ivgnn"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for s in summaries:
            xs = np.arange(s.epochs)
            ax.plot(xs, s.mean_test_curve, label=f"{s.variant} test")
            ax.plot(xs, s.mean_train_curve, linestyle="--", alpha=0.6, label=f"{s.variant} train")
        ax.set_xlabel("epoch")
        ax.set_ylabel("accuracy")
        ax.set_ylim(0.0, 1.02)
        ax.legend(loc="lower right", fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_gen_synth(values: dict) -> int:
    try:
        cfg = SynthConfig(size=values["size"], seed=values["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ds = BUILDERS[values["rule"]](cfg)
    out = Path(values["out"])
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / "dataset.txt"
    save_tu_dataset(ds, data_path)
    stats = format_dataset_stats(ds)
    (out / "stats.txt").write_text(stats + "\n")
    print(f"wrote {data_path}")
    print(stats)
    return 0


def _cmd_stats(values: dict) -> int:
    print(format_dataset_stats(load_tu_dataset(_data_path(values["data"]))))
    return 0


def _cmd_intervalize(values: dict) -> int:
    if values["mode"] == "biased" and values["seed"] is None:
        raise UsageError("--seed is required for biased mode")
    ds = load_tu_dataset(_data_path(values["data"]))
    out = Path(values["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    save_tu_dataset(intervalize_tags(ds, values["mode"], values["seed"]), out)
    print(f"wrote {out}")
    return 0


def _cmd_train(values: dict) -> int:
    ds = _load_dataset(values)
    model_cfg, train_cfg = _configs(values, ds)
    split = stratified_kfold(ds, train_cfg.folds, train_cfg.seed)
    model, report = train_single(ds, split, 0, model_cfg, train_cfg)
    print(
        f"fold 0: best test acc {report.best_test_acc:.4f} at epoch {report.best_epoch}, "
        f"final train acc {report.train_acc[-1]:.4f}"
    )
    out = _out_dir(values)
    if out is not None:
        model.save(out / "model.npz")
        summary = summarize_reports(model_cfg.aggregator.value, train_cfg, [report])
        write_curves_csv(out / "curves.csv", summary)
        print(f"wrote {out / 'model.npz'} and {out / 'curves.csv'}")
    return 0


def _cmd_cv(values: dict) -> int:
    ds = _load_dataset(values)
    model_cfg, train_cfg = _configs(values, ds)
    summary = cross_validate(ds, model_cfg, train_cfg)
    print(format_summary_table([summary]))
    out = _out_dir(values)
    if out is not None:
        name = Path(values["data"]).stem
        write_results_csv(out / "results.csv", name, [summary])
        write_curves_csv(out / "curves.csv", summary)
        write_summary_csv(out / "summary.csv", name, [summary])
        print(f"wrote results.csv, curves.csv, summary.csv in {out}")
    return 0


def _cmd_compare(values: dict) -> int:
    if values["plot"] and not values.get("out"):
        raise UsageError("--plot requires --out")
    ds = _load_dataset(values)
    model_cfg, train_cfg = _configs(values, ds)
    summaries = compare_aggregators(ds, model_cfg, train_cfg)
    print(format_summary_table(summaries))
    out = _out_dir(values)
    if out is not None:
        name = Path(values["data"]).stem
        write_results_csv(out / "results.csv", name, summaries)
        write_summary_csv(out / "summary.csv", name, summaries)
        for s in summaries:
            write_curves_csv(out / f"curves_{s.variant}.csv", s)
        if values["plot"]:
            _plot_curves(out / "curves.svg", summaries)
        print(f"wrote comparison outputs in {out}")
    return 0


def _cmd_axioms(values: dict) -> int:
    step = values["grid"]
    if not 0.0 < step <= 0.5:
        raise UsageError("--grid must be in (0, 0.5]")
    if values["variant"] == "all":
        variants = tuple(Aggregator)
    else:
        variants = (Aggregator.from_name(values["variant"]),)
    ok = True
    for variant in variants:
        report = check_axioms(variant, step)
        print(format_axiom_report(report))
        print()
        ok = ok and (
            report.closure_ok
            and report.boundary_ok
            and report.idempotency_ok
            and report.commutativity_ok
            and report.fold_symmetry_ok
        )
    # the total order underpins only the order-theoretic aggregator
    if Aggregator.AGR_NEW in variants:
        order = check_order_properties(step)
        print(format_order_report(order))
        ok = ok and order.all_ok
    if not ok:
        print("error: asserted interval properties were violated", file=sys.stderr)
        return 2
    return 0


def _parse_int_list(opt_name: str, text: str) -> list[int]:
    try:
        items = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{opt_name}: expected comma-separated integers, got {text!r}") from None
    if not items:
        raise UsageError(f"{opt_name}: empty list")
    return items


def _cmd_bench(values: dict) -> int:
    sizes = _parse_int_list("--sizes", values["sizes"])
    hiddens = _parse_int_list("--hidden", values["hidden"])
    if sorted(sizes) != sizes:
        raise UsageError("--sizes must be ascending")
    rows = complexity_bench(
        sizes, hiddens, values["seed"], num_layers=values["layers"], repeats=values["repeats"]
    )
    print("nodes  edges  hidden  layers  sec/epoch  activations  params")
    for r in rows:
        print(
            f"{r.num_nodes:>5}  {r.num_edges:>5}  {r.hidden_dim:>6}  {r.num_layers:>6}  "
            f"{r.seconds_per_epoch:>9.4f}  {r.activation_elements:>11}  {r.param_scalars:>6}"
        )
    base = [r for r in rows if r.hidden_dim == hiddens[0]]
    if len(base) >= 2:
        slope, _, r2 = linear_fit([r.num_nodes for r in base], [r.seconds_per_epoch for r in base])
        print(f"time vs nodes (hidden {hiddens[0]}): slope {slope:.3e} s/node, R^2 {r2:.4f}")
        _, _, act_r2 = linear_fit(
            [r.num_nodes for r in base], [r.activation_elements for r in base]
        )
        print(f"activations vs nodes (hidden {hiddens[0]}): R^2 {act_r2:.4f}")
    if len(hiddens) >= 2:
        largest = max(sizes)
        at = {r.hidden_dim: r.seconds_per_epoch for r in rows if r.num_nodes == largest}
        ratio = at[hiddens[1]] / at[hiddens[0]]
        print(
            f"time ratio hidden {hiddens[0]} -> {hiddens[1]} at {largest} nodes: {ratio:.2f}"
        )
    out = _out_dir(values)
    if out is not None:
        write_bench_csv(out / "bench.csv", rows)
        print(f"wrote {out / 'bench.csv'}")
    return 0


_HANDLERS = {
    "gen-synth": _cmd_gen_synth,
    "intervalize": _cmd_intervalize,
    "train": _cmd_train,
    "cv": _cmd_cv,
    "compare": _cmd_compare,
    "axioms": _cmd_axioms,
    "bench": _cmd_bench,
    "stats": _cmd_stats,
}


def _run(argv) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.cmd is None:
        raise UsageError("a subcommand is required")
    config = _parse_config(ns.config) if ns.config else {}
    values = _merge(ns, _OPTIONS[ns.cmd], config)
    return _HANDLERS[ns.cmd](values)


def main(argv=None) -> int:
    try:
        return _run(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(_SYNOPSIS, file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures map to exit code 2
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
