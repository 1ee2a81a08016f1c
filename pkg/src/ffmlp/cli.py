"""Command-line front end: fit, eval, train-bp, plot/responses, bench."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import bp, datasets, grid, network, presets
from .errors import FFMLPError, ParameterError
from .pipeline import FitResult, fit_ffmlp

SYNTHETIC = tuple(presets.PRESETS)
DATASET_CHOICES = SYNTHETIC + ("csv",)

# Sub-seeds derived from --seed so one flag pins the whole run.
GEN_OFFSET, SPLIT_OFFSET, GMM_OFFSET, DRAW_OFFSET, BP_OFFSET = 0, 1, 2, 3, 4


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, choices=DATASET_CHOICES)
    p.add_argument("--csv", help="CSV path (required with --dataset csv)")
    p.add_argument("--label", help="label column name or 0-based index")
    p.add_argument("--drop-zero", help="comma-separated columns whose zero rows are dropped")
    p.add_argument("--test-fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="base seed for generation/split/fit")
    p.add_argument("--n-per-blob", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--offset", type=float, default=None, help="XOR blob center offset")
    p.add_argument("--spacing", type=float, default=None, help="grid blob spacing")
    p.add_argument("--factor", type=float, default=None, help="inner circle radius")
    p.add_argument("--n", type=int, default=None, help="total circle-and-ring samples")
    p.add_argument("--pair-offset", default=None, help="dx,dy translation of the second moon pair")


def _add_fit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--components", type=int, default=None, help="mixture components per class (uniform)")
    p.add_argument("--components-per-class", default=None, help="comma-separated per-class counts")
    p.add_argument("--gmm-seed", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None, help="pruning error threshold")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--p", dest="big_p", type=float, default=1000.0, help="isolation weight magnitude P")
    p.add_argument("--reg", type=float, default=1e-6, help="relative covariance ridge")
    p.add_argument("--sample-mode", choices=("raw", "gmm"), default=None)


def _geometry_overrides(args: argparse.Namespace, name: str) -> dict:
    geo: dict = {}
    if args.n_per_blob is not None:
        geo["n_per_blob"] = args.n_per_blob
    if args.sigma is not None:
        geo["sigma"] = args.sigma
    if name == "xor" and args.offset is not None:
        geo["center_offset"] = args.offset
    if name == "blobs9" and args.spacing is not None:
        geo["spacing"] = args.spacing
    if name in ("moons2", "moons4") and args.noise is not None:
        geo["noise"] = args.noise
    if name == "circle":
        if args.noise is not None:
            geo["noise"] = args.noise
        if args.factor is not None:
            geo["factor"] = args.factor
        if args.n is not None:
            geo["n"] = args.n
        geo.pop("n_per_blob", None)
        geo.pop("sigma", None)
    if name == "moons4" and args.pair_offset is not None:
        geo["pair_offset"] = tuple(float(v) for v in args.pair_offset.split(","))
    if name in ("moons2", "moons4"):
        geo.pop("sigma", None)
        if args.n_per_blob is not None:
            geo["n_per_moon"] = geo.pop("n_per_blob")
    return geo


def _resolve_dataset(args: argparse.Namespace) -> tuple[datasets.LabeledDataset, dict]:
    """Materialize the requested dataset plus the resolved config dict."""
    name = args.dataset
    if name == "csv":
        if not args.csv or args.label is None:
            raise ParameterError("--dataset csv requires --csv PATH and --label COL")
        drop = tuple(s.strip() for s in args.drop_zero.split(",")) if args.drop_zero else None
        ds = datasets.load_csv(args.csv, args.label, drop)
        seed = args.seed if args.seed is not None else 1
        tf = args.test_fraction if args.test_fraction is not None else 0.4
        cfg = {"dataset": "csv", "csv": args.csv, "label": args.label, "drop_zero": drop}
    else:
        preset = presets.PRESETS[name]
        seed = args.seed if args.seed is not None else preset.seed
        tf = args.test_fraction if args.test_fraction is not None else preset.test_fraction
        geo = _geometry_overrides(args, name)
        ds = presets.generate(preset, seed=seed + GEN_OFFSET, **geo)
        cfg = {"dataset": name, **{**preset.params, **geo}}
    cfg.update({"seed": seed, "test_fraction": tf})
    return ds, cfg


def _resolve_components(args: argparse.Namespace, name: str):
    if getattr(args, "components_per_class", None):
        return tuple(int(v) for v in args.components_per_class.split(","))
    if getattr(args, "components", None) is not None:
        return args.components
    if name in presets.PRESETS:
        return presets.PRESETS[name].components
    return 2


def _resolve_threshold(args: argparse.Namespace, name: str) -> float:
    if getattr(args, "threshold", None) is not None:
        return args.threshold
    if name in presets.PRESETS:
        return presets.PRESETS[name].threshold
    return 0.05


def _resolve_sample_mode(args: argparse.Namespace, name: str) -> str:
    if getattr(args, "sample_mode", None):
        return args.sample_mode
    if name in presets.PRESETS:
        return presets.PRESETS[name].sample_mode
    return "gmm"


def _split(ds: datasets.LabeledDataset, cfg: dict) -> tuple[datasets.LabeledDataset, datasets.LabeledDataset]:
    spec = datasets.SplitSpec(cfg["test_fraction"], cfg["seed"] + SPLIT_OFFSET, stratified=True)
    return datasets.split(ds, spec)


def _run_fit(args: argparse.Namespace) -> tuple[FitResult, datasets.LabeledDataset, datasets.LabeledDataset, dict]:
    ds, cfg = _resolve_dataset(args)
    train, test = _split(ds, cfg)
    comps = _resolve_components(args, args.dataset)
    threshold = _resolve_threshold(args, args.dataset)
    mode = _resolve_sample_mode(args, args.dataset)
    gmm_seed = args.gmm_seed if getattr(args, "gmm_seed", None) is not None else cfg["seed"] + GMM_OFFSET
    cfg.update(
        {
            "components": list(comps) if isinstance(comps, tuple) else comps,
            "threshold": threshold,
            "sample_mode": mode,
            "gmm_seed": gmm_seed,
            "P": args.big_p,
            "reg": args.reg,
            "prune": not args.no_prune,
        }
    )
    result = fit_ffmlp(
        train,
        comps,
        threshold=threshold,
        P=args.big_p,
        reg=args.reg,
        gmm_seed=gmm_seed,
        draw_seed=cfg["seed"] + DRAW_OFFSET,
        sample_mode=mode,
        do_prune=not args.no_prune,
    )
    return result, train, test, cfg


def _print_fit_report(result: FitResult, train, test, cfg: dict) -> None:
    d, d1, d2, c = result.layer_sizes
    t = result.timings
    test_acc = network.accuracy(result.network, test.samples, test.labels)
    print(f"dataset: {cfg['dataset']} (n_train={train.n}, n_test={test.n}, d={d}, classes={c})")
    print(f"config: {json.dumps(cfg, sort_keys=True)}")
    if result.prune_report is not None:
        print(
            f"planes: {result.initial_plane_count} -> {len(result.plane_set)} after pruning "
            f"(threshold {result.prune_report.threshold}, final region error {result.prune_report.final_error:.4f})"
        )
    else:
        print(f"planes: {result.initial_plane_count} (pruning disabled)")
    print(f"layers: D_in={d}, D1={d1}, D2={d2}, D_out={c}")
    print(f"train accuracy: {_pct(result.train_accuracy)}  test accuracy: {_pct(test_acc)}")
    print(f"margin violations: {result.margin_violations.size}")
    print(
        f"timings: gmm={t.gmm_s:.5f}s boundary={t.boundary_s:.5f}s region={t.region_s:.5f}s "
        f"assign={t.assign_s:.5f}s total={t.total_s:.5f}s"
    )


def cmd_fit(args: argparse.Namespace) -> int:
    result, train, test, cfg = _run_fit(args)
    _print_fit_report(result, train, test, cfg)
    if args.out:
        network.serialize(result.network, args.out, config=cfg)
        print(f"model written to {args.out}")
    return 0


def _confusion(labels: np.ndarray, predicted: np.ndarray, class_count: int) -> np.ndarray:
    m = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(m, (labels, predicted), 1)
    return m


def cmd_eval(args: argparse.Namespace) -> int:
    net = network.deserialize(args.model)
    ds, cfg = _resolve_dataset(args)
    if ds.dim != net.dim:
        raise ParameterError(f"model expects d={net.dim} but dataset has d={ds.dim}")
    train, test = _split(ds, cfg)
    for split_name, part in (("train", train), ("test", test)):
        pred = network.predict_batch(net, part.samples)
        acc = float(np.mean(pred == part.labels))
        print(f"{split_name} accuracy: {_pct(acc)}")
        conf = _confusion(part.labels, pred, max(net.class_count, part.class_count))
        print(f"{split_name} confusion (rows=true, cols=predicted):")
        for row in conf:
            print("  " + " ".join(f"{v:6d}" for v in row))
    return 0


def cmd_train_bp(args: argparse.Namespace) -> int:
    result, train, test, cfg = _run_fit(args)
    arch = result.layer_sizes
    print(f"architecture: {arch}")
    ff_train = result.train_accuracy
    ff_test = network.accuracy(result.network, test.samples, test.labels)
    print(f"constructed network: train {_pct(ff_train)}  test {_pct(ff_test)}")

    rows = []
    finals = []
    base_seed = cfg["seed"] + BP_OFFSET
    for run in range(args.runs):
        tcfg = bp.TrainConfig(
            epochs=args.epochs,
            learning_rate=args.lr,
            momentum=args.momentum,
            batch_size=args.batch_size,
            init="from_ff" if args.init == "ff" else "xavier_uniform",
            seed=base_seed + run,
        )
        t0 = time.perf_counter()
        _, hist = bp.train_bp(
            arch,
            result.network if args.init == "ff" else None,
            train.samples,
            train.labels,
            test.samples,
            test.labels,
            tcfg,
        )
        elapsed = time.perf_counter() - t0
        finals.append((hist.train_acc[-1] if hist.train_acc else ff_train,
                       hist.test_acc[-1] if hist.test_acc else ff_test,
                       elapsed))
        for e in range(len(hist.loss)):
            rows.append((run, e, hist.train_acc[e], hist.test_acc[e], hist.loss[e]))
    tr = np.asarray([f[0] for f in finals])
    te = np.asarray([f[1] for f in finals])
    el = np.asarray([f[2] for f in finals])
    print(
        f"bp ({args.init} init, {args.epochs} epochs, lr {args.lr}, momentum {args.momentum}, "
        f"batch {args.batch_size}, {args.runs} runs): "
        f"train {100 * tr.mean():.2f} +- {100 * tr.std():.2f}, "
        f"test {100 * te.mean():.2f} +- {100 * te.std():.2f}, "
        f"time {el.mean():.3f}s +- {el.std():.3f}s"
    )
    if args.history_out:
        with open(args.history_out, "w", encoding="utf-8") as fh:
            fh.write("run,epoch,train_acc,test_acc,loss\n")
            for run, e, a, b, l in rows:
                fh.write(f"{run},{e},{a!r},{b!r},{l!r}\n")
        print(f"history written to {args.history_out}")
    return 0


def _parse_target(target: str) -> tuple[str, int]:
    if target == "decision":
        return "decision", -1
    for prefix, layer in (("l1:", 1), ("l2:", 2)):
        if target.startswith(prefix):
            try:
                return f"l{layer}", int(target[len(prefix):])
            except ValueError:
                raise ParameterError(f"bad neuron index in target {target!r}") from None
    raise ParameterError(f"target must be 'decision', 'l1:K', or 'l2:K', got {target!r}")


def cmd_plot(args: argparse.Namespace, require_neuron: bool = False) -> int:
    net = network.deserialize(args.model)
    kind, neuron = _parse_target(args.target)
    if require_neuron and kind == "decision":
        raise ParameterError("responses requires a neuron target (l1:K or l2:K)")
    try:
        box = tuple(float(v) for v in args.box.split(","))
    except ValueError:
        raise ParameterError(f"bad --box {args.box!r}; expected x0,x1,y0,y1") from None
    if len(box) != 4:
        raise ParameterError("--box must have four comma-separated values")
    try:
        nx, ny = (int(v) for v in args.resolution.split(","))
    except ValueError:
        raise ParameterError(f"bad --resolution {args.resolution!r}; expected nx,ny") from None
    if kind == "decision":
        dump = grid.decision_grid(net, box, nx, ny)
    else:
        dump = grid.activation_grid(net, box, nx, ny, int(kind[1]), neuron)
    grid.write_csv(dump, args.out_prefix + ".csv")
    grid.write_ppm(dump, args.out_prefix + ".ppm")
    print(f"wrote {args.out_prefix}.csv and {args.out_prefix}.ppm")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    names = args.datasets.split(",") if args.datasets else list(SYNTHETIC)
    if args.csv_dir and not args.datasets:
        names += [n for n in presets.REAL_DATA_DEFAULTS
                  if os.path.exists(os.path.join(args.csv_dir, f"{n}.csv"))]
    print("dataset            D1   D2   ff_train  ff_test   gmm_s    boundary_s  region_s  assign_s  total_s")
    bp_rows = []
    for name in names:
        sub = argparse.Namespace(**vars(args))
        sub.dataset = name
        for unset in ("csv", "label", "drop_zero", "test_fraction", "seed", "n_per_blob", "sigma",
                      "noise", "offset", "spacing", "factor", "n", "pair_offset", "components",
                      "components_per_class", "gmm_seed", "threshold"):
            if not hasattr(sub, unset):
                setattr(sub, unset, None)
        sub.no_prune = False
        sub.big_p = 1000.0
        sub.reg = 1e-6
        sub.sample_mode = None
        if name in presets.REAL_DATA_DEFAULTS:
            if not args.csv_dir:
                raise ParameterError(f"dataset {name} needs --csv-dir pointing at {name}.csv")
            rd = presets.REAL_DATA_DEFAULTS[name]
            sub.dataset = "csv"
            sub.csv = os.path.join(args.csv_dir, f"{name}.csv")
            sub.label = rd["label"]
            sub.drop_zero = ",".join(rd["drop_zero"]) if rd.get("drop_zero") else None
            sub.test_fraction = rd["test_fraction"]
            sub.seed = rd["seed"]
            sub.components = rd["components"]
            sub.threshold = rd["threshold"]
        result, train, test, cfg = _run_fit(sub)
        t = result.timings
        d, d1, d2, c = result.layer_sizes
        test_acc = network.accuracy(result.network, test.samples, test.labels)
        print(
            f"{name:<18} {d1:<4} {d2:<4} {_pct(result.train_accuracy):>8}  {_pct(test_acc):>8} "
            f"{t.gmm_s:>8.5f} {t.boundary_s:>11.5f} {t.region_s:>9.5f} {t.assign_s:>9.5f} {t.total_s:>9.5f}"
        )
        if not args.skip_bp:
            for epochs in (int(e) for e in args.bp_epochs.split(",")):
                accs, times = [], []
                for run in range(args.runs):
                    tcfg = bp.TrainConfig(epochs=epochs, seed=cfg["seed"] + BP_OFFSET + run)
                    t0 = time.perf_counter()
                    _, hist = bp.train_bp(result.layer_sizes, None, train.samples, train.labels,
                                          test.samples, test.labels, tcfg)
                    times.append(time.perf_counter() - t0)
                    accs.append(hist.test_acc[-1])
                bp_rows.append(
                    f"{name:<18} bp({epochs:>2}) test {100 * np.mean(accs):6.2f} +- {100 * np.std(accs):5.2f}  "
                    f"time {np.mean(times):8.5f}s +- {np.std(times):7.5f}s"
                )
    if bp_rows:
        print()
        for row in bp_rows:
            print(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffmlp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="construct a network and write the model JSON")
    _add_dataset_args(p_fit)
    _add_fit_args(p_fit)
    p_fit.add_argument("--out", help="model JSON output path")
    p_fit.set_defaults(func=cmd_fit)

    p_eval = sub.add_parser("eval", help="evaluate a model file on a dataset")
    p_eval.add_argument("--model", required=True)
    _add_dataset_args(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_bp = sub.add_parser("train-bp", help="train a same-architecture network by backprop")
    _add_dataset_args(p_bp)
    _add_fit_args(p_bp)
    p_bp.add_argument("--init", choices=("ff", "xavier"), default="xavier")
    p_bp.add_argument("--epochs", type=int, default=50)
    p_bp.add_argument("--lr", type=float, default=0.01)
    p_bp.add_argument("--momentum", type=float, default=0.0)
    p_bp.add_argument("--batch-size", type=int, default=bp.DEFAULT_BATCH_SIZE)
    p_bp.add_argument("--runs", type=int, default=5)
    p_bp.add_argument("--history-out", help="per-epoch history CSV path")
    p_bp.set_defaults(func=cmd_train_bp)

    for cmd, require_neuron in (("plot", False), ("responses", True)):
        p_plot = sub.add_parser(cmd, help="dump a decision or neuron-response grid")
        p_plot.add_argument("--model", required=True)
        p_plot.add_argument("--box", default="-4,4,-4,4", help="x0,x1,y0,y1")
        p_plot.add_argument("--resolution", default="200,200", help="nx,ny")
        p_plot.add_argument(
            "--target",
            default="l1:0" if require_neuron else "decision",
            help="decision, l1:K, or l2:K",
        )
        p_plot.add_argument("--out-prefix", required=True)
        p_plot.set_defaults(func=lambda a, rn=require_neuron: cmd_plot(a, require_neuron=rn))

    p_bench = sub.add_parser("bench", help="run the accuracy/timing matrix over the presets")
    p_bench.add_argument("--datasets", help="comma-separated preset names (default: all synthetic)")
    p_bench.add_argument("--csv-dir", help="directory holding iris.csv/wine.csv/bcw.csv/pima.csv")
    p_bench.add_argument("--runs", type=int, default=5)
    p_bench.add_argument("--bp-epochs", default="15,50")
    p_bench.add_argument("--skip-bp", action="store_true")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FFMLPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
