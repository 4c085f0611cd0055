"""Command line entry point: ``qdephase <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from .. import neuralnet as nn
from .. import states
from ..neuralnet import Task, TrainConfig
from . import experiments as ex
from .datasets import build_dataset, export_dataset, import_dataset

log = logging.getLogger("qdephase")


def _dims(text):
    return tuple(int(x) for x in text.replace("x", ",").split(",") if x.strip())


def _k_range(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _cfg(args, task):
    lr = args.lr if args.lr is not None else nn.DEFAULT_LR[task]
    return TrainConfig(batch_size=args.batch, epochs=args.epochs, learning_rate=lr, seed=args.seed)


def _default_hidden(args, task):
    if args.arch:
        return _dims(args.arch)
    return ex.REGRESSION_HIDDEN if task == "regress" else ex.SMALL_HIDDEN


def cmd_gen(args):
    ds = build_dataset(args.family, args.n, args.seed, args.channel,
                       eig_concentration=args.eig_concentration)
    meta = export_dataset(ds, args.out)
    print(json.dumps({k: meta[k] for k in ("family", "channel", "n", "seed", "entangled_fraction")}))


def cmd_calibrate(args):
    value = states.calibrate_entanglement_rate(args.target_rate, args.samples, states.sample_rng(args.seed))
    print(json.dumps({"target_rate": args.target_rate, "samples": args.samples,
                      "seed": args.seed, "eig_concentration": value}))


def cmd_train(args):
    ds = import_dataset(args.data)
    train, test = ex.split_dataset(ds, seed=args.seed)
    hidden = _default_hidden(args, args.task)
    model = ex.train_on(train, args.features, args.task, hidden, _cfg(args, args.task))
    nn.save_model(model, args.model_out)
    x = test.features[:, :args.features]
    if args.task == "classify":
        metric = {"accuracy": nn.accuracy(model, x, test.entangled)}
    else:
        metric = {"r2": nn.r_squared(nn.forward(model, x), test.concurrence)}
    print(json.dumps({"model": str(args.model_out), "held_out": len(test), **metric}))


def cmd_eval(args):
    model = nn.load_model(args.model)
    ds = import_dataset(args.data)
    x = ds.features[:, :model.input_dim]
    if model.task is Task.CLASSIFY:
        metric = {"accuracy": nn.accuracy(model, x, ds.entangled, args.threshold)}
    else:
        metric = {"r2": nn.r_squared(nn.forward(model, x), ds.concurrence)}
    print(json.dumps({"n": len(ds), **metric}))


def cmd_sweep(args):
    ds = import_dataset(args.data)
    train, test = ex.split_dataset(ds, seed=args.seed)
    ks = _k_range(args.k_range)
    hidden = _default_hidden(args, args.task)
    cfg = _cfg(args, args.task)
    exp_id = f"sweep-{ds.family.value}-{ds.channel.value}-{args.task}"
    if args.task == "classify":
        report = ex.run_classification_experiment(train, test, ks, hidden, cfg, experiment_id=exp_id)
    else:
        report = ex.run_regression_experiment(train, test, ks, hidden, cfg, experiment_id=exp_id)
    report.save(args.report)
    print(json.dumps({str(k): v for k, v in report.per_k_metric.items()}))


def cmd_cross(args):
    a, b = import_dataset(args.train_data), import_dataset(args.eval_data)
    hidden = _default_hidden(args, "classify")
    acc = ex.run_cross_evaluation(a, b, args.features, hidden, _cfg(args, "classify"), split_seed=args.seed)
    report = ex.ExperimentReport(
        experiment_id=f"cross-{a.family.value}-to-{b.family.value}",
        task="classify",
        per_k_metric={args.features: acc},
        entangled_fraction=b.entangled_fraction,
        config={"train_data": str(args.train_data), "eval_data": str(args.eval_data),
                "hidden": list(hidden)},
    )
    report.save(args.report)
    print(json.dumps({"accuracy": acc}))


def cmd_hist(args):
    report = ex.ExperimentReport.load(args.report)
    hist = ex.histogram_misclassified(report, args.axis, args.bins, args.k)
    bands = hist if isinstance(hist, list) else [dict(hist, band=None)]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["band_lo", "band_hi", "bin_lo", "bin_hi", "misclassified", "entangled"])
        for h in bands:
            lo, hi = h["band"] if h["band"] else ("", "")
            edges = h["edges"]
            for i in range(len(edges) - 1):
                w.writerow([lo, hi, repr(float(edges[i])), repr(float(edges[i + 1])),
                            int(h["misclassified"][i]), int(h["entangled"][i])])


def _add_train_flags(p):
    p.add_argument("--arch", help="hidden layer widths, e.g. 15 or 100,50,50")
    p.add_argument("--lr", type=float, help="learning rate (default 0.05 classify, 0.01 regress)")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="qdephase", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labeled dataset")
    p.add_argument("--family", choices=["psi1", "psi2", "psi3", "mixed"], required=True)
    p.add_argument("--channel", choices=["dephase", "depolarize", "none"], required=True)
    p.add_argument("--n", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eig-concentration", type=float, default=states.DEFAULT_EIG_CONCENTRATION)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("calibrate", help="fit the mixed-state eigenvalue concentration")
    p.add_argument("--target-rate", type=float, default=0.42)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("train", help="train one model on the 80%% split and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=["classify", "regress"], required=True)
    p.add_argument("--features", type=int, default=15)
    p.add_argument("--model-out", required=True)
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a saved model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="held-out metric for each feature-prefix length")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=["classify", "regress"], required=True)
    p.add_argument("--k-range", default="1..15")
    p.add_argument("--report", required=True)
    _add_train_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cross", help="train on one dataset, evaluate on another")
    p.add_argument("--train-data", required=True)
    p.add_argument("--eval-data", required=True)
    p.add_argument("--features", type=int, default=15)
    p.add_argument("--report", required=True)
    _add_train_flags(p)
    p.set_defaults(func=cmd_cross)

    p = sub.add_parser("hist", help="misclassification histograms from a sweep report")
    p.add_argument("--report", required=True)
    p.add_argument("--axis", choices=["p", "theta", "p-by-theta"], default="p")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hist)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "hist":
        args.axis = {"p-by-theta": "p_by_theta_band"}.get(args.axis, args.axis)
    try:
        args.func(args)
    except (OSError, ValueError, nn.TrainingDivergedError) as err:
        log.error("%s", err)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
