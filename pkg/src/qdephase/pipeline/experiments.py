"""Feature-prefix sweeps, cross-dataset evaluation and misclassification histograms."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .. import neuralnet as nn
from ..neuralnet import Task, TrainConfig

SMALL_HIDDEN = (15,)
LARGE_HIDDEN = (100,)
REGRESSION_HIDDEN = (100, 50, 50)
THETA_BANDS = ((0.0, math.pi / 8), (math.pi / 8, math.pi / 4),
               (math.pi / 4, 3 * math.pi / 8), (3 * math.pi / 8, math.pi / 2))

# Named run settings; sample counts are desk scale unless the preset is "full".
PRESETS = {
    "desk": {"n": 50_000, "hidden": SMALL_HIDDEN, "epochs": 200},
    "full": {"n": 200_000, "hidden": SMALL_HIDDEN, "epochs": 200},
    "large-mixed": {"n": 1_000_000, "hidden": LARGE_HIDDEN, "epochs": 200},
}


@dataclass
class ExperimentReport:
    experiment_id: str
    task: str
    per_k_metric: dict
    entangled_fraction: float
    misclassified: dict = field(default_factory=dict)
    entangled_instances: dict = field(default_factory=dict)
    predicted_vs_actual: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def metric_name(self):
        return "accuracy" if self.task == Task.CLASSIFY.value else "r2"

    def to_json(self):
        d = asdict(self)
        d["per_k_metric"] = {str(k): v for k, v in self.per_k_metric.items()}
        d["misclassified"] = {str(k): v for k, v in self.misclassified.items()}
        return json.dumps(d, indent=1)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d["per_k_metric"] = {int(k): v for k, v in d["per_k_metric"].items()}
        d["misclassified"] = {int(k): v for k, v in d.get("misclassified", {}).items()}
        return cls(**d)

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())


def split_dataset(ds, train_frac=0.8, seed=0):
    """Seeded shuffle, then the first ``train_frac`` of samples for training."""
    order = np.random.default_rng(seed).permutation(len(ds))
    cut = int(round(train_frac * len(ds)))
    if not 0 < cut < len(ds):
        raise ValueError(f"split of {len(ds)} samples at {train_frac} leaves an empty side")
    return ds.subset(order[:cut]), ds.subset(order[cut:])


def _check_k(k):
    if not 1 <= k <= 15:
        raise ValueError(f"feature count must lie in 1..15, got {k}")


def _targets(ds, task):
    return ds.entangled.astype(float) if Task(task) is Task.CLASSIFY else ds.concurrence


def train_on(ds, k, task, hidden, cfg, init_seed=None):
    """Train a fresh network on the first ``k`` features of ``ds``."""
    _check_k(k)
    model = nn.init_model((k, *hidden, 1), task, cfg.seed if init_seed is None else init_seed)
    model, _ = nn.train(model, ds.features[:, :k], _targets(ds, task), cfg)
    return model


def _param_columns(ds, idx):
    return {"p": ds.params["p"][idx].tolist(), "theta": ds.params["theta"][idx].tolist()}


def run_classification_experiment(train, test, feature_counts, hidden=SMALL_HIDDEN,
                                  cfg=TrainConfig(), experiment_id="classification"):
    """Held-out accuracy for each feature-prefix length in ``feature_counts``."""
    per_k, mis = {}, {}
    y_test = test.entangled
    for k in feature_counts:
        model = train_on(train, k, Task.CLASSIFY, hidden, cfg)
        out = nn.forward(model, test.features[:, :k])
        wrong = np.flatnonzero((out >= 0.5).astype(int) != y_test)
        per_k[k] = float(1.0 - wrong.size / len(test))
        mis[k] = _param_columns(test, wrong)
    return ExperimentReport(
        experiment_id=experiment_id,
        task=Task.CLASSIFY.value,
        per_k_metric=per_k,
        entangled_fraction=train.entangled_fraction,
        misclassified=mis,
        entangled_instances=_param_columns(test, np.flatnonzero(y_test == 1)),
        config={"hidden": list(hidden), **asdict(cfg), "family": train.family.value,
                "channel": train.channel.value, "n_train": len(train), "n_test": len(test)},
    )


def run_cross_evaluation(model_train, eval_ds, k, hidden=SMALL_HIDDEN, cfg=TrainConfig(),
                         split_seed=0):
    """Train on the 80% split of ``model_train``; accuracy on every sample of ``eval_ds``."""
    train, _ = split_dataset(model_train, seed=split_seed)
    model = train_on(train, k, Task.CLASSIFY, hidden, cfg)
    return nn.accuracy(model, eval_ds.features[:, :k], eval_ds.entangled)


def run_regression_experiment(train, test, feature_counts, hidden=REGRESSION_HIDDEN,
                              cfg=TrainConfig(learning_rate=nn.DEFAULT_LR["regress"]),
                              distribution_k=4, experiment_id="regression"):
    """Held-out R^2 of concurrence for each feature-prefix length."""
    if np.ptp(test.concurrence) == 0.0 or np.ptp(train.concurrence) == 0.0:
        raise ValueError("concurrence has zero variance; R^2 is undefined")
    per_k, pairs = {}, {}
    for k in feature_counts:
        model = train_on(train, k, Task.REGRESS, hidden, cfg)
        pred = nn.forward(model, test.features[:, :k])
        per_k[k] = nn.r_squared(pred, test.concurrence)
        if k == distribution_k:
            pairs = {"predicted": pred.tolist(), "actual": test.concurrence.tolist()}
    return ExperimentReport(
        experiment_id=experiment_id,
        task=Task.REGRESS.value,
        per_k_metric=per_k,
        entangled_fraction=train.entangled_fraction,
        predicted_vs_actual=pairs,
        config={"hidden": list(hidden), **asdict(cfg), "family": train.family.value,
                "channel": train.channel.value, "n_train": len(train), "n_test": len(test)},
    )


def _counts(values, lo, hi, bins):
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return counts, edges


def histogram_misclassified(report, axis="p", bins=50, k=None):
    """Binned counts of misclassified and entangled test instances.

    ``axis`` is ``"p"``, ``"theta"`` or ``"p_by_theta_band"``; the last returns one
    p-histogram per theta band in ``THETA_BANDS``.  ``k`` picks the feature count
    (default: 4 when present, else the smallest recorded).
    """
    axis = axis.replace("-", "_")
    if k is None:
        ks = sorted(report.misclassified)
        k = 4 if 4 in ks else (ks[0] if ks else None)
    mis = report.misclassified.get(k, {"p": [], "theta": []})
    ent = report.entangled_instances or {"p": [], "theta": []}

    if axis == "p":
        m, edges = _counts(mis["p"], 0.0, 1.0, bins)
        e, _ = _counts(ent["p"], 0.0, 1.0, bins)
        return {"edges": edges, "misclassified": m, "entangled": e}
    if axis == "theta":
        m, edges = _counts(mis["theta"], 0.0, 2 * math.pi, bins)
        e, _ = _counts(ent["theta"], 0.0, 2 * math.pi, bins)
        return {"edges": edges, "misclassified": m, "entangled": e}
    if axis == "p_by_theta_band":
        out = []
        for lo, hi in THETA_BANDS:
            def in_band(rec):
                th = np.asarray(rec["theta"], dtype=float)
                keep = (th >= lo) & (th <= hi)
                return np.asarray(rec["p"], dtype=float)[keep]
            m, edges = _counts(in_band(mis) if mis["p"] else [], 0.0, 1.0, bins)
            e, _ = _counts(in_band(ent) if ent["p"] else [], 0.0, 1.0, bins)
            out.append({"band": (lo, hi), "edges": edges, "misclassified": m, "entangled": e})
        return out
    raise ValueError(f"unknown histogram axis {axis!r}")


def histogram_mode(hist):
    """Center of the bin holding the most misclassified instances."""
    edges = hist["edges"]
    i = int(np.argmax(hist["misclassified"]))
    return 0.5 * (edges[i] + edges[i + 1])
