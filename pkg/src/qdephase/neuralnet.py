"""Dense feed-forward networks trained with plain mini-batch SGD.

Classification models end in a sigmoid unit with binary cross-entropy;
regression models end in an identity unit with mean squared error.  Hidden
layers use ReLU.
"""

from __future__ import annotations

import copy
import math
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

BCE_EPS = 1e-12
DEFAULT_LR = {"classify": 0.05, "regress": 0.01}

MODEL_MAGIC = b"QDMLP\x00\x00\x01"
MODEL_VERSION = 1


class Activation(str, Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"


class Loss(str, Enum):
    BCE = "bce"
    MSE = "mse"


class Task(str, Enum):
    CLASSIFY = "classify"
    REGRESS = "regress"


class TrainingDivergedError(FloatingPointError):
    pass


_ACT_CODES = {Activation.RELU: 0, Activation.SIGMOID: 1, Activation.IDENTITY: 2}
_LOSS_CODES = {Loss.BCE: 0, Loss.MSE: 1}


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: Activation


@dataclass
class MlpModel:
    layers: list
    loss: Loss

    def __post_init__(self):
        if not self.layers:
            raise ValueError("model needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.weights.shape[1] != prev.weights.shape[0]:
                raise ValueError("consecutive layer dimensions do not chain")
        for layer in self.layers:
            if layer.bias.shape != (layer.weights.shape[0],):
                raise ValueError("bias length must equal the layer's output width")
        last = self.layers[-1].activation
        if self.loss is Loss.BCE and last is not Activation.SIGMOID:
            raise ValueError("binary cross-entropy requires a sigmoid output layer")

    @property
    def input_dim(self):
        return self.layers[0].weights.shape[1]

    @property
    def dims(self):
        return [self.input_dim] + [layer.weights.shape[0] for layer in self.layers]

    @property
    def task(self):
        return Task.CLASSIFY if self.loss is Loss.BCE else Task.REGRESS

    def n_params(self):
        return sum(layer.weights.size + layer.bias.size for layer in self.layers)

    def copy(self):
        return copy.deepcopy(self)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    epochs: int = 200
    learning_rate: float = 0.05
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class MetricReport:
    accuracy: float | None = None
    r2: float | None = None
    loss_curve: list = field(default_factory=list)


def init_model(layer_dims, task, seed, hidden_activation=Activation.RELU):
    """Glorot-uniform weights and zero biases for ``layer_dims = (in, h1, ..., 1)``."""
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValueError(f"invalid layer dims {layer_dims}")
    if dims[-1] != 1:
        raise ValueError("the output layer must have exactly one unit")
    task = Task(task)
    rng = np.random.default_rng(seed)
    out_act, loss = (
        (Activation.SIGMOID, Loss.BCE) if task is Task.CLASSIFY else (Activation.IDENTITY, Loss.MSE)
    )
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        act = out_act if i == len(dims) - 2 else Activation(hidden_activation)
        layers.append(Layer(w, np.zeros(fan_out), act))
    return MlpModel(layers, loss)


def _activate(z, act):
    if act is Activation.RELU:
        return np.maximum(z, 0.0)
    if act is Activation.SIGMOID:
        return 0.5 * (1.0 + np.tanh(0.5 * z))
    return z


def _forward_all(model, x):
    """Pre-activations and activations of every layer; ``acts[0]`` is the input."""
    acts, zs = [x], []
    for layer in model.layers:
        z = acts[-1] @ layer.weights.T + layer.bias
        zs.append(z)
        acts.append(_activate(z, layer.activation))
    return zs, acts


def forward(model, x):
    """Network output for one sample (scalar) or a batch (vector)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xb = np.atleast_2d(x)
    if xb.shape[1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim} inputs, got {xb.shape[1]}")
    _, acts = _forward_all(model, xb)
    out = acts[-1][:, 0]
    return float(out[0]) if single else out


def _loss(out, y, loss):
    if loss is Loss.BCE:
        o = np.clip(out, BCE_EPS, 1.0 - BCE_EPS)
        return float(-np.mean(y * np.log(o) + (1.0 - y) * np.log(1.0 - o)))
    return float(np.mean((out - y) ** 2))


def loss_value(model, x, y):
    return _loss(forward(model, np.atleast_2d(x)), np.asarray(y, dtype=float), model.loss)


def _backward(model, zs, acts, y):
    """Gradients (dW, db) per layer of the batch-mean loss."""
    m = y.shape[0]
    out = acts[-1][:, 0]
    last = model.layers[-1].activation
    if model.loss is Loss.BCE:
        delta = (out - y)[:, None] / m
    else:
        delta = (2.0 / m) * (out - y)[:, None]
        if last is Activation.SIGMOID:
            delta = delta * out[:, None] * (1.0 - out[:, None])
        elif last is Activation.RELU:
            delta = delta * (zs[-1] > 0)
    grads = [None] * len(model.layers)
    for i in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[i]
        grads[i] = (delta.T @ acts[i], delta.sum(axis=0))
        if i:
            delta = delta @ layer.weights
            prev = model.layers[i - 1].activation
            if prev is Activation.RELU:
                delta = delta * (zs[i - 1] > 0)
            elif prev is Activation.SIGMOID:
                delta = delta * acts[i] * (1.0 - acts[i])
    return grads


def loss_and_gradients(model, x, y):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    zs, acts = _forward_all(model, x)
    return _loss(acts[-1][:, 0], y, model.loss), _backward(model, zs, acts, y)


def train(model, x, y, cfg):
    """Mini-batch SGD on a copy of ``model``; returns ``(trained, MetricReport)``.

    ``loss_curve`` holds the mean batch loss of each epoch.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ValueError(f"expected inputs of shape (n, {model.input_dim}), got {x.shape}")
    if y.shape != (x.shape[0],):
        raise ValueError("one target per input row required")
    if model.task is Task.CLASSIFY and not np.all((y == 0) | (y == 1)):
        raise ValueError("classification targets must be 0/1")

    model = model.copy()
    rng = np.random.default_rng(cfg.seed)
    n, bs, lr = x.shape[0], cfg.batch_size, cfg.learning_rate
    curve = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        xs, ys = x[order], y[order]
        total, batches = 0.0, 0
        for start in range(0, n, bs):
            xb, yb = xs[start:start + bs], ys[start:start + bs]
            # Overflow shows up as a non-finite loss, reported just below.
            with np.errstate(over="ignore", invalid="ignore"):
                zs, acts = _forward_all(model, xb)
                batch_loss = _loss(acts[-1][:, 0], yb, model.loss)
            if not math.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch} with learning rate {lr}"
                )
            for layer, (dw, db) in zip(model.layers, _backward(model, zs, acts, yb)):
                layer.weights -= lr * dw
                layer.bias -= lr * db
            total += batch_loss
            batches += 1
        curve.append(total / batches)

    report = MetricReport(loss_curve=curve)
    if model.task is Task.CLASSIFY:
        report.accuracy = accuracy(model, x, y)
    elif np.ptp(y) > 0:
        report.r2 = r_squared(forward(model, x), y)
    return model, report


def accuracy(model, x, y, threshold=0.5):
    out = forward(model, np.atleast_2d(x))
    pred = (out >= threshold).astype(float)
    return float(np.mean(pred == np.asarray(y, dtype=float)))


def r_squared(pred, truth):
    """Coefficient of determination of ``pred`` against ``truth``."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or truth.size == 0:
        raise ValueError("pred and truth must be non-empty and of equal length")
    ss_tot = np.sum((truth - truth.mean()) ** 2)
    if ss_tot == 0.0:
        raise ValueError("R^2 is undefined when the truth has zero variance")
    return float(1.0 - np.sum((pred - truth) ** 2) / ss_tot)


def misclassified(model, x, y, params, threshold=0.5):
    """``(params, label, output)`` for every sample whose thresholded output is wrong."""
    out = forward(model, np.atleast_2d(x))
    y = np.asarray(y)
    wrong = np.flatnonzero((out >= threshold).astype(int) != y.astype(int))
    return [(params[i], int(y[i]), float(out[i])) for i in wrong]


def save_model(model, path):
    """Write ``model`` in the little-endian binary layout described in the README."""
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<IIBI", MODEL_VERSION, len(model.layers),
                             _LOSS_CODES[model.loss], model.input_dim))
        for layer in model.layers:
            out_dim, in_dim = layer.weights.shape
            fh.write(struct.pack("<IIB", out_dim, in_dim, _ACT_CODES[layer.activation]))
        for layer in model.layers:
            fh.write(np.ascontiguousarray(layer.weights, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(layer.bias, dtype="<f8").tobytes())


def load_model(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != MODEL_MAGIC:
        raise ValueError(f"{path}: not a model file (bad magic)")
    version, n_layers, loss_code, input_dim = struct.unpack_from("<IIBI", data, 8)
    if version != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {version}")
    pos = 8 + struct.calcsize("<IIBI")
    acts = {v: k for k, v in _ACT_CODES.items()}
    losses = {v: k for k, v in _LOSS_CODES.items()}
    shapes = []
    for _ in range(n_layers):
        shapes.append(struct.unpack_from("<IIB", data, pos))
        pos += struct.calcsize("<IIB")
    layers = []
    for out_dim, in_dim, act in shapes:
        w = np.frombuffer(data, "<f8", out_dim * in_dim, pos).reshape(out_dim, in_dim)
        pos += w.nbytes
        b = np.frombuffer(data, "<f8", out_dim, pos)
        pos += b.nbytes
        layers.append(Layer(w.astype(float), b.astype(float), acts[act]))
    if pos != len(data):
        raise ValueError(f"{path}: trailing or missing bytes")
    model = MlpModel(layers, losses[loss_code])
    if model.input_dim != input_dim:
        raise ValueError(f"{path}: header input_dim disagrees with first layer")
    return model
