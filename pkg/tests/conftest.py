import numpy as np
import pytest

from qdephase import neuralnet as nn

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, n, dim=4, scale=1.0):
    a = rng.normal(size=(n, dim, dim)) + 1j * rng.normal(size=(n, dim, dim))
    return scale * (a + np.conj(np.swapaxes(a, -1, -2))) / 2


def random_unitary(rng, n, dim=4):
    z = rng.normal(size=(n, dim, dim)) + 1j * rng.normal(size=(n, dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (np.conj(d) / np.abs(d))[..., None, :]


def random_pure(rng, n):
    psi = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def random_density(rng, n, rank=4):
    g = rng.normal(size=(n, 4, rank)) + 1j * rng.normal(size=(n, 4, rank))
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def numeric_gradients(model, x, y, step=1e-5):
    """Central differences of the loss for every weight and bias."""
    grads = []
    for layer in model.layers:
        pair = []
        for arr in (layer.weights, layer.bias):
            g = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                old = arr[idx]
                arr[idx] = old + step
                up = nn.loss_value(model, x, y)
                arr[idx] = old - step
                down = nn.loss_value(model, x, y)
                arr[idx] = old
                g[idx] = (up - down) / (2 * step)
            pair.append(g)
        grads.append(pair)
    return grads


def max_relative_error(analytic, numeric):
    worst = 0.0
    for (aw, ab), (nw, nb) in zip(analytic, numeric):
        for a, n in ((aw, nw), (ab, nb)):
            denom = np.maximum(np.abs(a) + np.abs(n), 1e-8)
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
