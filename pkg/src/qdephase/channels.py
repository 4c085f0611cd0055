"""Dephasing and depolarizing noise on one- and two-qubit density operators."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import qmath

COMPLETENESS_TOL = 1e-12

# Number of qubits whose basis label differs between row and column of each
# entry; global dephasing multiplies that entry by (1 - p) ** _FLIPS.
_FLIPS = np.array(
    [
        [0, 1, 1, 2],
        [1, 0, 2, 1],
        [1, 2, 0, 1],
        [2, 1, 1, 0],
    ]
)


class KrausLabel(str, Enum):
    DEPHASE_1Q = "dephase_1q"
    DEPHASE_GLOBAL_2Q = "dephase_global_2q"
    DEPOLARIZE_2Q = "depolarize_2q"


@dataclass(frozen=True)
class KrausSet:
    ops: np.ndarray
    label: KrausLabel

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise ValueError(f"Kraus operators must share one square shape, got {ops.shape}")
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self):
        return self.ops.shape[-1]

    def completeness_error(self):
        total = np.einsum("kji,kjl->il", self.ops.conj(), self.ops)
        return float(np.max(np.abs(total - np.eye(self.dim))))


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength must lie in [0, 1], got {p}")


def dephase_1q_kraus(p):
    """M1 = sqrt(1-p) I, M2 = sqrt(p)|0><0|, M3 = sqrt(p)|1><1|."""
    _check_p(p)
    m1 = np.sqrt(1.0 - p) * qmath.I2
    m2 = np.array([[np.sqrt(p), 0], [0, 0]], dtype=complex)
    m3 = np.array([[0, 0], [0, np.sqrt(p)]], dtype=complex)
    return KrausSet(np.stack([m1, m2, m3]), KrausLabel.DEPHASE_1Q)


def dephase_global_kraus(p):
    """The nine operators E_ij = M_i (x) M_j, ordered E_11, E_12, ..., E_33."""
    single = dephase_1q_kraus(p).ops
    ops = [qmath.kron(mi, mj) for mi in single for mj in single]
    return KrausSet(np.stack(ops), KrausLabel.DEPHASE_GLOBAL_2Q)


def apply_kraus(rho, ks):
    """sum_k K rho K^dagger for a density operator or a stack of them."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (ks.dim, ks.dim):
        raise ValueError(f"state of shape {rho.shape[-2:]} does not match {ks.dim}x{ks.dim} channel")
    return np.einsum("kij,...jl,kml->...im", ks.ops, rho, ks.ops.conj())


def dephase_global_closed_form(rho, p):
    """Entrywise global dephasing; ``p`` may be a scalar or one value per state."""
    rho = np.asarray(rho, dtype=complex)
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("noise strength must lie in [0, 1]")
    keep = (1.0 - p)[..., None, None]
    return rho * keep ** _FLIPS


def depolarize(rho, p):
    """(1 - p) rho + p I/4; ``p`` may be a scalar or one value per state."""
    rho = np.asarray(rho, dtype=complex)
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("noise strength must lie in [0, 1]")
    p = p[..., None, None]
    return (1.0 - p) * rho + p * qmath.I4 / 4.0


def depolarize_kraus(p):
    """Kraus form of ``depolarize``: sqrt(1 - 15p/16) I and sqrt(p/16) P_a (x) P_b."""
    _check_p(p)
    paulis = [qmath.I2, qmath.SIGMA_X, qmath.SIGMA_Y, qmath.SIGMA_Z]
    ops = []
    for i, a in enumerate(paulis):
        for j, b in enumerate(paulis):
            w = 1.0 - 15.0 * p / 16.0 if i == j == 0 else p / 16.0
            ops.append(np.sqrt(w) * qmath.kron(a, b))
    return KrausSet(np.stack(ops), KrausLabel.DEPOLARIZE_2Q)
