"""Tomographic features, PPT labels and concurrence of two-qubit states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmath

IMAG_TOL = 1e-10
PPT_TOL = 1e-10
CONCURRENCE_TOL = 1e-8
# Spectrum entries below this multiple of eps * lambda_max are roundoff; they
# would otherwise inflate to ~1e-8 once square-rooted.
_ROUNDOFF_FLOOR = 64 * np.finfo(float).eps

FEATURE_NAMES = (
    "xa", "xb", "ya", "yb", "xz", "yz", "za", "zb", "zz",
    "xI", "yI", "zI", "Ia", "Ib", "Iz",
)
N_FEATURES = len(FEATURE_NAMES)

_YY = qmath.kron(qmath.SIGMA_Y, qmath.SIGMA_Y)


def rotated_paulis():
    """Second-qubit axes a, b: the x, y frame turned 45 degrees about z."""
    r = 1.0 / math.sqrt(2.0)
    sigma_a = r * (qmath.SIGMA_X + qmath.SIGMA_Y)
    sigma_b = r * (-qmath.SIGMA_X + qmath.SIGMA_Y)
    return sigma_a, sigma_b


def observables():
    """The 15 two-qubit observables in feature order, shape (15, 4, 4)."""
    sa, sb = rotated_paulis()
    first = {"x": qmath.SIGMA_X, "y": qmath.SIGMA_Y, "z": qmath.SIGMA_Z, "I": qmath.I2}
    second = {"a": sa, "b": sb, "z": qmath.SIGMA_Z, "I": qmath.I2}
    return np.stack([qmath.kron(first[n[0]], second[n[1]]) for n in FEATURE_NAMES])


_OBSERVABLES = observables()


def extract_features(rho):
    """Expectation values Re tr(rho O_i) in feature order; (..., 15)."""
    rho = np.asarray(rho, dtype=complex)
    if np.any(qmath.hermiticity_error(rho) > qmath.HERMITIAN_TOL):
        raise ValueError("density operator is not Hermitian")
    vals = np.einsum("...ij,kji->...k", rho, _OBSERVABLES)
    if np.any(np.abs(vals.imag) > IMAG_TOL):
        raise ValueError(f"complex expectation value (|Im| = {np.max(np.abs(vals.imag)):.3e})")
    return vals.real


def partial_transpose(rho):
    """Transpose on qubit 2: out[(i,j),(k,l)] = rho[(i,l),(k,j)]."""
    rho = np.asarray(rho)
    t = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    return np.swapaxes(t, -3, -1).reshape(rho.shape)


def min_pt_eigenvalue(rho):
    return qmath.hermitian_eigenvalues(partial_transpose(rho))[..., -1]


@dataclass(frozen=True)
class EntanglementLabel:
    entangled: bool
    min_pt_eigenvalue: float


def ppt_label(rho):
    """Peres-Horodecki verdict for a single state."""
    lam = float(min_pt_eigenvalue(rho))
    return EntanglementLabel(lam < -PPT_TOL, lam)


def spin_flip(rho):
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    return _YY @ np.conj(rho) @ _YY


def concurrence(rho):
    """Wootters concurrence of a state or a stack of states.

    The decreasing eigenvalues of rho * spin_flip(rho) are taken from the
    Hermitian matrix sqrt(rho) spin_flip(rho) sqrt(rho), which has the same
    spectrum.
    """
    rho = np.asarray(rho, dtype=complex)
    root = qmath.hermitian_sqrt(rho)
    lam = qmath.hermitian_eigenvalues(root @ spin_flip(rho) @ root)
    lam = qmath.clamp_spectrum(lam)
    floor = _ROUNDOFF_FLOOR * lam[..., :1]
    lam = np.where(lam <= floor, 0.0, lam)
    s = np.sqrt(lam)
    c = s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]
    return np.maximum(c, 0.0)


def concurrence_pure(psi):
    """2 |c1 c4 - c2 c3| for amplitudes in the |00>, |01>, |10>, |11> basis."""
    psi = np.asarray(psi, dtype=complex)
    return 2.0 * np.abs(psi[..., 0] * psi[..., 3] - psi[..., 1] * psi[..., 2])
