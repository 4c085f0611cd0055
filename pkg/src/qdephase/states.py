"""Two-qubit state families and seeded random sampling.

Pure states are length-4 complex amplitude vectors in the computational basis
``|00>, |01>, |10>, |11>`` (stacks of them have shape ``(n, 4)``).  Density
operators are ``(4, 4)`` / ``(n, 4, 4)`` complex arrays.

Randomness comes from numpy's ``Generator`` over the PCG64 bit generator.
Per-sample streams are derived as ``SeedSequence(seed, spawn_key=(i,))`` so
sample ``i`` of a dataset is the same no matter how many samples are drawn or
how the work is sharded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import qmath

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-9

# Result of ``calibrate_entanglement_rate(0.42, 100_000, sample_rng(2024))``.
DEFAULT_EIG_CONCENTRATION = 1.07769775390625


class Family(str, Enum):
    PSI1 = "psi1"
    PSI2 = "psi2"
    PSI3 = "psi3"
    MIXED = "mixed"


@dataclass(frozen=True)
class GenParams:
    """Generative parameters of one sample.  Angles not used by a family are NaN."""

    family: Family
    seed: int
    noise_p: float = math.nan
    theta: float = math.nan
    phi: float = math.nan
    alpha: float = math.nan
    beta: float = math.nan
    gamma: float = math.nan
    phi1: float = math.nan
    phi2: float = math.nan
    phi3: float = math.nan

    def __post_init__(self):
        if not math.isnan(self.noise_p) and not 0.0 <= self.noise_p <= 1.0:
            raise ValueError(f"noise_p must lie in [0, 1], got {self.noise_p}")
        for name in ("theta", "phi", "alpha", "beta", "gamma", "phi1", "phi2", "phi3"):
            value = getattr(self, name)
            if not math.isnan(value) and not 0.0 <= value < TWO_PI:
                raise ValueError(f"{name} must lie in [0, 2pi), got {value}")


def sample_rng(seed, index=None):
    """PCG64 generator for ``seed``, or for sample ``index`` of the ``seed`` stream."""
    if index is None:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    ss = np.random.SeedSequence(seed, spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def make_psi1(theta, phi):
    """cos(theta/2)|00> + sin(theta/2) e^{i phi}|11>."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2) * np.exp(1j * phi)
    zero = np.zeros(np.broadcast(theta, phi).shape)
    return np.stack(np.broadcast_arrays(c + 0j, zero + 0j, zero + 0j, s), axis=-1)


def make_psi2(theta, phi):
    """cos(theta/2)|0>(e^{-i phi}|0>+|1>)/sqrt2 + sin(theta/2)|1>(e^{i phi}|0>+|1>)/sqrt2."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2) / math.sqrt(2)
    s = np.sin(theta / 2) / math.sqrt(2)
    amps = (c * np.exp(-1j * phi), c + 0j, s * np.exp(1j * phi), s + 0j)
    return np.stack(np.broadcast_arrays(*amps), axis=-1)


def make_psi3(alpha, beta, gamma, phi1, phi2, phi3):
    """Hyperspherical pure state with three relative phases."""
    alpha, beta, gamma, phi1, phi2, phi3 = (
        np.asarray(x, dtype=float) for x in (alpha, beta, gamma, phi1, phi2, phi3)
    )
    ca, cb = np.cos(alpha), np.cos(beta)
    amps = (
        np.sin(alpha) + 0j,
        ca * np.sin(beta) * np.exp(1j * phi1),
        ca * cb * np.sin(gamma) * np.exp(1j * phi2),
        ca * cb * np.cos(gamma) * np.exp(1j * phi3),
    )
    return np.stack(np.broadcast_arrays(*amps), axis=-1)


def pure_to_density(psi):
    """Projector |psi><psi| for a state or a stack of states."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != 4:
        raise ValueError(f"expected 4 amplitudes, got shape {psi.shape}")
    norm = np.sum(np.abs(psi) ** 2, axis=-1)
    if np.any(np.abs(norm - 1.0) > NORM_TOL):
        raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
    return psi[..., :, None] * np.conj(psi[..., None, :])


def haar_unitary(gaussian):
    """Haar-random unitary from a complex Ginibre matrix via phase-fixed QR."""
    q, r = np.linalg.qr(gaussian)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (np.conj(d) / np.abs(d))[..., None, :]


def _draw_qr_inputs(rng, attempts=10):
    """Ginibre matrix (full rank) and four unit exponentials."""
    for _ in range(attempts):
        z = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / math.sqrt(2)
        if np.linalg.matrix_rank(z) == 4:
            break
    else:
        raise RuntimeError(f"rank-deficient random matrix after {attempts} draws")
    return z, rng.standard_exponential(4)


def _mixed_from_inputs(z, expo, eig_concentration):
    lam = expo ** eig_concentration
    lam = lam / np.sum(lam, axis=-1, keepdims=True)
    q = haar_unitary(z)
    rho = (q * lam[..., None, :]) @ qmath.dagger(q)
    return 0.5 * (rho + qmath.dagger(rho))


def random_mixed_qr(rng, eig_concentration=DEFAULT_EIG_CONCENTRATION):
    """Random mixed state Q diag(lam) Q^dagger.

    Q is Haar-distributed; lam is four i.i.d. unit exponentials raised to
    ``eig_concentration`` and normalized, so larger values give purer states.
    """
    if not eig_concentration > 0:
        raise ValueError(f"eig_concentration must be positive, got {eig_concentration}")
    z, expo = _draw_qr_inputs(rng)
    return _mixed_from_inputs(z, expo, eig_concentration)


def entangled_fraction_mixed(eig_concentration, z, expo):
    from .tomography import min_pt_eigenvalue

    rho = _mixed_from_inputs(z, expo, eig_concentration)
    return float(np.mean(min_pt_eigenvalue(rho) < -1e-10))


def calibrate_entanglement_rate(target, samples, rng, lo=0.05, hi=20.0, tol=0.02, precision=1e-3):
    """Bisect ``eig_concentration`` until the PPT-entangled fraction hits ``target``.

    One batch of ``samples`` draws is reused at every trial value, so the search
    is deterministic for a given generator state.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {target}")
    draws = [_draw_qr_inputs(rng) for _ in range(int(samples))]
    z = np.stack([d[0] for d in draws])
    expo = np.stack([d[1] for d in draws])

    f_lo = entangled_fraction_mixed(lo, z, expo)
    f_hi = entangled_fraction_mixed(hi, z, expo)
    if not f_lo - tol <= target <= f_hi + tol:
        raise ValueError(
            f"target rate {target} unreachable: concentration in [{lo}, {hi}] "
            f"gives entangled fractions [{f_lo:.4f}, {f_hi:.4f}]"
        )
    mid = 0.5 * (lo + hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        f_mid = entangled_fraction_mixed(mid, z, expo)
        if abs(f_mid - target) <= precision or hi - lo < 1e-6:
            break
        if f_mid < target:
            lo = mid
        else:
            hi = mid
    return mid
