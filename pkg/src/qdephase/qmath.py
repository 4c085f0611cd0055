"""Small complex linear algebra for 2x2 and 4x4 operators.

Matrices are plain ``numpy`` complex arrays.  Every routine accepts either a
single ``(n, n)`` matrix or a stack ``(..., n, n)`` so that whole datasets can
be pushed through at once.  Eigenproblems are solved with a batched cyclic
Jacobi method for Hermitian matrices.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class EigenConvergenceError(ArithmeticError):
    """Jacobi sweeps hit the iteration cap before the off-diagonal vanished."""


def _as_square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.shape[-1] not in (2, 4):
        raise ValueError(f"{name} must be 2x2 or 4x4, got {a.shape[-1]}x{a.shape[-1]}")
    return a


def matmul(a, b):
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a @ b


def dagger(a):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(np.asarray(a), -1, -2))


def kron(a, b):
    """Two-qubit operator ``a (x) b`` with qubit 1 on the left; broadcasts over stacks."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-2:] != (2, 2) or b.shape[-2:] != (2, 2):
        raise ValueError(f"kron expects 2x2 factors, got {a.shape} and {b.shape}")
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (4, 4))


def hermiticity_error(h):
    h = np.asarray(h)
    return np.max(np.abs(h - dagger(h)), axis=(-2, -1))


def _check_hermitian(h):
    err = hermiticity_error(h)
    if np.any(err > HERMITIAN_TOL):
        raise ValueError(f"matrix is not Hermitian (max |H - H^dagger| = {np.max(err):.3e})")


def _jacobi(h, vectors):
    """Cyclic complex Jacobi on a stack of Hermitian matrices.

    Returns ``(w, v)`` with unsorted eigenvalues ``w`` and, if requested,
    eigenvector columns ``v`` such that ``h @ v = v @ diag(w)``.
    """
    a = np.array(h, dtype=complex).reshape((-1,) + h.shape[-2:])
    a = 0.5 * (a + dagger(a))
    m, n = a.shape[0], a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if vectors else None

    offmask = ~np.eye(n, dtype=bool)
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))
    todo = np.arange(m)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]

    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[todo][:, offmask]) ** 2, axis=-1))
        todo = todo[off > JACOBI_TOL * scale[todo]]
        if todo.size == 0:
            break
        sub = a[todo]
        vsub = v[todo] if vectors else None
        for p, q in pairs:
            apq = sub[:, p, q]
            r = np.abs(apq)
            live = r > 0.0
            r_safe = np.where(live, r, 1.0)
            phase = np.where(live, apq / r_safe, 1.0)
            tau = (sub[:, q, q].real - sub[:, p, p].real) / (2.0 * r_safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = np.where(live, t * c, 0.0)
            c = np.where(live, c, 1.0)
            # J: J_pp = c, J_pq = s, J_qp = -s e^{-i phi}, J_qq = c e^{-i phi}
            cph = np.conj(phase)
            jqp = -s * cph
            jqq = c * cph

            colp = sub[:, :, p].copy()
            colq = sub[:, :, q]
            sub[:, :, p] = c[:, None] * colp + jqp[:, None] * colq
            sub[:, :, q] = s[:, None] * colp + jqq[:, None] * colq
            rowp = sub[:, p, :].copy()
            rowq = sub[:, q, :]
            sub[:, p, :] = c[:, None] * rowp + np.conj(jqp)[:, None] * rowq
            sub[:, q, :] = s[:, None] * rowp + np.conj(jqq)[:, None] * rowq
            sub[:, p, q] = 0.0
            sub[:, q, p] = 0.0
            sub[:, p, p] = sub[:, p, p].real
            sub[:, q, q] = sub[:, q, q].real
            if vectors:
                vp = vsub[:, :, p].copy()
                vq = vsub[:, :, q]
                vsub[:, :, p] = c[:, None] * vp + jqp[:, None] * vq
                vsub[:, :, q] = s[:, None] * vp + jqq[:, None] * vq
        a[todo] = sub
        if vectors:
            v[todo] = vsub
    else:
        off = np.sqrt(np.sum(np.abs(a[todo][:, offmask]) ** 2, axis=-1))
        if np.any(off > JACOBI_TOL * scale[todo]):
            raise EigenConvergenceError(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {np.max(off):.3e})"
            )

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    w = w.reshape(h.shape[:-1])
    if vectors:
        v = v.reshape(h.shape)
    return w, v


def hermitian_eigh(h):
    """Eigenvalues (descending) and matching eigenvector columns of Hermitian ``h``."""
    h = _as_square(h, "h")
    _check_hermitian(h)
    w, v = _jacobi(h, vectors=True)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def hermitian_eigenvalues(h):
    """Real spectrum of Hermitian ``h``, sorted in descending order."""
    h = _as_square(h, "h")
    _check_hermitian(h)
    w, _ = _jacobi(h, vectors=False)
    return -np.sort(-w, axis=-1)


def clamp_spectrum(w, tol=PSD_TOL):
    """Zero out roundoff-negative eigenvalues; reject anything below ``-tol``."""
    w = np.asarray(w, dtype=float)
    if np.any(w < -tol):
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {np.min(w):.3e})")
    return np.where(w < 0.0, 0.0, w)


def hermitian_sqrt(h):
    """Principal square root of a Hermitian positive semidefinite matrix."""
    w, v = hermitian_eigh(h)
    w = clamp_spectrum(w)
    return (v * np.sqrt(w)[..., None, :]) @ dagger(v)
