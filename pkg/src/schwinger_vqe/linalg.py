"""Dense complex linear algebra for few-qubit simulation.

Everything operates on plain ``numpy`` arrays with ``complex128`` entries.
State vectors are 1-D arrays of length 2**N, density operators and gates are
square 2-D arrays.  The module also provides a self-contained cyclic Jacobi
eigensolver for Hermitian matrices, used as an independent oracle against
analytic spectra.

Tolerance ladder used throughout the package:

* ``ATOL_EXACT`` (1e-12) for construction identities (unitarity, Kraus
  completeness, algebraic rearrangements),
* ``ATOL_STATE`` (1e-10) for physical invariants (normalization, trace,
  positivity, real expectations),
* ``ATOL_ITER`` (1e-9) for iteratively computed results (eigenpairs).
"""

from __future__ import annotations

import numpy as np

ATOL_EXACT = 1e-12
ATOL_STATE = 1e-10
ATOL_ITER = 1e-9

IDENTITY_2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULI = {"I": IDENTITY_2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor acting on the leading qubit."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def is_hermitian(a: np.ndarray, atol: float = ATOL_EXACT) -> bool:
    a = np.asarray(a)
    scale = max(1.0, frobenius_norm(a))
    return frobenius_norm(a - dagger(a)) <= atol * scale


def is_unitary(a: np.ndarray, atol: float = ATOL_STATE) -> bool:
    a = np.asarray(a)
    return frobenius_norm(dagger(a) @ a - np.eye(a.shape[0])) <= atol


def is_normalized_state(psi: np.ndarray, atol: float = ATOL_STATE) -> bool:
    psi = np.asarray(psi)
    return abs(float(np.vdot(psi, psi).real) - 1.0) <= atol


def is_density_operator(rho: np.ndarray, atol: float = ATOL_STATE) -> bool:
    """Hermitian, unit trace, positive semi-definite up to ``atol``."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, atol):
        return False
    if abs(float(np.trace(rho).real) - 1.0) > atol:
        return False
    evals, _ = hermitian_eigen(rho)
    return bool(evals[0] >= -atol)


def expectation(obs: np.ndarray, state: np.ndarray) -> float:
    """Expectation value of a Hermitian observable.

    ``state`` may be a state vector (1-D) or a density operator (2-D).  The
    result is real by construction; the imaginary residue is checked against
    the physical tolerance before being discarded.
    """
    obs = np.asarray(obs, dtype=np.complex128)
    state = np.asarray(state, dtype=np.complex128)
    if not is_hermitian(obs, ATOL_STATE):
        raise ValueError("observable is not Hermitian")
    if state.ndim == 1:
        if obs.shape[0] != state.shape[0]:
            raise ValueError(
                f"dimension mismatch: observable {obs.shape[0]}, state {state.shape[0]}"
            )
        value = complex(np.vdot(state, obs @ state))
    elif state.ndim == 2:
        if obs.shape != state.shape:
            raise ValueError(
                f"dimension mismatch: observable {obs.shape}, density operator {state.shape}"
            )
        value = complex(np.trace(obs @ state))
    else:
        raise ValueError("state must be a vector or a square matrix")
    if abs(value.imag) > ATOL_STATE * max(1.0, abs(value)):
        raise ValueError(f"expectation has non-negligible imaginary part {value.imag:g}")
    return value.real


def hermitian_eigen(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues real and sorted
    ascending and eigenvectors as the corresponding columns, so that
    ``a @ vecs == vecs @ diag(vals)`` to within ``ATOL_ITER``.

    Each rotation annihilates one off-diagonal pair (p, q) with the unitary
    that is the identity except for
    ``U[p,p] = U[q,q] = c``, ``U[p,q] = -s*e^{i phi}``, ``U[q,p] = s*e^{-i phi}``
    where ``phi = arg(a[p,q])`` and ``tan(2 theta) = 2|a[p,q]| / (a[p,p]-a[q,q])``.
    Sweeps repeat until the off-diagonal Frobenius mass is negligible;
    convergence is quadratic and a handful of sweeps suffice at this scale.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, frobenius_norm(a))
    if not is_hermitian(a, ATOL_EXACT * 10):
        raise ValueError("matrix is not Hermitian")
    n = a.shape[0]
    w = a.copy()
    vecs = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([w[0, 0].real]), vecs

    def off_norm(mat: np.ndarray) -> float:
        off = mat - np.diag(np.diag(mat))
        return float(np.linalg.norm(off))

    for _ in range(max_sweeps):
        if off_norm(w) <= 1e-14 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(w[p, q])
                if r <= 1e-16 * scale:
                    continue
                phase = w[p, q] / r
                alpha = w[p, p].real
                beta = w[q, q].real
                tau = (alpha - beta) / (2.0 * r)
                if tau >= 0:
                    t = 1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # column update (w @ U), then row update (U^dagger @ w)
                wp = w[:, p].copy()
                wq = w[:, q].copy()
                w[:, p] = c * wp + s * np.conj(phase) * wq
                w[:, q] = -s * phase * wp + c * wq
                rp = w[p, :].copy()
                rq = w[q, :].copy()
                w[p, :] = c * rp + s * phase * rq
                w[q, :] = -s * np.conj(phase) * rp + c * rq
                vp = vecs[:, p].copy()
                vq = vecs[:, q].copy()
                vecs[:, p] = c * vp + s * np.conj(phase) * vq
                vecs[:, q] = -s * phase * vp + c * vq
    else:
        raise RuntimeError("Jacobi eigensolver did not converge")

    evals = np.real(np.diag(w))
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    vecs = vecs[:, order]
    residual = float(np.linalg.norm(a @ vecs - vecs * evals))
    if residual > ATOL_ITER * scale:
        raise RuntimeError(f"eigenpair residual {residual:g} exceeds tolerance")
    return evals, vecs
