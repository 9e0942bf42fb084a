"""Shared helpers for the test suite."""

import numpy as np


def haar_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def haar_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random special unitary (determinant one)."""
    u = haar_unitary(rng, 2)
    det = np.linalg.det(u)
    return u / np.sqrt(det)


def random_density(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Random full-rank density operator."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_state(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


# waveplate angles that prepare the singlet (|01> - |10>)/sqrt(2) exactly,
# up to a global phase
SINGLET_PARAMS = np.array([0.0, 3.0 * np.pi / 8.0, 0.0, 0.0, 0.0, 0.0])

# waveplate angles that prepare |10> = |VH> up to a global phase
VH_PARAMS = np.array([0.0, np.pi / 4.0, 0.0, 0.0, 0.0, 0.0])
