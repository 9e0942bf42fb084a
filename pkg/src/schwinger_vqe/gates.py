"""Polarization-optics gate model.

Computational-basis encoding: ``|0> = |H>`` (horizontal), ``|1> = |V>``
(vertical).  Two-qubit basis order is ``|00>, |01>, |10>, |11>`` with the
first qubit as the leading Kronecker factor.

A waveplate with retardance ``delta`` and axis angle ``theta`` acts as

    U(delta, theta) = V(theta) D(delta) V(theta)^dagger,
    V(theta) = I cos(theta) - i sigma_y sin(theta),
    D(delta) = diag(1, e^{i delta}),

so a half-wave plate is ``U(pi, theta)`` and a quarter-wave plate is
``U(pi/2, theta)``.  All waveplate transforms are pi-periodic in the axis
angle.

The six-angle preparation circuit: qubit 1 starts in ``|0>`` and passes a
QWP(theta1) and HWP(theta2); qubit 2 starts in ``X|0> = |1>``; a controlled-X
(control = qubit 1) entangles them, giving ``alpha|01> + beta|10>``.  A local
stage ``U1 = HWP(theta4) QWP(theta3)`` on qubit 1 and
``U2 = HWP(theta6) QWP(theta5)`` on qubit 2 completes the ansatz.

Measurement-basis changes are compiled into the local-stage waveplates:
``<H| B HWP(theta4) QWP(theta3) = <H| HWP(theta4') QWP(theta3')`` up to a
global phase, which lets a fixed H/V projective measurement realize any
single-qubit Pauli basis.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import least_squares, minimize

from .linalg import ATOL_STATE, IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, dagger, is_unitary, kron

COMPILE_RESIDUAL_TOL = 1e-12


def rotation(theta: float) -> np.ndarray:
    """Axis rotation V(theta) = I cos(theta) - i sigma_y sin(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def retarder(delta: float) -> np.ndarray:
    """Phase retarder D(delta) = diag(1, e^{i delta})."""
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * delta)]], dtype=np.complex128)


def waveplate_unitary(delta: float, theta: float) -> np.ndarray:
    """General waveplate U(delta, theta) = V(theta) D(delta) V(theta)^dagger.

    Implemented in expanded form; with c = cos(theta), s = sin(theta) and
    e = e^{i delta} the product evaluates to
    ``[[c^2 + e s^2, c s (1 - e)], [c s (1 - e), s^2 + e c^2]]``.
    """
    c, s = math.cos(theta), math.sin(theta)
    e = complex(math.cos(delta), math.sin(delta))
    cs = c * s * (1.0 - e)
    return np.array(
        [[c * c + e * s * s, cs], [cs, s * s + e * c * c]], dtype=np.complex128
    )


def hwp(theta: float) -> np.ndarray:
    """Half-wave plate (retardance pi) at axis angle ``theta``."""
    return waveplate_unitary(math.pi, theta)


def qwp(theta: float) -> np.ndarray:
    """Quarter-wave plate (retardance pi/2) at axis angle ``theta``."""
    return waveplate_unitary(math.pi / 2.0, theta)


def controlled_x() -> np.ndarray:
    """Controlled-X with qubit 1 as control and qubit 2 as target."""
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    )


def initial_state(theta1: float, theta2: float) -> tuple[np.ndarray, tuple[complex, complex]]:
    """Entangled probe state ``alpha|01> + beta|10>`` from the prep stage.

    Returns the 4-amplitude state and the pair ``(alpha, beta)``; these are
    the components of ``HWP(theta2) QWP(theta1) |0>``.  The phase of ``beta``
    is fixed by the composed waveplate matrices.
    """
    prep = hwp(theta2) @ qwp(theta1)
    single = prep[:, 0]
    psi = controlled_x() @ kron(single, SIGMA_X[:, 0].reshape(2)).reshape(4)
    return psi, (complex(single[0]), complex(single[1]))


def ansatz_state(params: np.ndarray) -> np.ndarray:
    """Probe state for the six waveplate angles ``theta1..theta6``."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (6,):
        raise ValueError("expected exactly 6 waveplate angles")
    psi_in, _ = initial_state(params[0], params[1])
    u1 = hwp(params[3]) @ qwp(params[2])
    u2 = hwp(params[5]) @ qwp(params[4])
    return kron(u1, u2) @ psi_in


_BASIS_X = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
_BASIS_Y = np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / math.sqrt(2.0)

_BASIS_ROTATIONS = {"Z": IDENTITY_2, "X": _BASIS_X, "Y": _BASIS_Y}


def basis_rotation(label: str) -> np.ndarray:
    """Unitary mapping the eigenbasis of a Pauli operator to H/V.

    ``<0| basis_rotation(P)`` is the +1 eigenbra of Pauli ``P`` and
    ``<1|`` the -1 eigenbra, so computational-basis outcomes after the
    rotation carry the corresponding Pauli eigenvalues.
    """
    try:
        return _BASIS_ROTATIONS[label].copy()
    except KeyError:
        raise ValueError(f"unknown measurement basis {label!r}") from None


def _bra_after_plates(theta_q: float, theta_h: float) -> np.ndarray:
    return (hwp(theta_h) @ qwp(theta_q))[0, :]


def compile_basis_change(
    b: np.ndarray, theta3: float, theta4: float
) -> tuple[float, float]:
    """Fold a basis-change unitary into the two local waveplate angles.

    Finds ``(theta3', theta4')`` such that
    ``<H| b HWP(theta4) QWP(theta3)`` equals
    ``<H| HWP(theta4') QWP(theta3')`` up to a global phase.  The pair is the
    canonical representative in ``[0, pi)^2``, obtained by minimizing
    ``1 - |overlap|^2`` with Nelder-Mead from four deterministic starts and
    accepted only when the residual drops below ``COMPILE_RESIDUAL_TOL``.
    """
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (2, 2) or not is_unitary(b, ATOL_STATE):
        raise ValueError("basis change must be a 2x2 unitary")
    desired = (b @ hwp(theta4) @ qwp(theta3))[0, :]
    target = desired.conj()

    def residual(x: np.ndarray) -> float:
        overlap = _bra_after_plates(x[0], x[1]) @ target
        return 1.0 - (overlap.real**2 + overlap.imag**2)

    def perpendicular(x: np.ndarray) -> np.ndarray:
        # component of the compiled bra orthogonal to the desired one;
        # its squared norm equals the residual above
        bra = _bra_after_plates(x[0], x[1])
        perp = bra - (bra @ target) * desired
        return np.array([perp[0].real, perp[0].imag, perp[1].real, perp[1].imag])

    pi = math.pi
    starts = (
        (theta3 % pi, theta4 % pi),
        ((theta3 + pi / 4.0) % pi, (theta4 + pi / 8.0) % pi),
        (pi / 2.0, pi / 4.0),
        (0.3, 1.1),
    )
    options = {"xatol": 1e-8, "fatol": 1e-12, "maxiter": 400, "maxfev": 400}
    best_x, best_fun = None, math.inf
    for x0 in starts:
        coarse = minimize(residual, x0, method="Nelder-Mead", options=options)
        # Gauss-Newton polish drives the residual to machine precision
        polish = least_squares(perpendicular, coarse.x, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        fun = residual(polish.x)
        if fun < best_fun:
            best_x, best_fun = polish.x, fun
        if best_fun < 1e-28:
            break
    if best_fun >= COMPILE_RESIDUAL_TOL:
        raise RuntimeError(
            f"basis compilation did not converge: residual {best_fun:.3e}"
        )
    return (best_x[0] % pi, best_x[1] % pi)


def _bell(a: int, b: int, sign: float) -> np.ndarray:
    vec = np.zeros(4, dtype=np.complex128)
    vec[a] = 1.0 / math.sqrt(2.0)
    vec[b] = sign / math.sqrt(2.0)
    return vec


BELL_STATES = {
    "phi_plus": _bell(0, 3, +1.0),
    "phi_minus": _bell(0, 3, -1.0),
    "psi_plus": _bell(1, 2, +1.0),
    "psi_minus": _bell(1, 2, -1.0),
}

# Local maps (W1, W2) with (W1 x W2)|bell> = |psi_minus> up to a phase.
_TO_SINGLET = {
    "psi_minus": (IDENTITY_2, IDENTITY_2),
    "psi_plus": (IDENTITY_2, SIGMA_Z),
    "phi_plus": (IDENTITY_2, 1j * SIGMA_Y),
    "phi_minus": (IDENTITY_2, SIGMA_X),
}


def bell_invariant_transform(bell: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Local unitary leaving a Bell state invariant up to a global phase.

    Because the singlet satisfies ``(u x u)|psi_minus> ~ |psi_minus>`` for any
    2x2 unitary ``u``, conjugating ``u`` with the fixed maps that carry a Bell
    state to the singlet yields ``(W1^dag u W1) x (W2^dag u W2)`` which fixes
    that Bell state.
    """
    bell = np.asarray(bell, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not is_unitary(u, ATOL_STATE):
        raise ValueError("u must be a 2x2 unitary")
    if bell.shape != (4,):
        raise ValueError("expected a 4-amplitude state")
    for name, reference in BELL_STATES.items():
        fidelity = abs(np.vdot(reference, bell)) ** 2
        if fidelity > 1.0 - 1e-8:
            w1, w2 = _TO_SINGLET[name]
            return kron(dagger(w1) @ u @ w1, dagger(w2) @ u @ w2)
    raise ValueError("state is not one of the four standard Bell states")
