"""Measurement pipeline: setting grouping, outcome probabilities, shot
sampling, expectation estimation and the engineered dephasing channel.

Pipeline for one measurement setting (per-qubit Pauli bases):

1. prepare the probe state for the current waveplate angles,
2. rotate each qubit into the measurement frame (the rotation that the
   hardware realizes by compiling the basis change into the local waveplate
   angles),
3. apply the dephasing channel(s) -- the retarders sit between the
   measurement waveplates and the polarizing prisms, so noise acts on the
   rotated state,
4. read the four H/V outcome probabilities from the diagonal of the result.

The dephasing channel has two Kraus operators

    E_i = V(theta) D_i(delta) V(theta)^dagger,
    D_1 = sqrt((2 - eps)/2) diag(e^{i delta}, 1),
    D_2 = sqrt(eps/2) diag(e^{i delta}, -1),

with strength ``eps`` in [0, 1], axis ``theta`` and mean retardance
``delta``; defaults are ``theta = pi/4`` and ``delta = 2 pi``, for which the
channel reduces to ``rho -> (1 - eps/2) rho + (eps/2) X rho X``.

Energy estimation groups Hamiltonian terms into joint single-basis settings
(ZZ, XX, YY for the two-site model), converts outcome frequencies into Pauli
expectations through their eigenvalue signs, and sums with the Hamiltonian
coefficients.  ``shots="exact"`` uses the probabilities directly (the
infinite-shot limit); an integer draws one multinomial sample per setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal, Union

import numpy as np

from .gates import (
    ansatz_state,
    basis_rotation,
    compile_basis_change,
    hwp,
    initial_state,
    qwp,
    rotation,
)
from .linalg import ATOL_EXACT, ATOL_STATE, IDENTITY_2, dagger, kron
from .schwinger import PauliTermSum

NOISE_MODES = ("none", "qubit1", "both")

Shots = Union[int, Literal["exact"]]


@dataclass(frozen=True)
class KrausChannel:
    """Kraus operators of the dephasing channel, with their parameters."""

    operators: tuple[np.ndarray, ...]
    epsilon: float
    theta_axis: float
    delta_ret: float


@dataclass(frozen=True)
class NoiseConfig:
    """Which qubits are dephased and how strongly."""

    mode: str = "none"
    epsilon: float = 0.0
    theta_axis: float = math.pi / 4.0
    delta_ret: float = 2.0 * math.pi

    def __post_init__(self) -> None:
        if self.mode not in NOISE_MODES:
            raise ValueError(f"noise mode must be one of {NOISE_MODES}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("noise strength must lie in [0, 1]")


NO_NOISE = NoiseConfig()


def dephasing_channel(
    epsilon: float,
    theta_axis: float = math.pi / 4.0,
    delta_ret: float = 2.0 * math.pi,
) -> KrausChannel:
    """Two-operator dephasing channel of a fluctuating variable retarder."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("noise strength must lie in [0, 1]")
    v = rotation(theta_axis)
    vd = dagger(v)
    phase = np.exp(1j * delta_ret)
    d1 = math.sqrt((2.0 - epsilon) / 2.0) * np.diag([phase, 1.0])
    d2 = math.sqrt(epsilon / 2.0) * np.diag([phase, -1.0])
    ops = tuple(v @ d @ vd for d in (d1, d2))
    completeness = sum(dagger(e) @ e for e in ops)
    assert np.linalg.norm(completeness - IDENTITY_2) < ATOL_EXACT
    return KrausChannel(ops, float(epsilon), float(theta_axis), float(delta_ret))


def _lift_kraus(op: np.ndarray, qubit: int) -> np.ndarray:
    if qubit == 1:
        return kron(op, IDENTITY_2)
    if qubit == 2:
        return kron(IDENTITY_2, op)
    raise ValueError("qubit index must be 1 or 2")


def apply_channel(rho: np.ndarray, channel: KrausChannel, qubit: int) -> np.ndarray:
    """Apply a single-qubit channel to one qubit of a two-qubit density operator."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 density operator")
    lifted = [_lift_kraus(e, qubit) for e in channel.operators]
    out = np.zeros_like(rho)
    for e in lifted:
        out += e @ rho @ dagger(e)
    return out


def _channel_operators(noise: NoiseConfig) -> tuple[np.ndarray, ...]:
    """Lifted 4x4 Kraus operators of the configured noise (identity if none)."""
    if noise.mode == "none" or noise.epsilon == 0.0:
        return (np.eye(4, dtype=np.complex128),)
    channel = dephasing_channel(noise.epsilon, noise.theta_axis, noise.delta_ret)
    if noise.mode == "qubit1":
        return tuple(_lift_kraus(e, 1) for e in channel.operators)
    return tuple(
        kron(e1, e2) for e1 in channel.operators for e2 in channel.operators
    )


@dataclass(frozen=True)
class MeasurementSetting:
    """Per-qubit measurement bases, optionally with compiled waveplate angles.

    ``compiled_angles`` is ``(theta3', theta4', theta5', theta6')`` and is
    only meaningful for the parameter vector it was compiled against.
    """

    bases: tuple[str, ...]
    compiled_angles: tuple[float, float, float, float] | None = None

    @property
    def label(self) -> str:
        return "".join(self.bases)


def measurement_settings_for(h: PauliTermSum) -> list[MeasurementSetting]:
    """Group Hamiltonian terms into joint measurement settings.

    Each setting fixes one Pauli basis per qubit; a term fits a setting if
    every non-identity letter matches the setting's basis on that qubit.
    Terms are greedily placed into the first compatible setting, opening a
    new one when none fits; leftover free slots default to Z.  The pure
    identity term needs no setting of its own.
    """
    n = h.num_qubits
    settings: list[list[str | None]] = []
    for label, _ in h:
        if set(label) == {"I"}:
            continue
        placed = False
        for slots in settings:
            if all(l == "I" or slots[i] is None or slots[i] == l for i, l in enumerate(label)):
                for i, l in enumerate(label):
                    if l != "I":
                        slots[i] = l
                placed = True
                break
        if not placed:
            settings.append([l if l != "I" else None for l in label])
    return [
        MeasurementSetting(tuple(s if s is not None else "Z" for s in slots))
        for slots in settings
    ]


def _setting_rotation(setting: MeasurementSetting) -> np.ndarray:
    b1 = basis_rotation(setting.bases[0])
    b2 = basis_rotation(setting.bases[1])
    return kron(b1, b2)


def compile_setting(setting: MeasurementSetting, params: np.ndarray) -> MeasurementSetting:
    """Fill in the waveplate angles that realize the setting for ``params``."""
    params = np.asarray(params, dtype=np.float64)
    t3, t4 = compile_basis_change(basis_rotation(setting.bases[0]), params[2], params[3])
    t5, t6 = compile_basis_change(basis_rotation(setting.bases[1]), params[4], params[5])
    return MeasurementSetting(setting.bases, (t3, t4, t5, t6))


def _diagonal_probabilities(rotated: np.ndarray, noise: NoiseConfig) -> np.ndarray:
    """H/V outcome probabilities of a rotated pure state, after noise.

    For ``noise.mode != "none"`` the state is promoted to a density operator
    and the channel applied qubit by qubit; otherwise the squared amplitudes
    are returned directly.
    """
    if noise.mode == "none" or noise.epsilon == 0.0:
        probs = np.abs(rotated) ** 2
    else:
        rho = np.outer(rotated, rotated.conj())
        channel = dephasing_channel(noise.epsilon, noise.theta_axis, noise.delta_ret)
        rho = apply_channel(rho, channel, 1)
        if noise.mode == "both":
            rho = apply_channel(rho, channel, 2)
        probs = np.real(np.diag(rho))
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > ATOL_STATE:
        raise RuntimeError(f"outcome probabilities sum to {total:.12g}")
    return probs / total


def outcome_probabilities(
    params: np.ndarray, setting: MeasurementSetting, noise: NoiseConfig = NO_NOISE
) -> np.ndarray:
    """Probabilities of the four H/V outcomes (HH, HV, VH, VV)."""
    rotated = _setting_rotation(setting) @ ansatz_state(params)
    return _diagonal_probabilities(rotated, noise)


def outcome_probabilities_compiled(
    params: np.ndarray, setting: MeasurementSetting, noise: NoiseConfig = NO_NOISE
) -> np.ndarray:
    """Outcome probabilities through the compiled waveplate angles.

    Realizes the measurement the way the hardware does: the basis change is
    folded into the local waveplates, after which only H/V projections are
    performed.  Equal to :func:`outcome_probabilities` up to per-qubit
    compilation phases, which cancel in the outcome diagonal.
    """
    if setting.compiled_angles is None:
        setting = compile_setting(setting, params)
    t3, t4, t5, t6 = setting.compiled_angles
    psi_in, _ = initial_state(params[0], params[1])
    u1 = hwp(t4) @ qwp(t3)
    u2 = hwp(t6) @ qwp(t5)
    rotated = kron(u1, u2) @ psi_in
    return _diagonal_probabilities(rotated, noise)


def sample_shots(probs: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial draw of outcome counts; deterministic for a fixed seed."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.min() < -ATOL_STATE or abs(probs.sum() - 1.0) > ATOL_STATE:
        raise ValueError("not a probability distribution")
    probs = np.clip(probs, 0.0, None)
    return rng.multinomial(int(n), probs / probs.sum())


def _pauli_signs(label: str) -> np.ndarray:
    """Eigenvalue signs of a two-qubit Pauli string per measurement outcome.

    Outcome index bits are the per-qubit results; every non-identity letter
    contributes ``(-1)^bit``.
    """
    signs = np.ones(4)
    for outcome in range(4):
        for qubit, letter in enumerate(label):
            if letter != "I" and (outcome >> (1 - qubit)) & 1:
                signs[outcome] = -signs[outcome]
    return signs


_ZZ_SETTING = MeasurementSetting(("Z", "Z"))


class EnergyEvaluator:
    """Precompiled estimator for repeated evaluations of one Hamiltonian.

    Groups the Hamiltonian into settings once, precomputes per-setting frame
    rotations, noise Kraus operators and outcome weights, then evaluates

        E = h_I + sum_settings  w_setting . frequencies

    where ``w_setting[outcome]`` folds the coefficients and eigenvalue signs
    of all terms assigned to that setting.
    """

    def __init__(self, h: PauliTermSum, noise: NoiseConfig = NO_NOISE) -> None:
        if h.num_qubits != 2:
            raise ValueError("estimator supports the two-qubit model")
        self.hamiltonian = h
        self.noise = noise
        self.settings = measurement_settings_for(h)
        self.constant = h.identity_coefficient
        self._rotations = [_setting_rotation(s) for s in self.settings]
        self._kraus = _channel_operators(noise)
        self._trivial_noise = len(self._kraus) == 1
        identity = "I" * h.num_qubits
        weights = []
        assigned: set[str] = set()
        for setting in self.settings:
            w = np.zeros(4)
            for label, coeff in h:
                if label == identity or label in assigned:
                    continue
                if all(l == "I" or l == setting.bases[i] for i, l in enumerate(label)):
                    w += coeff * _pauli_signs(label)
                    assigned.add(label)
            weights.append(w)
        self._weights = weights

    def _setting_probabilities(self, rotated: np.ndarray) -> np.ndarray:
        if self._trivial_noise:
            return np.abs(rotated) ** 2
        probs = np.zeros(4)
        for k in self._kraus:
            probs += np.abs(k @ rotated) ** 2
        return probs

    def probabilities(self, theta: np.ndarray) -> list[np.ndarray]:
        """Noisy outcome probabilities for every setting."""
        psi = ansatz_state(theta)
        return [self._setting_probabilities(m @ psi) for m in self._rotations]

    def estimate(
        self, theta: np.ndarray, shots: Shots = "exact", rng: np.random.Generator | None = None
    ) -> float:
        if shots != "exact" and rng is None:
            raise ValueError("finite-shot estimation needs a random generator")
        psi = ansatz_state(theta)
        energy = self.constant
        for m, w in zip(self._rotations, self._weights):
            probs = self._setting_probabilities(m @ psi)
            if shots == "exact":
                freqs = probs
            else:
                counts = rng.multinomial(int(shots), probs / probs.sum())
                freqs = counts / float(shots)
            energy += float(w @ freqs)
        return energy

    def order_parameter(
        self, theta: np.ndarray, shots: Shots = "exact", rng: np.random.Generator | None = None
    ) -> float:
        """VH-outcome frequency of the ZZ setting."""
        rotated = ansatz_state(theta)  # ZZ frame rotation is the identity
        probs = self._setting_probabilities(rotated)
        if shots == "exact":
            return float(probs[2])
        counts = rng.multinomial(int(shots), probs / probs.sum())
        return float(counts[2]) / float(shots)


def energy_estimate(
    params: np.ndarray,
    h: PauliTermSum,
    shots: Shots = "exact",
    noise: NoiseConfig = NO_NOISE,
    rng: np.random.Generator | None = None,
) -> float:
    """Estimate <H> from per-setting outcome statistics.

    In ``"exact"`` mode the outcome probabilities are used directly; with an
    integer shot count each setting is sampled once from a multinomial.
    """
    return EnergyEvaluator(h, noise).estimate(params, shots, rng)


def order_parameter_estimate(
    params: np.ndarray,
    shots: Shots = "exact",
    noise: NoiseConfig = NO_NOISE,
    rng: np.random.Generator | None = None,
) -> float:
    """Estimate the order parameter as the VH frequency of the ZZ setting."""
    rotated = ansatz_state(params)
    probs = _diagonal_probabilities(rotated, noise)
    if shots == "exact":
        return float(probs[2])
    counts = sample_shots(probs, int(shots), rng)
    return float(counts[2]) / float(shots)


def drift_injector(
    step: float,
    rng: np.random.Generator,
    active: tuple[int, ...] = (0, 1),
    n_params: int = 6,
) -> Iterator[np.ndarray]:
    """Random-walk offset of the preparation-stage angles, one step per draw.

    Models slow polarization drift in the fibers feeding the preparation
    stage: each active coordinate takes a bounded +-``step`` increment per
    iteration, so the RMS offset grows as ``step * sqrt(iterations)``.
    ``step = 0`` yields a permanent zero offset.
    """
    if step < 0:
        raise ValueError("step size must be non-negative")
    offset = np.zeros(n_params)
    while True:
        if step > 0.0:
            signs = rng.integers(0, 2, size=len(active)) * 2 - 1
            for idx, sign in zip(active, signs):
                offset[idx] += step * float(sign)
        yield offset.copy()
