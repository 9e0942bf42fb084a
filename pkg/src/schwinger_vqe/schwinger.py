"""Lattice Schwinger Hamiltonian on qubits, its spectrum and order parameter.

The N-site Hamiltonian (staggered-fermion form, hopping ``w`` and field
coupling ``g``) is

    H_N = w * sum_{j=1}^{N-1} (XX + YY on sites j, j+1)
        + (m/2) * sum_{j=1}^{N} (-1)^j Z_j
        + g * sum_{j=1}^{N} L_j^2,
    L_j = eps0 - (1/2) * sum_{l=1}^{j} (Z_l + (-1)^l).

Convention note: the hopping term is written directly as ``XX + YY`` per
bond, i.e. the raising/lowering pair ``s+ s- + h.c.`` is normalized so that
it expands with unit coefficient (no extra 1/2).  For N = 2 this gives

    H_2 = 1 + X1 X2 + Y1 Y2 - (1/2) Z1 + (1/2) Z1 Z2 + (m/2)(Z2 - Z1)

whose four eigenvalues are E = 1, 2 and 1/2 +- sqrt(m^2 + m + 17/4).

The order parameter is

    <O> = 1/(2N(N-1)) * sum_{j>i} <(1 + (-1)^i Z_i)(1 + (-1)^j Z_j)>,

which for two qubits is exactly the projector onto ``|10> = |VH>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from math import sqrt

import numpy as np

from .linalg import PAULI, hermitian_eigen, kron

MAX_QUBITS = 12

_PAULI_LETTERS = frozenset("IXYZ")


def validate_pauli_label(label: str, num_qubits: int) -> str:
    if len(label) != num_qubits or not set(label) <= _PAULI_LETTERS:
        raise ValueError(f"invalid Pauli string {label!r} for {num_qubits} qubits")
    return label


def pauli_string_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string such as ``"XZ"`` or ``"IYI"``."""
    validate_pauli_label(label, len(label))
    return reduce(kron, (PAULI[ch] for ch in label))


class PauliTermSum:
    """Real-weighted sum of Pauli strings over a fixed number of qubits.

    Duplicate strings are merged on construction and exact-zero coefficients
    dropped, so the term list is canonical.  Instances are immutable.
    """

    __slots__ = ("num_qubits", "_terms")

    def __init__(self, num_qubits: int, terms) -> None:
        merged: dict[str, float] = {}
        for label, coeff in dict(terms).items() if isinstance(terms, dict) else terms:
            validate_pauli_label(label, num_qubits)
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient for {label!r}")
            merged[label] = merged.get(label, 0.0) + coeff
        self.num_qubits = int(num_qubits)
        self._terms = tuple((label, c) for label, c in merged.items() if c != 0.0)

    @property
    def terms(self) -> tuple[tuple[str, float], ...]:
        return self._terms

    def coefficients(self) -> dict[str, float]:
        return dict(self._terms)

    def coefficient(self, label: str) -> float:
        validate_pauli_label(label, self.num_qubits)
        return dict(self._terms).get(label, 0.0)

    @property
    def identity_coefficient(self) -> float:
        return self.coefficient("I" * self.num_qubits)

    def to_matrix(self) -> np.ndarray:
        dim = 2**self.num_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        for label, coeff in self._terms:
            out += coeff * pauli_string_matrix(label)
        return out

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __repr__(self) -> str:
        inner = " + ".join(f"{c:g}*{label}" for label, c in self._terms)
        return f"PauliTermSum({self.num_qubits}, {inner})"


@dataclass(frozen=True)
class SchwingerConfig:
    """Model parameters; ``w = g = 1`` and zero background field by default."""

    num_sites: int
    mass: float
    hopping: float = 1.0
    coupling: float = 1.0
    background_field: float = 0.0

    def __post_init__(self) -> None:
        if self.num_sites < 2:
            raise ValueError("need at least 2 sites")
        if self.num_sites > MAX_QUBITS:
            raise ValueError(f"dense construction capped at {MAX_QUBITS} qubits")


def _z_label(n: int, sites: tuple[int, ...]) -> str:
    letters = ["I"] * n
    for s in sites:
        letters[s] = "Z"
    return "".join(letters)


def build_schwinger(cfg: SchwingerConfig) -> PauliTermSum:
    """Pauli-string form of the N-site Schwinger Hamiltonian."""
    n = cfg.num_sites
    acc: dict[str, float] = {}

    def add(label: str, coeff: float) -> None:
        acc[label] = acc.get(label, 0.0) + coeff

    for j in range(n - 1):
        for letter in "XY":
            letters = ["I"] * n
            letters[j] = letter
            letters[j + 1] = letter
            add("".join(letters), cfg.hopping)

    for j in range(n):
        # (-1)^j for 1-based site index j+1
        sign = -1.0 if (j + 1) % 2 else 1.0
        add(_z_label(n, (j,)), 0.5 * cfg.mass * sign)

    # L_j = c_j - (1/2) sum_{l<=j} Z_l with c_j = eps0 + 1/2 for odd j, eps0 otherwise;
    # squaring gives (c_j^2 + j/4) I - c_j sum Z_l + (1/2) sum_{l<l'} Z_l Z_l'.
    for j in range(1, n + 1):
        c = cfg.background_field + (0.5 if j % 2 else 0.0)
        add("I" * n, cfg.coupling * (c * c + 0.25 * j))
        for l in range(j):
            add(_z_label(n, (l,)), -cfg.coupling * c)
        for l in range(j):
            for lp in range(l + 1, j):
                add(_z_label(n, (l, lp)), 0.5 * cfg.coupling)

    return PauliTermSum(n, acc)


def build_h2(m: float) -> PauliTermSum:
    """Two-site Hamiltonian H_2(m)."""
    return build_schwinger(SchwingerConfig(num_sites=2, mass=m))


@dataclass(frozen=True)
class SpectrumInfo:
    """Two-qubit spectrum, ordered e4 <= e3 <= e2 <= e1, with ground vector."""

    e4: float
    e3: float
    e2: float
    e1: float
    ground_state: np.ndarray

    @property
    def levels(self) -> np.ndarray:
        return np.array([self.e4, self.e3, self.e2, self.e1])


def _analytic_levels(m: float) -> tuple[float, float, float, float]:
    """Levels (e4, e3, e2, e1) of H_2(m): 1/2 +- sqrt(m^2 + m + 17/4), 1, 2."""
    root = sqrt(m * m + m + 17.0 / 4.0)
    return (0.5 - root, 1.0, 2.0, 0.5 + root)


def analytic_spectrum(m: float) -> SpectrumInfo:
    """Closed-form spectrum of H_2(m).

    The extreme levels are ``1/2 +- sqrt(m^2 + m + 17/4)``; the two middle
    levels are mass-independent (1 and 2).  The ground vector is taken from
    the Jacobi eigensolver applied to the dense matrix.
    """
    e4, e3, e2, e1 = _analytic_levels(m)
    _, vecs = hermitian_eigen(build_h2(m).to_matrix())
    return SpectrumInfo(e4=e4, e3=e3, e2=e2, e1=e1, ground_state=vecs[:, 0])


def order_parameter_observable(num_qubits: int) -> PauliTermSum:
    """Order-parameter observable; the ``|10>`` projector for two qubits."""
    n = num_qubits
    if n < 2:
        raise ValueError("need at least 2 qubits")
    acc: dict[str, float] = {}
    norm = 1.0 / (2.0 * n * (n - 1))

    def add(label: str, coeff: float) -> None:
        acc[label] = acc.get(label, 0.0) + coeff

    for i in range(n):
        for j in range(i + 1, n):
            si = -1.0 if (i + 1) % 2 else 1.0
            sj = -1.0 if (j + 1) % 2 else 1.0
            add("I" * n, norm)
            add(_z_label(n, (i,)), norm * si)
            add(_z_label(n, (j,)), norm * sj)
            add(_z_label(n, (i, j)), norm * si * sj)
    return PauliTermSum(n, acc)


@lru_cache(maxsize=None)
def exact_ground_order_parameter(m: float) -> float:
    """Order parameter of the exact ground state of H_2(m)."""
    ground = analytic_spectrum(m).ground_state
    return float(abs(ground[2]) ** 2)


def accuracy_delta(energy: float, m: float) -> float:
    """Relative accuracy (E - E0) / (E1 - E0) against the analytic spectrum.

    ``E0`` is the ground level and ``E1`` the first level strictly above it.
    """
    levels = sorted(_analytic_levels(m))
    e0 = levels[0]
    above = [e for e in levels if e > e0 + 1e-12]
    if not above:
        raise ValueError("spectral gap is degenerate")
    return float((energy - e0) / (above[0] - e0))
