from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from src.core.errors import InvalidArgument, InvalidState
from src.qcore.pauli import PAULIS, bloch_operator
from src.qcore.validation import (
    check_distribution,
    check_norm,
    validate_density,
    ValidationReport,
)

SQRT2 = np.sqrt(2.0)

# single-qubit kets by label; "~" marks sigma_2 eigenstates
KETS: dict[str, np.ndarray] = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / SQRT2,
    "-": np.array([1, -1], dtype=complex) / SQRT2,
    "~+": np.array([1, 1j], dtype=complex) / SQRT2,
    "~-": np.array([1, -1j], dtype=complex) / SQRT2,
}


def _n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 2**n != dim:
        raise InvalidArgument(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.n_qubits < 1 or amps.shape[0] != 2**self.n_qubits:
            raise InvalidArgument(
                f"{amps.shape[0]} amplitudes do not match {self.n_qubits} qubits"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InvalidState("zero vector cannot be normalized")
        return cls(_n_qubits_of(amps.shape[0]), amps / norm)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (2**self.n_qubits, 2**self.n_qubits):
            raise InvalidArgument(
                f"matrix of shape {m.shape} does not match {self.n_qubits} qubits"
            )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_array(cls, m: np.ndarray, validate: bool = True) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if validate:
            report = validation_report(m)
            report.raise_for(InvalidState, "density matrix")
        # round-off symmetrization
        m = (m + m.conj().T) / 2
        return cls(_n_qubits_of(m.shape[0]), m)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(float(np.real(np.trace(self.entries @ self.entries))) - 1.0) <= tol

    def conjugated(self, u: np.ndarray) -> "DensityMatrix":
        return DensityMatrix.from_array(u @ self.entries @ u.conj().T, validate=False)


def validation_report(m: np.ndarray) -> ValidationReport:
    return validate_density(np.asarray(m, dtype=complex))


def density_from_state(psi: StateVector) -> DensityMatrix:
    norm = check_norm(psi.amplitudes, tol=1e-9)
    ValidationReport.of([norm]).raise_for(InvalidState, "state vector")
    a = psi.amplitudes
    return DensityMatrix(psi.n_qubits, np.outer(a, a.conj()))


def maximally_mixed(n: int) -> DensityMatrix:
    if n < 1:
        raise InvalidArgument(f"n_qubits must be >= 1, got {n}")
    return DensityMatrix(n, np.eye(2**n, dtype=complex) / 2**n)


def white_noise_mix(rho: DensityMatrix, q: float) -> DensityMatrix:
    if not 0.0 <= q <= 1.0:
        raise InvalidArgument(f"noise strength q must lie in [0, 1], got {q}")
    eye = np.eye(rho.dim, dtype=complex) / rho.dim
    return DensityMatrix(rho.n_qubits, (1.0 - q) * rho.entries + q * eye)


def partial_transpose(rho: DensityMatrix, subset: Iterable[int]) -> np.ndarray:
    n = rho.n_qubits
    subset = sorted(set(int(k) for k in subset))
    if any(k < 0 or k >= n for k in subset):
        raise InvalidArgument(f"qubit indices {subset} out of range for {n} qubits")
    t = rho.entries.reshape([2] * (2 * n))
    axes = list(range(2 * n))
    for k in subset:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return t.transpose(axes).reshape(rho.dim, rho.dim)


# ---- named states ----


def product_ket(labels: Sequence[str]) -> StateVector:
    try:
        kets = [KETS[lab] for lab in labels]
    except KeyError as e:
        raise InvalidArgument(f"unknown single-qubit label {e.args[0]!r}") from None
    if not kets:
        raise InvalidArgument("empty product state")
    return StateVector(len(kets), reduce(np.kron, kets))


def ghz_state(n: int) -> StateVector:
    if n < 2:
        raise InvalidArgument(f"GHZ needs n >= 2, got {n}")
    a = np.zeros(2**n, dtype=complex)
    a[0] = a[-1] = 1 / SQRT2
    return StateVector(n, a)


def w_state(n: int) -> StateVector:
    if n < 2:
        raise InvalidArgument(f"W needs n >= 2, got {n}")
    a = np.zeros(2**n, dtype=complex)
    for k in range(n):
        a[1 << k] = 1 / np.sqrt(n)
    return StateVector(n, a)


BELL_STATES = {
    "phi+": (0b00, 0b11, +1),
    "phi-": (0b00, 0b11, -1),
    "psi+": (0b01, 0b10, +1),
    "psi-": (0b01, 0b10, -1),
}


def bell_state(name: str) -> StateVector:
    if name not in BELL_STATES:
        raise InvalidArgument(f"unknown Bell state {name!r}; use one of {sorted(BELL_STATES)}")
    i, j, sign = BELL_STATES[name]
    a = np.zeros(4, dtype=complex)
    a[i], a[j] = 1 / SQRT2, sign / SQRT2
    return StateVector(2, a)


def ghz_basis_state(index: int) -> StateVector:
    """The eight 3-qubit GHZ-type states: 000±111, 001±110, 010±101, 011±100."""
    if not 0 <= index < 8:
        raise InvalidArgument(f"GHZ basis index must be in 0..7, got {index}")
    low = index // 2
    sign = 1 if index % 2 == 0 else -1
    a = np.zeros(8, dtype=complex)
    a[low], a[7 - low] = 1 / SQRT2, sign / SQRT2
    return StateVector(3, a)


def ghz_diagonal_state(p: Sequence[float]) -> DensityMatrix:
    p = np.asarray(p, dtype=float)
    if p.shape != (8,):
        raise InvalidArgument(f"GHZ-diagonal state needs 8 probabilities, got {p.shape}")
    ValidationReport.of([check_distribution(p)]).raise_for(InvalidArgument, "distribution")
    m = sum(pk * density_from_state(ghz_basis_state(k)).entries for k, pk in enumerate(p))
    return DensityMatrix.from_array(m, validate=False)


def werner_state(q: float) -> DensityMatrix:
    return white_noise_mix(density_from_state(bell_state("psi-")), q)


def bloch_density(v: np.ndarray) -> np.ndarray:
    """Single-qubit (I + v·σ)/2 as a plain matrix."""
    return (PAULIS[0] + bloch_operator(v)) / 2
