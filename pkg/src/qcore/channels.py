from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.core.errors import InvalidArgument, InvalidChannel
from src.qcore.pauli import PAULIS
from src.qcore.states import DensityMatrix
from src.qcore.validation import check_kraus_completeness, ValidationReport


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(E, dtype=complex) for E in self.operators)
        if not ops or any(E.shape != (2, 2) for E in ops):
            raise InvalidArgument("Kraus operators must be a non-empty list of 2x2 matrices")
        object.__setattr__(self, "operators", ops)

    def validate(self, tol: float = 1e-12) -> ValidationReport:
        return ValidationReport.of([check_kraus_completeness(self.operators, tol)])


def depolarizing(q: float) -> KrausChannel:
    """sqrt(1-3q/4)·I and sqrt(q/4)·σ_k; shrinks the Bloch vector by (1-q)."""
    if not 0.0 <= q <= 1.0:
        raise InvalidArgument(f"depolarizing strength must lie in [0, 1], got {q}")
    return KrausChannel(
        (np.sqrt(1 - 3 * q / 4) * PAULIS[0],)
        + tuple(np.sqrt(q / 4) * PAULIS[k] for k in (1, 2, 3))
    )


def apply_channel(rho: DensityMatrix, ch: KrausChannel, qubit: int) -> DensityMatrix:
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise InvalidArgument(f"qubit {qubit} out of range for {n} qubits")
    ch.validate(tol=1e-9).raise_for(InvalidChannel, "Kraus channel")
    t = rho.entries.reshape([2] * (2 * n))
    out = np.zeros_like(t)
    for E in ch.operators:
        # E on the row index of `qubit`, E^dagger on its column index
        x = np.moveaxis(np.tensordot(E, t, axes=([1], [qubit])), 0, qubit)
        x = np.moveaxis(np.tensordot(E.conj(), x, axes=([1], [n + qubit])), 0, n + qubit)
        out += x
    m = out.reshape(rho.dim, rho.dim)
    return DensityMatrix.from_array((m + m.conj().T) / 2, validate=False)


def apply_channel_all(rho: DensityMatrix, ch: KrausChannel) -> DensityMatrix:
    for k in range(rho.n_qubits):
        rho = apply_channel(rho, ch, k)
    return rho


def apply_local_unitaries(rho: DensityMatrix, unitaries: Sequence[np.ndarray]) -> DensityMatrix:
    if len(unitaries) != rho.n_qubits:
        raise InvalidArgument(
            f"need {rho.n_qubits} local unitaries, got {len(unitaries)}"
        )
    u = np.array([[1.0]], dtype=complex)
    for uk in unitaries:
        u = np.kron(u, np.asarray(uk, dtype=complex))
    return rho.conjugated(u)
