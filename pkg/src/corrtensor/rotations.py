from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.errors import InvalidArgument
from src.qcore.pauli import PAULIS
from src.qcore.random import random_local_unitary, Seed

ROT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Rotation3:
    entries: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.entries, dtype=float)
        if o.shape != (3, 3):
            raise InvalidArgument(f"rotation must be 3x3, got {o.shape}")
        if np.max(np.abs(o.T @ o - np.eye(3))) > ROT_TOL:
            raise InvalidArgument("rotation is not orthogonal")
        if abs(np.linalg.det(o) - 1.0) > ROT_TOL:
            raise InvalidArgument(f"rotation has determinant {np.linalg.det(o):.6g}, not +1")
        o = o.copy()
        o.setflags(write=False)
        object.__setattr__(self, "entries", o)

    @classmethod
    def identity(cls) -> "Rotation3":
        return cls(np.eye(3))

    def __matmul__(self, other: "Rotation3") -> "Rotation3":
        return Rotation3(self.entries @ other.entries)


def su2_to_so3(U: np.ndarray) -> Rotation3:
    """O_ij = 1/2 Tr(σ_i U σ_j U†); conjugation by U rotates Bloch vectors by O."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or np.max(np.abs(U.conj().T @ U - np.eye(2))) > ROT_TOL:
        raise InvalidArgument("su2_to_so3 needs a 2x2 unitary")
    s = PAULIS[1:]
    conj = np.einsum("ab,jbc,dc->jad", U, s, U.conj())  # U σ_j U†
    o = 0.5 * np.einsum("iab,jba->ij", s, conj)
    return Rotation3(np.real(o))


def random_rotation(seed: Seed) -> Rotation3:
    return su2_to_so3(random_local_unitary(seed))
