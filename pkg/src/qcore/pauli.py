from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

from src.core.errors import InvalidArgument

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULIS.setflags(write=False)


def pauli_matrix(index: int) -> np.ndarray:
    if not isinstance(index, (int, np.integer)) or not 0 <= index <= 3:
        raise InvalidArgument(f"Pauli index must be in 0..3, got {index!r}")
    return PAULIS[int(index)].copy()


@dataclass(frozen=True)
class PauliString:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx or any(i not in (0, 1, 2, 3) for i in idx):
            raise InvalidArgument(f"invalid Pauli string {self.indices!r}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        return cls(tuple(int(c) for c in text.strip()))

    @property
    def n_qubits(self) -> int:
        return len(self.indices)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(k for k, i in enumerate(self.indices) if i)

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_global(self) -> bool:
        return self.weight == self.n_qubits

    def __str__(self) -> str:
        return "".join(str(i) for i in self.indices)


def pauli_string_matrix(p: PauliString | Iterable[int]) -> np.ndarray:
    if not isinstance(p, PauliString):
        p = PauliString(tuple(p))
    return reduce(np.kron, (PAULIS[i] for i in p.indices))


def bloch_operator(v: np.ndarray) -> np.ndarray:
    """v·σ for a real 3-vector v."""
    v = np.asarray(v, dtype=float)
    return np.tensordot(v, PAULIS[1:], axes=1)
