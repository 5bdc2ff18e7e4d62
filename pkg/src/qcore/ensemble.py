from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from src.core.errors import InvalidArgument, InvalidState
from src.qcore.states import DensityMatrix, bloch_density

PROB_TOL = 1e-12

_AXIS_LABELS = {
    (0, 1): "+",
    (0, -1): "-",
    (1, 1): "~+",
    (1, -1): "~-",
    (2, 1): "0",
    (2, -1): "1",
}


@dataclass(frozen=True, eq=False)
class ProductState:
    """Pure product state given by one unit Bloch vector per qubit."""

    blochs: tuple[np.ndarray, ...]

    def __post_init__(self):
        vs = tuple(np.asarray(v, dtype=float).reshape(3) for v in self.blochs)
        if not vs:
            raise InvalidArgument("product state needs at least one qubit")
        for v in vs:
            if abs(np.linalg.norm(v) - 1.0) > 1e-9:
                raise InvalidState(f"Bloch vector {v} is not a unit vector")
        object.__setattr__(self, "blochs", vs)

    @property
    def n_qubits(self) -> int:
        return len(self.blochs)

    def density(self) -> np.ndarray:
        return reduce(np.kron, (bloch_density(v) for v in self.blochs))

    def label(self, digits: int = 3) -> str:
        parts = []
        for v in self.blochs:
            k = int(np.argmax(np.abs(v)))
            sign = 1 if v[k] > 0 else -1
            if abs(abs(v[k]) - 1.0) < 1e-9:
                parts.append(_AXIS_LABELS[(k, sign)])
            else:
                parts.append("(" + ",".join(f"{x:.{digits}f}" for x in v) + ")")
        return "|" + ",".join(parts) + ">"


MemberState = Union[DensityMatrix, ProductState]


@dataclass(frozen=True)
class EnsembleMember:
    probability: float
    state: MemberState

    @property
    def n_qubits(self) -> int:
        return self.state.n_qubits

    def matrix(self) -> np.ndarray:
        if isinstance(self.state, ProductState):
            return self.state.density()
        return self.state.entries

    @property
    def is_pure(self) -> bool:
        return isinstance(self.state, ProductState)

    def label(self) -> str:
        if isinstance(self.state, ProductState):
            return self.state.label()
        dim = 2**self.state.n_qubits
        if np.allclose(self.state.entries, np.eye(dim) / dim, atol=1e-12):
            return f"I/{dim}"
        return f"rho[{self.state.n_qubits}q]"


@dataclass(frozen=True)
class Ensemble:
    members: tuple[EnsembleMember, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InvalidArgument("ensemble has no members")
        probs = np.array([m.probability for m in members], dtype=float)
        if np.any(probs < -PROB_TOL) or np.any(probs > 1 + PROB_TOL):
            raise InvalidArgument("ensemble probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise InvalidArgument(f"ensemble probabilities sum to {probs.sum():.15g}, not 1")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, pairs: Sequence[tuple[float, MemberState]]) -> "Ensemble":
        return cls(tuple(EnsembleMember(float(p), s) for p, s in pairs))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def n_qubits(self) -> int:
        return self.members[0].n_qubits

    def pure_members(self) -> list[EnsembleMember]:
        return [m for m in self.members if m.is_pure]

    def probability_counts(self, digits: int = 12) -> dict[float, int]:
        counts: dict[float, int] = {}
        for m in self.members:
            key = round(m.probability, digits)
            counts[key] = counts.get(key, 0) + 1
        return counts


def mix(e: Ensemble) -> DensityMatrix:
    n = e.n_qubits
    if any(m.n_qubits != n for m in e.members):
        raise InvalidArgument("ensemble members have mismatched qubit counts")
    total = sum(m.probability * m.matrix() for m in e.members)
    return DensityMatrix.from_array(total, validate=False)
