from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import structlog

from src.core.config import settings
from src.core.errors import InvalidArgument, NotAState, NumericFailure
from src.corrtensor.products import multi_mode_product
from src.corrtensor.rotations import Rotation3
from src.qcore.pauli import PAULIS, PauliString
from src.qcore.states import DensityMatrix
from src.qcore.validation import check_psd

IMAG_TOL = 1e-8
BOUND_TOL = 1e-9

# t_i = sum_{r,c} σ_i[c, r] ρ[r, c]; pair index 2r + c
_TO_PAULI = PAULIS.transpose(0, 2, 1).reshape(4, 4)
# ρ[r, c] = 1/2 sum_i t_i σ_i[r, c]
_FROM_PAULI = PAULIS.reshape(4, 4).T / 2

log = structlog.get_logger(mod="corrtensor")


def _check_order(n: int) -> None:
    if n < 1 or n > settings.MAX_QUBITS:
        raise InvalidArgument(f"supported qubit counts are 1..{settings.MAX_QUBITS}, got {n}")


@dataclass(frozen=True, eq=False)
class CorrelationTensorR:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.entries, dtype=float)
        if t.shape != (4,) * self.n_qubits:
            raise InvalidArgument(f"R-tensor shape {t.shape} does not match {self.n_qubits} qubits")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "entries", t)

    def __getitem__(self, p: PauliString | Sequence[int] | str) -> float:
        return float(self.entries[_index(p)])

    def to_T(self) -> "CorrelationTensorT":
        return CorrelationTensorT(self.n_qubits, self.entries[(slice(1, 4),) * self.n_qubits])

    def nonglobal(self, floor: float = 0.0) -> dict[PauliString, float]:
        """Coefficients with at least one identity factor, excluding the all-identity one."""
        out: dict[PauliString, float] = {}
        for idx in np.ndindex(*self.entries.shape):
            if 0 in idx and any(idx):
                v = float(self.entries[idx])
                if abs(v) > floor:
                    out[PauliString(idx)] = v
        return out

    def rotated(self, rotations: Sequence[Rotation3 | np.ndarray]) -> "CorrelationTensorR":
        """Local rotations act on the 1..3 block of every mode; index 0 is fixed."""
        if len(rotations) != self.n_qubits:
            raise InvalidArgument(f"need {self.n_qubits} rotations, got {len(rotations)}")
        mats = []
        for o in rotations:
            block = np.eye(4)
            block[1:, 1:] = o.entries if isinstance(o, Rotation3) else np.asarray(o)
            mats.append(block)
        return CorrelationTensorR(self.n_qubits, multi_mode_product(self.entries, mats))


@dataclass(frozen=True, eq=False)
class CorrelationTensorT:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.entries, dtype=float)
        if t.shape != (3,) * self.n_qubits:
            raise InvalidArgument(f"T-tensor shape {t.shape} does not match {self.n_qubits} qubits")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "entries", t)

    @classmethod
    def zeros(cls, n: int) -> "CorrelationTensorT":
        return cls(n, np.zeros((3,) * n))

    def __getitem__(self, axes: Sequence[int] | str) -> float:
        """Indexed by Pauli axes 1..3."""
        if isinstance(axes, str):
            axes = [int(c) for c in axes]
        return float(self.entries[tuple(a - 1 for a in axes)])

    def nonzero(self, floor: float = 0.0) -> Iterator[tuple[tuple[int, ...], float]]:
        for idx in zip(*np.nonzero(np.abs(self.entries) > floor)):
            yield tuple(int(i) + 1 for i in idx), float(self.entries[idx])


def _index(p: PauliString | Sequence[int] | str) -> tuple[int, ...]:
    if isinstance(p, PauliString):
        return p.indices
    if isinstance(p, str):
        return tuple(int(c) for c in p)
    return tuple(int(i) for i in p)


def _pair_view(rho: DensityMatrix) -> np.ndarray:
    n = rho.n_qubits
    t = rho.entries.reshape([2] * (2 * n))
    order = [ax for k in range(n) for ax in (k, n + k)]
    return t.transpose(order).reshape((4,) * n)


def correlation_tensor(rho: DensityMatrix) -> CorrelationTensorR:
    n = rho.n_qubits
    _check_order(n)
    r = multi_mode_product(_pair_view(rho), [_TO_PAULI] * n)
    residue = float(np.max(np.abs(r.imag)))
    if residue > IMAG_TOL:
        raise NumericFailure(
            "correlation tensor has an imaginary residue; input is not Hermitian",
            residue=residue,
        )
    if residue > 1e-10:
        log.warning("corrtensor.imag_residue", residue=residue)
    return CorrelationTensorR(n, r.real)


def reconstruct_density(R: CorrelationTensorR, psd_tol: float = 1e-8) -> DensityMatrix:
    n = R.n_qubits
    _check_order(n)
    t = R.entries
    if abs(t[(0,) * n] - 1.0) > BOUND_TOL:
        raise NotAState("t_{0..0} must equal 1", t0=float(t[(0,) * n]))
    worst = float(np.max(np.abs(t)))
    if worst > 1.0 + BOUND_TOL:
        raise NotAState("correlation coefficient exceeds 1 in magnitude", max_abs=worst)
    pairs = multi_mode_product(t.astype(complex), [_FROM_PAULI] * n)
    m = pairs.reshape([2] * (2 * n))
    order = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    m = m.transpose(order).reshape(2**n, 2**n)
    psd = check_psd(m, psd_tol)
    if psd.status != "passed":
        raise NotAState("reconstructed matrix is not positive semidefinite", **psd.details)
    return DensityMatrix.from_array(m, validate=False)


def local_rotate_tensor(
    T: CorrelationTensorT | np.ndarray, rotations: Sequence[Rotation3 | np.ndarray]
) -> CorrelationTensorT | np.ndarray:
    arr = T.entries if isinstance(T, CorrelationTensorT) else np.asarray(T, dtype=float)
    if len(rotations) != arr.ndim:
        raise InvalidArgument(f"need {arr.ndim} rotations, got {len(rotations)}")
    mats = [o.entries if isinstance(o, Rotation3) else np.asarray(o) for o in rotations]
    out = multi_mode_product(arr, mats)
    if isinstance(T, CorrelationTensorT):
        return CorrelationTensorT(T.n_qubits, out)
    return out
