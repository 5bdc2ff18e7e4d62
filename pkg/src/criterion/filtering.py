from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import structlog

from src.core.errors import InvalidArgument
from src.qcore.ensemble import MemberState, ProductState
from src.qcore.pauli import PAULIS
from src.qcore.states import DensityMatrix, bloch_density

log = structlog.get_logger(mod="criterion.filtering")

FILTER_TOL = 1e-13
MAX_FILTER_STEPS = 20_000
PURE_MARGINAL_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)


def marginals(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(m).reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", t), np.einsum("ijil->jl", t)


def has_pure_marginal(rho: DensityMatrix) -> bool:
    """A pure marginal forces rho = |a><a| ⊗ rho_B (or the mirror image)."""
    _check(rho)
    return any(np.linalg.eigvalsh(r)[0] < PURE_MARGINAL_TOL for r in marginals(rho.entries))


def _check(rho: DensityMatrix) -> None:
    if rho.n_qubits != 2:
        raise InvalidArgument(f"local filtering needs 2 qubits, got {rho.n_qubits}")


def _inv_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v / np.sqrt(w)) @ v.conj().T


def _apply(F: np.ndarray, m: np.ndarray) -> np.ndarray:
    out = F @ m @ F.conj().T
    out = (out + out.conj().T) / 2
    return out / np.trace(out).real


def _deviation(ra: np.ndarray, rb: np.ndarray) -> float:
    half = _I2 / 2
    return float(max(np.max(np.abs(ra - half)), np.max(np.abs(rb - half))))


def _bloch(m: np.ndarray) -> np.ndarray:
    v = np.array([np.trace(P @ m).real for P in PAULIS[1:]])
    return v / np.linalg.norm(v)


@dataclass(frozen=True, eq=False)
class LocalFilter:
    """state = (A ⊗ B) rho (A ⊗ B)^† / trace, with both marginals of `state` at I/2."""

    state: DensityMatrix
    operators: tuple[np.ndarray, np.ndarray]
    steps: int
    residual: float

    @property
    def converged(self) -> bool:
        return self.residual <= FILTER_TOL

    def pull_back(
        self, members: Sequence[tuple[float, MemberState]]
    ) -> list[tuple[float, MemberState]]:
        """Map a decomposition of `state` to one of the unfiltered state.

        Local operators keep product members product; the weights pick up the
        trace each member gains and are renormalised to one.
        """
        inv = [np.linalg.inv(F) for F in self.operators]
        out: list[tuple[float, MemberState]] = []
        for p, s in members:
            if isinstance(s, ProductState):
                parts = [G @ bloch_density(v) @ G.conj().T for G, v in zip(inv, s.blochs)]
                weight = float(np.prod([np.trace(x).real for x in parts]))
                out.append((p * weight, ProductState(tuple(_bloch(x) for x in parts))))
            else:
                G = np.kron(inv[0], inv[1])
                m = G @ s.entries @ G.conj().T
                weight = float(np.trace(m).real)
                out.append((p * weight, DensityMatrix.from_array(m / weight, validate=False)))
        total = sum(p for p, _ in out)
        return [(p / total, s) for p, s in out]

    def to_payload(self) -> dict:
        return {"steps": self.steps, "residual": self.residual, "converged": self.converged}


def normal_form(rho: DensityMatrix) -> LocalFilter | None:
    """Alternate A = rho_A^(-1/2) and B = rho_B^(-1/2) until both marginals are I/2.

    Invertible local filters keep a 2-qubit state separable or entangled, and the
    limit has no local Bloch terms, so its correlation matrix alone decides.
    Returns None when a marginal is pure: such a state is a product already.
    """
    if has_pure_marginal(rho):
        return None
    m = np.array(rho.entries)
    A, B = _I2.copy(), _I2.copy()
    ra, rb = marginals(m)
    residual = _deviation(ra, rb)
    steps = 0
    while residual > FILTER_TOL and steps < MAX_FILTER_STEPS:
        fa = _inv_sqrt(ra)
        m = _apply(np.kron(fa, _I2), m)
        A = fa @ A
        fb = _inv_sqrt(marginals(m)[1])
        m = _apply(np.kron(_I2, fb), m)
        B = fb @ B
        ra, rb = marginals(m)
        residual = _deviation(ra, rb)
        steps += 1
    if residual > FILTER_TOL:
        log.warning("filter.not_converged", steps=steps, residual=residual)
    return LocalFilter(DensityMatrix.from_array(m, validate=False), (A, B), steps, residual)


def product_members(rho: DensityMatrix) -> list[tuple[float, ProductState]]:
    """Pure products of the local eigenbases; exact when rho = rho_A ⊗ rho_B."""
    _check(rho)
    bases = []
    for r in marginals(rho.entries):
        w, v = np.linalg.eigh(r)
        bases.append([(float(wk), _bloch(np.outer(v[:, k], v[:, k].conj()))) for k, wk in enumerate(w)])
    return [
        (wa * wb, ProductState((va, vb)))
        for wa, va in bases[0]
        for wb, vb in bases[1]
        if wa * wb > 0.0
    ]
