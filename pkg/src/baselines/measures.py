from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import structlog
from scipy.optimize import bisect

from src.core.errors import InvalidArgument, NotAState
from src.qcore.pauli import PAULIS, pauli_string_matrix
from src.qcore.states import DensityMatrix, partial_transpose, white_noise_mix

log = structlog.get_logger(mod="baselines")

NPT_TOL = 1e-10
SQRT_FLOOR = 1e-14
TETRAHEDRON_TOL = 1e-12
PPT = "ppt"
NPT = "npt"

_YY = np.kron(PAULIS[2], PAULIS[2])


@dataclass(frozen=True)
class Bipartition:
    n_qubits: int
    left: frozenset[int]

    def __post_init__(self):
        left = frozenset(int(k) for k in self.left)
        if not left or len(left) >= self.n_qubits:
            raise InvalidArgument(f"bipartition side {sorted(left)} must be nonempty and proper")
        if any(k < 0 or k >= self.n_qubits for k in left):
            raise InvalidArgument(f"qubits {sorted(left)} out of range for {self.n_qubits} qubits")
        object.__setattr__(self, "left", left)

    @classmethod
    def of(cls, n: int, left: Iterable[int]) -> "Bipartition":
        return cls(n, frozenset(left))

    @classmethod
    def half(cls, n: int) -> "Bipartition":
        return cls(n, frozenset(range(n // 2)))

    @property
    def right(self) -> frozenset[int]:
        return frozenset(range(self.n_qubits)) - self.left

    def __str__(self) -> str:
        fmt = lambda s: "".join(str(k) for k in sorted(s))  # noqa: E731
        return f"{fmt(self.left)}|{fmt(self.right)}"


def all_bipartitions(n: int) -> Iterator[Bipartition]:
    """Every cut once, up to exchanging the two sides."""
    if n < 2:
        raise InvalidArgument(f"bipartitions need n >= 2, got {n}")
    rest = range(1, n)
    for k in range(0, n - 1):
        for extra in itertools.combinations(rest, k):
            yield Bipartition(n, frozenset((0, *extra)))


def _check(rho: DensityMatrix, b: Bipartition) -> None:
    if b.n_qubits != rho.n_qubits:
        raise InvalidArgument(
            f"bipartition is for {b.n_qubits} qubits, state has {rho.n_qubits}"
        )


def pt_eigenvalues(rho: DensityMatrix, b: Bipartition) -> np.ndarray:
    _check(rho, b)
    return np.linalg.eigvalsh(partial_transpose(rho, b.left))


def negativity(rho: DensityMatrix, b: Bipartition) -> float:
    """Trace norm of the partial transpose minus one."""
    lam = pt_eigenvalues(rho, b)
    return max(0.0, float(np.sum(np.abs(lam))) - 1.0)


def purity_negativity(rho: DensityMatrix, b: Bipartition) -> float:
    """Tr(rho^TA rho^TA†) - 1; reported alongside the trace-norm value only."""
    _check(rho, b)
    pt = partial_transpose(rho, b.left)
    return float(np.real(np.trace(pt @ pt.conj().T))) - 1.0


def ppt_verdict(rho: DensityMatrix, b: Bipartition) -> str:
    return NPT if float(np.min(pt_eigenvalues(rho, b))) < -NPT_TOL else PPT


def ppt_threshold(rho: DensityMatrix, b: Bipartition, tol: float = 1e-9) -> float:
    """Largest white-noise weight at which the partial transpose stays non-positive."""
    def lowest(q: float) -> float:
        return float(np.min(pt_eigenvalues(white_noise_mix(rho, q), b)))

    if lowest(0.0) >= -NPT_TOL:
        return 0.0
    q = bisect(lowest, 0.0, 1.0, xtol=tol)
    log.info("ppt.threshold", cut=str(b), q=q)
    return float(q)


def _bell_eigenvalues(a: float, b: float, c: float) -> np.ndarray:
    return np.array(
        [1 - a - b - c, 1 - a + b + c, 1 + a - b + c, 1 + a + b - c]
    ) / 4


def bell_diagonal_state(a: float, b: float, c: float) -> DensityMatrix:
    """(I + a XX + b YY + c ZZ) / 4."""
    lam = _bell_eigenvalues(a, b, c)
    if np.min(lam) < -TETRAHEDRON_TOL:
        raise NotAState("(a, b, c) lies outside the Bell tetrahedron", a=a, b=b, c=c)
    m = pauli_string_matrix((0, 0)) + sum(
        t * pauli_string_matrix((k, k)) for k, t in zip((1, 2, 3), (a, b, c))
    )
    return DensityMatrix.from_array(m / 4, validate=False)


def bell_diag_negativity(a: float, b: float, c: float) -> float:
    lam = _bell_eigenvalues(a, b, c)
    if np.min(lam) < -TETRAHEDRON_TOL:
        raise NotAState("(a, b, c) lies outside the Bell tetrahedron", a=a, b=b, c=c)
    return max(0.0, (abs(a) + abs(b) + abs(c) - 1.0) / 2.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.where(w > SQRT_FLOOR, w, 0.0))) @ v.conj().T


def concurrence(rho: DensityMatrix) -> float:
    if rho.n_qubits != 2:
        raise InvalidArgument(f"concurrence needs 2 qubits, got {rho.n_qubits}")
    r = rho.entries
    tilde = _YY @ r.conj() @ _YY
    s = _psd_sqrt(r)
    inner = s @ tilde @ s
    lam = np.sqrt(np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None))
    lam = np.sort(lam)[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
