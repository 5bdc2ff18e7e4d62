from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import structlog
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from src.corrtensor.products import unfold
from src.corrtensor.tensor import CorrelationTensorR
from src.hosvd.decomposition import mode_factor

log = structlog.get_logger(mod="criterion.frame")

MAX_SEARCH_QUBITS = 3


def _proper(P: np.ndarray) -> np.ndarray:
    if np.linalg.det(P) < 0:
        P = P.copy()
        P[:, -1] *= -1
    return P


def canonical_frame(R: CorrelationTensorR) -> list[np.ndarray]:
    """Per-qubit rotation whose columns are the principal Pauli axes of that qubit.

    Axis k of qubit n is the k-th left singular vector of the mode-n unfolding
    restricted to the sigma_1..sigma_3 rows. Columns are in original coordinates.
    """
    return [_proper(mode_factor(unfold(R.entries, n)[1:, :])) for n in range(R.n_qubits)]


def to_frame(R: CorrelationTensorR, frames: Sequence[np.ndarray]) -> CorrelationTensorR:
    return R.rotated([F.T for F in frames])


def _frames_of(x: np.ndarray, base: Sequence[np.ndarray]) -> list[np.ndarray]:
    rots = Rotation.from_rotvec(x.reshape(len(base), 3)).as_matrix()
    return [B @ r for B, r in zip(base, rots)]


def search_frame(
    R: CorrelationTensorR,
    objective: Callable[[CorrelationTensorR], float],
    starts: Sequence[Sequence[np.ndarray]],
    max_iter: int = 400,
) -> tuple[list[np.ndarray], float]:
    """Minimise `objective` over local rotations with Nelder-Mead from each start."""
    best_frames: list[np.ndarray] = [np.asarray(F) for F in starts[0]]
    best = objective(to_frame(R, best_frames))
    for base in starts:
        base = [np.asarray(F) for F in base]

        def f(x: np.ndarray, base=base) -> float:
            return objective(to_frame(R, _frames_of(x, base)))

        x0 = np.zeros(3 * R.n_qubits)
        start_value = f(x0)
        if start_value < best:
            best, best_frames = start_value, base
        res = minimize(f, x0, method="Nelder-Mead", options={"maxiter": max_iter, "xatol": 1e-8, "fatol": 1e-10})
        log.debug("frame.search", start=start_value, found=float(res.fun), nit=int(res.nit))
        if res.fun < best:
            best, best_frames = float(res.fun), _frames_of(res.x, base)
    return best_frames, float(best)
