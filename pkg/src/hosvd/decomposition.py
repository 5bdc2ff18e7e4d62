from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.core.errors import InvalidArgument, NumericFailure
from src.corrtensor.products import multi_mode_product, unfold

GRAM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HosvdResult:
    core: np.ndarray
    factors: tuple[np.ndarray, ...]

    def reconstruct(self) -> np.ndarray:
        return multi_mode_product(self.core, list(self.factors))

    def orthogonality_error(self) -> float:
        """Largest off-diagonal inner product between core slices, over all modes."""
        worst = 0.0
        for n in range(self.core.ndim):
            a = unfold(self.core, n)
            g = a @ a.T
            worst = max(worst, float(np.max(np.abs(g - np.diag(np.diag(g))))))
        return worst

    def slice_norms(self, n: int) -> np.ndarray:
        return np.linalg.norm(unfold(self.core, n), axis=1)


def matrix_svd_sum(M: np.ndarray) -> tuple[tuple[float, ...], float]:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise InvalidArgument(f"expected a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidArgument("matrix has non-finite entries")
    try:
        s = scipy.linalg.svd(M, compute_uv=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericFailure(f"SVD failed: {e}") from e
    return tuple(float(x) for x in s), float(np.sum(s))


def _fix_signs(P: np.ndarray) -> np.ndarray:
    # largest-magnitude component of every column positive
    idx = np.argmax(np.abs(P), axis=0)
    signs = np.sign(P[idx, np.arange(P.shape[1])])
    signs[signs == 0] = 1.0
    return P * signs


def mode_factor(A: np.ndarray) -> np.ndarray:
    """Left singular vectors of an unfolding, ordered by decreasing norm."""
    gram = A @ A.T
    diag = np.diag(gram).copy()
    scale = max(1.0, float(np.max(np.abs(diag)))) if diag.size else 1.0
    off = gram - np.diag(diag)
    if not off.size or float(np.max(np.abs(off))) <= GRAM_TOL * scale:
        # rows already orthogonal: keep the axes, order by norm
        order = np.argsort(-diag, kind="stable")
        return np.eye(A.shape[0])[:, order]
    try:
        U, _, _ = scipy.linalg.svd(A, full_matrices=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericFailure(f"SVD of mode unfolding failed: {e}") from e
    return _fix_signs(U)


def hosvd(T: np.ndarray) -> HosvdResult:
    T = np.asarray(T, dtype=float)
    if T.ndim < 2:
        raise InvalidArgument(f"HOSVD needs order >= 2, got {T.ndim}")
    if not np.all(np.isfinite(T)):
        raise NumericFailure("tensor has non-finite entries")
    factors = tuple(mode_factor(unfold(T, n)) for n in range(T.ndim))
    core = multi_mode_product(T, [P.T for P in factors])
    if not np.all(np.isfinite(core)):
        raise NumericFailure("HOSVD core is not finite")
    return HosvdResult(core, factors)
