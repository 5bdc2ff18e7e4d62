from __future__ import annotations

from typing import Sequence

import numpy as np

from src.core.errors import InvalidArgument


def mode_n_product(T: np.ndarray, O: np.ndarray, n: int) -> np.ndarray:
    """(T x_n O)_{..m..} = sum_i t_{..i..} o_{m i}."""
    T = np.asarray(T)
    O = np.asarray(O)
    if not 0 <= n < T.ndim:
        raise InvalidArgument(f"mode {n} out of range for an order-{T.ndim} tensor")
    if O.ndim != 2 or O.shape[1] != T.shape[n]:
        raise InvalidArgument(
            f"matrix of shape {O.shape} cannot act on mode {n} of dimension {T.shape[n]}"
        )
    return np.moveaxis(np.tensordot(O, T, axes=([1], [n])), 0, n)


def multi_mode_product(T: np.ndarray, mats: Sequence[np.ndarray | None]) -> np.ndarray:
    if len(mats) != np.ndim(T):
        raise InvalidArgument(f"need {np.ndim(T)} matrices, got {len(mats)}")
    for n, O in enumerate(mats):
        if O is not None:
            T = mode_n_product(T, O, n)
    return T


def unfold(T: np.ndarray, n: int) -> np.ndarray:
    """Mode-n unfolding: rows indexed by i_n."""
    return np.moveaxis(T, n, 0).reshape(T.shape[n], -1)
