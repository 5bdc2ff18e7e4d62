from __future__ import annotations

from typing import Sequence

import numpy as np

from src.core.errors import InvalidArgument
from src.rebuild.weights import ghz_diag_tadd

# rows: t_111, t_122, t_212, t_221; columns: p1..p8 (000±111, 001±110, 010±101, 011±100)
GHZ_DIAG_SIGNS = np.array(
    [
        [1, -1, 1, -1, 1, -1, 1, -1],
        [-1, 1, 1, -1, 1, -1, -1, 1],
        [-1, 1, 1, -1, -1, 1, 1, -1],
        [-1, 1, -1, 1, 1, -1, 1, -1],
    ],
    dtype=float,
)


def ghz_S(n: int) -> int:
    if n < 2:
        raise InvalidArgument(f"GHZ family needs n >= 2, got {n}")
    return 2 ** (n - 1) + 1


def ghz_diag_t(p: Sequence[float]) -> np.ndarray:
    """(t_111, t_122, t_212, t_221) of a GHZ-diagonal state."""
    p = np.asarray(p, dtype=float)
    if p.shape != (8,):
        raise InvalidArgument(f"expected 8 probabilities, got shape {p.shape}")
    return GHZ_DIAG_SIGNS @ p


def ghz_diagonal_S(p: Sequence[float]) -> float:
    t_add = ghz_diag_tadd(p)
    return float(np.sum(np.abs(ghz_diag_t(p)))) + t_add
