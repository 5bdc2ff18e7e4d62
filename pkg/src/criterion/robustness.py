from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
import structlog
from scipy.optimize import bisect

from src.baselines.measures import Bipartition, negativity
from src.core.errors import InvalidArgument
from src.criterion.evaluate import evaluate
from src.qcore.channels import apply_channel_all, depolarizing
from src.qcore.states import density_from_state, ghz_state

log = structlog.get_logger(mod="criterion.robustness")

VARIANTS = ("E", "E1", "E2dbl", "negativity")
MAX_NEGATIVITY_QUBITS = 8
MAX_SPOT_CHECK_QUBITS = 4
SPOT_CHECK_TOL = 1e-6
_LOG_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True)
class RobustnessCurve:
    n_qubits: int
    variant: str
    samples: tuple[tuple[float, float], ...]
    zero: Optional[float] = None
    spot_check_error: Optional[float] = None

    def __post_init__(self):
        qs = [q for q, _ in self.samples]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise InvalidArgument("curve grid must be strictly increasing")

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.samples, columns=["q", "value"])
        df["zero_crossing"] = self.zero
        return df


def _log_S(n: int) -> float:
    # log(2^(n-1) + 1) without forming the power
    return (n - 1) * math.log(2.0) + math.log1p(math.ldexp(1.0, -(n - 1)))


def _log_decay(n: int, q: float) -> float:
    """log(S_N (1 - q)^N); -inf at q = 1."""
    if q >= 1.0:
        return -math.inf
    return _log_S(n) + n * math.log1p(-q)


def closed_form(n: int, variant: str, q: float) -> float:
    log_d = _log_decay(n, q)
    if variant == "E2dbl":
        if log_d > _LOG_MAX:
            return math.inf
        return math.exp(log_d) - 1.0
    # (S (1-q)^N - 1) / (S - 1) with S - 1 = 2^(N-1), divided inside the exponent
    e = math.exp(log_d - (n - 1) * math.log(2.0)) - math.ldexp(1.0, -(n - 1))
    return max(e, 0.0) if variant == "E" else e


def closed_form_zero(n: int) -> float:
    """q where S_N (1 - q)^N = 1."""
    return -math.expm1(-_log_S(n) / n)


def ghz_depolarized(n: int, q: float):
    return apply_channel_all(density_from_state(ghz_state(n)), depolarizing(q))


def ghz_negativity(n: int, q: float) -> float:
    if n > MAX_NEGATIVITY_QUBITS:
        raise InvalidArgument(f"negativity curve supports up to {MAX_NEGATIVITY_QUBITS} qubits")
    return negativity(ghz_depolarized(n, q), Bipartition.half(n))


def slice_sum_scale(n: int) -> int:
    """Number of unit global correlations of GHZ_N."""
    return 2 ** (n - 1) + (1 if n % 2 == 0 else 0)


def spot_check(n: int, grid: Sequence[float], points: int = 5) -> float:
    """Largest gap between evaluate(...).sum_s of depolarized GHZ_N and its closed form."""
    idx = np.unique(np.linspace(0, len(grid) - 1, min(points, len(grid))).round().astype(int))
    worst = 0.0
    for i in idx:
        q = float(grid[i])
        got = evaluate(ghz_depolarized(n, q), label=f"GHZ{n}").sum_s
        expected = slice_sum_scale(n) * (1.0 - q) ** n
        worst = max(worst, abs(got - expected))
    return worst


def robustness_curve(
    n: int, variant: str, grid: Sequence[float], find_zero: bool = False
) -> RobustnessCurve:
    if n < 2:
        raise InvalidArgument(f"robustness curves need n >= 2, got {n}")
    if variant not in VARIANTS:
        raise InvalidArgument(f"unknown variant {variant!r}; use one of {list(VARIANTS)}")
    grid = [float(q) for q in grid]
    if not grid or any(not 0.0 <= q <= 1.0 for q in grid):
        raise InvalidArgument("grid points must lie in [0, 1]")
    if variant == "negativity":
        samples = tuple((q, ghz_negativity(n, q)) for q in grid)
    else:
        samples = tuple((q, closed_form(n, variant, q)) for q in grid)

    zero = None
    if find_zero:
        if variant == "negativity":
            f = lambda q: ghz_negativity(n, q) - 1e-12  # noqa: E731
            zero = float(bisect(f, 0.0, 1.0, xtol=1e-9)) if f(0.0) > 0 else 0.0
        else:
            zero = closed_form_zero(n)

    check = None
    if n <= MAX_SPOT_CHECK_QUBITS and variant != "negativity":
        check = spot_check(n, grid)
        if check > SPOT_CHECK_TOL:
            log.warning("robustness.spot_check", n_qubits=n, error=check)
    return RobustnessCurve(n, variant, samples, zero, check)
