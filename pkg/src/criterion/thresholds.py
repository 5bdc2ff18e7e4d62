from __future__ import annotations

import structlog
from scipy.optimize import bisect

from src.core.errors import InvalidArgument
from src.core.types import RunConfig
from src.criterion.evaluate import Criterion
from src.qcore.states import DensityMatrix, white_noise_mix

log = structlog.get_logger(mod="criterion.threshold")

BISECT_TOL = 1e-9


def linear_threshold(S: float) -> float:
    """Crossing of (1 - q) * S = 1; zero when S <= 1."""
    return max(0.0, (S - 1.0) / S) if S > 0 else 0.0


def noise_threshold(
    rho: DensityMatrix, cfg: RunConfig | None = None, label: str = "", tol: float = BISECT_TOL
) -> float:
    """Largest white-noise weight q for which the mixed state still reads entangled."""
    if not rho.is_pure(1e-9):
        raise InvalidArgument("noise threshold is defined for pure input states")
    crit = Criterion(cfg, label)

    def excess(q: float) -> float:
        return crit.evaluate(white_noise_mix(rho, q)).S - 1.0 - crit.cfg.verdict_tol

    at_zero = excess(0.0)
    if at_zero <= 0.0:
        return 0.0
    q = bisect(excess, 0.0, 1.0, xtol=tol)
    log.info("threshold.bisect", state=label, q=q, linear=linear_threshold(at_zero + 1.0))
    return float(q)
