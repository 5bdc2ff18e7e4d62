from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np
import pandas as pd
import structlog
from scipy.optimize import bisect

from src.baselines.measures import Bipartition, concurrence, negativity
from src.core.errors import InvalidArgument
from src.core.tables import write_summary, write_table
from src.core.time import StageTimer, run_id
from src.core.types import RunConfig
from src.criterion.evaluate import Criterion
from src.qcore.states import DensityMatrix, white_noise_mix

CROSSING_TOL = 1e-7
COLUMNS = ["q", "S", "verdict", "negativity", "concurrence"]


@dataclass(frozen=True)
class SweepResult:
    table: pd.DataFrame
    crossing: Optional[float]


def noise_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if not 0.0 <= lo <= hi <= 1.0:
        raise InvalidArgument(f"noise range must satisfy 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    if steps < 1:
        raise InvalidArgument(f"steps must be >= 1, got {steps}")
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, steps + 1)


class SweepService:
    """Evaluate a state under a white-noise grid and locate the verdict change."""

    def __init__(
        self,
        rho: DensityMatrix,
        grid: np.ndarray,
        cfg: RunConfig | None = None,
        label: str = "",
    ) -> None:
        self.rho = rho
        self.grid = np.asarray(grid, dtype=float)
        self.cfg = cfg or RunConfig.from_settings()
        self.label = label
        self.run_id = run_id()
        self.cut = Bipartition.half(rho.n_qubits) if rho.n_qubits >= 2 else None
        self.criterion = Criterion(self.cfg, label)
        self.log = structlog.get_logger().bind(
            stage="sweep", state=label, run_id=self.run_id, points=len(self.grid)
        )

    def run(self, out: Path | None = None) -> SweepResult:
        metrics: Mapping[str, Any] | None = None
        try:
            self.log.info("sweep.start", threads=self.cfg.threads)
            with StageTimer() as t:
                rows = self._evaluate_grid()
                table = pd.DataFrame(rows, columns=COLUMNS)
                crossing = self._crossing(table)
                if out is not None:
                    metrics = write_table(table, out)
            if out is not None:
                summary = self._make_summary_dict(out, metrics, crossing, t.duration_sec)
                write_summary(out, summary)
                self.log.debug("summary_written", path=str(out))
            self.log.info("sweep.done", crossing=crossing, duration_sec=t.duration_sec)
            return SweepResult(table, crossing)
        except Exception as e:
            self.log.error("sweep.failed", exc_info=True)
            if out is not None:
                out.parent.mkdir(parents=True, exist_ok=True)
                write_summary(out, self._make_summary_dict(out, metrics, None, None, error=repr(e)))
            raise

    def _row(self, q: float) -> tuple:
        rho_q = white_noise_mix(self.rho, q)
        report = self.criterion.evaluate(rho_q)
        neg = negativity(rho_q, self.cut)
        conc = concurrence(rho_q) if rho_q.n_qubits == 2 else float("nan")
        return (q, report.S, report.verdict, neg, conc)

    def _evaluate_grid(self) -> list[tuple]:
        rows: dict[int, tuple] = {}
        with ThreadPoolExecutor(max_workers=self.cfg.threads) as pool:
            futures = {pool.submit(self._row, float(q)): i for i, q in enumerate(self.grid)}
            for fut in as_completed(futures):
                i = futures[fut]
                try:
                    rows[i] = fut.result()
                except Exception:
                    self.log.exception("sweep.row_failed", q=float(self.grid[i]))
                    raise
                self.log.debug("sweep.row", q=rows[i][0], S=rows[i][1])
        return [rows[i] for i in sorted(rows)]

    def _crossing(self, table: pd.DataFrame) -> Optional[float]:
        entangled = (table["verdict"] == "entangled").to_numpy()
        flips = np.nonzero(entangled[:-1] != entangled[1:])[0]
        if not len(flips):
            return None
        i = int(flips[0])
        lo, hi = float(table["q"].iloc[i]), float(table["q"].iloc[i + 1])
        tol = self.cfg.verdict_tol

        def excess(q: float) -> float:
            return self.criterion.evaluate(white_noise_mix(self.rho, q)).S - 1.0 - tol

        return float(bisect(excess, lo, hi, xtol=CROSSING_TOL))

    def _make_summary_dict(
        self,
        out: Path,
        metrics: Mapping[str, Any] | None,
        crossing: Optional[float],
        duration_sec: float | None,
        error: str | None = None,
    ) -> dict[str, Any]:
        return {
            "command": "sweep",
            "state": self.label,
            "file": str(out),
            "records": None if not metrics else metrics.get("records"),
            "bytes": None if not metrics else metrics.get("bytes"),
            "hash": None if not metrics else metrics.get("hash"),
            "q_min": float(self.grid[0]),
            "q_max": float(self.grid[-1]),
            "crossing": crossing,
            "config": self.cfg.to_payload(),
            "duration_sec": duration_sec,
            "run_id": self.run_id,
            "error": error,
        }
