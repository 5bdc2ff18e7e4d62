from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import structlog

from src.core.errors import InvalidArgument, SeptensorError
from src.core.time import StageTimer, run_id
from src.core.types import RunConfig
from src.corrtensor.tensor import CorrelationTensorR, CorrelationTensorT, correlation_tensor
from src.criterion.filtering import LocalFilter, normal_form
from src.criterion.frame import MAX_SEARCH_QUBITS, canonical_frame, search_frame, to_frame
from src.hosvd.decomposition import matrix_svd_sum
from src.hosvd.singular import FEASIBILITY_TOL, SingularTensor, smin
from src.qcore.states import DensityMatrix
from src.rebuild.allocation import RebuildResult, rebuild

ENTANGLED = "entangled"
SEPARABLE = "separable"


@dataclass(frozen=True, eq=False)
class FrameAnalysis:
    """Rebuild plus slice decomposition of R expressed in one local frame."""

    R: CorrelationTensorR
    rebuild: RebuildResult
    singular: SingularTensor
    singular_add: SingularTensor
    strict_nonglobal: bool = False

    @property
    def sum_s(self) -> float:
        return self.singular.smin

    @property
    def sum_s_add(self) -> float:
        # two-qubit local terms never rebuild a hidden correlation
        strict = self.strict_nonglobal and self.R.n_qubits > 2
        extra = self.rebuild.leftover_strength if strict else 0.0
        return self.singular_add.smin + extra

    @property
    def S(self) -> float:
        return self.sum_s + self.sum_s_add

    @property
    def feasible(self) -> bool:
        return (
            self.singular.feasible
            and not self.rebuild.infeasible
            and bool(np.all(self.rebuild.t_add.entries <= 1.0 + FEASIBILITY_TOL))
        )


def analyze_frame(R: CorrelationTensorR, cfg: RunConfig) -> FrameAnalysis:
    rb = rebuild(R, cfg)
    st = smin(rb.t_core.entries, search_orders=cfg.search_orders, floor=cfg.svd_floor)
    st_add = smin(rb.t_add.entries, search_orders=cfg.search_orders, floor=cfg.svd_floor)
    return FrameAnalysis(R, rb, st, st_add, cfg.strict_nonglobal)


@dataclass(frozen=True, eq=False)
class CriterionReport:
    S: float
    sum_s: float
    sum_s_add: float
    verdict: str
    feasibility_ok: bool
    n_qubits: int
    label: str = ""
    boundary: bool = False
    noise_threshold: Optional[float] = None
    frames: tuple[np.ndarray, ...] = ()
    analysis: Optional[FrameAnalysis] = field(default=None, repr=False)
    local_filter: Optional[LocalFilter] = field(default=None, repr=False)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def entangled(self) -> bool:
        return self.verdict == ENTANGLED

    @property
    def measure(self) -> float:
        """max(S - 1, 0); for two qubits S comes from the filtered normal form."""
        return max(self.S - 1.0, 0.0)

    @property
    def status(self) -> str:
        if self.verdict == SEPARABLE and not self.feasibility_ok:
            return "inconclusive-separable"
        return self.verdict

    def to_payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "label": self.label,
            "n_qubits": self.n_qubits,
            "S": self.S,
            "sum_s": self.sum_s,
            "sum_s_add": self.sum_s_add,
            "measure": self.measure,
            "verdict": self.verdict,
            "status": self.status,
            "boundary": self.boundary,
            "feasibility_ok": self.feasibility_ok,
            "noise_threshold": self.noise_threshold,
            "frames": [F for F in self.frames],
        }
        if self.local_filter is not None:
            out["local_filter"] = self.local_filter.to_payload()
        if self.analysis is not None:
            out["rebuild"] = self.analysis.rebuild.to_payload()
            out["slices"] = [
                {"label": list(rec.label), "singular_values": list(rec.singular_values())}
                for rec in self.analysis.singular.slices
            ]
            out["singular_tensor"] = [
                {"index": list(idx), "value": v} for idx, v in self.analysis.singular.nonzero()
            ]
        out["diagnostics"] = self.diagnostics
        return out


def verdict_of(S: float, tol: float) -> tuple[str, bool]:
    verdict = ENTANGLED if S > 1.0 + tol else SEPARABLE
    return verdict, abs(S - 1.0) <= tol


class Criterion:
    """Correlation tensor -> canonical frame -> rebuild -> slice sums -> verdict."""

    def __init__(self, cfg: RunConfig | None = None, label: str = "") -> None:
        self.cfg = cfg or RunConfig.from_settings()
        self.label = label
        self.run_id = run_id()
        self.log = structlog.get_logger().bind(mod="criterion", run_id=self.run_id, state=label)

    def evaluate(self, rho: DensityMatrix) -> CriterionReport:
        if rho.n_qubits < 2:
            raise InvalidArgument(f"criterion needs at least 2 qubits, got {rho.n_qubits}")
        self.log.debug("evaluate.begin", n_qubits=rho.n_qubits)
        try:
            with StageTimer() as t:
                filt = normal_form(rho) if rho.n_qubits == 2 else None
                R = correlation_tensor(rho if filt is None else filt.state)
                frames = canonical_frame(R)
                best = analyze_frame(to_frame(R, frames), self.cfg)
                if self.cfg.frame_search:
                    frames, best = self._search(R, frames, best)
        except SeptensorError:
            self.log.error("evaluate.failed", exc_info=True)
            raise
        if filt is not None:
            self.log.debug("evaluate.filtered", steps=filt.steps, residual=filt.residual)
        report = self._report(rho.n_qubits, frames, best, t.duration_sec, filt)
        self.log.info(
            "evaluate.done",
            S=report.S,
            verdict=report.verdict,
            strategy=best.rebuild.strategy,
            duration_sec=t.duration_sec,
        )
        return report

    def _search(
        self, R: CorrelationTensorR, frames: list[np.ndarray], best: FrameAnalysis
    ) -> tuple[list[np.ndarray], FrameAnalysis]:
        if R.n_qubits > MAX_SEARCH_QUBITS:
            self.log.warning("frame_search.skipped", n_qubits=R.n_qubits)
            return frames, best
        identity = [np.eye(3) for _ in range(R.n_qubits)]
        found, value = search_frame(
            R, lambda Rf: analyze_frame(Rf, self.cfg).S, [frames, identity]
        )
        if value < best.S:
            self.log.info("frame_search.improved", before=best.S, after=value)
            return found, analyze_frame(to_frame(R, found), self.cfg)
        return frames, best

    def _report(
        self,
        n: int,
        frames: list[np.ndarray],
        a: FrameAnalysis,
        duration: float | None,
        filt: LocalFilter | None = None,
    ) -> CriterionReport:
        verdict, boundary = verdict_of(a.S, self.cfg.verdict_tol)
        diagnostics = {
            "strategy": a.rebuild.strategy,
            "candidates": a.rebuild.candidates,
            "leftover_strength": a.rebuild.leftover_strength,
            "strict_nonglobal": a.strict_nonglobal,
            "sum_t_add": a.rebuild.sum_t_add,
            "max_singular_value": a.singular.max_value(),
            "mode_order": list(a.singular.mode_order),
            "duration_sec": duration,
        }
        return CriterionReport(
            S=a.S,
            sum_s=a.sum_s,
            sum_s_add=a.sum_s_add,
            verdict=verdict,
            feasibility_ok=a.feasible,
            n_qubits=n,
            label=self.label,
            boundary=boundary,
            frames=tuple(frames),
            analysis=a,
            local_filter=filt,
            diagnostics=diagnostics,
        )


def evaluate(rho: DensityMatrix, cfg: RunConfig | None = None, label: str = "") -> CriterionReport:
    return Criterion(cfg, label).evaluate(rho)


def two_qubit_measure(rho: DensityMatrix) -> float:
    """max(||T||_tr - 1, 0) for the 3x3 correlation matrix of a 2-qubit state."""
    if rho.n_qubits != 2:
        raise InvalidArgument(f"two-qubit measure needs 2 qubits, got {rho.n_qubits}")
    T: CorrelationTensorT = correlation_tensor(rho).to_T()
    _, total = matrix_svd_sum(T.entries)
    return max(total - 1.0, 0.0)
