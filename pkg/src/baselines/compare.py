from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import structlog

from src.baselines.measures import (
    NPT,
    all_bipartitions,
    concurrence,
    negativity,
    ppt_verdict,
    purity_negativity,
)
from src.core.types import RunConfig
from src.criterion.evaluate import Criterion, two_qubit_measure
from src.qcore.random import random_mixed_state, rng_of
from src.qcore.states import DensityMatrix

log = structlog.get_logger(mod="baselines.compare")

BOUNDARY_BAND = 1e-4


def compare_state(rho: DensityMatrix, cfg: RunConfig | None = None, label: str = "") -> dict[str, Any]:
    report = Criterion(cfg, label).evaluate(rho)
    cuts = []
    for b in all_bipartitions(rho.n_qubits):
        cuts.append(
            {
                "cut": str(b),
                "ppt": ppt_verdict(rho, b),
                "negativity": negativity(rho, b),
                "purity_negativity": purity_negativity(rho, b),
            }
        )
    out: dict[str, Any] = {
        "state": label,
        "S": report.S,
        "verdict": report.verdict,
        "cuts": cuts,
        "any_npt": any(c["ppt"] == NPT for c in cuts),
    }
    if rho.n_qubits == 2:
        out["concurrence"] = concurrence(rho)
        out["two_qubit_measure"] = two_qubit_measure(rho)
    return out


@dataclass
class AgreementStudy:
    samples: int
    seed: int
    skipped_boundary: int = 0
    disagreements: list[dict[str, Any]] = field(default_factory=list)

    @property
    def agreed(self) -> int:
        return self.samples - self.skipped_boundary - len(self.disagreements)

    def to_payload(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "skipped_boundary": self.skipped_boundary,
            "agreed": self.agreed,
            "disagreements": self.disagreements,
        }


def agreement_study(k: int, cfg: RunConfig | None = None) -> AgreementStudy:
    """Criterion verdict against PPT on k seeded random 2-qubit mixed states."""
    cfg = cfg or RunConfig.from_settings()
    rng = rng_of(cfg.seed)
    crit = Criterion(cfg, "random")
    study = AgreementStudy(samples=k, seed=cfg.seed)
    cut = next(all_bipartitions(2))
    for i in range(k):
        rho = random_mixed_state(2, rng)
        report = crit.evaluate(rho)
        if abs(report.S - 1.0) < BOUNDARY_BAND:
            study.skipped_boundary += 1
            continue
        ppt = ppt_verdict(rho, cut)
        if (ppt == NPT) != report.entangled:
            study.disagreements.append({"index": i, "S": report.S, "ppt": ppt})
            log.warning("compare.disagreement", index=i, S=report.S, ppt=ppt)
    return study
