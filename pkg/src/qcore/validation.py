from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from src.core.errors import SeptensorError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12
KRAUS_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    status: str  # "passed" | "failed"
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ValidationReport:
    status: str  # "passed" if all pass, else "failed"
    results: List[CheckResult]

    @classmethod
    def of(cls, results: Sequence[CheckResult]) -> "ValidationReport":
        ok = all(r.status == "passed" for r in results)
        return cls("passed" if ok else "failed", list(results))

    @property
    def passed(self) -> bool:
        return self.status == "passed"

    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if r.status != "passed"]

    def raise_for(self, exc: type[SeptensorError], what: str) -> None:
        if self.passed:
            return
        names = ", ".join(r.name for r in self.failed())
        raise exc(
            f"{what} failed validation: {names}",
            checks={r.name: r.details for r in self.failed()},
        )


def _status(ok: bool) -> str:
    return "passed" if ok else "failed"


def check_square_dim(m: np.ndarray) -> CheckResult:
    ok = m.ndim == 2 and m.shape[0] == m.shape[1] and m.shape[0] >= 2
    dim = m.shape[0] if m.ndim == 2 else None
    ok = ok and dim is not None and (dim & (dim - 1)) == 0
    return CheckResult("dimension", _status(ok), {"shape": list(m.shape)})


def check_finite(m: np.ndarray) -> CheckResult:
    ok = bool(np.all(np.isfinite(m)))
    return CheckResult("finite", _status(ok), {})


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> CheckResult:
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    return CheckResult("hermitian", _status(dev <= tol), {"max_deviation": dev})


def check_trace(m: np.ndarray, tol: float = TRACE_TOL) -> CheckResult:
    tr = complex(np.trace(m))
    dev = abs(tr - 1.0)
    return CheckResult("trace", _status(dev <= tol), {"trace": tr, "deviation": dev})


def check_psd(m: np.ndarray, tol: float = PSD_TOL) -> CheckResult:
    herm = (m + m.conj().T) / 2
    lam = float(np.linalg.eigvalsh(herm)[0])
    return CheckResult("positive", _status(lam >= -tol), {"min_eigenvalue": lam})


def check_norm(v: np.ndarray, tol: float = NORM_TOL) -> CheckResult:
    norm = float(np.linalg.norm(v))
    return CheckResult("norm", _status(abs(norm - 1.0) <= tol), {"norm": norm})


def check_kraus_completeness(ops: Sequence[np.ndarray], tol: float = KRAUS_TOL) -> CheckResult:
    total = sum(E.conj().T @ E for E in ops)
    dev = float(np.max(np.abs(total - np.eye(total.shape[0]))))
    return CheckResult("completeness", _status(dev <= tol), {"max_deviation": dev})


def check_distribution(p: np.ndarray, tol: float = 1e-9) -> CheckResult:
    p = np.asarray(p, dtype=float)
    neg = float(p.min()) if p.size else 0.0
    total = float(p.sum())
    ok = p.size > 0 and neg >= -tol and abs(total - 1.0) <= tol
    return CheckResult("distribution", _status(ok), {"min": neg, "sum": total})


def validate_density(m: np.ndarray, psd_tol: float = PSD_TOL) -> ValidationReport:
    shape = check_square_dim(m)
    if shape.status != "passed":
        return ValidationReport.of([shape])
    finite = check_finite(m)
    if finite.status != "passed":
        return ValidationReport.of([shape, finite])
    return ValidationReport.of(
        [shape, finite, check_hermitian(m), check_trace(m), check_psd(m, psd_tol)]
    )
