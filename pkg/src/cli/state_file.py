from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from src.core.errors import InvalidArgument, InvalidState
from src.qcore.states import DensityMatrix, StateVector, density_from_state, validation_report


def _complex_array(raw: Any, what: str) -> np.ndarray:
    try:
        a = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidArgument(f"{what} must be a list of [re, im] pairs") from e
    if a.ndim < 2 or a.shape[-1] != 2:
        raise InvalidArgument(f"{what} must be a list of [re, im] pairs", shape=list(a.shape))
    return a[..., 0] + 1j * a[..., 1]


def parse_state_payload(data: dict) -> DensityMatrix:
    """{"n_qubits": N, "statevector": [[re, im], ...]} or {"n_qubits": N, "density": ...}.

    "density" is row-major, either flat (d*d pairs) or nested (d rows of d pairs).
    """
    if "n_qubits" not in data:
        raise InvalidArgument("state file needs an explicit n_qubits")
    n = int(data["n_qubits"])
    dim = 2**n
    has_vec, has_rho = "statevector" in data, "density" in data
    if has_vec == has_rho:
        raise InvalidArgument("state file needs exactly one of 'statevector' or 'density'")
    if has_vec:
        amps = _complex_array(data["statevector"], "statevector")
        if amps.shape != (dim,):
            raise InvalidArgument(f"statevector needs {dim} amplitudes, got {amps.size}")
        return density_from_state(StateVector(n, amps))
    m = _complex_array(data["density"], "density")
    if m.size != dim * dim:
        raise InvalidArgument(f"density needs {dim * dim} entries, got {m.size}")
    m = m.reshape(dim, dim)
    report = validation_report(m)
    report.raise_for(InvalidState, "density matrix")
    return DensityMatrix.from_array(m, validate=False)


def load_state_file(path: Path) -> DensityMatrix:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidArgument(f"state file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise InvalidArgument(f"state file is not valid JSON: {e}", file=str(path)) from e
    if not isinstance(data, dict):
        raise InvalidArgument("state file must hold a JSON object", file=str(path))
    return parse_state_payload(data)
