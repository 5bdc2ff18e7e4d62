from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from src.corrtensor.tensor import CorrelationTensorR, CorrelationTensorT


def format_value(x: float, max_den: int = 64, tol: float = 1e-9) -> str:
    if abs(x) < tol:
        return "0"
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) < tol:
        return str(f)
    return f"{x:.6g}"


def format_matrix(m: np.ndarray) -> list[str]:
    cells = [[format_value(float(v)) for v in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    return ["( " + "  ".join(c.rjust(width) for c in row) + " )" for row in cells]


def format_slices(t: CorrelationTensorR | CorrelationTensorT, name: str | None = None) -> str:
    """Slices with the first two indices as rows/columns, trailing indices fixed."""
    is_r = isinstance(t, CorrelationTensorR)
    name = name or ("R" if is_r else "T")
    arr = t.entries
    base = 0 if is_r else 1
    if arr.ndim == 1:
        vec = "  ".join(format_value(float(v)) for v in arr)
        return f"{name} = ( {vec} )"
    if arr.ndim == 2:
        return "\n".join([f"{name} ="] + format_matrix(arr))
    blocks = []
    for fixed in product(range(arr.shape[2]), repeat=arr.ndim - 2):
        label = "".join(str(i + base) for i in fixed)
        blocks.append("\n".join([f"{name}_{{::{label}}} ="] + format_matrix(arr[(..., *fixed)])))
    return "\n\n".join(blocks)
