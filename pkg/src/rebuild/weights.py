from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from src.core.errors import InvalidArgument
from src.qcore.pauli import PauliString
from src.qcore.validation import check_distribution

FEASIBILITY_TOL = 1e-9
NEGATIVE_TOL = 1e-12


@dataclass(frozen=True, order=True)
class AxisTuple:
    """One Pauli axis (1..3) per qubit."""

    axes: tuple[int, ...]

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if not axes or any(a not in (1, 2, 3) for a in axes):
            raise InvalidArgument(f"axis tuple entries must be in 1..3, got {self.axes}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def parse(cls, text: str) -> "AxisTuple":
        return cls(tuple(int(c) for c in text))

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    def distinct_axes(self) -> int:
        return len(set(self.axes))

    def matches(self, p: PauliString) -> bool:
        return all(i == 0 or i == a for i, a in zip(p.indices, self.axes))

    def full_string(self) -> PauliString:
        return PauliString(self.axes)

    @classmethod
    def completions(cls, p: PauliString) -> Iterator["AxisTuple"]:
        """Every tuple that agrees with p on its support."""
        choices = [(i,) if i else (1, 2, 3) for i in p.indices]
        for axes in itertools.product(*choices):
            yield cls(axes)

    def __str__(self) -> str:
        return "".join(str(a) for a in self.axes)


@lru_cache(maxsize=16)
def _bits(n: int) -> np.ndarray:
    # row j holds the bits of j, qubit 0 most significant
    j = np.arange(2**n)[:, None]
    return (j >> np.arange(n - 1, -1, -1)) & 1


def bitstring(j: int, n: int) -> str:
    return format(j, f"0{n}b")


def _subset(S: Iterable[int], n: int) -> tuple[int, ...]:
    s = tuple(sorted({int(k) for k in S}))
    if any(k < 0 or k >= n for k in s):
        raise InvalidArgument(f"subset {s} is not within qubits 0..{n - 1}")
    return s


def _parities(S: Sequence[int], n: int) -> np.ndarray:
    if not S:
        return np.ones(2**n)
    return 1.0 - 2.0 * (_bits(n)[:, list(S)].sum(axis=1) % 2)


def parity_character(a: AxisTuple, S: Iterable[int], j: str | Sequence[int]) -> int:
    """Sign of the string sigma_a restricted to S on the product eigenstate |j>."""
    bits = [int(c) for c in j]
    if len(bits) != a.n_qubits or any(b not in (0, 1) for b in bits):
        raise InvalidArgument(f"bitstring {j!r} does not fit {a.n_qubits} qubits")
    s = _subset(S, a.n_qubits)
    return -1 if sum(bits[k] for k in s) % 2 else 1


@dataclass(frozen=True, eq=False)
class WeightVector:
    axes: AxisTuple
    l: np.ndarray

    def __post_init__(self):
        l = np.asarray(self.l, dtype=float)
        if l.shape != (2**self.axes.n_qubits,):
            raise InvalidArgument(f"weight vector needs {2**self.axes.n_qubits} entries, got {l.shape}")
        if np.min(l) < -NEGATIVE_TOL:
            raise InvalidArgument("weight vector has negative entries", min=float(np.min(l)))
        l = np.clip(l, 0.0, None)
        l.setflags(write=False)
        object.__setattr__(self, "l", l)

    @classmethod
    def zeros(cls, axes: AxisTuple) -> "WeightVector":
        return cls(axes, np.zeros(2**axes.n_qubits))

    def total(self) -> float:
        return float(np.sum(self.l))

    @property
    def feasible(self) -> bool:
        return self.total() <= 1.0 + FEASIBILITY_TOL

    def __getitem__(self, j: str) -> float:
        return float(self.l[int(j, 2)])

    def nonzero(self, floor: float = 1e-12) -> list[tuple[str, float]]:
        n = self.axes.n_qubits
        return [(bitstring(j, n), float(v)) for j, v in enumerate(self.l) if v > floor]

    def expand(self, S: Iterable[int]) -> float:
        """Coefficient of sigma_a on S implied by these weights."""
        return float(self.l @ _parities(_subset(S, self.axes.n_qubits), self.axes.n_qubits))

    def to_payload(self) -> dict:
        return {"axes": str(self.axes), "total": self.total(), "l": dict(self.nonzero())}


def compose_weights(
    a: AxisTuple, coeffs: Mapping[Iterable[int], float], actual: float = 0.0
) -> WeightVector:
    """Spread every coefficient over the sign-matching half of the eigenbasis of a.

    `actual` is the full-weight coefficient of a; it joins the composition as one
    more row when nonzero. The result is shifted by its minimum, which leaves all
    proper-subset expansions unchanged.
    """
    n = a.n_qubits
    scale = 2.0**n
    l = np.zeros(2**n)
    for S, t in coeffs.items():
        s = _subset(S, n)
        if not s or len(s) == n:
            raise InvalidArgument(f"subset {s} must be nonempty and proper")
        l += (abs(t) + t * _parities(s, n)) / scale
    if actual:
        l += (abs(actual) + actual * _parities(tuple(range(n)), n)) / scale
    return WeightVector(a, l - np.min(l))


def hidden_strength(a: AxisTuple, l: WeightVector, target: Iterable[int] | None = None) -> float:
    """Strength the weights carry along sigma_a on `target` (the full set by default)."""
    target = tuple(range(a.n_qubits)) if target is None else _subset(target, a.n_qubits)
    if not target:
        raise InvalidArgument("target subset must be nonempty")
    return float(l.l @ np.abs(_parities(target, a.n_qubits)))


def ghz_diag_tadd(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if p.shape != (8,):
        raise InvalidArgument(f"expected 8 probabilities, got shape {p.shape}")
    chk = check_distribution(p)
    if chk.status != "passed":
        raise InvalidArgument("not a probability distribution", **chk.details)
    pairs = p.reshape(4, 2).sum(axis=1)
    return max(0.0, 1.0 - 4.0 * float(np.min(pairs)))
