from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.errors import InvalidArgument, NumericFailure
from src.hosvd.decomposition import hosvd, matrix_svd_sum

FEASIBILITY_TOL = 1e-9
MAX_ORDER_SEARCH = 4


@dataclass(frozen=True, eq=False)
class RankOneTerm:
    weight: float
    vectors: tuple[np.ndarray, ...]

    def tensor(self) -> np.ndarray:
        out = np.array(self.weight)
        for v in self.vectors:
            out = np.multiply.outer(out, v)
        return out


@dataclass(frozen=True, eq=False)
class SliceRecord:
    """One 3x3 leaf of the reduction.

    `label` holds the fixed core indices of modes 3..N (0-based). The frames map
    the leaf's row/column coordinates back to the input's coordinates, and
    `fixed` holds the input-coordinate vectors of the fixed modes.
    """

    label: tuple[int, ...]
    matrix: np.ndarray
    row_frame: np.ndarray
    col_frame: np.ndarray
    fixed: tuple[np.ndarray, ...] = ()

    def singular_values(self) -> tuple[float, ...]:
        return matrix_svd_sum(self.matrix)[0]

    def svd_sum(self) -> float:
        return matrix_svd_sum(self.matrix)[1]

    def rank_one_terms(self, floor: float | None = None) -> list[RankOneTerm]:
        floor = settings.SVD_FLOOR if floor is None else floor
        terms = []
        if is_delta_structured(self.matrix, floor):
            # one entry per row and column: keep the terms axis-aligned
            for i, j in zip(*np.nonzero(np.abs(self.matrix) > floor)):
                m = float(self.matrix[i, j])
                u = np.sign(m) * self.row_frame[:, i]
                terms.append(RankOneTerm(abs(m), (u, self.col_frame[:, j], *self.fixed)))
            return terms
        U, s, Vt = scipy.linalg.svd(self.matrix)
        for r, sr in enumerate(s):
            if sr <= floor:
                continue
            u = self.row_frame @ U[:, r]
            v = self.col_frame @ Vt[r, :]
            terms.append(RankOneTerm(float(sr), (u, v, *self.fixed)))
        return terms


def _reduce(
    T: np.ndarray,
    frames: list[np.ndarray],
    fixed: tuple[np.ndarray, ...],
    label: tuple[int, ...],
    out: list[SliceRecord],
) -> None:
    if T.ndim == 2:
        out.append(SliceRecord(label, T, frames[0], frames[1], fixed))
        return
    res = hosvd(T)
    new_frames = [F @ P for F, P in zip(frames, res.factors)]
    last = T.ndim - 1
    for i in range(T.shape[last]):
        _reduce(
            res.core[..., i],
            new_frames[:last],
            (new_frames[last][:, i], *fixed),
            (i, *label),
            out,
        )


def iterate_reduce(T: np.ndarray) -> list[SliceRecord]:
    """Split T into 3x3 leaves by fixing the last mode of every re-decomposed core."""
    T = np.asarray(T, dtype=float)
    if T.ndim < 2:
        raise InvalidArgument(f"reduction needs order >= 2, got {T.ndim}")
    out: list[SliceRecord] = []
    _reduce(T, [np.eye(d) for d in T.shape], (), (), out)
    out.sort(key=lambda rec: rec.label)
    return out


def is_delta_structured(entries: np.ndarray, floor: float) -> bool:
    mask = np.abs(entries) > floor
    return all(int(np.max(mask.sum(axis=n), initial=0)) <= 1 for n in range(entries.ndim))


@dataclass(frozen=True, eq=False)
class SingularTensor:
    entries: np.ndarray
    smin: float
    feasible: bool
    slices: tuple[SliceRecord, ...] = field(default=(), repr=False)
    mode_order: tuple[int, ...] = ()

    @property
    def n_modes(self) -> int:
        return self.entries.ndim

    def max_value(self) -> float:
        return float(np.max(self.entries, initial=0.0))

    def nonzero(self, floor: float | None = None) -> list[tuple[tuple[int, ...], float]]:
        floor = settings.SVD_FLOOR if floor is None else floor
        return [
            (tuple(int(i) for i in idx), float(self.entries[tuple(idx)]))
            for idx in zip(*np.nonzero(self.entries > floor))
        ]

    def rank_one_terms(self, floor: float | None = None) -> list[RankOneTerm]:
        terms = [t for rec in self.slices for t in rec.rank_one_terms(floor)]
        if self.mode_order and list(self.mode_order) != sorted(self.mode_order):
            inverse = np.argsort(self.mode_order)
            terms = [
                RankOneTerm(t.weight, tuple(t.vectors[k] for k in inverse)) for t in terms
            ]
        return terms


def _arrange(records: list[SliceRecord], order: int, floor: float) -> np.ndarray:
    entries = np.zeros((3,) * order)
    for rec in records:
        shift = sum(rec.label)
        for r, s in enumerate(rec.singular_values()):
            if s <= floor:
                continue
            entries[(r, (r + shift) % 3, *rec.label)] = s
    if not is_delta_structured(entries, floor):
        raise NumericFailure("rearranged singular values are not delta-structured")
    return entries


def _smin_fixed_order(T: np.ndarray, floor: float) -> SingularTensor:
    records = iterate_reduce(T)
    if any(rec.matrix.shape != (3, 3) for rec in records):
        raise InvalidArgument(f"all mode dimensions must be 3, got {T.shape}")
    entries = _arrange(records, T.ndim, floor)
    total = float(np.sum(entries))
    feasible = bool(np.all(entries <= 1.0 + FEASIBILITY_TOL))
    return SingularTensor(entries, total, feasible, tuple(records), tuple(range(T.ndim)))


def smin(
    T: np.ndarray, search_orders: bool = False, floor: float | None = None
) -> SingularTensor:
    T = np.asarray(T, dtype=float)
    floor = settings.SVD_FLOOR if floor is None else floor
    if T.ndim < 2:
        raise InvalidArgument(f"smin needs order >= 2, got {T.ndim}")
    if not np.all(np.isfinite(T)):
        raise NumericFailure("tensor has non-finite entries")
    best = _smin_fixed_order(T, floor)
    if not search_orders or T.ndim > MAX_ORDER_SEARCH:
        return best
    for perm in itertools.permutations(range(T.ndim)):
        if list(perm) == sorted(perm):
            continue
        cand = _smin_fixed_order(np.transpose(T, perm), floor)
        if cand.smin < best.smin - FEASIBILITY_TOL:
            best = SingularTensor(cand.entries, cand.smin, cand.feasible, cand.slices, perm)
    return best
