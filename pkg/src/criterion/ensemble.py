from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np
import structlog

from src.core.errors import NumericFailure, PreconditionViolation
from src.core.types import RunConfig
from src.criterion.evaluate import Criterion, CriterionReport
from src.criterion.filtering import has_pure_marginal, product_members
from src.hosvd.singular import smin
from src.qcore.ensemble import Ensemble, ProductState, mix
from src.qcore.states import DensityMatrix, maximally_mixed
from src.rebuild.weights import bitstring

log = structlog.get_logger(mod="criterion.ensemble")

MASS_TOL = 1e-9
DROP_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-9


def _parity_signs(n: int, parity: int) -> Iterator[tuple[int, ...]]:
    """All sign vectors of length n whose product equals `parity`."""
    for signs in itertools.product((1, -1), repeat=n):
        if int(np.prod(signs)) == parity:
            yield signs


def split_correlation(
    weight: float, vectors: Sequence[np.ndarray | None], floor_axis: int = 2
) -> list[tuple[float, list[np.ndarray]]]:
    """Write |weight| (I + sgn ⊗_k v_k.sigma)/2^N as pure products.

    `None` marks an identity factor; it is covered by both eigenstates of the
    `floor_axis` Pauli axis. Every returned product carries |weight| / 2^(N-1).
    """
    n = len(vectors)
    support = [k for k, v in enumerate(vectors) if v is not None]
    free = [k for k in range(n) if k not in support]
    parity = 1 if weight >= 0 else -1
    p = abs(weight) / 2 ** (n - 1)
    axis = np.eye(3)[floor_axis]
    out = []
    for s_sup in _parity_signs(len(support), parity):
        for s_free in itertools.product((1, -1), repeat=len(free)):
            blochs: list[np.ndarray] = [np.zeros(3)] * n
            for k, s in zip(support, s_sup):
                blochs[k] = s * np.asarray(vectors[k], dtype=float)
            for k, s in zip(free, s_free):
                blochs[k] = s * axis
            out.append((p, blochs))
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def ensemble_from_report(
    rho: DensityMatrix, report: CriterionReport, cfg: RunConfig | None = None
) -> Ensemble:
    cfg = cfg or RunConfig.from_settings()
    a = report.analysis
    if report.entangled or a is None:
        raise PreconditionViolation(
            "no separable decomposition: state reads entangled", S=report.S
        )
    n = report.n_qubits
    if n == 2 and report.local_filter is None and has_pure_marginal(rho):
        ens = Ensemble.of(product_members(rho))
        _check_reconstruction(rho, ens)
        log.info("ensemble.extract.done", members=len(ens), mass=1.0, state=report.label)
        return ens
    frames = report.frames
    basis = np.eye(3)
    pieces: list[tuple[float, list[np.ndarray]]] = []

    # rebuilt groups: eigenstates |j> of the group's axes
    t_rem = np.array(a.rebuild.t_core.entries)
    for g in a.rebuild.groups:
        if g.uses_actual:
            t_rem[tuple(x - 1 for x in g.axes.axes)] -= g.actual
        for j, lj in g.weights.nonzero(DROP_TOL):
            blochs = [
                (1 - 2 * int(b)) * basis[ax - 1] for b, ax in zip(bitstring(int(j, 2), n), g.axes.axes)
            ]
            pieces.append((lj, blochs))

    # remaining global correlations, one rank-one term at a time
    for term in smin(t_rem, search_orders=cfg.search_orders, floor=cfg.svd_floor).rank_one_terms(
        cfg.svd_floor
    ):
        pieces.extend(split_correlation(term.weight, [_unit(v) for v in term.vectors]))

    # unconsumed non-global strings
    for p, t in a.rebuild.leftovers.items():
        vecs = [None if i == 0 else basis[i - 1] for i in p.indices]
        pieces.extend(split_correlation(t, vecs))

    total = float(sum(prob for prob, _ in pieces))
    if total > 1.0 + MASS_TOL:
        raise PreconditionViolation(
            "decomposition needs more than unit probability; inconclusive",
            mass=total,
            S=report.S,
        )
    members: list[tuple[float, object]] = []
    for prob, blochs in pieces:
        if prob <= DROP_TOL:
            continue
        members.append((prob, ProductState(tuple(F @ v for F, v in zip(frames, blochs)))))
    residual = 1.0 - total
    if residual > DROP_TOL:
        members.append((residual, maximally_mixed(n)))
    if total > 1.0:
        members = [(prob / total, s) for prob, s in members]
    if report.local_filter is not None:
        # members above decompose the filtered state
        members = report.local_filter.pull_back(members)
    ens = Ensemble.of(members)
    _check_reconstruction(rho, ens)
    log.info("ensemble.extract.done", members=len(ens), mass=total, state=report.label)
    return ens


def _check_reconstruction(rho: DensityMatrix, ens: Ensemble) -> None:
    err = float(np.max(np.abs(mix(ens).entries - rho.entries)))
    if err > RECONSTRUCTION_TOL:
        raise NumericFailure("ensemble does not reproduce the state", residual=err)


def extract_ensemble(
    rho: DensityMatrix, cfg: RunConfig | None = None, label: str = ""
) -> Ensemble:
    report = Criterion(cfg, label).evaluate(rho)
    return ensemble_from_report(rho, report, cfg)
