from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from src.core.errors import InvalidArgument
from src.qcore.states import DensityMatrix, StateVector, density_from_state

Seed = int | np.random.Generator


def rng_of(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_state(n: int, seed: Seed) -> StateVector:
    if n < 1:
        raise InvalidArgument(f"n_qubits must be >= 1, got {n}")
    rng = rng_of(seed)
    a = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector.normalized(a)


def random_local_unitary(seed: Seed) -> np.ndarray:
    """Haar-random element of SU(2)."""
    u = unitary_group.rvs(2, random_state=rng_of(seed))
    return u / np.sqrt(np.linalg.det(u))


def random_mixed_state(n: int, seed: Seed, rank: int | None = None) -> DensityMatrix:
    """Ginibre ensemble; rank = full dimension gives the Hilbert-Schmidt measure."""
    if n < 1:
        raise InvalidArgument(f"n_qubits must be >= 1, got {n}")
    dim = 2**n
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InvalidArgument(f"rank must be in 1..{dim}, got {rank}")
    rng = rng_of(seed)
    if rank == 1:
        return density_from_state(random_pure_state(n, rng))
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityMatrix.from_array(m / np.trace(m).real, validate=False)


def random_distribution(size: int, seed: Seed) -> np.ndarray:
    return rng_of(seed).dirichlet(np.ones(size))
