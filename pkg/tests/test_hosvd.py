import numpy as np
import pytest

from src.core.errors import InvalidArgument
from src.corrtensor.rotations import random_rotation
from src.corrtensor.tensor import correlation_tensor, local_rotate_tensor
from src.hosvd.decomposition import hosvd, matrix_svd_sum
from src.hosvd.singular import is_delta_structured, iterate_reduce, smin


@pytest.mark.parametrize(
    "m, values, total",
    [
        (np.diag([0.5, -2.0, 1.0]), (2.0, 1.0, 0.5), 3.5),
        (np.zeros((3, 3)), (0.0, 0.0, 0.0), 0.0),
        (np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float), (1.0, 1.0, 0.0), 2.0),
    ],
)
def test_matrix_svd_sum(m, values, total):
    s, t = matrix_svd_sum(m)
    np.testing.assert_allclose(s, values, atol=1e-12)
    assert t == pytest.approx(total)


def test_matrix_svd_sum_rejects_nan():
    with pytest.raises(InvalidArgument):
        matrix_svd_sum(np.full((3, 3), np.nan))


def test_hosvd_invariants_on_random_tensors(rng):
    for k in range(200):
        order = 2 + k % 3
        T = rng.normal(size=(3,) * order)
        res = hosvd(T)
        assert np.linalg.norm(res.reconstruct() - T) < 1e-9
        assert res.orthogonality_error() < 1e-9
        for n in range(order):
            P = res.factors[n]
            np.testing.assert_allclose(P.T @ P, np.eye(3), atol=1e-10)
            norms = res.slice_norms(n)
            assert np.all(np.diff(norms) <= 1e-9)


def test_hosvd_of_superdiagonal_keeps_entries():
    T = np.zeros((3, 3, 3))
    T[0, 0, 0], T[1, 1, 1], T[2, 2, 2] = 0.2, 0.9, 0.5
    res = hosvd(T)
    np.testing.assert_allclose(sorted(np.abs(res.core[np.nonzero(res.core)])), [0.2, 0.5, 0.9])
    for P in res.factors:
        np.testing.assert_allclose(np.abs(P) @ np.ones(3), np.ones(3))


def test_hosvd_order_two_is_svd(rng):
    M = rng.normal(size=(3, 3))
    res = hosvd(M)
    np.testing.assert_allclose(np.abs(np.diag(res.core)), np.linalg.svd(M, compute_uv=False), atol=1e-12)
    assert res.orthogonality_error() < 1e-12


def test_iterate_reduce_shapes(rng):
    M = rng.normal(size=(3, 3))
    (only,) = iterate_reduce(M)
    np.testing.assert_allclose(only.matrix, M)
    assert len(iterate_reduce(rng.normal(size=(3, 3, 3)))) == 3
    recs = iterate_reduce(rng.normal(size=(3, 3, 3, 3)))
    assert len(recs) == 9
    assert [r.label for r in recs][:3] == [(0, 0), (0, 1), (0, 2)]


def test_ghz3_slices(ghz3):
    T = correlation_tensor(ghz3).to_T().entries
    sums = [rec.svd_sum() for rec in iterate_reduce(T)]
    np.testing.assert_allclose(sums, [2.0, 2.0, 0.0], atol=1e-12)
    st = smin(T)
    assert st.smin == pytest.approx(4.0)
    assert st.feasible


def test_w3_smin(w3):
    st = smin(correlation_tensor(w3).to_T().entries)
    assert st.smin == pytest.approx(5.0)
    assert st.max_value() == pytest.approx(1.0)


def test_zero_tensor():
    st = smin(np.zeros((3, 3, 3)))
    assert st.smin == 0.0
    assert st.nonzero() == []


def test_order_two_smin_is_nuclear_norm(rng):
    for _ in range(20):
        M = rng.normal(size=(3, 3))
        assert smin(M).smin == pytest.approx(matrix_svd_sum(M)[1])


def test_singular_tensor_structure(rng):
    for order in (2, 3, 4):
        for _ in range(10):
            st = smin(rng.normal(size=(3,) * order))
            assert is_delta_structured(st.entries, 1e-12)
            assert float(np.sum(st.entries)) == pytest.approx(st.smin, abs=1e-10)
            assert np.all(st.entries >= 0)


def test_smin_rotation_invariance(rng):
    for k in range(100):
        order = 2 + k % 2
        T = rng.normal(size=(3,) * order) / 3
        rots = [random_rotation(rng) for _ in range(order)]
        assert smin(local_rotate_tensor(T, rots)).smin == pytest.approx(smin(T).smin, abs=1e-8)


def test_rank_one_terms_rebuild_the_tensor(rng):
    for order in (2, 3, 4):
        T = rng.normal(size=(3,) * order)
        st = smin(T)
        terms = st.rank_one_terms()
        assert sum(t.weight for t in terms) == pytest.approx(st.smin)
        np.testing.assert_allclose(sum(t.tensor() for t in terms), T, atol=1e-10)


def test_order_search_never_increases(rng):
    T = rng.normal(size=(3, 3, 3))
    searched = smin(T, search_orders=True)
    assert searched.smin <= smin(T).smin + 1e-12
    terms = searched.rank_one_terms()
    np.testing.assert_allclose(sum(t.tensor() for t in terms), T, atol=1e-10)


def test_infeasible_flag():
    T = np.zeros((3, 3))
    T[0, 0] = 1.5
    assert not smin(T).feasible
