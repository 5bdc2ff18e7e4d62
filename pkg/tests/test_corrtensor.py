import numpy as np
import pytest

from src.core.errors import InvalidArgument, NotAState
from src.corrtensor.printer import format_slices, format_value
from src.corrtensor.products import mode_n_product, multi_mode_product, unfold
from src.corrtensor.rotations import Rotation3, random_rotation, su2_to_so3
from src.corrtensor.tensor import (
    CorrelationTensorR,
    correlation_tensor,
    local_rotate_tensor,
    reconstruct_density,
)
from src.qcore.random import random_local_unitary, random_mixed_state
from src.qcore.states import density_from_state, maximally_mixed, product_ket
from src.qcore.channels import apply_local_unitaries


def test_ghz3_coefficients(ghz3):
    R = correlation_tensor(ghz3)
    assert R["000"] == pytest.approx(1.0)
    for s in ("330", "303", "033", "111"):
        assert R[s] == pytest.approx(1.0)
    for s in ("122", "212", "221"):
        assert R[s] == pytest.approx(-1.0)
    assert R["333"] == pytest.approx(0.0, abs=1e-12)
    assert R["300"] == pytest.approx(0.0, abs=1e-12)


def test_w3_coefficients(w3):
    R = correlation_tensor(w3)
    assert R["300"] == pytest.approx(1 / 3)
    assert R["330"] == pytest.approx(-1 / 3)
    assert R["333"] == pytest.approx(-1.0)
    assert R["110"] == pytest.approx(2 / 3)
    assert R["113"] == pytest.approx(2 / 3)
    assert R["223"] == pytest.approx(2 / 3)
    assert R["111"] == pytest.approx(0.0, abs=1e-12)
    T = R.to_T()
    assert T["333"] == pytest.approx(-1.0)
    assert T.entries.shape == (3, 3, 3)


def test_maximally_mixed_has_only_identity():
    R = correlation_tensor(maximally_mixed(3))
    assert R["000"] == pytest.approx(1.0)
    assert R.nonglobal(floor=1e-12) == {}
    assert not np.any(np.abs(R.to_T().entries) > 1e-12)


def test_round_trip_through_density(rng):
    for n in (1, 2, 3):
        rho = random_mixed_state(n, rng)
        back = reconstruct_density(correlation_tensor(rho))
        np.testing.assert_allclose(back.entries, rho.entries, atol=1e-12)


def test_reconstruct_rejects_non_states():
    t = np.zeros((4, 4))
    t[0, 0] = 1.0
    t[3, 3] = 1.5
    with pytest.raises(NotAState):
        reconstruct_density(CorrelationTensorR(2, t))
    t[3, 3] = 1.0
    t[1, 1] = 1.0
    t[2, 2] = 1.0
    with pytest.raises(NotAState):
        reconstruct_density(CorrelationTensorR(2, t))


def test_mode_products():
    T = np.arange(27, dtype=float).reshape(3, 3, 3)
    O = np.diag([1.0, 2.0, 3.0])
    out = mode_n_product(T, O, 1)
    np.testing.assert_allclose(out[:, 2, :], 3 * T[:, 2, :])
    np.testing.assert_allclose(multi_mode_product(T, [None, O, None]), out)
    assert unfold(T, 2).shape == (3, 9)
    np.testing.assert_allclose(unfold(T, 0)[1], T[1].reshape(-1))
    with pytest.raises(InvalidArgument):
        mode_n_product(T, np.eye(2), 0)


def test_su2_to_so3_is_rotation(rng):
    for _ in range(20):
        o = su2_to_so3(random_local_unitary(rng)).entries
        np.testing.assert_allclose(o.T @ o, np.eye(3), atol=1e-12)
        assert np.linalg.det(o) == pytest.approx(1.0)
    with pytest.raises(InvalidArgument):
        Rotation3(np.diag([1.0, 1.0, -1.0]))


def test_local_unitaries_rotate_the_tensor(rng):
    rho = random_mixed_state(3, rng)
    us = [random_local_unitary(rng) for _ in range(3)]
    T = correlation_tensor(rho).to_T()
    rotated = correlation_tensor(apply_local_unitaries(rho, us)).to_T()
    expected = local_rotate_tensor(T, [su2_to_so3(u) for u in us])
    np.testing.assert_allclose(rotated.entries, expected.entries, atol=1e-12)


def test_r_rotation_fixes_identity_index(rng):
    R = correlation_tensor(random_mixed_state(2, rng))
    rots = [random_rotation(rng), random_rotation(rng)]
    Rr = R.rotated(rots)
    assert Rr["00"] == pytest.approx(1.0)
    np.testing.assert_allclose(Rr.to_T().entries, local_rotate_tensor(R.to_T(), rots).entries)


def test_printer_layout(ghz3):
    assert format_value(2 / 3) == "2/3"
    assert format_value(-1e-15) == "0"
    text = format_slices(correlation_tensor(ghz3).to_T())
    assert "T_{::1} =" in text and "T_{::3} =" in text
    assert "R_{::0} =" in format_slices(correlation_tensor(ghz3))


def test_product_state_is_rank_one():
    T = correlation_tensor(density_from_state(product_ket(["0", "+"]))).to_T()
    assert np.linalg.matrix_rank(T.entries, tol=1e-9) == 1
    assert T["31"] == pytest.approx(1.0)


def test_mode_products_compose_along_one_mode(rng):
    T = rng.normal(size=(3, 3, 3))
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    for n in range(3):
        twice = mode_n_product(mode_n_product(T, A, n), B, n)
        np.testing.assert_allclose(twice, mode_n_product(T, B @ A, n), atol=1e-12)


def test_mode_products_commute_across_modes(rng):
    T = rng.normal(size=(3, 3, 3, 3))
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    for m, n in [(0, 1), (1, 3), (2, 0)]:
        left = mode_n_product(mode_n_product(T, A, m), B, n)
        right = mode_n_product(mode_n_product(T, B, n), A, m)
        np.testing.assert_allclose(left, right, atol=1e-12)


def test_su2_to_so3_is_a_homomorphism(rng):
    for _ in range(100):
        u, v = random_local_unitary(rng), random_local_unitary(rng)
        composed = su2_to_so3(u @ v).entries
        np.testing.assert_allclose(composed, (su2_to_so3(u) @ su2_to_so3(v)).entries, atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2, 2.0])
def test_su2_to_so3_of_z_rotation(theta):
    u = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    c, s = np.cos(theta), np.sin(theta)
    expected = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    np.testing.assert_allclose(su2_to_so3(u).entries, expected, atol=1e-12)


def test_su2_to_so3_of_hadamard():
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    expected = np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])
    np.testing.assert_allclose(su2_to_so3(h).entries, expected, atol=1e-12)
