import pytest

from src.baselines.compare import BOUNDARY_BAND, agreement_study, compare_state
from src.baselines.measures import (
    NPT,
    NPT_TOL,
    Bipartition,
    all_bipartitions,
    bell_diag_negativity,
    bell_diagonal_state,
    concurrence,
    negativity,
    ppt_threshold,
    ppt_verdict,
    purity_negativity,
)
from src.core.errors import InvalidArgument, NotAState
from src.core.types import RunConfig
from src.criterion.evaluate import evaluate, two_qubit_measure
from src.qcore.random import random_mixed_state
from src.qcore.states import (
    bell_state,
    density_from_state,
    maximally_mixed,
    product_ket,
    werner_state,
)


def test_bipartitions():
    cuts = [str(b) for b in all_bipartitions(3)]
    assert cuts == ["0|12", "01|2", "02|1"]
    assert len(list(all_bipartitions(4))) == 7
    assert str(Bipartition.half(4)) == "01|23"
    with pytest.raises(InvalidArgument):
        Bipartition.of(3, [0, 1, 2])
    with pytest.raises(InvalidArgument):
        Bipartition.of(2, [5])


@pytest.mark.parametrize(
    "a, b, c, expected",
    [
        (-1, -1, -1, 1.0),
        (1, -1, 1, 1.0),
        (0, 0, 0, 0.0),
        (-0.5, -0.5, -0.5, 0.25),
        (0.3, -0.3, 0.3, 0.0),
    ],
)
def test_bell_diagonal_negativity(a, b, c, expected):
    assert bell_diag_negativity(a, b, c) == pytest.approx(expected)
    rho = bell_diagonal_state(a, b, c)
    assert negativity(rho, Bipartition.of(2, [0])) == pytest.approx(expected, abs=1e-12)


def test_bell_tetrahedron():
    with pytest.raises(NotAState):
        bell_diagonal_state(1, 1, 1)
    with pytest.raises(NotAState):
        bell_diag_negativity(-1, -1, 1)


@pytest.mark.parametrize("q", [0.0, 0.2, 0.5, 2 / 3, 0.9])
def test_werner(q):
    rho = werner_state(q)
    cut = Bipartition.of(2, [0])
    assert negativity(rho, cut) == pytest.approx(max(0.0, (2 - 3 * q) / 2), abs=1e-12)
    assert concurrence(rho) == pytest.approx(max(0.0, 1 - 3 * q / 2), abs=1e-9)
    expected = "npt" if q < 2 / 3 - 1e-9 else "ppt"
    assert ppt_verdict(rho, cut) == expected


def test_concurrence_examples():
    assert concurrence(density_from_state(bell_state("phi+"))) == pytest.approx(1.0, abs=1e-9)
    assert concurrence(density_from_state(product_ket("0+"))) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(InvalidArgument):
        concurrence(maximally_mixed(3))


def test_purity_negativity_of_bell_state():
    rho = density_from_state(bell_state("psi-"))
    assert purity_negativity(rho, Bipartition.of(2, [0])) == pytest.approx(0.0, abs=1e-12)


def test_ppt_thresholds(w3, w4):
    assert ppt_threshold(w3, Bipartition.of(3, [0])) == pytest.approx(8 / 11, abs=1e-6)
    assert ppt_threshold(w4, Bipartition.of(4, [0, 1])) == pytest.approx(8 / 9, abs=1e-6)
    assert ppt_threshold(maximally_mixed(2), Bipartition.of(2, [0])) == 0.0


def test_ppt_bipartition_must_match(w3):
    with pytest.raises(InvalidArgument):
        negativity(w3, Bipartition.of(2, [0]))


def test_compare_state(w3):
    out = compare_state(w3, label="w:3")
    assert out["verdict"] == "entangled"
    assert out["any_npt"]
    assert [c["cut"] for c in out["cuts"]] == ["0|12", "01|2", "02|1"]
    assert "concurrence" not in out


def test_compare_two_qubit_state():
    out = compare_state(werner_state(0.5))
    assert out["two_qubit_measure"] == pytest.approx(0.5)
    assert out["concurrence"] == pytest.approx(0.25, abs=1e-9)
    assert out["verdict"] == "entangled"


def test_agreement_study_has_no_disagreements():
    study = agreement_study(500, RunConfig(seed=0))
    assert not study.disagreements
    assert study.agreed + study.skipped_boundary == 500
    payload = study.to_payload()
    assert payload["seed"] == 0
    assert payload["disagreements"] == []


def _tetrahedron_points(rng, k):
    out = []
    while len(out) < k:
        a, b, c = rng.uniform(-1, 1, size=3)
        if min(1 - a - b - c, 1 - a + b + c, 1 + a - b + c, 1 + a + b - c) >= 0:
            out.append((float(a), float(b), float(c)))
    return out


def test_two_qubit_measure_is_twice_bell_diagonal_negativity(rng):
    for a, b, c in _tetrahedron_points(rng, 100):
        m = two_qubit_measure(bell_diagonal_state(a, b, c))
        assert m == pytest.approx(2 * bell_diag_negativity(a, b, c), abs=1e-9)


def test_zero_negativity_iff_ppt(rng):
    cut = Bipartition.of(2, [0])
    for _ in range(200):
        rho = random_mixed_state(2, rng)
        positive = negativity(rho, cut) > 2 * NPT_TOL
        assert positive == (ppt_verdict(rho, cut) == NPT)


def test_concurrence_and_criterion_excess_share_sign(rng):
    checked = 0
    for _ in range(500):
        rho = random_mixed_state(2, rng)
        report = evaluate(rho)
        if abs(report.S - 1.0) < BOUNDARY_BAND:
            continue
        assert (concurrence(rho) > 1e-9) == (report.measure > 0.0)
        checked += 1
    assert checked > 450
