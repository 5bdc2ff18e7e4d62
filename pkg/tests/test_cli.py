import json

import pandas as pd
import pytest
from typer.testing import CliRunner

from src.cli.app import EXIT_ENTANGLED, EXIT_ERROR, EXIT_OK, app
from src.cli.catalog import load_catalog_yaml, resolve_state
from src.core.errors import InvalidArgument, InvalidState
from src.core.tables import summary_path

runner = CliRunner()


def run(*args: str):
    return runner.invoke(app, ["--log-level", "ERROR", *args])


@pytest.mark.parametrize(
    "args, code",
    [
        (["analyze", "ghz:3"], EXIT_ENTANGLED),
        (["analyze", "maxmixed:3"], EXIT_OK),
        (["analyze", "w:3", "--noise", "0.9"], EXIT_OK),
        (["analyze", "w:3", "--noise", "0.8"], EXIT_ENTANGLED),
        (["analyze", "0+1"], EXIT_OK),
        (["analyze", "nonsense:3"], EXIT_ERROR),
        (["analyze", "ghz:1"], EXIT_ERROR),
    ],
)
def test_analyze_exit_codes(args, code):
    assert run(*args).exit_code == code


def test_analyze_text_report():
    result = run("analyze", "ghz:3")
    assert "entangled" in result.stdout
    assert "5" in result.stdout


def test_analyze_json():
    result = run("analyze", "w:3", "--json")
    payload = json.loads(result.stdout)
    assert payload["S"] == pytest.approx(19 / 3)
    assert payload["verdict"] == "entangled"
    assert payload["rebuild"]["sum_t_add"] == pytest.approx(4 / 3)


def test_analyze_threshold():
    result = run("analyze", "ghz:3", "--json", "--threshold")
    assert json.loads(result.stdout)["noise_threshold"] == pytest.approx(0.8, abs=1e-6)


def test_analyze_show_tensor():
    result = run("analyze", "bell:psi-", "--show-tensor", "T")
    assert result.exit_code == EXIT_ENTANGLED
    assert run("analyze", "bell:psi-", "--show-tensor", "Q").exit_code == EXIT_ERROR


def test_analyze_state_file(tmp_path):
    f = tmp_path / "bell.json"
    amp = 2**-0.5
    f.write_text(json.dumps({"n_qubits": 2, "statevector": [[amp, 0], [0, 0], [0, 0], [amp, 0]]}))
    assert run("analyze", str(f)).exit_code == EXIT_ENTANGLED
    assert run("analyze", str(tmp_path / "missing.json")).exit_code == EXIT_ERROR


def test_analyze_config_file(tmp_path):
    good = tmp_path / "run.toml"
    good.write_text("strict_nonglobal = true\n")
    assert run("analyze", "w:4", "--config", str(good)).exit_code == EXIT_ENTANGLED
    bad = tmp_path / "bad.yaml"
    bad.write_text("nope: 1\n")
    assert run("analyze", "w:4", "--config", str(bad)).exit_code == EXIT_ERROR


def test_sweep_to_file(tmp_path):
    out = tmp_path / "w3.csv"
    result = run("sweep", "w:3", "0", "1", "--steps", "20", "--out", str(out))
    assert result.exit_code == EXIT_OK
    assert "crossing: 0.8421" in result.stdout
    df = pd.read_csv(out)
    assert list(df.columns) == ["q", "S", "verdict", "negativity", "concurrence"]
    summary = json.loads(summary_path(out).read_text())
    assert summary["records"] == 21
    assert summary["crossing"] == pytest.approx(16 / 19, abs=1e-6)


def test_sweep_to_stdout():
    result = run("sweep", "bell:phi+", "0", "1", "--steps", "4")
    assert result.exit_code == EXIT_OK
    assert result.stdout.splitlines()[0] == "q,S,verdict,negativity,concurrence"


def test_decompose(tmp_path):
    out = tmp_path / "ens.json"
    result = run("decompose", "ghz:3", "--noise", "0.8", "--verify", "--out", str(out))
    assert result.exit_code == EXIT_OK
    assert "residual" in result.stdout
    assert len(json.loads(out.read_text())["members"]) == 18
    assert summary_path(out).exists()


def test_decompose_lists_the_white_noise_remainder_apart():
    result = run("decompose", "w:3", "--noise", "0.842106", "--verify")
    assert result.exit_code == EXIT_OK
    lines = result.stdout.splitlines()
    assert lines[0].startswith("31 pure members + 1 mixed")
    assert sum(line.strip().endswith("I/8") for line in lines) == 1


def test_decompose_entangled():
    assert run("decompose", "ghz:3").exit_code == EXIT_ENTANGLED


def test_robustness():
    result = run("robustness", "4", "E", "--steps", "10", "--find-zero")
    assert result.exit_code == EXIT_OK
    assert result.stdout.splitlines()[0] == "q,value,zero_crossing"
    assert run("robustness", "4", "G").exit_code == EXIT_ERROR


def test_ghzdiag():
    result = run("ghzdiag", "1", "0", "0", "0", "0", "0", "0", "0", "--check")
    assert result.exit_code == EXIT_ENTANGLED
    assert "S         5" in result.stdout
    uniform = ["0.125"] * 8
    assert run("ghzdiag", *uniform).exit_code == EXIT_OK
    assert run("ghzdiag", "0.5", "0.5").exit_code == EXIT_ERROR


def test_compare():
    result = run("compare", "w:3", "--json")
    payload = json.loads(result.stdout)
    assert payload["state"]["any_npt"]
    assert run("compare").exit_code == EXIT_ERROR
    random = run("compare", "--random", "3")
    assert random.exit_code == EXIT_OK
    assert "random: 3 states" in random.stdout


def test_catalog_rules():
    ids = [r["rule_id"] for r in load_catalog_yaml()]
    assert ids[0] == "ghz" and "product" in ids
    assert resolve_state("~+~-").n_qubits == 2
    assert resolve_state("ghzdiag:1,0,0,0,0,0,0,0").n_qubits == 3
    with pytest.raises(InvalidArgument):
        resolve_state("ghz")


def test_state_file_rejects_non_psd(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"n_qubits": 1, "density": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}))
    with pytest.raises((InvalidState, InvalidArgument)):
        resolve_state(str(f))
