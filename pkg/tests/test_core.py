import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.core.errors import InvalidArgument, NumericFailure, SeptensorError
from src.core.json import dumps, write_json
from src.core.metrics import file_sha256
from src.core.tables import summary_path, to_csv_text, write_summary, write_table
from src.core.time import StageTimer
from src.core.types import RunConfig, resolve_run_config


def test_error_payload_carries_kind_and_details():
    err = InvalidArgument("bad subset", subset=[0, 1])
    assert isinstance(err, ValueError)
    assert err.to_payload() == {
        "kind": "invalid-argument",
        "message": "bad subset",
        "details": {"subset": [0, 1]},
    }
    assert isinstance(NumericFailure("x"), ArithmeticError)
    assert isinstance(NumericFailure("x"), SeptensorError)


def test_run_config_defaults_follow_settings():
    cfg = RunConfig.from_settings()
    assert cfg.verdict_tol == pytest.approx(1e-9)
    assert cfg.exhaustive_limit == 12
    payload = cfg.to_payload()
    assert payload["seed"] == cfg.seed
    assert "out_path" not in payload


def test_config_file_then_overrides(tmp_path: Path):
    f = tmp_path / "run.yaml"
    f.write_text("exhaustive_limit: 5\nstrict_nonglobal: true\n", encoding="utf-8")
    cfg = resolve_run_config(config_file=f, overrides={"exhaustive_limit": 7, "seed": None})
    assert cfg.exhaustive_limit == 7
    assert cfg.strict_nonglobal is True


def test_toml_config_file(tmp_path: Path):
    f = tmp_path / "run.toml"
    f.write_text("grid_steps = 20\nthreads = 2\n", encoding="utf-8")
    cfg = resolve_run_config(config_file=f)
    assert (cfg.grid_steps, cfg.threads) == (20, 2)


@pytest.mark.parametrize(
    "text",
    ["unknown_key: 1\n", "verdict_tol: 0\n", "grid_steps: 1\n", "threads: 0\n"],
)
def test_bad_config_rejected(tmp_path: Path, text: str):
    f = tmp_path / "run.yaml"
    f.write_text(text, encoding="utf-8")
    with pytest.raises(InvalidArgument):
        resolve_run_config(config_file=f)


def test_json_handles_numpy_and_complex(tmp_path: Path):
    data = {"a": np.float64(0.5), "b": np.arange(3), "c": 1 + 2j, "d": {3, 1}, "p": tmp_path}
    out = json.loads(dumps(data))
    assert out == {"a": 0.5, "b": [0, 1, 2], "c": [1.0, 2.0], "d": [1, 3], "p": str(tmp_path)}
    write_json(tmp_path / "x.json", {"m": np.eye(2, dtype=complex)})
    loaded = json.loads((tmp_path / "x.json").read_text(encoding="utf-8"))
    assert loaded["m"][0][0] == [1.0, 0.0]


def test_csv_is_deterministic(tmp_path: Path):
    df = pd.DataFrame({"q": [0.0, 1 / 3], "S": [19 / 3, 0.0]})
    text = to_csv_text(df)
    assert text.splitlines()[0] == "q,S"
    assert "0.333333333333" in text
    assert "\r" not in text
    m1 = write_table(df, tmp_path / "a.csv")
    m2 = write_table(df, tmp_path / "b.csv")
    assert m1["hash"] == m2["hash"] == file_sha256(tmp_path / "a.csv")
    assert m1["records"] == 2


def test_parquet_suffix(tmp_path: Path):
    df = pd.DataFrame({"q": [0.0, 0.5], "value": [1.0, 0.25]})
    write_table(df, tmp_path / "c.parquet")
    pd.testing.assert_frame_equal(pd.read_parquet(tmp_path / "c.parquet"), df)


def test_summary_sits_beside_artifact(tmp_path: Path):
    target = tmp_path / "sweep.csv"
    out = write_summary(target, {"command": "sweep", "error": None})
    assert out == summary_path(target) == tmp_path / "sweep.csv.summary.json"
    assert json.loads(out.read_text(encoding="utf-8"))["command"] == "sweep"


def test_stage_timer_records_duration():
    with StageTimer() as t:
        pass
    assert t.duration_sec is not None and t.duration_sec >= 0.0
