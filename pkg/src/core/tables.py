from pathlib import Path
from typing import Any, Mapping

import pandas as pd

from src.core.json import write_json
from src.core.metrics import collect_file_metrics

CSV_OPTIONS = {"index": False, "float_format": "%.12g", "lineterminator": "\n"}


def to_csv_text(df: pd.DataFrame) -> str:
    return df.to_csv(**CSV_OPTIONS)


def write_table(df: pd.DataFrame, path: Path) -> dict:
    """CSV by default, Parquet for a .parquet suffix; returns file metrics."""
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".parquet":
        df.to_parquet(path, engine="pyarrow", index=False)
    else:
        df.to_csv(path, **CSV_OPTIONS)
    return collect_file_metrics(path, records=len(df))


def summary_path(path: Path) -> Path:
    return path.with_name(path.name + ".summary.json")


def write_summary(path: Path, summary: Mapping[str, Any]) -> Path:
    out = summary_path(path)
    write_json(out, dict(summary))
    return out
