import json
import math
import pathlib
from datetime import datetime, date
from pathlib import Path

import numpy as np
import toml
import yaml


def load_yaml(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def load_config_file(path: Path) -> dict:
    """YAML by default; a .toml suffix reads TOML."""
    if Path(path).suffix == ".toml":
        return toml.load(path)
    return load_yaml(path)


def write_json(path, data):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=4, default=_json_default)


def dumps(data, indent: int | None = 2) -> str:
    return json.dumps(data, ensure_ascii=False, indent=indent, default=_json_default)


def _json_default(o):
    if isinstance(o, (datetime, date)):
        return o.isoformat()
    # numpy scalars
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        f = float(o)
        return None if (math.isnan(f) or math.isinf(f)) else f
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (complex, np.complexfloating)):
        return [float(o.real), float(o.imag)]
    if isinstance(o, np.ndarray):
        if np.iscomplexobj(o):
            return np.stack([o.real, o.imag], axis=-1).tolist()
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, pathlib.Path):
        return str(o)
    # anything else: fallback to str
    return str(o)
