from __future__ import annotations

import re
from pathlib import Path
from typing import Any, Callable, Dict, List

import yaml

from src.core.errors import InvalidArgument
from src.cli.state_file import load_state_file
from src.qcore.states import (
    DensityMatrix,
    bell_state,
    density_from_state,
    ghz_diagonal_state,
    ghz_state,
    maximally_mixed,
    product_ket,
    w_state,
    werner_state,
)

CATALOG_PATH = Path(__file__).with_name("catalog.yaml")
PRODUCT_TOKEN_RE = re.compile(r"~[+-]|[01+-]")


def load_catalog_yaml(path: Path = CATALOG_PATH) -> List[Dict[str, Any]]:
    cfg = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    rules = []
    for r in cfg.get("states", []):
        rules.append(
            {
                "rule_id": r["rule_id"],
                "path_regex": re.compile(r["path_regex"]),
                "builder": r["builder"],
                "enabled": bool(r.get("enabled", True)),
                "notes": r.get("notes"),
            }
        )
    return rules


def _int(text: str) -> int:
    return int(text)


def _product(labels: str) -> DensityMatrix:
    return density_from_state(product_ket(PRODUCT_TOKEN_RE.findall(labels)))


BUILDERS: Dict[str, Callable[..., DensityMatrix]] = {
    "ghz": lambda n: density_from_state(ghz_state(_int(n))),
    "w": lambda n: density_from_state(w_state(_int(n))),
    "bell": lambda name: density_from_state(bell_state(name)),
    "werner": lambda q: werner_state(float(q)),
    "maxmixed": lambda n: maximally_mixed(_int(n)),
    "ghzdiag": lambda p: ghz_diagonal_state([float(x) for x in p.split(",")]),
    "product": _product,
    "file": lambda path: load_state_file(Path(path)),
}


def resolve_state(spec: str, rules: List[Dict[str, Any]] | None = None) -> DensityMatrix:
    """Turn a catalog spec (or a .json state file) into a validated density matrix."""
    spec = spec.strip()
    for rule in rules if rules is not None else load_catalog_yaml():
        if not rule["enabled"]:
            continue
        if m := rule["path_regex"].match(spec):
            try:
                builder = BUILDERS[rule["builder"]]
            except KeyError:
                raise InvalidArgument(f"catalog rule {rule['rule_id']!r} names unknown builder") from None
            return builder(**m.groupdict())
    raise InvalidArgument(f"unrecognized state spec {spec!r}")
