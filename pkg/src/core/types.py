from dataclasses import dataclass, asdict, fields, replace
from pathlib import Path
from typing import Any, Mapping

from src.core.config import settings
from src.core.errors import InvalidArgument
from src.core.json import load_config_file


@dataclass(frozen=True)
class RunConfig:
    verdict_tol: float = 1e-9
    svd_floor: float = 1e-12
    exhaustive_limit: int = 12
    max_allocations: int = 200_000
    grid_steps: int = 100
    seed: int = 0
    threads: int = 4
    strict_nonglobal: bool = False
    search_orders: bool = False
    frame_search: bool = False

    @classmethod
    def from_settings(cls) -> "RunConfig":
        return cls(
            verdict_tol=settings.VERDICT_TOL,
            svd_floor=settings.SVD_FLOOR,
            exhaustive_limit=settings.EXHAUSTIVE_LIMIT,
            max_allocations=settings.MAX_ALLOCATIONS,
            grid_steps=settings.GRID_STEPS,
            seed=settings.SEED,
            threads=settings.THREADS,
        )

    def to_payload(self) -> dict[str, Any]:
        return asdict(self)


def resolve_run_config(
    base: RunConfig | None = None,
    config_file: Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """settings < config file < explicit overrides; validated."""
    cfg = base or RunConfig.from_settings()
    known = {f.name for f in fields(RunConfig)}
    if config_file is not None:
        raw = load_config_file(config_file)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise InvalidArgument(f"unknown config keys: {unknown}", file=str(config_file))
        cfg = replace(cfg, **raw)
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.verdict_tol <= 0 or cfg.svd_floor <= 0:
        raise InvalidArgument(
            "tolerances must be > 0",
            verdict_tol=cfg.verdict_tol,
            svd_floor=cfg.svd_floor,
        )
    if cfg.grid_steps < 2:
        raise InvalidArgument("grid resolution must be >= 2", grid_steps=cfg.grid_steps)
    if cfg.threads < 1:
        raise InvalidArgument("threads must be >= 1", threads=cfg.threads)
    if cfg.exhaustive_limit < 0 or cfg.max_allocations < 1:
        raise InvalidArgument(
            "exhaustive bounds must be non-negative",
            exhaustive_limit=cfg.exhaustive_limit,
            max_allocations=cfg.max_allocations,
        )
