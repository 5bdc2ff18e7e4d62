from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Iterator, List, Optional

import numpy as np
import toml
import typer
import yaml

from src.baselines.compare import agreement_study, compare_state
from src.cli.catalog import resolve_state
from src.cli.printer import format_ensemble, format_report
from src.core.config import settings
from src.core.errors import InvalidArgument, NumericFailure, PreconditionViolation, SeptensorError
from src.core.json import dumps, write_json
from src.core.logging import configure_logging
from src.core.tables import to_csv_text, write_summary, write_table
from src.core.time import StageTimer, run_id
from src.core.types import RunConfig, resolve_run_config
from src.corrtensor.printer import format_slices
from src.corrtensor.tensor import correlation_tensor
from src.criterion.closed_forms import ghz_diag_t, ghz_diagonal_S
from src.criterion.ensemble import ensemble_from_report
from src.criterion.evaluate import Criterion, verdict_of
from src.criterion.robustness import VARIANTS, robustness_curve
from src.criterion.sweep import SweepService, noise_grid
from src.criterion.thresholds import noise_threshold
from src.qcore.ensemble import mix
from src.qcore.states import DensityMatrix, ghz_diagonal_state, white_noise_mix
from src.rebuild.weights import ghz_diag_tadd

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ENTANGLED = 3

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Correlation-tensor separability analysis.")


@app.callback()
def _setup(
    log_json: bool = typer.Option(settings.LOG_JSON, "--log-json/--log-text", help="Log format on stderr."),
    log_level: str = typer.Option(settings.LOG_LEVEL, "--log-level"),
) -> None:
    configure_logging(json_logs=log_json, level=log_level)


@contextmanager
def _errors() -> Iterator[None]:
    try:
        yield
    except (SeptensorError, OSError, json.JSONDecodeError, yaml.YAMLError, toml.TomlDecodeError) as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(EXIT_ERROR) from None


def _config(config: Optional[Path], **overrides) -> RunConfig:
    return resolve_run_config(config_file=config, overrides=overrides)


def _state(spec: str, noise: Optional[float]) -> DensityMatrix:
    rho = resolve_state(spec)
    return rho if noise is None else white_noise_mix(rho, noise)


def _label(spec: str, noise: Optional[float]) -> str:
    return spec if noise is None else f"{spec}@q={noise:g}"


ConfigOpt = typer.Option(None, "--config", help="YAML file with RunConfig keys.")
NoiseOpt = typer.Option(None, "--noise", min=0.0, max=1.0, help="White-noise weight q.")


@app.command()
def analyze(
    spec: str = typer.Argument(..., help="Catalog spec (ghz:3, w:4, bell:phi+, 0+1, ...) or a .json state file."),
    noise: Optional[float] = NoiseOpt,
    as_json: bool = typer.Option(False, "--json", help="Emit the full report as JSON."),
    show_tensor: Optional[str] = typer.Option(None, "--show-tensor", help="Print the R or T slices."),
    strict_nonglobal: bool = typer.Option(False, "--strict-nonglobal"),
    frame_search: bool = typer.Option(False, "--frame-search"),
    search_orders: bool = typer.Option(False, "--search-orders"),
    threshold: bool = typer.Option(False, "--threshold", help="Also bisect the white-noise threshold (pure input)."),
    config: Optional[Path] = ConfigOpt,
) -> None:
    """S = sum_s + sum_s_add and the verdict. Exit 3 when entangled."""
    with _errors():
        cfg = _config(
            config,
            strict_nonglobal=strict_nonglobal or None,
            frame_search=frame_search or None,
            search_orders=search_orders or None,
        )
        rho = _state(spec, noise)
        label = _label(spec, noise)
        report = Criterion(cfg, label).evaluate(rho)
        if threshold:
            report = replace(report, noise_threshold=noise_threshold(rho, cfg, label))
        if show_tensor is not None:
            if show_tensor.upper() not in ("R", "T"):
                raise InvalidArgument("--show-tensor takes R or T")
            R = correlation_tensor(rho)
            typer.echo(format_slices(R if show_tensor.upper() == "R" else R.to_T()))
            typer.echo("")
        typer.echo(dumps(report.to_payload()) if as_json else format_report(report))
    raise typer.Exit(EXIT_ENTANGLED if report.entangled else EXIT_OK)


@app.command()
def sweep(
    spec: str = typer.Argument(...),
    q_min: float = typer.Argument(0.0),
    q_max: float = typer.Argument(1.0),
    steps: Optional[int] = typer.Option(None, "--steps", help="Grid intervals (default from config)."),
    out: Optional[Path] = typer.Option(None, "--out", help=".csv or .parquet; stdout CSV otherwise."),
    config: Optional[Path] = ConfigOpt,
) -> None:
    """White-noise sweep with the refined verdict crossing."""
    with _errors():
        cfg = _config(config)
        grid = noise_grid(q_min, q_max, steps if steps is not None else cfg.grid_steps)
        result = SweepService(resolve_state(spec), grid, cfg, spec).run(out)
        if out is None:
            typer.echo(to_csv_text(result.table), nl=False)
        else:
            typer.echo(f"wrote {out} ({len(result.table)} rows)")
        crossing = "none" if result.crossing is None else f"{result.crossing:.9f}"
        typer.echo(f"crossing: {crossing}", err=out is None)


@app.command()
def decompose(
    spec: str = typer.Argument(...),
    noise: Optional[float] = NoiseOpt,
    verify: bool = typer.Option(False, "--verify", help="Re-mix and report the entrywise residual."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the ensemble as JSON."),
    config: Optional[Path] = ConfigOpt,
) -> None:
    """Explicit separable ensemble. Exit 3 when the state reads entangled."""
    with _errors():
        cfg = _config(config)
        rho = _state(spec, noise)
        label = _label(spec, noise)
        report = Criterion(cfg, label).evaluate(rho)
        if report.entangled:
            typer.echo(f"entangled (S = {report.S:.12g}); no separable ensemble", err=True)
            raise typer.Exit(EXIT_ENTANGLED)
        with StageTimer() as t:
            ens = ensemble_from_report(rho, report, cfg)
        typer.echo(format_ensemble(ens))
        if verify:
            residual = float(np.max(np.abs(mix(ens).entries - rho.entries)))
            typer.echo(f"residual {residual:.3e}")
        if out is not None:
            payload = {
                "state": label,
                "members": [
                    {"probability": m.probability, "label": m.label()} for m in ens.members
                ],
            }
            write_json(out, payload)
            write_summary(
                out,
                {
                    "command": "decompose",
                    "state": label,
                    "file": str(out),
                    "records": len(ens),
                    "duration_sec": t.duration_sec,
                    "run_id": run_id(),
                    "error": None,
                },
            )


@app.command()
def robustness(
    n: int = typer.Argument(..., help="Number of qubits of GHZ_N."),
    variant: str = typer.Argument("E", help=f"One of {', '.join(VARIANTS)}."),
    steps: Optional[int] = typer.Option(None, "--steps"),
    find_zero: bool = typer.Option(False, "--find-zero"),
    out: Optional[Path] = typer.Option(None, "--out"),
    config: Optional[Path] = ConfigOpt,
) -> None:
    """Plot-ready (q, value) curve of the GHZ_N robustness family."""
    with _errors():
        cfg = _config(config)
        grid = np.linspace(0.0, 1.0, (steps if steps is not None else cfg.grid_steps) + 1)
        curve = robustness_curve(n, variant, grid, find_zero=find_zero)
        table = curve.to_frame()
        if out is None:
            typer.echo(to_csv_text(table), nl=False)
        else:
            metrics = write_table(table, out)
            write_summary(
                out,
                {
                    "command": "robustness",
                    "state": f"ghz:{n}",
                    "variant": variant,
                    "file": str(out),
                    **metrics,
                    "zero_crossing": curve.zero,
                    "spot_check_error": curve.spot_check_error,
                    "run_id": run_id(),
                    "error": None,
                },
            )
            typer.echo(f"wrote {out} ({len(table)} rows)")
        if find_zero:
            typer.echo(f"zero: {curve.zero:.9f}", err=out is None)


@app.command()
def ghzdiag(
    p: List[float] = typer.Argument(..., help="Eight probabilities p1..p8."),
    check: bool = typer.Option(False, "--check", help="Cross-check against the general pipeline."),
    config: Optional[Path] = ConfigOpt,
) -> None:
    """Closed-form S of a GHZ-diagonal state. Exit 3 when entangled."""
    with _errors():
        cfg = _config(config)
        t = ghz_diag_t(p)
        t_add = ghz_diag_tadd(p)
        S = ghz_diagonal_S(p)
        verdict, boundary = verdict_of(S, cfg.verdict_tol)
        for name, v in zip(("t111", "t122", "t212", "t221"), t):
            typer.echo(f"{name}      {v:.12g}")
        typer.echo(f"t_add,333 {t_add:.12g}")
        typer.echo(f"S         {S:.12g}")
        typer.echo(f"verdict   {verdict}" + (" (boundary)" if boundary else ""))
        if check:
            general = Criterion(cfg, "ghzdiag").evaluate(ghz_diagonal_state(p)).S
            typer.echo(f"pipeline  {general:.12g}  diff {abs(general - S):.3e}")
            if abs(general - S) > 1e-8:
                raise PreconditionViolation("closed form and pipeline disagree", closed=S, pipeline=general)
    raise typer.Exit(EXIT_ENTANGLED if verdict == "entangled" else EXIT_OK)


@app.command()
def compare(
    spec: Optional[str] = typer.Argument(None),
    noise: Optional[float] = NoiseOpt,
    random: int = typer.Option(0, "--random", help="Agreement study on K random 2-qubit states."),
    as_json: bool = typer.Option(False, "--json"),
    config: Optional[Path] = ConfigOpt,
) -> None:
    """Criterion next to PPT, negativity and concurrence."""
    with _errors():
        cfg = _config(config)
        if spec is None and random <= 0:
            raise InvalidArgument("give a state spec or --random K")
        payload: dict = {}
        if spec is not None:
            payload["state"] = compare_state(_state(spec, noise), cfg, _label(spec, noise))
        if random > 0:
            payload["random"] = agreement_study(random, cfg).to_payload()
        if as_json:
            typer.echo(dumps(payload))
        elif "state" in payload:
            s = payload["state"]
            typer.echo(f"S {s['S']:.12g}  verdict {s['verdict']}")
            for c in s["cuts"]:
                typer.echo(
                    f"  {c['cut']:<12} {c['ppt']}  negativity {c['negativity']:.6g}"
                    f"  purity-variant {c['purity_negativity']:.6g}"
                )
            if "concurrence" in s:
                typer.echo(f"  concurrence {s['concurrence']:.6g}  measure {s['two_qubit_measure']:.6g}")
        if "random" in payload and not as_json:
            r = payload["random"]
            typer.echo(
                f"random: {r['samples']} states, {r['agreed']} agree, "
                f"{len(r['disagreements'])} disagree, {r['skipped_boundary']} on the boundary"
            )
        if "random" in payload and payload["random"]["disagreements"]:
            raise NumericFailure(
                "criterion and PPT disagree on random 2-qubit states",
                count=len(payload["random"]["disagreements"]),
            )


def main() -> None:
    app()


if __name__ == "__main__":
    main()
