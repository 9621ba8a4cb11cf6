# app/cli.py
import functools
import json
import logging
from typing import Any, Callable, Dict, Optional

import click
import uvicorn
from pydantic import ValidationError

from app.core.config import settings
from app.core.logging import configure_logging
from app.exceptions.base import EXIT_CONFIG_ERROR, AppException, ConfigurationError
from app.exceptions.diagnostics import VerificationFailedError
from app.schemas.construction import ConstructionSpec, Variant
from app.services.average import AverageService
from app.services.construction import ConstructionService
from app.services.diagnostics import DiagnosticsService
from app.services.moduli import ModuliService
from app.utils import artifacts

logger = logging.getLogger(__name__)


def load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigurationError(e.strerror or str(e), source=path)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"not valid JSON ({e.msg} at line {e.lineno})", source=path)
    if not isinstance(data, dict):
        raise ConfigurationError("expected a JSON object", source=path)
    return data


def parse_rule(raw: Optional[str], flag: str) -> Optional[Dict[str, Any]]:
    if raw is None:
        return None
    try:
        rule = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{flag} is not valid JSON ({e.msg})")
    if not isinstance(rule, dict):
        raise ConfigurationError(f"{flag} must be a JSON object")
    return rule


def resolve_spec(p: float, variant: str, b: Optional[float], q_cap: int, tol: float,
                 config: Optional[str], amplitude: Optional[str], weights: Optional[str]) -> ConstructionSpec:
    """Flags first, then the config file on top."""
    data: Dict[str, Any] = {"p": p, "variant": variant, "q_cap": q_cap, "tol": tol}
    if b is not None:
        data["b"] = b
    for key, raw, flag in (("amplitude", amplitude, "--amplitude"), ("weights", weights, "--weights")):
        rule = parse_rule(raw, flag)
        if rule is not None:
            data[key] = rule
    if config:
        data.update(load_config_file(config))
    spec = ConstructionSpec.model_validate(data)
    logger.info("resolved construction %s", json.dumps(spec.to_config(), sort_keys=True))
    return spec


def construction_options(command: Callable) -> Callable:
    """Shared construction flags; the command receives a resolved `spec`."""
    @click.option("--p", "p", type=float, default=settings.DEFAULT_P, show_default=True, help="Exponent 0 < p <= 1.")
    @click.option("--variant", type=click.Choice([v.value for v in Variant]), default=settings.DEFAULT_VARIANT,
                  show_default=True)
    @click.option("--b", "b", type=float, default=None, help="Telescoping exponent (thm13 only).")
    @click.option("--q-cap", type=int, default=settings.DEFAULT_Q_CAP, show_default=True)
    @click.option("--tol", type=float, default=settings.DEFAULT_TOL, show_default=True)
    @click.option("--amplitude", default=None, help='Custom amplitude rule as JSON, e.g. \'{"kind": "power", "q_exponent": 1}\'.')
    @click.option("--weights", default=None, help='Custom weights rule as JSON, e.g. \'{"kind": "geometric", "ratio": 0.5}\'.')
    @click.option("--config", type=click.Path(dir_okay=False), default=None,
                  help="JSON config file; its values override the flags.")
    @functools.wraps(command)
    def wrapper(p, variant, b, q_cap, tol, amplitude, weights, config, **kwargs):
        spec = resolve_spec(p, variant, b, q_cap, tol, config, amplitude, weights)
        return command(spec=spec, **kwargs)
    return wrapper


def handle_errors(command: Callable) -> Callable:
    """Turns domain errors into a message on stderr and a distinct exit code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except AppException as e:
            click.echo(f"ERROR: {e.message}", err=True)
            raise SystemExit(e.exit_code)
        except ValidationError as e:
            for error in e.errors():
                location = ".".join(str(part) for part in error["loc"]) or "config"
                click.echo(f"ERROR: {location}: {error['msg']}", err=True)
            raise SystemExit(EXIT_CONFIG_ERROR)
    return wrapper


def output_option(command: Callable) -> Callable:
    return click.option("--out", default=None, help="Output path (default: stdout).")(command)


@click.group()
@click.option("--log-level", default=settings.LOG_LEVEL, show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
def cli(log_level: str) -> None:
    """Tent-sum counterexamples in l_p and their Riemann averages."""
    configure_logging(log_level)


@cli.command()
@handle_errors
@construction_options
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json", show_default=True)
@output_option
def construct(spec: ConstructionSpec, fmt: str, out: Optional[str]) -> None:
    """Resolve a construction and report sum(beta) and the integrability series."""
    summary = ConstructionService(spec).summary()
    if fmt == "json":
        text = artifacts.render_json(summary.model_dump(mode="json"))
    else:
        document = summary.model_dump(mode="json")
        config = document.pop("config")
        rows = [[key, json.dumps(value)] for key, value in sorted({**config, **document}.items())]
        text = artifacts.render_table(["field", "value"], rows)
    artifacts.write_artifact(text, out)


@cli.command()
@handle_errors
@construction_options
@click.option("--q", "Q", type=int, default=25, show_default=True, help="Largest block in the table.")
@click.option("--format", "fmt", type=click.Choice(["csv", "table"]), default="csv", show_default=True)
@output_option
def blowup(spec: ConstructionSpec, Q: int, fmt: str, out: Optional[str]) -> None:
    """Half-block averages next to the predicted A_q C_q."""
    rows = AverageService(ConstructionService(spec)).blowup_rows(Q)
    render = artifacts.render_csv if fmt == "csv" else artifacts.render_table
    artifacts.write_artifact(render(artifacts.BLOWUP_HEADER, artifacts.blowup_rows(rows)), out)


@cli.command()
@handle_errors
@construction_options
@click.option("--s-range", nargs=2, type=float, default=(0.0, 1.0), show_default=True)
@click.option("--t-range", nargs=2, type=float, default=(0.0, 1.0), show_default=True)
@click.option("--grid", "n", type=int, default=11, show_default=True, help="Points per axis.")
@click.option("--snap/--no-snap", default=False, help="Add the block nodes t_{q^2}, t_{q(q+1)} inside the ranges.")
@output_option
def scan(spec: ConstructionSpec, s_range, t_range, n: int, snap: bool, out: Optional[str]) -> None:
    """Row-major grid of ||Ave[f](s, t)|| as CSV."""
    samples = AverageService(ConstructionService(spec)).grid_scan(tuple(s_range), tuple(t_range), n, snap=snap)
    artifacts.write_artifact(artifacts.render_csv(artifacts.SCAN_HEADER, artifacts.scan_rows(samples)), out)


@cli.command()
@handle_errors
@construction_options
@click.option("--mesh-exp", type=int, default=12, show_default=True, help="Finest mesh 2^-m.")
@click.option("--mesh-from", type=int, default=None, help="Coarsest mesh exponent (default: --mesh-exp).")
@click.option("--tag", type=click.Choice(["left", "midpoint", "right", "random"]), default="midpoint", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for random tags.")
@output_option
def riemann(spec: ConstructionSpec, mesh_exp: int, mesh_from: Optional[int], tag: str, seed: int,
            out: Optional[str]) -> None:
    """Quasi-norms of uniform Riemann sums with mesh 2^-m."""
    start = mesh_exp if mesh_from is None else mesh_from
    rows = AverageService(ConstructionService(spec)).riemann_rows(range(start, mesh_exp + 1), tag=tag, seed=seed)
    artifacts.write_artifact(artifacts.render_csv(artifacts.RIEMANN_HEADER, artifacts.riemann_rows(rows)), out)


@cli.command()
@handle_errors
@construction_options
@click.option("--q", "Q", type=int, default=20, show_default=True, help="Blocks covered by the report tables.")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@output_option
def verify(spec: ConstructionSpec, Q: int, trials: int, seed: int, out: Optional[str]) -> None:
    """Diagnostics report with the seeded inequality suite; exits 3 on any failure."""
    construction = ConstructionService(spec)
    diagnostics = DiagnosticsService(construction)
    report = diagnostics.build_report(Q, trials=trials, seed=seed)
    artifacts.write_artifact(artifacts.render_json(report.model_dump(mode="json")), out)

    failures = diagnostics.failures(report)
    for row in AverageService(construction).blowup_rows(Q):
        if abs(row.norm - row.predicted) > spec.tol * row.predicted:
            failures.append(f"half-block average at q={row.q}: {row.norm:.17g} vs A_q C_q {row.predicted:.17g}")
    if not diagnostics.separate_continuity_report(Q).consistent:
        failures.append("measured tail ratios disagree with the closed form")
    if failures:
        raise VerificationFailedError(failures)
    click.echo(f"{spec.variant.value}: {report.label.value}", err=True)


@cli.command()
@handle_errors
@construction_options
@click.option("--grid", "grid_size", type=int, default=33, show_default=True)
@click.option("--aligned-q", type=int, default=None, help="Add block-aligned points up to this block.")
@output_option
def lipschitz(spec: ConstructionSpec, grid_size: int, aligned_q: Optional[int], out: Optional[str]) -> None:
    """Lower bounds for the Lipschitz quasi-norm of t -> integral_0^t f."""
    estimate = AverageService(ConstructionService(spec)).lipschitz_quotient(grid_size, aligned_q=aligned_q)
    artifacts.write_artifact(artifacts.render_json(estimate.model_dump(mode="json")), out)


@cli.command()
@handle_errors
@construction_options
@click.option("--m-from", type=int, default=2, show_default=True)
@click.option("--m-to", type=int, default=10, show_default=True)
@click.option("--q-to", type=int, default=None, help="Last block used for aligned points (default: q_cap - 1).")
@output_option
def window(spec: ConstructionSpec, m_from: int, m_to: int, q_to: Optional[int], out: Optional[str]) -> None:
    """max ||Ave[f]|| over block-aligned pairs in [1 - 2^-m, 1)."""
    average = AverageService(ConstructionService(spec))
    q_to = q_to or spec.q_cap - 1
    rows = [[m, 1.0 - 2.0 ** -m, average.window_sup(1.0 - 2.0 ** -m, q_to)] for m in range(m_from, m_to + 1)]
    artifacts.write_artifact(artifacts.render_csv(["m", "lo", "sup_norm"], rows), out)


@cli.command()
@handle_errors
@click.option("--p", "p", type=float, default=settings.DEFAULT_P, show_default=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--resolution", type=float, default=1.0 / 24.0, show_default=True, help="Simplex grid step.")
def modulus(p: float, q: int, resolution: float) -> None:
    """Compare C_q = q^(1/p-1) with a brute-force grid search."""
    service = ModuliService(p)
    exact = service.concavity_modulus(q)
    oracle = service.modulus_sup_oracle(q, resolution)
    click.echo(artifacts.render_table(["q", "p", "C_q", "oracle"], [[q, p, exact, oracle]]), nl=False)


@cli.command()
@click.option("--host", default=settings.SERVER_HOST, show_default=True)
@click.option("--port", type=int, default=settings.SERVER_PORT, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP API."""
    uvicorn.run("app.main:app", host=host, port=port, log_level=settings.LOG_LEVEL.lower())


if __name__ == "__main__":
    cli()
