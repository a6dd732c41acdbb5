"""Core CLI app setup."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Annotated

import structlog
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

if TYPE_CHECKING:
  from structlog.typing import FilteringBoundLogger

  from puiseux_lift.scenarios import ScenarioReport

from puiseux_lift.config import format_validation_errors, load_overrides
from puiseux_lift.counterexample.params import CounterexampleError, build_default_params
from puiseux_lift.logging_config import configure_logging
from puiseux_lift.monalg.field import FieldSpec
from puiseux_lift.scenarios import Scenario, ScenarioName, emit_report, run_scenario
from puiseux_lift.settings import settings

# stderr console for logs and the summary table; reports go to files
err_console = Console(stderr=True)

STATUS_STYLES = {"ok": "green", "violation": "bold red", "inconclusive": "yellow"}


def get_logger() -> FilteringBoundLogger:
  """Configure logging and return a logger instance."""
  configure_logging(settings.log_level)
  return structlog.get_logger()


def print_summary(report: ScenarioReport, out_dir: Path) -> None:
  table = Table(title=f"{report.scenario.name} (depth {report.scenario.depth})")
  table.add_column("check")
  table.add_column("status")
  table.add_column("statement", style="dim")
  for check in report.checks:
    status = str(check.status)
    label = status if check.theorem_backed else f"{status} (evidence)"
    table.add_row(check.check_id, f"[{STATUS_STYLES[status]}]{label}[/]", check.anchor)
  err_console.print(table)
  counts = report.counts()
  err_console.print(
    f"[bold]{counts['ok']} ok, {counts['violation']} violations, "
    f"{counts['inconclusive']} inconclusive[/bold]  [dim]→ {out_dir}[/dim]"
  )


app = typer.Typer(
  help="Exact verifier for liftings of Puiseux monoids and their monoid algebras.",
  no_args_is_help=True,
)


@app.command()
def verify(
  scenario: Annotated[
    ScenarioName, typer.Argument(help="Verification suite to run.")
  ],
  depth: Annotated[
    int, typer.Option("--depth", "-d", min=2, help="Truncation depth of the checks.")
  ] = 10,
  field: Annotated[
    str, typer.Option("--field", "-f", help="Coefficient field: 'q' or 'fp:P'.")
  ] = "q",
  config: Annotated[
    Path | None,
    typer.Option("--config", "-C", help="JSON or YAML file overriding the parameters."),
  ] = None,
  out: Annotated[
    Path, typer.Option("--out", "-o", help="Report directory (VERIFY_OUT wins).")
  ] = Path("reports"),
  seed: Annotated[
    int, typer.Option("--seed", help="Seed for randomized sampling only.")
  ] = 0,
  quiet: Annotated[
    bool, typer.Option("--quiet", "-q", help="Suppress the summary table.")
  ] = False,
):
  """
  Run a verification scenario and write its JSON, CSV and witness files.

  Exits 0 when no theorem-backed check is violated; inconclusive bounded
  searches are listed but never fail the run.
  """
  log = get_logger()

  # --- Configuration ---
  try:
    overrides = load_overrides(config)
    if overrides is not None:
      build_default_params(overrides)
      log.info("loaded_overrides", path=str(config))
    field_spec = FieldSpec.parse(field)
    spec = Scenario(
      name=scenario, depth=depth, field=field_spec, overrides=overrides, seed=seed
    )
  except FileNotFoundError:
    err_console.print(f"[red]Error: Config file not found: {config}[/red]")
    raise typer.Exit(code=3) from None
  except ValidationError as e:
    err_console.print(f"[red]{format_validation_errors(e.errors())}[/red]")
    raise typer.Exit(code=2) from None
  except (ValueError, CounterexampleError) as e:
    err_console.print(f"[red]Error: {e}[/red]")
    raise typer.Exit(code=2) from None

  out_dir = settings.verify_out or out

  try:
    report = run_scenario(spec)
    emit_report(report, out_dir)
  except Exception as e:
    log.error("verification_failed", scenario=str(scenario), error=str(e))
    err_console.print(f"[red]Fatal Error: {e}[/red]")
    raise typer.Exit(code=1) from e

  if not quiet:
    print_summary(report, out_dir)
  for check in report.defects:
    log.error("defect", check_id=check.check_id, anchor=check.anchor)
  raise typer.Exit(code=report.exit_code)
