"""Scenario definitions, run results and report emission.

A scenario is a named verification suite; running it yields a list of
``CheckReport`` objects that are written out as one canonical JSON document,
a CSV summary and one witness file per check.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING, Annotated, Any

import structlog
from pydantic import BaseModel, ConfigDict, Field

from puiseux_lift.config import ParamsOverrides
from puiseux_lift.core.report import CheckReport, CheckStatus
from puiseux_lift.monalg.field import FieldSpec

if TYPE_CHECKING:
  from pathlib import Path

logger = structlog.get_logger()


class ScenarioName(StrEnum):
  GRAMS = "grams"
  ANTIMATTER = "antimatter"
  STRONGLY_ATOMIC = "strongly-atomic"
  MAIN_THEOREM = "main-theorem"
  FURSTENBERG = "furstenberg"


class Scenario(BaseModel):
  """One verification run: which suite, how deep, over which field."""

  model_config = ConfigDict(extra="forbid", frozen=True)

  name: ScenarioName
  depth: Annotated[int, Field(ge=2, description="Truncation depth of the checks")] = 10
  field: FieldSpec = Field(default_factory=FieldSpec.rationals)
  overrides: ParamsOverrides | None = None
  seed: Annotated[int, Field(description="Seeds randomized sampling only")] = 0


class ScenarioReport(BaseModel):
  """The canonical report document of a scenario run."""

  # summary and exit_code in the document are derived, so reading one back
  # ignores them
  model_config = ConfigDict(extra="ignore")

  scenario: Scenario
  parameters: dict[str, Any] | None = None
  checks: list[CheckReport] = Field(default_factory=list)

  @property
  def defects(self) -> list[CheckReport]:
    return [check for check in self.checks if check.is_defect]

  @property
  def exit_code(self) -> int:
    """0 iff no theorem-backed check was violated; inconclusive never fails."""
    return 1 if self.defects else 0

  def counts(self) -> dict[str, int]:
    totals = {str(status): 0 for status in CheckStatus}
    for check in self.checks:
      totals[str(check.status)] += 1
    return totals

  def to_document(self) -> dict[str, Any]:
    document = self.model_dump(mode="json")
    document["summary"] = {**self.counts(), "defects": len(self.defects)}
    document["exit_code"] = self.exit_code
    return document


def canonical_json(document: Any) -> str:
  """Sorted keys, two-space indent, LF line endings, trailing newline."""
  return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_schema() -> dict[str, Any]:
  return ScenarioReport.model_json_schema()


def witness_file_name(check_id: str) -> str:
  return f"{check_id.replace('/', '_')}.json"


@dataclass(frozen=True)
class ReportFiles:
  json_path: Path
  csv_path: Path
  schema_path: Path
  witness_dir: Path


def emit_report(report: ScenarioReport, out_dir: Path) -> ReportFiles:
  """Write the JSON document, its schema, the CSV summary and the witness files.

  I/O errors propagate unchanged.
  """
  out_dir.mkdir(parents=True, exist_ok=True)
  witness_dir = out_dir / "witnesses"
  witness_dir.mkdir(exist_ok=True)
  name = str(report.scenario.name)

  json_path = out_dir / f"{name}.json"
  with json_path.open("w", encoding="utf-8", newline="\n") as handle:
    handle.write(canonical_json(report.to_document()))

  csv_path = out_dir / f"{name}.csv"
  with csv_path.open("w", encoding="utf-8", newline="") as handle:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["check_id", "anchor", "status", "witness_file"])
    for check in report.checks:
      witness = f"witnesses/{witness_file_name(check.check_id)}"
      writer.writerow([check.check_id, check.anchor, str(check.status), witness])

  schema_path = out_dir / "report.schema.json"
  with schema_path.open("w", encoding="utf-8", newline="\n") as handle:
    handle.write(canonical_json(report_schema()))

  for check in report.checks:
    path = witness_dir / witness_file_name(check.check_id)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
      handle.write(canonical_json(check.model_dump(mode="json")))

  logger.info("report_written", path=str(json_path), checks=len(report.checks))
  return ReportFiles(json_path, csv_path, schema_path, witness_dir)


def merge_reports(
  check_id: str, anchor: str, reports: list[CheckReport], summary: str = ""
) -> CheckReport:
  """Fold many single-element reports into one row of the summary table."""
  merged = CheckReport(
    check_id=check_id,
    anchor=anchor,
    summary=summary or f"{len(reports)} cases",
    theorem_backed=all(report.theorem_backed for report in reports),
  )
  for report in reports:
    merged.witnesses.extend(report.witnesses)
    if report.status is CheckStatus.VIOLATION:
      merged.status = CheckStatus.VIOLATION
    elif report.status is CheckStatus.INCONCLUSIVE and merged.status is CheckStatus.OK:
      merged.status = CheckStatus.INCONCLUSIVE
  return merged
