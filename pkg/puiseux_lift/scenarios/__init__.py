"""Named verification suites and their reports."""

from __future__ import annotations

import random
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.scenarios import (
  antimatter,
  furstenberg,
  grams,
  main_theorem,
  strongly_atomic,
)
from puiseux_lift.scenarios.base import (
  ReportFiles,
  Scenario,
  ScenarioName,
  ScenarioReport,
  canonical_json,
  emit_report,
  merge_reports,
  report_schema,
)

if TYPE_CHECKING:
  from collections.abc import Callable

  Runner = Callable[[Scenario, random.Random], ScenarioReport]

logger = structlog.get_logger()

RUNNERS: dict[ScenarioName, Runner] = {
  ScenarioName.GRAMS: grams.run,
  ScenarioName.ANTIMATTER: antimatter.run,
  ScenarioName.STRONGLY_ATOMIC: strongly_atomic.run,
  ScenarioName.MAIN_THEOREM: main_theorem.run,
  ScenarioName.FURSTENBERG: furstenberg.run,
}


def run_scenario(scenario: Scenario) -> ScenarioReport:
  """Run every check of a scenario.

  The seed only drives which elements get sampled; constructions are fully
  deterministic, so equal scenarios give equal reports.
  """
  rng = random.Random(scenario.seed)
  logger.info(
    "scenario_started",
    scenario=str(scenario.name),
    depth=scenario.depth,
    field=scenario.field.label,
  )
  report = RUNNERS[scenario.name](scenario, rng)
  logger.info("scenario_finished", scenario=str(scenario.name), **report.counts())
  return report


__all__ = [
  "RUNNERS",
  "ReportFiles",
  "Scenario",
  "ScenarioName",
  "ScenarioReport",
  "canonical_json",
  "emit_report",
  "merge_reports",
  "report_schema",
  "run_scenario",
]
