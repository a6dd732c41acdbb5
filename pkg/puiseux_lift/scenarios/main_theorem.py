"""The atomic Puiseux monoid whose monoid algebras are not atomic."""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.counterexample.checks import (
  atoms_report,
  claim1_check,
  claim2_check,
  generators_outside_a_check,
  improvement_chain_check,
  inequalities_report,
  unique_factorization_check,
)
from puiseux_lift.counterexample.deciders import CounterexampleOracle
from puiseux_lift.counterexample.params import DEFAULT_CHECK_DEPTH, build_default_params
from puiseux_lift.counterexample.tables import MainLiftTables, main_lifting_function
from puiseux_lift.lifting.function import LiftedMonoid, validate_lifting_function
from puiseux_lift.monalg.field import FieldSpec
from puiseux_lift.monalg.search import binomial_f, bounded_factor_search, descent_chain
from puiseux_lift.scenarios.base import ScenarioReport, merge_reports
from puiseux_lift.scenarios.sampling import (
  decomposition_uniqueness_check,
  projection_divisibility_sampling,
  random_certificate,
)
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  import random

  from puiseux_lift.core.report import CheckReport
  from puiseux_lift.scenarios.base import Scenario

logger = structlog.get_logger()

CLAIM1_SAMPLES = 200
CLAIM2_RANGE = range(2, 11)
IMPROVEMENT_STEPS = 25
DESCENT_LENGTH = 15
FACTORIZATION_DEPTH = 6
SEARCH_DEPTH = 6
ONE_THIRD = Fraction(1, 3)


def descent_fields(scenario_field: FieldSpec) -> list[FieldSpec]:
  fields = [FieldSpec.rationals(), FieldSpec.prime_field(5)]
  if scenario_field not in fields:
    fields.append(scenario_field)
  return fields


def run(scenario: Scenario, rng: random.Random) -> ScenarioReport:
  depth = scenario.depth
  table_depth = max(depth, DEFAULT_CHECK_DEPTH)
  params = build_default_params(scenario.overrides, check_depth=table_depth)
  tables = MainLiftTables(params)
  phi = main_lifting_function(tables)
  lifted = LiftedMonoid(phi, CounterexampleOracle(params))
  log = logger.bind(scenario=str(scenario.name), depth=depth)

  checks: list[CheckReport] = [
    inequalities_report(params, tables, table_depth),
    validate_lifting_function(phi, depth),
    atoms_report(lifted, tables, depth),
  ]
  log.info("construction_checked")

  pool = lifted.generators(3 * depth)
  claim1 = []
  for _ in range(CLAIM1_SAMPLES):
    x = random_certificate(pool, rng, ONE_THIRD).value(pool)
    claim1.append(claim1_check(lifted, params, x, 3 * depth))
  checks.append(
    merge_reports(
      "counterexample.claim1",
      "elements of M_phi up to 1/3 lie in <A>",
      claim1,
      f"{CLAIM1_SAMPLES} sampled elements",
    )
  )
  checks.append(
    merge_reports(
      "counterexample.claim2",
      "2a does not divide b_1 or c_1",
      [claim2_check(params, k) for k in CLAIM2_RANGE],
      f"k = {CLAIM2_RANGE.start}..{CLAIM2_RANGE.stop - 1}",
    )
  )
  checks.append(improvement_chain_check(params, IMPROVEMENT_STEPS))
  checks.extend(
    descent_chain(params, field_spec, DESCENT_LENGTH)
    for field_spec in descent_fields(scenario.field)
  )
  log.info("claims_checked")

  checks.append(
    decomposition_uniqueness_check(
      lifted, depth, settings.uniqueness_samples, rng, Fraction(1)
    )
  )
  checks.append(
    projection_divisibility_sampling(
      lifted, depth, settings.divisibility_samples, rng, Fraction(2)
    )
  )
  checks.append(unique_factorization_check(params, FACTORIZATION_DEPTH))
  checks.append(generators_outside_a_check(params))
  checks.append(bounded_factor_search(binomial_f(params, scenario.field), SEARCH_DEPTH))
  log.info("sampling_checked")

  parameters = params.to_document(depth)
  parameters["lift"] = tables.to_document(depth)
  return ScenarioReport(scenario=scenario, parameters=parameters, checks=checks)
