"""Irreducible divisors in F[M_phi] below degree 1/3.

Polynomials of degree below 1/3 are supported on <A>, whose divisor sets
are finite boxes, so every nonunit there has an irreducible divisor even
though F[M_phi] itself is not atomic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.core.report import CheckReport
from puiseux_lift.counterexample.deciders import CounterexampleOracle
from puiseux_lift.counterexample.params import build_default_params
from puiseux_lift.counterexample.tables import MainLiftTables, main_lifting_function
from puiseux_lift.lifting.function import LiftedMonoid
from puiseux_lift.monalg.field import FieldSpec
from puiseux_lift.monalg.polynomial import LiftedAmbient, MonoidPolynomial
from puiseux_lift.monalg.search import a_accp_check, furstenberg_divisor
from puiseux_lift.scenarios.base import ScenarioReport
from puiseux_lift.scenarios.sampling import progress

if TYPE_CHECKING:
  import random

  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.monalg.polynomial import Ambient
  from puiseux_lift.scenarios.base import Scenario

logger = structlog.get_logger()

POLYNOMIALS_PER_FIELD = 50
MAX_TERMS = 3
MAX_COEFFICIENT = 2


def random_a_element(
  params: CounterexampleParams, rng: random.Random, depth: int
) -> Fraction:
  """A nonzero element of <A> using at most two distinct a_k, k <= depth + 1."""
  indices = rng.sample(range(2, depth + 2), k=min(2, depth))
  value = Fraction(0)
  for k in indices[: rng.randint(1, len(indices))]:
    value += rng.randint(1, MAX_COEFFICIENT) * params.a(k)
  return value


def random_polynomial(
  params: CounterexampleParams,
  field_spec: FieldSpec,
  ambient: Ambient,
  rng: random.Random,
  depth: int,
) -> MonoidPolynomial:
  """A random nonunit with exponents in <A>, optionally with a constant term."""
  units = field_spec.units()
  while True:
    pairs = [
      (random_a_element(params, rng, depth), rng.choice(units))
      for _ in range(rng.randint(1, MAX_TERMS))
    ]
    if rng.random() < 0.5:
      pairs.append((Fraction(0), rng.choice(units)))
    g = MonoidPolynomial.from_terms(pairs, field_spec, ambient)
    if not g.is_zero and not g.is_unit:
      return g


def divisor_check(
  params: CounterexampleParams,
  field_spec: FieldSpec,
  ambient: Ambient,
  rng: random.Random,
  depth: int,
) -> CheckReport:
  report = CheckReport(
    check_id=f"monalg.furstenberg_divisor.{field_spec.label}",
    anchor="nonunits below degree 1/3 have irreducible divisors",
    summary=f"{POLYNOMIALS_PER_FIELD} polynomials over {field_spec.label}",
  )
  for _ in progress(range(POLYNOMIALS_PER_FIELD), f"divisors over {field_spec.label}"):
    g = random_polynomial(params, field_spec, ambient, rng, depth)
    result = furstenberg_divisor(g, params, depth)
    if not result.found or result.divisor is None or result.cofactor is None:
      report.mark_inconclusive(result.reason, g=g, steps=result.steps)
      continue
    if result.divisor * result.cofactor != g:
      report.violate(
        "reconstruction", g=g, divisor=result.divisor, cofactor=result.cofactor
      )
      continue
    report.add_witness(
      condition=str(result.verdict),
      g=g,
      divisor=result.divisor,
      cofactor=result.cofactor,
      steps=result.steps,
    )
  return report


def run(scenario: Scenario, rng: random.Random) -> ScenarioReport:
  depth = scenario.depth
  params = build_default_params(scenario.overrides)
  tables = MainLiftTables(params)
  lifted = LiftedMonoid(main_lifting_function(tables), CounterexampleOracle(params))
  ambient = LiftedAmbient(lifted, 3 * depth)

  fields = [FieldSpec.rationals(), FieldSpec.prime_field(3)]
  if scenario.field not in fields:
    fields.append(scenario.field)
  checks = [
    divisor_check(params, field_spec, ambient, rng, depth) for field_spec in fields
  ]
  samples = [random_a_element(params, rng, depth) for _ in range(POLYNOMIALS_PER_FIELD)]
  checks.append(a_accp_check(params, samples))
  logger.debug("furstenberg_done", depth=depth, fields=[f.label for f in fields])
  return ScenarioReport(
    scenario=scenario, parameters=params.to_document(depth), checks=checks
  )
