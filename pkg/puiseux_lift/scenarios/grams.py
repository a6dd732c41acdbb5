"""Grams' monoid <1/(2^n p_n)> realized as the lifting of <1/2^n>.

S is the whole base, pi(1/2^n) is the (n+2)-th prime (3, 5, 7, ...) and
every N_s is N_0, so each M_s = (s / pi(s)) N_0. The result is atomic but
1/2^n + M_phi is an ascending chain that never stabilizes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import structlog
from sympy import prime

from puiseux_lift.core.puiseux import atoms_finite
from puiseux_lift.core.report import CheckReport
from puiseux_lift.lifting.checks import AtomClass, accp_chain_probe, classify_atom
from puiseux_lift.lifting.function import (
  LiftedMonoid,
  LiftingFunction,
  validate_lifting_function,
)
from puiseux_lift.scenarios.base import ScenarioReport
from puiseux_lift.scenarios.dyadic import DyadicOracle, halving_stream
from puiseux_lift.scenarios.sampling import decomposition_uniqueness_check
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  import random

  from puiseux_lift.scenarios.base import Scenario

logger = structlog.get_logger()

SAMPLE_BOUND = Fraction(2)


def grams_prime(index: int) -> int:
  """pi(s_index): 3 for s_1 = 1, then 5, 7, 11, ..."""
  return int(prime(index + 1))


def grams_lifting_function() -> LiftingFunction:
  return LiftingFunction(
    halving_stream(),
    s_position=lambda index: index - 1,
    s_index_at=lambda position: position + 1,
    prime=grams_prime,
    numerical=lambda _index: (1,),
    label="grams",
    increasing_primes=True,
  )


def grams_lifted_monoid() -> LiftedMonoid:
  return LiftedMonoid(grams_lifting_function(), DyadicOracle(lambda exponent: exponent))


def expected_atoms(depth: int) -> frozenset[Fraction]:
  return frozenset(Fraction(1, 2**n * grams_prime(n + 1)) for n in range(depth))


def atoms_check(lifted: LiftedMonoid, depth: int) -> CheckReport:
  """The atoms of the depth truncation are exactly its generators."""
  report = CheckReport(
    check_id="grams.atoms",
    anchor="atoms of Grams' monoid are 1/(2^n p_n)",
    summary=f"depth {depth}",
  )
  found = atoms_finite(lifted.generators(depth))
  expected = expected_atoms(depth)
  if found != expected:
    report.violate("atom-set", found=found, expected=expected)
  else:
    report.add_witness(condition="atoms", count=len(found), atoms=found)
  return report


def classification_check(lifted: LiftedMonoid, depth: int) -> CheckReport:
  """Each 1/(2^n p_n) is an atom of its M_s and each 1/2^n is not an atom."""
  report = CheckReport(
    check_id="grams.classification",
    anchor="atoms of a lifting",
    summary=f"depth {depth}",
  )
  phi = lifted.phi
  for index in phi.realized(depth):
    for value, kind in (
      (phi.piece_unit(index), AtomClass.ATOM_OF_MS),
      (phi.s_value(index), AtomClass.NOT_ATOM),
    ):
      verdict = classify_atom(lifted, value, depth)
      if verdict.kind is AtomClass.INCONCLUSIVE:
        report.mark_inconclusive(verdict.reason, value=value)
      elif verdict.kind is not kind:
        report.violate(
          "misclassified", value=value, expected=str(kind), found=str(verdict.kind)
        )
      else:
        report.add_witness(condition=str(kind), value=value)
  return report


def run(scenario: Scenario, rng: random.Random) -> ScenarioReport:
  depth = scenario.depth
  lifted = grams_lifted_monoid()
  phi = lifted.phi
  steps = [Fraction(1, 2**n) for n in range(1, depth + 1)]
  checks = [
    validate_lifting_function(phi, depth),
    atoms_check(lifted, depth),
    classification_check(lifted, depth),
    accp_chain_probe(lifted, Fraction(1), steps, depth),
    decomposition_uniqueness_check(
      lifted, depth, settings.uniqueness_samples, rng, SAMPLE_BOUND
    ),
  ]
  parameters = {
    "base": "1/2^n",
    "primes": [grams_prime(index) for index in phi.realized(depth)],
    "numerical": "N_0",
  }
  logger.debug("grams_done", depth=depth)
  return ScenarioReport(scenario=scenario, parameters=parameters, checks=checks)
