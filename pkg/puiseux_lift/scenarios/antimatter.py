"""A lifting of the antimatter monoid Z[1/2]_{>=0} whose atoms all exceed 1.

Every nonzero dyadic s_n is in S with N_{s_n} = <p_n, p_{n+1}>, so M_{s_n}
is generated by s_n and (p_{n+1} / p_n) s_n. The primes grow fast enough
that p_{n+1} s_n > p_n, which puts every atom of M_phi at or above 1 while
the small dyadics stay decomposable.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.core.exactnum import Prime, next_prime_satisfying, p_adic_valuation
from puiseux_lift.core.report import CheckReport, jsonable
from puiseux_lift.lifting.checks import AtomClass, classify_atom
from puiseux_lift.lifting.function import (
  LiftedMonoid,
  LiftingFunction,
  validate_lifting_function,
)
from puiseux_lift.scenarios.base import ScenarioReport
from puiseux_lift.scenarios.dyadic import (
  DyadicOracle,
  dyadic_at,
  dyadic_position,
  dyadic_stream,
)
from puiseux_lift.scenarios.sampling import decomposition_uniqueness_check
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  import random

  from puiseux_lift.scenarios.base import Scenario

logger = structlog.get_logger()

# Beyond this many s-indices the primes outgrow the numerical-monoid tables.
MAX_DEPTH = 12
SAMPLE_BOUND = Fraction(2)


class AntimatterPrimes:
  """p_1 = 3 and p_{n+1} the least prime above max(p_n, p_n / s_n) sparing s_{n+1}."""

  def __init__(self) -> None:
    self._primes: list[Prime] = [Prime(3)]
    self._lock = threading.Lock()

  def __call__(self, index: int) -> Prime:
    with self._lock:
      while len(self._primes) < index:
        n = len(self._primes)
        previous = int(self._primes[-1])
        ratio = previous / dyadic_at(n - 1)
        following = dyadic_at(n)
        lower = max(previous, ratio.numerator // ratio.denominator)
        prime = next_prime_satisfying(
          lower, lambda p, s=following: p_adic_valuation(s, p) == 0
        )
        self._primes.append(prime)
      return self._primes[index - 1]


def antimatter_lifting_function(
  primes: AntimatterPrimes | None = None,
) -> LiftingFunction:
  table = primes or AntimatterPrimes()
  return LiftingFunction(
    dyadic_stream(),
    s_position=lambda index: index - 1,
    s_index_at=lambda position: position + 1,
    prime=table,
    numerical=lambda index: (int(table(index)), int(table(index + 1))),
    label="antimatter",
    increasing_primes=True,
  )


def antimatter_lifted_monoid() -> LiftedMonoid:
  return LiftedMonoid(
    antimatter_lifting_function(),
    DyadicOracle(lambda exponent: dyadic_position(Fraction(1, 2**exponent))),
  )


def atoms_check(lifted: LiftedMonoid, depth: int) -> CheckReport:
  """(p_{n+1}/p_n) s_n is an atom of M_{s_n} above 1; each s_n is not an atom."""
  report = CheckReport(
    check_id="antimatter.atoms",
    anchor="the lifting of an antimatter monoid",
    summary=f"depth {depth}",
  )
  phi = lifted.phi
  for index in phi.realized(depth):
    s = phi.s_value(index)
    atom = phi.piece_unit(index) * int(phi.prime(index + 1))
    if atom < 1:
      report.violate("atom-below-one", s_index=index, atom=atom)
    for value, kind in ((atom, AtomClass.ATOM_OF_MS), (s, AtomClass.NOT_ATOM)):
      verdict = classify_atom(lifted, value, depth)
      if verdict.kind is AtomClass.INCONCLUSIVE:
        report.mark_inconclusive(verdict.reason, s_index=index, value=value)
      elif verdict.kind is not kind:
        report.violate(
          "misclassified",
          s_index=index,
          value=value,
          expected=str(kind),
          found=str(verdict.kind),
        )
      else:
        report.add_witness(
          condition=str(kind),
          s_index=index,
          value=value,
          split=list(verdict.split) if verdict.split else None,
        )
  return report


def run(scenario: Scenario, rng: random.Random) -> ScenarioReport:
  depth = min(scenario.depth, MAX_DEPTH)
  if depth < scenario.depth:
    logger.warning(
      "depth_clipped",
      scenario="antimatter",
      requested=scenario.depth,
      depth=depth,
    )
  lifted = antimatter_lifted_monoid()
  phi = lifted.phi
  checks = [
    validate_lifting_function(phi, depth),
    atoms_check(lifted, depth),
    decomposition_uniqueness_check(
      lifted, depth, settings.uniqueness_samples, rng, SAMPLE_BOUND
    ),
  ]
  parameters = jsonable({
    "base": "Z[1/2] by weight",
    "depth": depth,
    "s": [phi.s_value(index) for index in phi.realized(depth)],
    "primes": [int(phi.prime(index)) for index in phi.realized(depth + 1)],
  })
  return ScenarioReport(scenario=scenario, parameters=parameters, checks=checks)
