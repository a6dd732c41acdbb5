"""The N_0-lifting of the main monoid: strongly atomic but not 2-MCD.

Every generator s of M is lifted with N_s = N_0, which makes s / pi(s) an
atom and s a non-atom. b_1 and c_1 still have no maximal common divisor,
and the lifting inherits that.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.core.exactnum import Prime, next_prime_satisfying, p_adic_valuation
from puiseux_lift.core.report import CheckReport
from puiseux_lift.counterexample.checks import improvement_chain_check
from puiseux_lift.counterexample.deciders import (
  CounterexampleOracle,
  improve_common_divisor,
)
from puiseux_lift.counterexample.params import build_default_params, main_monoid
from puiseux_lift.lifting.checks import AtomClass, classify_atom, kmcd_transfer_check
from puiseux_lift.lifting.function import (
  LiftedMonoid,
  LiftingFunction,
  validate_lifting_function,
)
from puiseux_lift.scenarios.base import ScenarioReport
from puiseux_lift.scenarios.sampling import decomposition_uniqueness_check
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  import random
  from collections.abc import Callable

  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.scenarios.base import Scenario

logger = structlog.get_logger()

IMPROVEMENT_STEPS = 25
SAMPLE_BOUND = Fraction(1)


class SparedPrimes:
  """Increasing odd primes spared by M, with pi(s) not dividing n(s)."""

  def __init__(self, params: CounterexampleParams) -> None:
    self.params = params
    self._stream = main_monoid(params)
    self._primes: list[Prime] = []
    self._lock = threading.Lock()

  def _admissible(self, s: Fraction) -> Callable[[Prime], bool]:
    excluded = {self.params.b_prime, self.params.c_prime}

    def accept(p: Prime) -> bool:
      return (
        p % 2 == 1
        and int(p) not in excluded
        and self.params.q_index(int(p)) is None
        and p_adic_valuation(s, p) == 0
      )

    return accept

  def __call__(self, index: int) -> Prime:
    with self._lock:
      while len(self._primes) < index:
        s = self._stream[len(self._primes)]
        previous = int(self._primes[-1]) if self._primes else 2
        self._primes.append(next_prime_satisfying(previous, self._admissible(s)))
      return self._primes[index - 1]


def strongly_atomic_lifted_monoid(params: CounterexampleParams) -> LiftedMonoid:
  phi = LiftingFunction(
    main_monoid(params),
    s_position=lambda index: index - 1,
    s_index_at=lambda position: position + 1,
    prime=SparedPrimes(params),
    numerical=lambda _index: (1,),
    label="strongly-atomic",
    increasing_primes=True,
  )
  return LiftedMonoid(phi, CounterexampleOracle(params))


def atoms_check(lifted: LiftedMonoid, depth: int) -> CheckReport:
  """s / pi(s) is an atom of M_s and s itself is not an atom."""
  report = CheckReport(
    check_id="strongly_atomic.atoms",
    anchor="s/pi(s) is an atom of the N_0-lifting",
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
        report.add_witness(condition=str(kind), s_index=index, value=value)
  return report


def run(scenario: Scenario, rng: random.Random) -> ScenarioReport:
  depth = scenario.depth
  params = build_default_params(scenario.overrides)
  lifted = strongly_atomic_lifted_monoid(params)
  phi = lifted.phi

  def improver(d: Fraction) -> Fraction:
    return improve_common_divisor(params, d)[0]

  checks = [
    validate_lifting_function(phi, depth),
    atoms_check(lifted, depth),
    improvement_chain_check(params, IMPROVEMENT_STEPS),
    kmcd_transfer_check(
      lifted, [params.b1, params.c1], depth, improver, IMPROVEMENT_STEPS
    ),
    decomposition_uniqueness_check(
      lifted, depth, settings.uniqueness_samples, rng, SAMPLE_BOUND
    ),
  ]
  parameters = params.to_document(depth)
  parameters["primes"] = [int(phi.prime(index)) for index in phi.realized(depth)]
  logger.debug("strongly_atomic_done", depth=depth)
  return ScenarioReport(scenario=scenario, parameters=parameters, checks=checks)
