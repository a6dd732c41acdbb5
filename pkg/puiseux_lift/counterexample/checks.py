"""Lemma- and claim-level checks of the main counterexample."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.core.exactnum import format_rational
from puiseux_lift.core.puiseux import (
  SearchBoundExceededError,
  factorizations,
  verify_certificate,
)
from puiseux_lift.core.report import CheckReport
from puiseux_lift.counterexample.deciders import (
  improvement_chain,
  membership_a,
  membership_m,
)
from puiseux_lift.counterexample.params import (
  CounterexampleError,
  InvariantViolationError,
  main_monoid,
)
from puiseux_lift.lifting.checks import AtomClass, classify_atom
from puiseux_lift.lifting.decomposition import (
  DecodeVerdict,
  decode_decomposition,
  decomposition_certificate,
)

if TYPE_CHECKING:
  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.counterexample.tables import MainLiftTables
  from puiseux_lift.lifting.function import LiftedMonoid

logger = structlog.get_logger()


def inequalities_report(
  params: CounterexampleParams, tables: MainLiftTables, depth: int
) -> CheckReport:
  """Re-assert every construction inequality and record the exact constants."""
  report = CheckReport(
    check_id="counterexample.inequalities",
    anchor="construction inequalities",
    summary=f"depth {depth}",
  )
  try:
    params.assert_invariants(depth)
    tables.assert_invariants(depth)
  except InvariantViolationError as exc:
    report.violate(exc.inequality, **exc.context)
    return report
  report.add_witness(
    condition="constants",
    epsilon=params.epsilon,
    tail_bound=params.tail_bound,
    delta=params.delta,
    partial_sum=params.a_sum(depth + 1),
    lower_bound=params.lower_bound,
  )
  report.add_witness(condition="tables", **tables.to_document(depth))
  return report


def claim1_check(
  lifted: LiftedMonoid, params: CounterexampleParams, x: Fraction, depth: int
) -> CheckReport:
  """Check that an element of M_phi at most 1/3 lies in <A>.

  Raises:
      CounterexampleError: If x is outside [0, 1/3].
  """
  value = Fraction(x)
  if not 0 <= value <= Fraction(1, 3):
    raise CounterexampleError(
      f"claim1_check needs 0 <= x <= 1/3, got {format_rational(value)}"
    )
  report = CheckReport(
    check_id="counterexample.claim1",
    anchor="elements of M_phi up to 1/3 lie in <A>",
    summary=format_rational(value),
  )
  decoded = decode_decomposition(lifted, value, depth)
  if decoded.verdict is DecodeVerdict.CERTIFIED_OUT:
    report.add_witness(condition="vacuous", x=value, reason=decoded.reason)
    return report
  if decoded.decomposition is None:
    report.mark_inconclusive(decoded.reason, x=value)
    return report
  certificate = decomposition_certificate(lifted, decoded.decomposition)
  proof = membership_a(params, value)
  if not proof.is_member:
    report.violate(
      "not-in-A",
      x=value,
      lifted_certificate=certificate.to_json(value, lifted.label),
      reason=proof.reason,
    )
  else:
    report.add_witness(
      condition="in-A",
      x=value,
      lifted_certificate=certificate.to_json(value, lifted.label),
      a_certificate=proof.to_json(),
    )
  return report


def claim2_check(params: CounterexampleParams, k: int) -> CheckReport:
  """Check that 2a_k divides neither b_1 nor c_1.

  By the projection divisibility law, 2a_k | b_1 in M_phi would give
  2a_k | b_1 in M, so deciding b_1 - 2a_k in M settles both.
  """
  report = CheckReport(
    check_id="counterexample.claim2",
    anchor="2a does not divide b_1 or c_1",
    summary=f"k = {k}",
  )
  twice = 2 * params.a(k)
  for key, target in (("b1", params.b1), ("c1", params.c1)):
    proof = membership_m(params, target - twice)
    if proof.is_member:
      certificate = proof.certificate.to_json(target - twice, "M")
      report.violate("divides", k=k, target=key, certificate=certificate)
    else:
      report.add_witness(
        condition="not-divisible", k=k, target=key, proof=proof.to_json()
      )
  return report


def atoms_report(
  lifted: LiftedMonoid, tables: MainLiftTables, depth: int
) -> CheckReport:
  """Classify a_2..a_{depth+1}, H_s, K_s and s for the first ``depth`` s-indices."""
  report = CheckReport(
    check_id="counterexample.atoms",
    anchor="atoms of the lifted counterexample",
    summary=f"depth {depth}",
  )
  params = tables.params
  search_depth = 3 * depth + 3
  expected: list[tuple[str, Fraction, AtomClass]] = [
    (f"a{k}", params.a(k), AtomClass.ATOM_OF_M_NOT_S) for k in range(2, depth + 2)
  ]
  for n in range(1, depth + 1):
    expected += [
      (f"H{n}", tables.h_atom(n), AtomClass.ATOM_OF_MS),
      (f"K{n}", tables.k_atom(n), AtomClass.ATOM_OF_MS),
      (f"s{n}", tables.s(n), AtomClass.NOT_ATOM),
    ]
  for name, value, kind in expected:
    verdict = classify_atom(lifted, value, search_depth)
    if verdict.kind is AtomClass.INCONCLUSIVE:
      report.mark_inconclusive(verdict.reason, element=name)
    elif verdict.kind is not kind:
      report.violate(
        "misclassified",
        element=name,
        value=value,
        expected=str(kind),
        found=str(verdict.kind),
      )
    else:
      report.add_witness(
        condition=str(kind),
        element=name,
        value=value,
        split=list(verdict.split) if verdict.split else None,
      )
  logger.debug("atoms_report_done", depth=depth, status=str(report.status))
  return report


def unique_factorization_check(params: CounterexampleParams, depth: int) -> CheckReport:
  """Every sum of distinct a_2..a_depth has exactly one factorization."""
  report = CheckReport(
    check_id="counterexample.unique_factorization",
    anchor="sums of distinct a_k factor uniquely in <A>",
    summary=f"a_2..a_{depth}",
  )
  generators = [params.a(k) for k in range(2, depth + 1)]
  checked = 0
  for size in range(1, len(generators) + 1):
    for subset in itertools.combinations(range(len(generators)), size):
      value = sum((generators[i] for i in subset), Fraction(0))
      try:
        found = factorizations(generators, value)
      except SearchBoundExceededError as exc:
        report.mark_inconclusive(str(exc), indices=[i + 2 for i in subset])
        continue
      checked += 1
      if len(found) != 1:
        indices = [i + 2 for i in subset]
        report.violate("factorization-count", indices=indices, count=len(found))
  report.add_witness(condition="subsets", count=checked)
  return report


def generators_outside_a_check(params: CounterexampleParams) -> CheckReport:
  """b_1 and c_1 are not in <A>, so M is not atomic."""
  report = CheckReport(
    check_id="counterexample.generators_outside_a",
    anchor="b_1 and c_1 are not in <A>",
  )
  for key, value in (("b1", params.b1), ("c1", params.c1)):
    proof = membership_a(params, value)
    if proof.is_member:
      report.violate("in-A", target=key, proof=proof.to_json())
    else:
      report.add_witness(condition="outside-A", target=key, reason=proof.reason)
  return report


def improvement_chain_check(params: CounterexampleParams, steps: int) -> CheckReport:
  """Iterate the MCD improvement from 0 and verify every certificate."""
  report = CheckReport(
    check_id="counterexample.improvement_chain",
    anchor="b_1 and c_1 have no maximal common divisor",
    summary=f"{steps} steps",
  )
  stream = main_monoid(params)
  try:
    chain = improvement_chain(params, steps)
  except CounterexampleError as exc:
    report.violate("improvement-failed", reason=str(exc))
    return report
  previous = Fraction(0)
  for step, (divisor, proofs) in enumerate(chain, start=1):
    if divisor <= previous:
      report.violate("not-increasing", step=step, divisor=divisor)
    for key, target in (("b1", params.b1), ("c1", params.c1)):
      if not verify_certificate(stream, target - divisor, proofs[key].certificate):
        report.violate("certificate", step=step, target=key)
    previous = divisor
  report.add_witness(
    condition="chain",
    length=len(chain),
    divisors=[divisor for divisor, _ in chain],
  )
  return report
