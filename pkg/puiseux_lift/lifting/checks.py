"""Instance-level checks of the lifting propositions.

Each check returns a ``CheckReport``; a violation of a theorem-backed check
is a defect in this code, never a counterexample to the mathematics.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import format_rational
from puiseux_lift.core.puiseux import (
  SearchBoundExceededError,
  common_divisors,
  mcds,
  member_finite,
)
from puiseux_lift.core.report import CheckReport
from puiseux_lift.lifting.decomposition import (
  CertificateVerificationError,
  DecodeVerdict,
  canonical_decomposition,
  decode_decomposition,
  decomposition_certificate,
  split_mass,
)
from puiseux_lift.lifting.function import LiftingError
from puiseux_lift.lifting.oracle import Verdict

if TYPE_CHECKING:
  from collections.abc import Callable, Sequence

  from puiseux_lift.lifting.decomposition import CanonicalDecomposition
  from puiseux_lift.lifting.function import LiftedMonoid, LiftingFunction

logger = structlog.get_logger()


class ChainBreakError(LiftingError):
  """Raised when a supplied chain of principal ideals is not properly ascending."""

  def __init__(self, step: int, reason: str) -> None:
    super().__init__(f"Chain breaks at step {step}: {reason}")
    self.step = step
    self.reason = reason


def _base_value(phi: LiftingFunction, cert: MembershipCertificate) -> Fraction:
  return sum(
    (mult * phi.base_generator(position) for position, mult in cert.entries),
    Fraction(0),
  )


def _lifted_value(lifted: LiftedMonoid, cert: MembershipCertificate) -> Fraction:
  depth = max(cert.indices, default=-1) + 1
  return cert.value(lifted.generators(depth))


def check_projection_divisibility(
  lifted: LiftedMonoid,
  b_dec: CanonicalDecomposition,
  c_dec: CanonicalDecomposition,
  difference_cert: MembershipCertificate,
) -> CheckReport:
  """Check both projection laws for a certified divisibility b | c in M_phi.

  Writing c - b = d0 + sum d_s, every M_s-mass b_s + d_s splits as
  m_s * s + c_s, so c0 - b0 = d0 + sum m_s * s. That sum is the part (1)
  certificate; when b_s > c_s the split forces m_s >= 1 and removing one copy
  of s certifies b0 + s | c0, which is part (2).

  Raises:
      CertificateVerificationError: If ``difference_cert`` does not evaluate
          to ``c - b``.
  """
  phi = lifted.phi
  report = CheckReport(
    check_id="lifting.projection_divisibility",
    anchor="divisibility of projections",
    summary=f"{format_rational(b_dec.value)} | {format_rational(c_dec.value)}",
  )
  difference = c_dec.value - b_dec.value
  if _lifted_value(lifted, difference_cert) != difference:
    raise CertificateVerificationError(
      f"Certificate does not evaluate to {format_rational(difference)}"
    )
  d_dec = canonical_decomposition(lifted, difference_cert)
  counts: Counter[int] = Counter(d_dec.x0_cert.as_dict())
  copies: dict[int, int] = {}
  for s_index in sorted({*b_dec.s_indices, *d_dec.s_indices, *c_dec.s_indices}):
    unit = phi.piece_unit(s_index)
    mass = (b_dec.part(s_index) + d_dec.part(s_index)) / unit
    m, rest = split_mass(phi, s_index, int(mass))
    if rest * unit != c_dec.part(s_index):
      report.violate(
        "projection-mismatch",
        s_index=s_index,
        expected=rest * unit,
        found=c_dec.part(s_index),
      )
      continue
    copies[s_index] = m
    counts[phi.s_position(s_index)] += m
  part_one = MembershipCertificate.from_counts(counts)
  if _base_value(phi, part_one) != c_dec.x0 - b_dec.x0:
    report.violate("part-one", b0=b_dec.x0, c0=c_dec.x0, certificate=part_one)
  else:
    report.add_witness(
      condition="part-one",
      b0=b_dec.x0,
      c0=c_dec.x0,
      certificate=part_one.to_json(c_dec.x0 - b_dec.x0, "base"),
    )
  for s_index, m in copies.items():
    if b_dec.part(s_index) <= c_dec.part(s_index):
      continue
    s = phi.s_value(s_index)
    if m < 1:
      report.violate("part-two", s_index=s_index, b_s=b_dec.part(s_index))
      continue
    reduced = Counter(part_one.as_dict())
    reduced[phi.s_position(s_index)] -= 1
    certificate = MembershipCertificate.from_counts(reduced)
    if _base_value(phi, certificate) != c_dec.x0 - b_dec.x0 - s:
      report.violate("part-two", s_index=s_index, certificate=certificate)
    else:
      report.add_witness(
        condition="part-two",
        s_index=s_index,
        certificate=certificate.to_json(c_dec.x0 - b_dec.x0 - s, "base"),
      )
  return report


class AtomClass(StrEnum):
  """Where an element sits in the atom partition of a lifted monoid."""

  ATOM_OF_M_NOT_S = "atom-of-m-not-s"
  ATOM_OF_M_IN_S_AND_MS = "atom-of-m-in-s-and-ms"
  ATOM_OF_MS = "atom-of-ms"
  NOT_ATOM = "not-atom"
  INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class AtomVerdict:
  kind: AtomClass
  split: tuple[Fraction, Fraction] | None = None
  reason: str = ""

  @property
  def is_atom(self) -> bool | None:
    if self.kind is AtomClass.INCONCLUSIVE:
      return None
    return self.kind is not AtomClass.NOT_ATOM


def _numerical_split(
  phi: LiftingFunction, s_index: int, n: int
) -> tuple[Fraction, Fraction]:
  certificate = phi.numerical_certificate(s_index, n)
  if certificate is None:
    raise LiftingError(f"{n} is not in N_s for s-index {s_index}")
  first = phi.numerical_atoms(s_index)[certificate.indices[0]]
  unit = phi.piece_unit(s_index)
  return unit * first, unit * (n - first)


def _s_index_of(phi: LiftingFunction, x: Fraction, depth: int) -> int | None:
  for position, g in enumerate(phi.base_generators(depth)):
    if g == x:
      return phi.effective_s_index(position)
  return None


def classify_atom(lifted: LiftedMonoid, x: Fraction, depth: int) -> AtomVerdict:
  """Place ``x`` in the partition of the atoms of M_phi.

  Atoms of M_phi are the atoms of M outside S, the atoms a of M in S that
  are atoms of M_a, and the atoms of each M_s other than s. Membership of x
  in S is looked up among the first ``depth`` base generators.
  """
  phi = lifted.phi
  value = Fraction(x)
  if value <= 0:
    return AtomVerdict(AtomClass.NOT_ATOM, reason="zero or negative")
  decoded = decode_decomposition(lifted, value, depth)
  if decoded.verdict is DecodeVerdict.CERTIFIED_OUT:
    return AtomVerdict(AtomClass.NOT_ATOM, reason=f"not in M_phi: {decoded.reason}")
  if decoded.decomposition is None:
    return AtomVerdict(AtomClass.INCONCLUSIVE, reason=decoded.reason)
  decomposition = decoded.decomposition
  parts = decomposition.parts
  if len(parts) > 1 or (parts and decomposition.x0 != 0):
    first = parts[0].value
    return AtomVerdict(
      AtomClass.NOT_ATOM, (first, value - first), "several projections"
    )
  if parts:
    part = parts[0]
    n = int(part.value / phi.piece_unit(part.s_index))
    if n in phi.numerical_atoms(part.s_index):
      return AtomVerdict(
        AtomClass.ATOM_OF_MS, reason=f"atom of M_s, s-index {part.s_index}"
      )
    return AtomVerdict(
      AtomClass.NOT_ATOM, _numerical_split(phi, part.s_index, n), "splits in M_s"
    )
  s_index = _s_index_of(phi, value, depth)
  p = None if s_index is None else int(phi.prime(s_index))
  if s_index is not None and p not in phi.numerical_atoms(s_index):
    return AtomVerdict(
      AtomClass.NOT_ATOM, _numerical_split(phi, s_index, int(p or 0)), "s splits in M_s"
    )
  decision = lifted.oracle.is_atom(value, depth)
  if decision.is_atom is None:
    return AtomVerdict(AtomClass.INCONCLUSIVE, reason=decision.reason)
  if not decision.is_atom:
    return AtomVerdict(AtomClass.NOT_ATOM, decision.split, decision.reason)
  if s_index is None:
    return AtomVerdict(AtomClass.ATOM_OF_M_NOT_S, reason=decision.reason)
  return AtomVerdict(AtomClass.ATOM_OF_M_IN_S_AND_MS, reason=decision.reason)


def accp_chain_probe(
  lifted: LiftedMonoid, start: Fraction, steps: Sequence[Fraction], depth: int
) -> CheckReport:
  """Certify that ``start, *steps`` spans a properly ascending chain of ideals.

  Each term must be divisible by the next one: the difference between
  consecutive terms is certified as a nonzero element of M_phi. The report
  also lists every term's M-projection with a certificate that consecutive
  M-projections divide each other in M.

  Raises:
      ChainBreakError: At the first step whose difference is not a certified
          nonzero element.
  """
  terms = [Fraction(start), *(Fraction(t) for t in steps)]
  report = CheckReport(
    check_id="lifting.accp_probe",
    anchor="ACCP and M-projections",
    summary=f"{len(terms) - 1} steps from {format_rational(terms[0])}",
  )
  decompositions: list[CanonicalDecomposition] = []
  for position, term in enumerate(terms):
    decoded = decode_decomposition(lifted, term, depth)
    if decoded.decomposition is None:
      raise ChainBreakError(position, f"term {format_rational(term)}: {decoded.reason}")
    decompositions.append(decoded.decomposition)
  for step, (upper, lower) in enumerate(zip(terms, terms[1:], strict=False), start=1):
    difference = upper - lower
    if difference == 0:
      raise ChainBreakError(step, "zero difference, the chain stabilizes")
    if difference < 0:
      raise ChainBreakError(step, "terms increase, the ideals do not ascend")
    decoded = decode_decomposition(lifted, difference, depth)
    if decoded.decomposition is None:
      raise ChainBreakError(step, f"difference not certified: {decoded.reason}")
    certificate = decomposition_certificate(lifted, decoded.decomposition)
    if _lifted_value(lifted, certificate) != difference:
      raise ChainBreakError(step, "difference certificate does not verify")
    projections = check_projection_divisibility(
      lifted, decompositions[step], decompositions[step - 1], certificate
    )
    if not projections.passed:
      report.violate(
        "projection-not-ascending", step=step, details=projections.witnesses
      )
    report.add_witness(
      condition="step",
      step=step,
      upper=upper,
      lower=lower,
      certificate=certificate.to_json(difference, lifted.label),
      projections=[decompositions[step - 1].x0, decompositions[step].x0],
    )
  logger.debug("accp_probe_done", label=lifted.label, steps=len(terms) - 1)
  return report


def kmcd_transfer_check(
  lifted: LiftedMonoid,
  xs: Sequence[Fraction],
  depth: int,
  improver: Callable[[Fraction], Fraction] | None = None,
  improvement_steps: int = 25,
) -> CheckReport:
  """Check the k-MCD transfer argument on the elements ``xs`` of M.

  Without an improver, common divisors are enumerated in depth-``depth``
  truncations of M and M_phi: the M-projection of every common divisor in
  M_phi must be a common divisor in M, and the two MCD sets are compared.
  With an improver, the improver is iterated from 0 and every step must be a
  strictly larger certified common divisor in M, so none of them is maximal.
  """
  phi = lifted.phi
  values = [Fraction(x) for x in xs]
  report = CheckReport(
    check_id="lifting.kmcd_transfer",
    anchor="k-MCD transfer",
    summary=", ".join(format_rational(x) for x in values),
  )
  for x in values:
    decision = lifted.oracle.member(x, depth)
    if decision.verdict is Verdict.NON_MEMBER:
      raise LiftingError(f"{format_rational(x)} is not an element of M")
    if decision.verdict is Verdict.UNKNOWN:
      report.mark_inconclusive(f"membership of {format_rational(x)} in M", x=x)
      return report
  if improver is not None:
    return _improvement_chain(
      lifted, values, depth, improver, improvement_steps, report
    )
  base = phi.base_generators(depth)
  generators = lifted.generators(depth)
  try:
    base_divisors = common_divisors(base, values)
    base_mcds = mcds(base, values)
    lifted_divisors = common_divisors(generators, values)
    lifted_mcds = mcds(generators, values)
  except SearchBoundExceededError as exc:
    report.mark_inconclusive(str(exc))
    return report
  for d in sorted(lifted_divisors):
    certificate = member_finite(generators, d)
    if certificate is None:
      continue
    projection = canonical_decomposition(lifted, certificate).x0
    if projection not in base_divisors:
      report.violate("projection-not-common-divisor", divisor=d, projection=projection)
  report.add_witness(
    condition="common-divisors",
    base=sorted(base_divisors),
    lifted=sorted(lifted_divisors),
  )
  if base_mcds != lifted_mcds:
    report.mark_inconclusive(
      "MCD sets differ between truncations", base=base_mcds, lifted=lifted_mcds
    )
  else:
    report.add_witness(condition="mcds", mcds=base_mcds)
  return report


def _improvement_chain(
  lifted: LiftedMonoid,
  values: Sequence[Fraction],
  depth: int,
  improver: Callable[[Fraction], Fraction],
  steps: int,
  report: CheckReport,
) -> CheckReport:
  current = Fraction(0)
  chain = [current]
  for step in range(1, steps + 1):
    following = improver(current)
    if following <= current:
      report.violate("not-increasing", step=step, before=current, after=following)
      return report
    for x in values:
      decision = lifted.oracle.member(x - following, depth)
      if decision.verdict is Verdict.NON_MEMBER:
        report.violate("not-common-divisor", step=step, divisor=following, x=x)
        return report
      if decision.verdict is Verdict.UNKNOWN:
        report.mark_inconclusive(decision.reason, step=step, divisor=following, x=x)
        return report
    chain.append(following)
    current = following
  report.add_witness(condition="improvement-chain", length=steps, chain=chain)
  return report
