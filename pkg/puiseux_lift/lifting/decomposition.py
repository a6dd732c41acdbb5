"""Canonical decompositions x = x0 + sum of x_s in a lifted monoid.

x0 lies in the base monoid M and each x_s is an M_s-projection: an element
of M_s that s does not divide inside M_s. The decomposition is unique, so
it can be computed from any certificate and checked across certificates.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import structlog
from sympy import primefactors

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import (
  ceil_fraction,
  format_rational,
  p_adic_valuation,
  residue_mod,
)
from puiseux_lift.core.puiseux import SearchBoundExceededError
from puiseux_lift.lifting.function import LiftingError
from puiseux_lift.lifting.oracle import Verdict
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from puiseux_lift.lifting.function import LiftedMonoid, LiftingFunction

logger = structlog.get_logger()


class CertificateVerificationError(LiftingError):
  """Raised when a certificate does not evaluate to the claimed element."""

  pass


class ProjectionPreconditionError(LiftingError):
  """Raised when an element is not an M_s-projection but one is required."""

  pass


@dataclass(frozen=True)
class ProjectionPart:
  s_index: int
  s: Fraction
  value: Fraction


@dataclass(frozen=True)
class CanonicalDecomposition:
  """The unique split of an element into its M-projection and M_s-projections.

  Equality ignores ``x0_cert``: two certificates of the same x0 describe the
  same decomposition.
  """

  x0: Fraction
  parts: tuple[ProjectionPart, ...] = ()
  x0_cert: MembershipCertificate = field(default=MembershipCertificate(), compare=False)

  @property
  def value(self) -> Fraction:
    return self.x0 + sum((part.value for part in self.parts), Fraction(0))

  def part(self, s_index: int) -> Fraction:
    for item in self.parts:
      if item.s_index == s_index:
        return item.value
    return Fraction(0)

  @property
  def s_indices(self) -> tuple[int, ...]:
    return tuple(part.s_index for part in self.parts)

  def to_json(self, monoid: str = "base") -> dict[str, Any]:
    return {
      "x0": format_rational(self.x0),
      "x0_cert": self.x0_cert.to_json(self.x0, monoid),
      "parts": [
        {
          "s_index": part.s_index,
          "s": format_rational(part.s),
          "value": format_rational(part.value),
        }
        for part in self.parts
      ],
    }


def split_mass(phi: LiftingFunction, s_index: int, mass: int) -> tuple[int, int]:
  """Split ``mass`` in N_s as ``m * pi(s) + rest`` with m maximal.

  Returns:
      ``(m, rest)`` where ``rest`` is in N_s and ``rest - pi(s)`` is not.
  """
  p = int(phi.prime(s_index))
  for m in range(mass // p, -1, -1):
    rest = mass - m * p
    if phi.in_numerical(s_index, rest):
      return m, rest
  raise LiftingError(f"{mass} is not in N_s for s-index {s_index}")


def canonical_decomposition(
  lifted: LiftedMonoid,
  cert: MembershipCertificate,
  element: Fraction | None = None,
) -> CanonicalDecomposition:
  """Compute the canonical decomposition of the element certified by ``cert``.

  The certificate mass is grouped by source: base generators outside S go to
  x0 directly; mass in each M_s is split into the largest multiple of s
  (moved to x0) and the remaining projection.

  Args:
      lifted: The lifted monoid the certificate refers to.
      cert: Certificate over lifted generator positions.
      element: When given, the certificate must evaluate to it.

  Raises:
      CertificateVerificationError: If ``element`` is given and differs.
  """
  phi = lifted.phi
  depth = max(cert.indices, default=-1) + 1
  sources = lifted.sources(depth)
  if len(sources) < depth:
    raise CertificateVerificationError(
      f"Certificate refers to position {depth - 1} of {len(sources)} generators"
    )
  if element is not None and cert.value([s.value for s in sources]) != element:
    raise CertificateVerificationError(
      f"Certificate does not evaluate to {format_rational(element)}"
    )
  base_counts: Counter[int] = Counter()
  masses: Counter[int] = Counter()
  for position, mult in cert.entries:
    source = sources[position]
    if source.s_index is None:
      base_counts[source.base_position] += mult
    else:
      masses[source.s_index] += mult * source.multiplier
  parts: list[ProjectionPart] = []
  for s_index in sorted(masses):
    copies, rest = split_mass(phi, s_index, masses[s_index])
    if copies:
      base_counts[phi.s_position(s_index)] += copies
    if rest:
      parts.append(
        ProjectionPart(s_index, phi.s_value(s_index), phi.piece_unit(s_index) * rest)
      )
  x0_cert = MembershipCertificate.from_counts(base_counts)
  x0 = sum(
    (mult * phi.base_generator(position) for position, mult in x0_cert.entries),
    Fraction(0),
  )
  return CanonicalDecomposition(x0, tuple(parts), x0_cert)


class DecodeVerdict(StrEnum):
  DECOMPOSED = "decomposed"
  CERTIFIED_OUT = "certified-out"
  INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DecodeResult:
  verdict: DecodeVerdict
  decomposition: CanonicalDecomposition | None = None
  reason: str = ""

  @property
  def decomposed(self) -> bool:
    return self.verdict is DecodeVerdict.DECOMPOSED


def _least_in_class(
  phi: LiftingFunction, s_index: int, residue: int, bound: int
) -> int | None:
  """Least m in N_s with m = residue (mod pi(s)) and m <= bound."""
  p = int(phi.prime(s_index))
  m = residue
  while m <= bound:
    if phi.in_numerical(s_index, m):
      return m
    m += p
  return None


def decode_decomposition(
  lifted: LiftedMonoid, x: Fraction, search_depth: int
) -> DecodeResult:
  """Find the canonical decomposition of ``x`` without a certificate.

  For each realized s whose prime divides d(x), the projection x_s is forced:
  v_{pi(s)}(x) must be -1 and the multiplier m lies in one residue class
  modulo pi(s), where only the least member of N_s is an M_s-projection.
  The residual x - sum x_s is handed to the base oracle.

  Returns:
      A decomposition, a certified-out verdict backed by a valuation or
      ordering argument, or an inconclusive verdict.
  """
  phi = lifted.phi
  target = Fraction(x)
  if target < 0:
    return DecodeResult(DecodeVerdict.CERTIFIED_OUT, reason="negative")
  if target == 0:
    return DecodeResult(DecodeVerdict.DECOMPOSED, CanonicalDecomposition(Fraction(0)))
  by_prime: dict[int, int] = {}
  for index in phi.realized(search_depth):
    if not phi.is_trivial(index):
      by_prime[int(phi.prime(index))] = index
  realized_top = max(by_prime, default=0)
  parts: list[ProjectionPart] = []
  unresolved: list[int] = []
  for p in sorted(int(q) for q in primefactors(target.denominator)):
    index = by_prime.get(p)
    if index is None:
      if not (phi.increasing_primes and p < realized_top):
        unresolved.append(p)
      continue
    valuation = p_adic_valuation(target, p)
    if valuation < -1:
      return DecodeResult(
        DecodeVerdict.CERTIFIED_OUT,
        reason=f"v_{p}(x) = {valuation} but every element has v_{p} >= -1",
      )
    s = phi.s_value(index)
    bound = ceil_fraction(p * target / s)
    try:
      m = _least_in_class(phi, index, residue_mod(target * p / s, p), bound)
    except SearchBoundExceededError as exc:
      return DecodeResult(DecodeVerdict.INCONCLUSIVE, reason=str(exc))
    if m is None:
      return DecodeResult(
        DecodeVerdict.CERTIFIED_OUT,
        reason=f"no projection at s-index {index} fits below x",
      )
    parts.append(ProjectionPart(index, s, phi.piece_unit(index) * m))
  parts.sort(key=lambda part: part.s_index)
  residual = target - sum((part.value for part in parts), Fraction(0))
  if residual < 0:
    return DecodeResult(
      DecodeVerdict.CERTIFIED_OUT, reason="forced projections exceed x"
    )
  decision = lifted.oracle.member(residual, search_depth)
  if decision.verdict is Verdict.MEMBER and decision.certificate is not None:
    return DecodeResult(
      DecodeVerdict.DECOMPOSED,
      CanonicalDecomposition(residual, tuple(parts), decision.certificate),
    )
  if decision.verdict is Verdict.NON_MEMBER and not unresolved:
    return DecodeResult(
      DecodeVerdict.CERTIFIED_OUT,
      reason=f"M-projection {format_rational(residual)} not in M: {decision.reason}",
    )
  logger.debug(
    "decode_inconclusive", x=format_rational(target), unresolved=unresolved
  )
  return DecodeResult(
    DecodeVerdict.INCONCLUSIVE,
    reason=decision.reason or f"primes {unresolved} beyond search depth",
  )


def decomposition_certificate(
  lifted: LiftedMonoid, decomposition: CanonicalDecomposition
) -> MembershipCertificate:
  """Rewrite a decomposition as a certificate over lifted generator positions.

  Base generators in S are not lifted generators themselves; each copy of
  such an s is written through a certificate of pi(s) in N_s.
  """
  phi = lifted.phi
  counts: Counter[int] = Counter()

  def add_piece(s_index: int, multiplier: int, copies: int) -> None:
    certificate = phi.numerical_certificate(s_index, multiplier)
    if certificate is None:
      raise LiftingError(f"{multiplier} not in N_s for s-index {s_index}")
    base_position = phi.s_position(s_index)
    for offset, mult in certificate.entries:
      counts[lifted.position_of(base_position, offset)] += mult * copies

  for position, mult in decomposition.x0_cert.entries:
    s_index = phi.effective_s_index(position)
    if s_index is None:
      counts[lifted.position_of(position)] += mult
    else:
      add_piece(s_index, int(phi.prime(s_index)), mult)
  for part in decomposition.parts:
    multiplier = part.value / phi.piece_unit(part.s_index)
    add_piece(part.s_index, int(multiplier), 1)
  return MembershipCertificate.from_counts(counts)


def is_ms_projection(phi: LiftingFunction, s_index: int, p: Fraction) -> bool:
  """True iff p lies in M_s and pi(s) does not divide (pi(s)/s) * p in N_s."""
  if p < 0:
    return False
  if p == 0:
    return True
  multiplier = p / phi.piece_unit(s_index)
  if multiplier.denominator != 1:
    return False
  n = multiplier.numerator
  return phi.in_numerical(s_index, n) and not phi.in_numerical(
    s_index, n - int(phi.prime(s_index))
  )


def complementary_projection(
  phi: LiftingFunction, s_index: int, p_s: Fraction
) -> Fraction:
  """Return the unique M_s-projection q_s with p_s + q_s a multiple of s.

  Raises:
      ProjectionPreconditionError: If ``p_s`` is not an M_s-projection.
      SearchBoundExceededError: If no partner is found within the cap.
  """
  if not is_ms_projection(phi, s_index, p_s):
    raise ProjectionPreconditionError(
      f"{format_rational(p_s)} is not an M_s-projection for s-index {s_index}"
    )
  unit = phi.piece_unit(s_index)
  n = int(p_s / unit)
  prime = int(phi.prime(s_index))
  m = (-n) % prime
  for _ in range(settings.enumeration_cap):
    if phi.in_numerical(s_index, m):
      return unit * m
    m += prime
  raise SearchBoundExceededError(f"No complementary projection for s-index {s_index}")
