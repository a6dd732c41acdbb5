"""Membership and atom oracles for the base monoid of a lifting.

Certificates returned by an oracle refer to positions in the base monoid's
generator sequence. A truncation oracle can only prove membership; complete
answers come from oracles that know the structure of the monoid.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Protocol

import structlog

from puiseux_lift.core.puiseux import (
  FiniteGenerators,
  SearchBoundExceededError,
  atoms_finite,
  member_finite,
)

if TYPE_CHECKING:
  from puiseux_lift.core.certificate import MembershipCertificate
  from puiseux_lift.core.puiseux import GeneratorStream

logger = structlog.get_logger()


class Verdict(StrEnum):
  MEMBER = "member"
  NON_MEMBER = "non-member"
  UNKNOWN = "unknown"


@dataclass(frozen=True)
class MembershipDecision:
  verdict: Verdict
  certificate: MembershipCertificate | None = None
  reason: str = ""

  @property
  def is_member(self) -> bool:
    return self.verdict is Verdict.MEMBER


@dataclass(frozen=True)
class AtomDecision:
  """Atom verdict; ``is_atom`` is None when the oracle cannot tell."""

  is_atom: bool | None
  split: tuple[Fraction, Fraction] | None = None
  reason: str = ""


class BaseOracle(Protocol):
  """Decides membership and atom-ness in the base monoid M."""

  def member(self, x: Fraction, depth: int) -> MembershipDecision: ...

  def is_atom(self, x: Fraction, depth: int) -> AtomDecision: ...


class TruncationOracle:
  """Answers from the first ``depth`` generators of the base monoid.

  For a finitely generated base the answers are complete; for a stream a
  failed search only means "unknown".
  """

  def __init__(self, base: FiniteGenerators | GeneratorStream) -> None:
    self.base = base

  @property
  def complete(self) -> bool:
    return isinstance(self.base, FiniteGenerators)

  def _generators(self, depth: int) -> tuple[Fraction, ...]:
    if isinstance(self.base, FiniteGenerators):
      return self.base.generators
    return self.base.take(depth)

  def member(self, x: Fraction, depth: int) -> MembershipDecision:
    if x < 0:
      return MembershipDecision(Verdict.NON_MEMBER, reason="negative")
    try:
      certificate = member_finite(self._generators(depth), x)
    except SearchBoundExceededError as exc:
      logger.debug("truncation_membership_unknown", x=str(x), reason=str(exc))
      return MembershipDecision(Verdict.UNKNOWN, reason=str(exc))
    if certificate is not None:
      return MembershipDecision(Verdict.MEMBER, certificate)
    if self.complete:
      return MembershipDecision(Verdict.NON_MEMBER, reason="finite search exhausted")
    return MembershipDecision(Verdict.UNKNOWN, reason=f"not found in depth {depth}")

  def is_atom(self, x: Fraction, depth: int) -> AtomDecision:
    generators = self._generators(depth)
    smaller = [g for g in generators if g < x]
    try:
      if smaller:
        certificate = member_finite(smaller, x)
        if certificate is not None:
          first = smaller[certificate.indices[0]]
          return AtomDecision(False, (first, x - first), "decomposed in truncation")
      if self.complete:
        return AtomDecision(x in atoms_finite(generators), reason="finite monoid")
    except SearchBoundExceededError as exc:
      return AtomDecision(None, reason=str(exc))
    return AtomDecision(None, reason=f"no decomposition within depth {depth}")
