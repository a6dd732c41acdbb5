"""Base monoids inside Z[1/2] and their complete deciders.

Both the Grams base <1/2^n> and the antimatter base Z[1/2]_{>=0} are the
whole nonnegative dyadic cone, enumerated in two different orders: x is a
member iff d(x) is a power of two, and nothing is an atom because
x = x/2 + x/2.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import format_rational
from puiseux_lift.core.puiseux import GeneratorStream
from puiseux_lift.lifting.oracle import AtomDecision, MembershipDecision, Verdict

if TYPE_CHECKING:
  from collections.abc import Callable


def is_dyadic(x: Fraction) -> bool:
  denominator = Fraction(x).denominator
  return denominator & (denominator - 1) == 0


def halving_stream() -> GeneratorStream:
  """1, 1/2, 1/4, ...: position n holds 1/2^n."""
  return GeneratorStream(lambda n: Fraction(1, 2**n), "halving")


def _weight_class(weight: int) -> list[Fraction]:
  """Dyadics m/2^e in lowest terms with e + m = weight, by ascending e."""
  members = [Fraction(weight)]
  members += [
    Fraction(weight - e, 2**e) for e in range(1, weight) if (weight - e) % 2 == 1
  ]
  return members


def _weight(x: Fraction) -> int:
  return x.denominator.bit_length() - 1 + x.numerator


def dyadic_at(position: int) -> Fraction:
  """The nonzero dyadic at ``position`` of the weight enumeration.

  The order starts 1, 2, 1/2, 3, 1/4, 4, 3/2, 1/8, ... and visits every
  positive element of Z[1/2] exactly once.
  """
  weight = 1
  remaining = position
  while remaining >= weight // 2 + 1:
    remaining -= weight // 2 + 1
    weight += 1
  return _weight_class(weight)[remaining]


def dyadic_position(x: Fraction) -> int:
  """Inverse of ``dyadic_at`` on positive dyadics.

  Raises:
      ValueError: If x is not a positive dyadic rational.
  """
  value = Fraction(x)
  if value <= 0 or not is_dyadic(value):
    raise ValueError(f"{format_rational(value)} is not a positive dyadic rational")
  weight = _weight(value)
  before = sum(w // 2 + 1 for w in range(1, weight))
  return before + _weight_class(weight).index(value)


def dyadic_stream() -> GeneratorStream:
  return GeneratorStream(dyadic_at, "dyadic")


class DyadicOracle:
  """Complete oracle for the nonnegative dyadic cone.

  A member m/2^e is certified as m copies of 1/2^e; ``unit_position`` maps e
  to the position of 1/2^e in whichever enumeration the base uses.
  """

  def __init__(self, unit_position: Callable[[int], int]) -> None:
    self._unit_position = unit_position

  def member(self, x: Fraction, depth: int) -> MembershipDecision:
    value = Fraction(x)
    if value < 0:
      return MembershipDecision(Verdict.NON_MEMBER, reason="negative")
    if value == 0:
      return MembershipDecision(Verdict.MEMBER, MembershipCertificate())
    if not is_dyadic(value):
      return MembershipDecision(
        Verdict.NON_MEMBER, reason=f"d(x) = {value.denominator} is not a power of 2"
      )
    exponent = value.denominator.bit_length() - 1
    position = self._unit_position(exponent)
    certificate = MembershipCertificate.single(position, value.numerator)
    return MembershipDecision(Verdict.MEMBER, certificate)

  def is_atom(self, x: Fraction, depth: int) -> AtomDecision:
    value = Fraction(x)
    if value <= 0 or not is_dyadic(value):
      return AtomDecision(False, reason="not a nonzero element")
    return AtomDecision(False, (value / 2, value / 2), "x = x/2 + x/2")
