"""Exact rationals, certified primes and p-adic valuations.

Every other module trusts this one for its arithmetic: rationals are
``fractions.Fraction`` values (always in lowest terms), primes are ``Prime``
integers whose primality was checked at construction, and valuations are
computed exactly from the numerator and denominator.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import TYPE_CHECKING, Annotated, Any

import structlog
from pydantic import BeforeValidator, PlainSerializer, WithJsonSchema
from sympy import isprime, multiplicity, nextprime

from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from collections.abc import Callable, Iterable

logger = structlog.get_logger()

_RATIONAL_PATTERN = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class ExactNumError(Exception):
  """Base error for exact arithmetic failures."""

  pass


class NonPositiveRationalError(ExactNumError, ValueError):
  """Raised when an operation defined on positive rationals gets q <= 0."""

  pass


class ZeroValuationError(ExactNumError, ValueError):
  """Raised when a valuation of zero is requested."""

  pass


class NotPrimeError(ExactNumError, ValueError):
  """Raised when a non-prime integer is passed where a prime is required."""

  pass


class ScanCapExceededError(ExactNumError):
  """Raised when a prime scan examines more candidates than allowed."""

  pass


class Prime(int):
  """An integer whose primality was certified when it was created."""

  __slots__ = ()

  def __new__(cls, value: int) -> Prime:
    if isinstance(value, Prime):
      return value
    if isinstance(value, bool) or not isinstance(value, int):
      raise NotPrimeError(f"Expected an integer, got {value!r}")
    if not isprime(value):
      raise NotPrimeError(f"{value} is not prime")
    return super().__new__(cls, value)

  def __repr__(self) -> str:
    return f"Prime({int(self)})"


def num_den(q: Fraction) -> tuple[int, int]:
  """Return ``(n(q), d(q))`` for a positive rational.

  Args:
      q: A rational strictly greater than zero.

  Returns:
      The coprime numerator and denominator.

  Raises:
      NonPositiveRationalError: If ``q <= 0``.
  """
  if q <= 0:
    raise NonPositiveRationalError(f"num_den needs q > 0, got {format_rational(q)}")
  return q.numerator, q.denominator


def p_adic_valuation(q: Fraction | int, p: int) -> int:
  """Return the exponent of ``p`` in the factorization of ``q``.

  Args:
      q: A nonzero rational.
      p: A prime.

  Returns:
      ``v_p(q)``; nonnegative exactly when ``p`` does not divide ``d(q)``.

  Raises:
      ZeroValuationError: If ``q == 0``.
  """
  value = Fraction(q)
  if value == 0:
    raise ZeroValuationError("The p-adic valuation of 0 is undefined")
  prime = Prime(p)
  return int(multiplicity(prime, abs(value.numerator))) - int(
    multiplicity(prime, value.denominator)
  )


def next_prime_satisfying(
  lower: int,
  predicate: Callable[[Prime], bool],
  cap: int | None = None,
) -> Prime:
  """Return the smallest prime ``p > lower`` with ``predicate(p)`` true.

  Args:
      lower: Exclusive lower bound.
      predicate: Acceptance test applied to each prime in increasing order.
      cap: Maximum number of primes examined; defaults to ``settings.scan_cap``.

  Returns:
      The first accepted prime.

  Raises:
      ScanCapExceededError: If no prime is accepted within the cap.
  """
  limit = settings.scan_cap if cap is None else cap
  candidate = max(lower, 1)
  for _ in range(limit):
    candidate = int(nextprime(candidate))
    prime = Prime(candidate)
    if predicate(prime):
      return prime
  logger.error("prime_scan_exhausted", lower=lower, cap=limit)
  raise ScanCapExceededError(
    f"No prime above {lower} satisfied the predicate within {limit} candidates"
  )


def format_rational(q: Fraction | int) -> str:
  """Serialize a rational as ``"n/d"`` in lowest terms (``"n"`` when d = 1)."""
  value = Fraction(q)
  if value.denominator == 1:
    return str(value.numerator)
  return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
  """Parse the ``"n/d"`` (or ``"n"``) serialization back into a rational.

  Raises:
      ValueError: If the text is not an integer or an integer fraction.
  """
  match = _RATIONAL_PATTERN.match(text)
  if match is None:
    raise ValueError(f"Not a rational of the form 'n/d': {text!r}")
  numerator, denominator = match.groups()
  if denominator is not None and int(denominator) == 0:
    raise ValueError(f"Zero denominator in {text!r}")
  return Fraction(int(numerator), int(denominator or 1))


def _coerce_rational(value: Any) -> Fraction:
  if isinstance(value, Fraction):
    return value
  if isinstance(value, bool):
    raise ValueError("Booleans are not rationals")
  if isinstance(value, int):
    return Fraction(value)
  if isinstance(value, str):
    return parse_rational(value)
  raise ValueError(f"Expected a rational as 'n/d' text, got {value!r}")


RationalStr = Annotated[
  Fraction,
  BeforeValidator(_coerce_rational),
  PlainSerializer(format_rational, return_type=str),
  WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]
"""Pydantic field type: accepts ``"n/d"`` text, serializes back to it."""


def denominator_lcm(values: Iterable[Fraction]) -> int:
  """Return the lcm of the denominators of ``values`` (1 for no values)."""
  return math.lcm(1, *(Fraction(v).denominator for v in values))


def ceil_fraction(q: Fraction) -> int:
  return -((-q.numerator) // q.denominator)


def residue_mod(q: Fraction, p: int) -> int:
  """Return ``q mod p`` for a rational whose denominator is prime to ``p``."""
  return q.numerator * pow(q.denominator, -1, p) % p
