"""Parameters of the monoid M = <A u B u C> behind the main counterexample.

The canonical instantiation: epsilon = 1/16, a_n = 1/q_n where q_n is the
least prime above 2^(n+6), b_1 = 130/131 and c_1 = 136/137. Then
sum_{n>=2} a_n < 2^-7 = 1/128, which is the closed-form tail bound, and
delta is taken as half the admissible minimum.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Annotated, Any

import structlog
from pydantic import BaseModel, ConfigDict, Field
from sympy import isprime, nextprime

from puiseux_lift.core.exactnum import RationalStr, format_rational
from puiseux_lift.core.puiseux import GeneratorStream

if TYPE_CHECKING:
  from puiseux_lift.config import ParamsOverrides

logger = structlog.get_logger()

DEFAULT_EPSILON = Fraction(1, 16)
DEFAULT_Q_OFFSET = 6
DEFAULT_B1 = Fraction(130, 131)
DEFAULT_C1 = Fraction(136, 137)
DEFAULT_CHECK_DEPTH = 20


class CounterexampleError(Exception):
  """Base error for the counterexample construction."""

  pass


class InvariantViolationError(CounterexampleError):
  """Raised when a construction inequality fails; names the inequality."""

  def __init__(self, inequality: str, **context: Any) -> None:
    details = ", ".join(f"{k}={v}" for k, v in context.items())
    super().__init__(f"{inequality} fails" + (f" ({details})" if details else ""))
    self.inequality = inequality
    self.context = context


@lru_cache(maxsize=None)
def least_prime_above_power(exponent: int) -> int:
  """Smallest prime strictly above 2**exponent."""
  return int(nextprime(2**exponent))


@lru_cache(maxsize=None)
def _a_partial_sum(q_offset: int, n: int) -> Fraction:
  """sum_{k=2}^{n} 1/q_k."""
  if n < 2:
    return Fraction(0)
  return _a_partial_sum(q_offset, n - 1) + Fraction(
    1, least_prime_above_power(n + q_offset)
  )


class CounterexampleParams(BaseModel):
  """The exact data epsilon, (a_n), b_1, c_1, tail bound and delta."""

  model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

  epsilon: RationalStr
  q_offset: Annotated[int, Field(ge=1)]
  b1: RationalStr
  c1: RationalStr
  tail_bound: RationalStr
  delta: RationalStr

  def q(self, k: int) -> int:
    """d(a_k), defined for k >= 2."""
    if k < 2:
      raise CounterexampleError(f"a_k starts at k = 2, got {k}")
    return least_prime_above_power(k + self.q_offset)

  def a(self, k: int) -> Fraction:
    return Fraction(1, self.q(k))

  def a_sum(self, n: int) -> Fraction:
    """a_2 + ... + a_n (zero for n < 2)."""
    return _a_partial_sum(self.q_offset, n)

  def b(self, n: int) -> Fraction:
    return self.b1 - self.a_sum(n)

  def c(self, n: int) -> Fraction:
    return self.c1 - self.a_sum(n)

  @property
  def b_prime(self) -> int:
    return self.b1.denominator

  @property
  def c_prime(self) -> int:
    return self.c1.denominator

  def q_index(self, p: int) -> int | None:
    """Return k when p = q_k, decided by the power-of-two window test."""
    if p < 3:
      return None
    exponent = p.bit_length() - 1
    k = exponent - self.q_offset
    if k < 2 or least_prime_above_power(exponent) != p:
      return None
    return k

  @property
  def lower_bound(self) -> Fraction:
    """Rational lower bound L = min(b_1, c_1) - tail_bound of inf(B u C)."""
    return min(self.b1, self.c1) - self.tail_bound

  def q_table(self, depth: int) -> list[int]:
    """[q_2, ..., q_{depth+1}]."""
    return [self.q(k) for k in range(2, depth + 2)]

  def to_document(self, depth: int) -> dict[str, Any]:
    """Canonical JSON document of the construction up to ``depth``."""
    document = self.model_dump(mode="json")
    document["q"] = self.q_table(depth)
    document["b_prime"] = self.b_prime
    document["c_prime"] = self.c_prime
    return document

  def assert_invariants(self, depth: int) -> None:
    """Check every construction inequality exactly on the first ``depth`` terms.

    Raises:
        InvariantViolationError: Naming the first failing inequality.
    """
    eps = self.epsilon
    if not 0 < eps < Fraction(1, 10):
      raise InvariantViolationError("0 < epsilon < 1/10", epsilon=format_rational(eps))
    if self.tail_bound > eps / 8:
      raise InvariantViolationError(
        "tail_bound <= epsilon/8", tail_bound=format_rational(self.tail_bound)
      )
    partial = self.a_sum(depth + 1)
    if not partial < self.tail_bound:
      raise InvariantViolationError(
        "sum a_n < tail_bound", depth=depth, partial=format_rational(partial)
      )
    table = self.q_table(depth)
    if any(low >= high for low, high in zip(table, table[1:], strict=False)):
      raise InvariantViolationError("d(a_n) strictly increasing", q=table)
    for name, value in (("b1", self.b1), ("c1", self.c1)):
      if not 1 - eps / 8 < value < 1:
        raise InvariantViolationError(
          f"1 - epsilon/8 < {name} < 1", value=format_rational(value)
        )
    primes = (self.b_prime, self.c_prime)
    if primes[0] == primes[1] or not all(isprime(p) for p in primes):
      raise InvariantViolationError("d(b1), d(c1) distinct primes", primes=primes)
    if any(self.q_index(p) is not None for p in primes):
      raise InvariantViolationError("d(b1), d(c1) spared by A", primes=primes)
    for n in range(1, depth + 2):
      for name, value in (("b", self.b(n)), ("c", self.c(n))):
        if not 1 - eps / 4 < value < 1:
          raise InvariantViolationError(
            f"1 - epsilon/4 < {name}_n < 1", n=n, value=format_rational(value)
          )
    admissible = min(self.lower_bound - (1 - eps / 4), 1 - max(self.b1, self.c1))
    if not 0 < self.delta < admissible:
      raise InvariantViolationError(
        "0 < delta < min(L - (1 - epsilon/4), 1 - max(b1, c1))",
        delta=format_rational(self.delta),
        bound=format_rational(admissible),
      )


def build_default_params(
  overrides: ParamsOverrides | None = None, *, check_depth: int = DEFAULT_CHECK_DEPTH
) -> CounterexampleParams:
  """Build the canonical parameters, applying ``overrides`` when given.

  Raises:
      InvariantViolationError: If any construction inequality fails.
  """
  epsilon = DEFAULT_EPSILON
  q_offset = DEFAULT_Q_OFFSET
  b1, c1 = DEFAULT_B1, DEFAULT_C1
  if overrides is not None:
    epsilon = overrides.epsilon if overrides.epsilon is not None else epsilon
    q_offset = overrides.q_offset if overrides.q_offset is not None else q_offset
    b1 = overrides.b1 if overrides.b1 is not None else b1
    c1 = overrides.c1 if overrides.c1 is not None else c1
  tail_bound = Fraction(1, 2 ** (q_offset + 1))
  lower = min(b1, c1) - tail_bound
  delta = min(lower - (1 - epsilon / 4), 1 - max(b1, c1)) / 2
  params = CounterexampleParams(
    epsilon=epsilon,
    q_offset=q_offset,
    b1=b1,
    c1=c1,
    tail_bound=tail_bound,
    delta=delta,
  )
  params.assert_invariants(check_depth)
  logger.debug(
    "params_built",
    epsilon=format_rational(epsilon),
    delta=format_rational(delta),
    check_depth=check_depth,
  )
  return params


# The main monoid streams its generators as b_1, c_1, a_2, b_2, c_2, a_3, ...


def b_position(n: int) -> int:
  return 3 * (n - 1)


def c_position(n: int) -> int:
  return 3 * (n - 1) + 1


def a_position(k: int) -> int:
  return 3 * (k - 2) + 2


def describe_position(position: int) -> tuple[str, int]:
  """Return ``("b", n)``, ``("c", n)`` or ``("a", k)`` for a stream position."""
  n, kind = divmod(position, 3)
  if kind == 0:
    return "b", n + 1
  if kind == 1:
    return "c", n + 1
  return "a", n + 2


@lru_cache(maxsize=16)
def main_monoid(params: CounterexampleParams) -> GeneratorStream:
  """The generator stream of M = <A u B u C>."""

  def rule(position: int) -> Fraction:
    kind, index = describe_position(position)
    if kind == "b":
      return params.b(index)
    if kind == "c":
      return params.c(index)
    return params.a(index)

  return GeneratorStream(rule, "M")
