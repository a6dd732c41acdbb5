"""The main-theorem lifting of M: primes p_n, splits h_n + k_n and atoms H_s, K_s.

S = B u C is enumerated as s_1 = b_1, s_2 = c_1, s_3 = b_2, s_4 = c_2, ...
For each s_n the prime p_n is the least admissible prime above
max(p_{n-1}, ceil(s_n / delta)), and h_n puts H_n = h_n * s_n / p_n within
delta of 1/2 - epsilon (on B) or 1/2 (on C). N_s = <h_n, k_n> with
k_n = p_n - h_n, so H_s + K_s = s.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import structlog

from puiseux_lift.core.exactnum import (
  Prime,
  ceil_fraction,
  format_rational,
  next_prime_satisfying,
  p_adic_valuation,
)
from puiseux_lift.counterexample.deciders import CounterexampleOracle
from puiseux_lift.counterexample.params import (
  InvariantViolationError,
  b_position,
  c_position,
  main_monoid,
)
from puiseux_lift.lifting.function import LiftingFunction, lift_generators

if TYPE_CHECKING:
  from collections.abc import Callable

  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.lifting.function import LiftedMonoid

logger = structlog.get_logger()


def s_position(index: int) -> int:
  """Stream position of s_index in the main monoid."""
  n = (index + 1) // 2
  return b_position(n) if index % 2 == 1 else c_position(n)


def s_index_at(position: int) -> int | None:
  n, kind = divmod(position, 3)
  if kind == 0:
    return 2 * n + 1
  if kind == 1:
    return 2 * n + 2
  return None


class MainLiftTables:
  """Lazily extended tables p_n, h_n, k_n over the s-indices n = 1, 2, ..."""

  def __init__(self, params: CounterexampleParams) -> None:
    self.params = params
    self._primes: list[Prime] = []
    self._splits: list[int] = []
    self._lock = threading.Lock()

  def s(self, n: int) -> Fraction:
    half = (n + 1) // 2
    return self.params.b(half) if n % 2 == 1 else self.params.c(half)

  def in_b(self, n: int) -> bool:
    return n % 2 == 1

  def tau(self, n: int) -> Fraction:
    """Target of H_n: 1/2 - epsilon on B, 1/2 on C."""
    half = Fraction(1, 2)
    return half - self.params.epsilon if self.in_b(n) else half

  def _admissible(self, s: Fraction) -> Callable[[Prime], bool]:
    params = self.params
    excluded = {params.b_prime, params.c_prime}

    def accept(p: Prime) -> bool:
      return (
        p % 2 == 1
        and int(p) not in excluded
        and params.q_index(int(p)) is None
        and p_adic_valuation(s, p) == 0
      )

    return accept

  def _split(self, n: int, p: int) -> int:
    s = self.s(n)
    tau = self.tau(n)
    centre = tau * p / s
    low = max(2, min(p - 2, centre.numerator // centre.denominator))
    candidates = sorted({low, max(2, min(p - 2, low + 1))})
    return min(candidates, key=lambda h: (abs(h * s / p - tau), h))

  def _extend(self, depth: int) -> None:
    with self._lock:
      while len(self._primes) < depth:
        n = len(self._primes) + 1
        s = self.s(n)
        previous = int(self._primes[-1]) if self._primes else 0
        lower = max(previous, ceil_fraction(s / self.params.delta))
        p = next_prime_satisfying(lower, self._admissible(s))
        self._primes.append(p)
        self._splits.append(self._split(n, int(p)))

  def p(self, n: int) -> Prime:
    self._extend(n)
    return self._primes[n - 1]

  def h(self, n: int) -> int:
    self._extend(n)
    return self._splits[n - 1]

  def k(self, n: int) -> int:
    return int(self.p(n)) - self.h(n)

  def h_atom(self, n: int) -> Fraction:
    """H_n = h_n * s_n / p_n."""
    return self.h(n) * self.s(n) / int(self.p(n))

  def k_atom(self, n: int) -> Fraction:
    return self.k(n) * self.s(n) / int(self.p(n))

  def assert_invariants(self, depth: int) -> None:
    """Check every table inequality exactly for n = 1..depth.

    Raises:
        InvariantViolationError: Naming the index and the failing inequality.
    """
    eps = self.params.epsilon
    delta = self.params.delta
    half = Fraction(1, 2)
    excluded = {self.params.b_prime, self.params.c_prime}
    previous = 0
    for n in range(1, depth + 1):
      s, p, h, k = self.s(n), int(self.p(n)), self.h(n), self.k(n)
      big_h, big_k = self.h_atom(n), self.k_atom(n)
      checks: list[tuple[str, bool]] = [
        ("p_n strictly increasing", p > previous),
        ("p_n odd", p % 2 == 1),
        ("p_n spared by M", p not in excluded and self.params.q_index(p) is None),
        ("v_{p_n}(s_n) = 0", p_adic_valuation(s, p) == 0),
        ("s_n / p_n < delta", s / p < delta),
        ("2 <= h_n <= p_n - 2", 2 <= h <= p - 2),
        ("|H_n - tau| < delta", abs(big_h - self.tau(n)) < delta),
        ("H_s + K_s = s", big_h + big_k == s),
        ("min M_s > 1/3", min(big_h, big_k) > Fraction(1, 3)),
      ]
      if self.in_b(n):
        checks += [
          ("|H_s - (1/2 - epsilon)| < epsilon/2", abs(big_h - (half - eps)) < eps / 2),
          ("|K_s - (1/2 + epsilon)| < epsilon/2", abs(big_k - (half + eps)) < eps / 2),
        ]
      else:
        checks += [
          ("|H_s - 1/2| < epsilon/4", abs(big_h - half) < eps / 4),
          ("|K_s - 1/2| < epsilon/4", abs(big_k - half) < eps / 4),
        ]
      for inequality, holds in checks:
        if not holds:
          raise InvariantViolationError(
            inequality, index=n, s=format_rational(s), p=p, h=h, k=k
          )
      previous = p

  def to_document(self, depth: int) -> dict[str, Any]:
    return {
      "p": [int(self.p(n)) for n in range(1, depth + 1)],
      "h": [self.h(n) for n in range(1, depth + 1)],
      "k": [self.k(n) for n in range(1, depth + 1)],
    }


def build_main_lift(params: CounterexampleParams, depth: int) -> MainLiftTables:
  """Build and check the tables for the first ``depth`` s-indices.

  Raises:
      InvariantViolationError: If any inequality fails.
      ScanCapExceededError: If a prime scan runs past its cap.
  """
  tables = MainLiftTables(params)
  tables.assert_invariants(depth)
  logger.debug("main_lift_built", depth=depth, last_prime=int(tables.p(depth)))
  return tables


def main_lifting_function(tables: MainLiftTables) -> LiftingFunction:
  return LiftingFunction(
    main_monoid(tables.params),
    s_position=s_position,
    s_index_at=s_index_at,
    prime=tables.p,
    numerical=lambda n: (tables.h(n), tables.k(n)),
    label="main",
    increasing_primes=True,
  )


def main_lifted_monoid(tables: MainLiftTables, depth: int) -> LiftedMonoid:
  """The lifted monoid M_phi with the complete base oracle for M below 1."""
  return lift_generators(
    main_lifting_function(tables), depth, CounterexampleOracle(tables.params)
  )
