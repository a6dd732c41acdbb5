"""Complete deciders for the monoid M below 1 and the MCD-improvement engine.

Every element of <A> has v_q >= -1 at each q = d(a_k), and below 1 its
coefficient of a_k is smaller than q_k. So the q_k-adic valuations of x force
the whole representation: x is in <A> iff the forced sum is exactly x. An
element of M below 1 uses at most one generator from B u C, and the
d(b_1)- and d(c_1)-valuations tell which family it comes from.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import structlog
from sympy import isprime

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import format_rational, p_adic_valuation, residue_mod
from puiseux_lift.core.puiseux import SearchBoundExceededError, verify_certificate
from puiseux_lift.counterexample.params import (
  CounterexampleError,
  CounterexampleParams,
  a_position,
  b_position,
  c_position,
  main_monoid,
)
from puiseux_lift.lifting.oracle import (
  AtomDecision,
  MembershipDecision,
  TruncationOracle,
  Verdict,
)
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from collections.abc import Mapping, Sequence

logger = structlog.get_logger()


class MembershipKind(StrEnum):
  MEMBER = "member"
  NON_MEMBER = "non-member"
  OUT_OF_SCOPE = "out-of-scope"


@dataclass(frozen=True)
class MembershipProof:
  """A membership verdict with its evidence.

  Members carry the forced coefficients ``(k, c_k)`` of the a_k and at most
  one generator from B u C; non-members carry the obstruction in ``reason``.
  """

  kind: MembershipKind
  coefficients: tuple[tuple[int, int], ...] = ()
  generator: tuple[str, int] | None = None
  reason: str = ""

  @property
  def is_member(self) -> bool:
    return self.kind is MembershipKind.MEMBER

  @property
  def certificate(self) -> MembershipCertificate:
    """Certificate over the positions of the main monoid's generator stream."""
    counts = {a_position(k): c for k, c in self.coefficients}
    if self.generator is not None:
      family, n = self.generator
      position = b_position(n) if family == "b" else c_position(n)
      counts[position] = counts.get(position, 0) + 1
    return MembershipCertificate.from_counts(counts)

  def to_json(self) -> dict[str, Any]:
    return {
      "kind": str(self.kind),
      "coefficients": [{"k": k, "c": c} for k, c in self.coefficients],
      "generator": None
      if self.generator is None
      else f"{self.generator[0]}{self.generator[1]}",
      "reason": self.reason,
    }


def _non_member(reason: str) -> MembershipProof:
  return MembershipProof(MembershipKind.NON_MEMBER, reason=reason)


def q_factorization(
  params: CounterexampleParams, denominator: int
) -> tuple[dict[int, int], int]:
  """Split the q_k factors off ``denominator``.

  Returns:
      The exponent of each q_k present and the cofactor free of all q_k.
  """
  exponents: dict[int, int] = {}
  rest = denominator
  k = 2
  while rest > 1:
    if isprime(rest):
      index = params.q_index(rest)
      if index is not None:
        exponents[index] = exponents.get(index, 0) + 1
        rest = 1
      break
    if 2 ** (k + params.q_offset) >= rest:
      break
    q = params.q(k)
    while rest % q == 0:
      exponents[k] = exponents.get(k, 0) + 1
      rest //= q
    k += 1
  return exponents, rest


def membership_a(params: CounterexampleParams, x: Fraction) -> MembershipProof:
  """Decide x in <A> for 0 <= x < 1 by forcing every coefficient.

  Values at or above 1 are out of scope.
  """
  value = Fraction(x)
  if value < 0:
    return _non_member("negative")
  if value >= 1:
    return MembershipProof(MembershipKind.OUT_OF_SCOPE, reason="x >= 1")
  if value == 0:
    return MembershipProof(MembershipKind.MEMBER)
  exponents, rest = q_factorization(params, value.denominator)
  if rest != 1:
    return _non_member(
      f"d(x) has the factor {rest} prime to every q_k, but d(a) is a product of q_k"
    )
  for k, exponent in sorted(exponents.items()):
    if exponent > 1:
      q = params.q(k)
      return _non_member(
        f"v_{q}(x) = {-exponent} but every element of <A> has v_{q} >= -1"
      )
  coefficients = tuple(
    (k, residue_mod(value * params.q(k), params.q(k))) for k in sorted(exponents)
  )
  remainder = value - sum((c * params.a(k) for k, c in coefficients), Fraction(0))
  if remainder != 0:
    return _non_member(f"forced representation leaves {format_rational(remainder)}")
  return MembershipProof(MembershipKind.MEMBER, coefficients)


def membership_m(params: CounterexampleParams, x: Fraction) -> MembershipProof:
  """Decide x in M for 0 <= x < 1.

  Any two generators from B u C already sum past 1, so a member below 1 is
  y or g + y with y in <A> and a single g in B u C. The family of g is read
  off v_{d(b_1)}(x) and v_{d(c_1)}(x), and only b_n (or c_n) with
  n <= 1 + max{k : q_k | d(x)} need to be tried: a representation through
  b_n whose a_n-coefficient is positive rewrites through b_{n-1}.
  """
  value = Fraction(x)
  if value < 0:
    return _non_member("negative")
  if value >= 1:
    return MembershipProof(MembershipKind.OUT_OF_SCOPE, reason="x >= 1")
  if value == 0:
    return MembershipProof(MembershipKind.MEMBER)
  vb = p_adic_valuation(value, params.b_prime)
  vc = p_adic_valuation(value, params.c_prime)
  if vb >= 0 and vc >= 0:
    return membership_a(params, value)
  if vb < -1 or vc < -1:
    return _non_member(
      f"v_{params.b_prime}(x) = {vb}, v_{params.c_prime}(x) = {vc}; "
      "generators have v >= -1"
    )
  if vb == -1 and vc == -1:
    return _non_member("x would need generators from both B and C, whose sum exceeds 1")
  family = "b" if vb == -1 else "c"
  prime = params.b_prime if family == "b" else params.c_prime
  exponents, _ = q_factorization(params, value.denominator // prime)
  n_max = 1 + max(exponents, default=0)
  for n in range(1, n_max + 1):
    generator = params.b(n) if family == "b" else params.c(n)
    if generator > value:
      continue
    rest = membership_a(params, value - generator)
    if rest.is_member:
      return MembershipProof(MembershipKind.MEMBER, rest.coefficients, (family, n))
  return _non_member(
    f"v_{prime}(x) = -1 but no {family}_n with n <= {n_max} leaves an element of <A>"
  )


class CounterexampleOracle:
  """Base oracle for M: complete below 1, truncation search at and above 1.

  The atoms of M are exactly the a_k, so atom questions are always answered.
  """

  def __init__(self, params: CounterexampleParams) -> None:
    self.params = params
    self.fallback = TruncationOracle(main_monoid(params))

  def member(self, x: Fraction, depth: int) -> MembershipDecision:
    value = Fraction(x)
    if value >= 1:
      return self.fallback.member(value, depth)
    proof = membership_m(self.params, value)
    if proof.is_member:
      return MembershipDecision(Verdict.MEMBER, proof.certificate)
    return MembershipDecision(Verdict.NON_MEMBER, reason=proof.reason)

  def is_atom(self, x: Fraction, depth: int) -> AtomDecision:
    value = Fraction(x)
    if value <= 0:
      return AtomDecision(False, reason="zero or negative")
    if value.numerator == 1 and self.params.q_index(value.denominator) is not None:
      return AtomDecision(True, reason="a_k is an atom of M")
    if value >= 1:
      return AtomDecision(False, reason="every atom of M is some a_k < 1")
    proof = membership_m(self.params, value)
    if not proof.is_member:
      return AtomDecision(False, reason=f"not in M: {proof.reason}")
    if proof.generator is not None:
      family, n = proof.generator
      generator = self.params.b(n) if family == "b" else self.params.c(n)
      if generator == value:
        following = self.params.a(n + 1)
        return AtomDecision(
          False, (value - following, following), "g_n = g_{n+1} + a_{n+1}"
        )
      return AtomDecision(
        False, (generator, value - generator), "generator plus <A> part"
      )
    k = proof.coefficients[0][0]
    a_k = self.params.a(k)
    return AtomDecision(False, (a_k, value - a_k), "sum of a_k")


def _selected_value(params: CounterexampleParams, family: str, n: int) -> Fraction:
  if family == "b":
    return params.b(n)
  if family == "c":
    return params.c(n)
  raise CounterexampleError(f"Unknown generator family {family!r}")


def common_divisor_of_bc_subset(
  params: CounterexampleParams, selection: Sequence[tuple[str, int]]
) -> tuple[Fraction, dict[str, MembershipProof]]:
  """Return a_{m+1}, m the largest selected index, with divisibility proofs.

  Each selected g_n satisfies g_n - a_{m+1} = g_{m+1} + a_{n+1} + ... + a_m,
  which ``membership_m`` certifies.

  Raises:
      CounterexampleError: If the selection is empty or a proof fails.
  """
  if not selection:
    raise CounterexampleError("common_divisor_of_bc_subset needs a nonempty selection")
  m = max(n for _, n in selection)
  divisor = params.a(m + 1)
  proofs: dict[str, MembershipProof] = {}
  for family, n in selection:
    proof = membership_m(params, _selected_value(params, family, n) - divisor)
    if not proof.is_member:
      raise CounterexampleError(
        f"a_{m + 1} does not divide {family}{n}: {proof.reason}"
      )
    proofs[f"{family}{n}"] = proof
  return divisor, proofs


def improve_common_divisor(
  params: CounterexampleParams,
  d: Fraction,
  certificates: Mapping[str, MembershipCertificate] | None = None,
) -> tuple[Fraction, dict[str, MembershipProof]]:
  """Return a common divisor of b_1 and c_1 strictly larger than ``d``.

  ``d`` lies in <A> (every common divisor does), b_1 - d is g' + y with g' in
  B and c_1 - d is g'' + z with g'' in C. A common divisor d'' of g' and g''
  from A then makes d + d'' a larger common divisor.

  Args:
      params: The construction.
      d: A common divisor of b_1 and c_1 in M.
      certificates: Optional certificates of ``b1 - d`` and ``c1 - d`` keyed
          by ``"b1"`` and ``"c1"``; they are verified when given.

  Raises:
      CounterexampleError: If any step cannot be certified.
  """
  value = Fraction(d)
  stream = main_monoid(params)
  targets = {"b1": params.b1, "c1": params.c1}
  for key, certificate in (certificates or {}).items():
    if not verify_certificate(stream, targets[key] - value, certificate):
      raise CounterexampleError(f"Certificate for {key} - d does not verify")
  if not membership_a(params, value).is_member:
    raise CounterexampleError(f"{format_rational(value)} is not in <A>")
  selection: list[tuple[str, int]] = []
  for key, target in targets.items():
    proof = membership_m(params, target - value)
    if not proof.is_member or proof.generator is None:
      raise CounterexampleError(f"{format_rational(value)} does not divide {key}")
    selection.append(proof.generator)
  extra, _ = common_divisor_of_bc_subset(params, selection)
  improved = value + extra
  proofs: dict[str, MembershipProof] = {}
  for key, target in targets.items():
    proof = membership_m(params, target - improved)
    if not proof.is_member:
      raise CounterexampleError(f"{format_rational(improved)} does not divide {key}")
    proofs[key] = proof
  logger.debug(
    "common_divisor_improved",
    before=format_rational(value),
    after=format_rational(improved),
  )
  return improved, proofs


def improvement_chain(
  params: CounterexampleParams, steps: int
) -> list[tuple[Fraction, dict[str, MembershipProof]]]:
  """Iterate ``improve_common_divisor`` from 0 for ``steps`` steps."""
  chain: list[tuple[Fraction, dict[str, MembershipProof]]] = []
  current = Fraction(0)
  certificates: dict[str, MembershipCertificate] | None = None
  for _ in range(steps):
    current, proofs = improve_common_divisor(params, current, certificates)
    certificates = {key: proof.certificate for key, proof in proofs.items()}
    chain.append((current, proofs))
  return chain


def a_divisors(params: CounterexampleParams, x: Fraction) -> list[Fraction]:
  """Every divisor of x in <A>, for x in <A> below 1, ascending.

  Coefficients of x are below their q_k, so a divisor and its cofactor add
  coefficientwise without carries: the divisors form the box of
  sub-multisets of the forced representation.

  Raises:
      CounterexampleError: If x is not an element of <A> below 1.
      SearchBoundExceededError: If the box has more than
          ``settings.enumeration_cap`` points.
  """
  proof = membership_a(params, x)
  if not proof.is_member:
    raise CounterexampleError(f"{format_rational(x)} is not an element of <A> below 1")
  size = 1
  for _, c in proof.coefficients:
    size *= c + 1
  if size > settings.enumeration_cap:
    raise SearchBoundExceededError(f"{size} divisors exceed the enumeration cap")
  ranges = [range(c + 1) for _, c in proof.coefficients]
  divisors = {
    sum(
      (
        e * params.a(k)
        for (k, _), e in zip(proof.coefficients, exponents, strict=True)
      ),
      Fraction(0),
    )
    for exponents in itertools.product(*ranges)
  }
  return sorted(divisors)
