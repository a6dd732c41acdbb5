"""Randomized sampling checks shared by the scenarios.

Randomness only chooses which elements get checked; every check on a chosen
element is exact.
"""

from __future__ import annotations

import itertools
import math
import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import structlog
from tqdm import tqdm

from puiseux_lift.core.certificate import MembershipCertificate, sum_certificates
from puiseux_lift.core.report import CheckReport, CheckStatus
from puiseux_lift.lifting.checks import check_projection_divisibility
from puiseux_lift.lifting.decomposition import (
  DecodeVerdict,
  canonical_decomposition,
  decode_decomposition,
)

if TYPE_CHECKING:
  import random
  from collections.abc import Iterable, Sequence

  from puiseux_lift.lifting.function import LiftedMonoid

logger = structlog.get_logger()


def progress[T](
  items: Iterable[T], desc: str, total: int | None = None
) -> Iterable[T]:
  """Wrap a sampling loop in a progress bar when stderr is a terminal."""
  return tqdm(
    items, desc=desc, total=total, leave=False, disable=not sys.stderr.isatty()
  )


def random_certificate(
  generators: Sequence[Fraction],
  rng: random.Random,
  bound: Fraction,
  max_terms: int = 4,
) -> MembershipCertificate:
  """A random nonempty sum of generators that stays below ``bound``."""
  counts: Counter[int] = Counter()
  total = Fraction(0)
  for _ in range(rng.randint(1, max_terms)):
    position = rng.randrange(len(generators))
    if total + generators[position] < bound:
      counts[position] += 1
      total += generators[position]
  if not counts:
    counts[min(range(len(generators)), key=generators.__getitem__)] = 1
  return MembershipCertificate.from_counts(counts)


@dataclass(frozen=True)
class Exchange:
  """``left_count`` copies of generator ``left`` equal ``right_count`` of ``right``."""

  left: int
  left_count: int
  right: int
  right_count: int
  value: Fraction


def common_multiple(a: Fraction, b: Fraction) -> Fraction:
  """Least positive rational that is a whole multiple of both a and b."""
  return Fraction(
    math.lcm(a.numerator, b.numerator), math.gcd(a.denominator, b.denominator)
  )


def generator_exchanges(
  generators: Sequence[Fraction], bound: Fraction
) -> list[Exchange]:
  """Relations between pairs of distinct generators whose value is below ``bound``."""
  exchanges: list[Exchange] = []
  for i, j in itertools.combinations(range(len(generators)), 2):
    if generators[i] == generators[j]:
      continue
    value = common_multiple(generators[i], generators[j])
    if value < bound:
      exchanges.append(
        Exchange(i, int(value / generators[i]), j, int(value / generators[j]), value)
      )
  return exchanges


def rewrite_certificate(
  certificate: MembershipCertificate,
  exchanges: Sequence[Exchange],
  rng: random.Random,
) -> MembershipCertificate:
  """Apply one random exchange the certificate has room for.

  The value is unchanged and, when some exchange applies, the entries are not.
  """
  counts = Counter(certificate.as_dict())
  moves = [
    move
    for e in exchanges
    for move in (
      (e.left, e.left_count, e.right, e.right_count),
      (e.right, e.right_count, e.left, e.left_count),
    )
    if counts[move[0]] >= move[1]
  ]
  if not moves:
    return certificate
  source, taken, target, given = rng.choice(moves)
  counts[source] -= taken
  counts[target] += given
  return MembershipCertificate.from_counts(counts)


def exchangeable_certificate(
  generators: Sequence[Fraction],
  exchanges: Sequence[Exchange],
  rng: random.Random,
  bound: Fraction,
) -> MembershipCertificate:
  """A random certificate holding one side of a random exchange, below ``bound``."""
  if not exchanges:
    return random_certificate(generators, rng, bound)
  exchange = rng.choice(exchanges)
  side = (
    MembershipCertificate.single(exchange.left, exchange.left_count)
    if rng.random() < 0.5
    else MembershipCertificate.single(exchange.right, exchange.right_count)
  )
  rest = random_certificate(generators, rng, bound - exchange.value)
  return sum_certificates([side, rest])


def decomposition_uniqueness_check(
  lifted: LiftedMonoid,
  depth: int,
  samples: int,
  rng: random.Random,
  bound: Fraction,
) -> CheckReport:
  """Decompose random elements from two different certificates.

  The first certificate is a random sum of lifted generators holding one side
  of a generator exchange; the second trades a random exchange. Both must
  give the decomposition the decoder finds from the bare value.
  """
  report = CheckReport(
    check_id=f"{lifted.phi.label}.decomposition_uniqueness",
    anchor="unique canonical decomposition",
    summary=f"{samples} samples at depth {depth}",
  )
  generators = lifted.generators(depth)
  exchanges = generator_exchanges(generators, bound)
  agreed = 0
  rewritten = 0
  for _ in progress(range(samples), "decompositions", samples):
    certificate = exchangeable_certificate(generators, exchanges, rng, bound)
    x = certificate.value(generators)
    other = rewrite_certificate(certificate, exchanges, rng)
    if other != certificate:
      rewritten += 1
    first = canonical_decomposition(lifted, certificate, x)
    second = canonical_decomposition(lifted, other, x)
    if first != second:
      report.violate(
        "certificates-disagree",
        x=x,
        certificates=[certificate, other],
        first=first,
        second=second,
      )
      continue
    decoded = decode_decomposition(lifted, x, depth)
    if decoded.verdict is DecodeVerdict.CERTIFIED_OUT:
      report.violate(
        "decoder-rejects-member",
        x=x,
        certificate=certificate,
        reason=decoded.reason,
      )
      continue
    if decoded.decomposition is None:
      report.mark_inconclusive(decoded.reason, x=x)
      continue
    if first != decoded.decomposition:
      report.violate("mismatch", x=x, first=first, decoded=decoded.decomposition)
      continue
    agreed += 1
  report.add_witness(
    condition="agreement", samples=samples, agreed=agreed, rewritten=rewritten
  )
  return report


def projection_divisibility_sampling(
  lifted: LiftedMonoid,
  depth: int,
  samples: int,
  rng: random.Random,
  bound: Fraction,
) -> CheckReport:
  """Check both projection laws on random certified pairs b | b + d."""
  report = CheckReport(
    check_id=f"{lifted.phi.label}.projection_divisibility",
    anchor="divisibility of projections",
    summary=f"{samples} pairs at depth {depth}",
  )
  generators = lifted.generators(depth)
  passed = 0
  part_two = 0
  for _ in progress(range(samples), "divisibility pairs", samples):
    b_cert = random_certificate(generators, rng, bound / 2)
    d_cert = random_certificate(generators, rng, bound / 2)
    b_dec = canonical_decomposition(lifted, b_cert)
    c_dec = canonical_decomposition(lifted, b_cert + d_cert)
    single = check_projection_divisibility(lifted, b_dec, c_dec, d_cert)
    if single.status is CheckStatus.VIOLATION:
      report.violate(
        "projection-laws", b=b_dec.value, c=c_dec.value, details=single.witnesses
      )
      continue
    passed += 1
    part_two += sum(1 for w in single.witnesses if w.get("condition") == "part-two")
  report.add_witness(
    condition="pairs", samples=samples, passed=passed, part_two_cases=part_two
  )
  logger.debug(
    "projection_sampling_done", label=lifted.label, passed=passed, part_two=part_two
  )
  return report
