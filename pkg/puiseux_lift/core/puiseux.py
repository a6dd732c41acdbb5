"""Puiseux monoids and the finite decision toolkit.

A Puiseux monoid is given either by a finite generating set or by a lazy,
deterministic generator stream. Complete decisions (membership with
certificates, divisibility, atoms, factorizations, common divisors and MCDs)
are only offered for finitely many generators; stream monoids have to be cut
to an explicit ``Truncation`` first, so a raw stream never answers
"not a member".

Membership is decided in two stages. First, p-adic forcing: when a single
generator g has the strictly smallest negative p-valuation, the coefficient
of g modulo p is forced by the target, which peels g off and replaces it by
p*g. Second, whatever is left is scaled by the lcm of denominators and
handed to an unbounded coin reachability table.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

import networkx as nx
import numpy as np
import structlog
from sympy import primefactors

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import denominator_lcm, p_adic_valuation, residue_mod
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from collections.abc import Callable, Sequence

  from numpy.typing import NDArray

logger = structlog.get_logger()


class PuiseuxError(Exception):
  """Base error for Puiseux monoid operations."""

  pass


class SearchBoundExceededError(PuiseuxError):
  """Raised when an exact search would exceed its configured resource cap."""

  pass


class StreamMembershipError(PuiseuxError):
  """Raised when a complete decision is requested from a raw generator stream."""

  pass


@dataclass(frozen=True)
class FiniteGenerators:
  """A finitely generated Puiseux monoid.

  The generator tuple is stored sorted and duplicate-free.
  """

  generators: tuple[Fraction, ...]
  label: str = "finite"

  def __post_init__(self) -> None:
    values = tuple(sorted({Fraction(g) for g in self.generators}))
    if not values:
      raise PuiseuxError("A monoid needs at least one generator")
    if values[0] <= 0:
      raise PuiseuxError("Generators of a Puiseux monoid must be positive")
    object.__setattr__(self, "generators", values)


class GeneratorStream:
  """A lazily evaluated, memoized generator sequence ``stream[0], stream[1], ...``.

  The rule must be deterministic. Memoization is guarded by a lock so that
  concurrent readers see the same values.
  """

  def __init__(self, rule: Callable[[int], Fraction], label: str) -> None:
    self._rule = rule
    self.label = label
    self._cache: list[Fraction] = []
    self._lock = threading.Lock()

  def __getitem__(self, index: int) -> Fraction:
    if index < 0:
      raise IndexError(f"Stream positions start at 0, got {index}")
    with self._lock:
      while len(self._cache) <= index:
        value = Fraction(self._rule(len(self._cache)))
        if value <= 0:
          raise PuiseuxError(
            f"Stream {self.label} produced non-positive generator at "
            f"{len(self._cache)}"
          )
        self._cache.append(value)
      return self._cache[index]

  def take(self, depth: int) -> tuple[Fraction, ...]:
    if depth <= 0:
      return ()
    self[depth - 1]
    with self._lock:
      return tuple(self._cache[:depth])

  def truncate(self, depth: int) -> Truncation:
    return Truncation(self, depth)

  def __repr__(self) -> str:
    return f"GeneratorStream({self.label!r})"


@dataclass(frozen=True)
class Truncation:
  """The first ``depth`` generators of a stream, in stream order."""

  base: GeneratorStream
  depth: int

  def __post_init__(self) -> None:
    if self.depth <= 0:
      raise PuiseuxError(f"Truncation depth must be positive, got {self.depth}")

  @property
  def generators(self) -> tuple[Fraction, ...]:
    return self.base.take(self.depth)

  @property
  def label(self) -> str:
    return f"{self.base.label}[:{self.depth}]"


type MonoidSpec = FiniteGenerators | GeneratorStream | Truncation


def generators_of(monoid: MonoidSpec) -> tuple[Fraction, ...]:
  """Return the generator sequence certificates of ``monoid`` refer to.

  Raises:
      StreamMembershipError: For a raw stream, which has no finite list.
  """
  if isinstance(monoid, GeneratorStream):
    raise StreamMembershipError(
      f"{monoid.label} is a generator stream; truncate it before deciding"
    )
  return monoid.generators


def verify_certificate(
  monoid: MonoidSpec, x: Fraction, cert: MembershipCertificate
) -> bool:
  """Check that ``cert`` evaluates to ``x`` against the monoid's generators.

  Raises:
      InvalidCertificateIndexError: If the certificate refers past the
          available generators.
  """
  if isinstance(monoid, GeneratorStream):
    depth = max(cert.indices, default=-1) + 1
    generators: Sequence[Fraction] = monoid.take(depth)
  else:
    generators = monoid.generators
  return cert.value(generators) == x


@lru_cache(maxsize=4096)
def _denominator_primes(denominator: int) -> tuple[int, ...]:
  return tuple(int(p) for p in primefactors(denominator))


@dataclass
class _Working:
  value: Fraction
  origin: int
  factor: int = 1


@dataclass
class _ForcedSearch:
  """State of one membership decision."""

  working: list[_Working]
  target: Fraction
  counts: Counter[int] = field(default_factory=Counter)

  def force(self) -> bool | None:
    """Apply one forcing step.

    Returns:
        True when a step was applied, False when nothing can be forced, and
        None when a valuation obstruction proves non-membership.
    """
    primes: set[int] = set()
    for item in self.working:
      primes.update(_denominator_primes(item.value.denominator))
    primes.update(_denominator_primes(self.target.denominator))
    for p in sorted(primes):
      valuations = [p_adic_valuation(item.value, p) for item in self.working]
      lowest = min(valuations)
      if p_adic_valuation(self.target, p) < lowest:
        return None
      if lowest >= 0 or valuations.count(lowest) > 1:
        continue
      chosen = self.working[valuations.index(lowest)]
      scale = Fraction(p) ** -lowest
      inverse = pow(residue_mod(chosen.value * scale, p), -1, p)
      coefficient = (residue_mod(self.target * scale, p) * inverse) % p
      if coefficient * chosen.value > self.target:
        return None
      self.target -= coefficient * chosen.value
      self.counts[chosen.origin] += coefficient * chosen.factor
      chosen.value *= p
      chosen.factor *= p
      return True
    return False


def _reachability(targets: Sequence[int], bound: int) -> NDArray[np.bool_]:
  """Unbounded coin table: ``reach[v]`` iff v is a sum of ``targets``."""
  reach = np.zeros(bound + 1, dtype=bool)
  reach[0] = True
  for step in targets:
    if step > bound:
      continue
    rows = -(-(bound + 1) // step)
    padded = np.zeros(rows * step, dtype=bool)
    padded[: bound + 1] = reach
    grid = padded.reshape(rows, step)
    np.logical_or.accumulate(grid, axis=0, out=grid)
    reach = padded[: bound + 1].copy()
  return reach


def _solve_scaled(search: _ForcedSearch) -> bool:
  values = [item.value for item in search.working]
  scale = denominator_lcm([*values, search.target])
  bound = int(search.target * scale)
  if bound > settings.dp_cap:
    logger.warning("coin_table_too_large", bound=bound, cap=settings.dp_cap)
    raise SearchBoundExceededError(
      f"Scaled target {bound} exceeds the reachability cap {settings.dp_cap}"
    )
  steps = [int(v * scale) for v in values]
  reach = _reachability(steps, bound)
  if not reach[bound]:
    return False
  remaining = bound
  while remaining > 0:
    for index in reversed(range(len(steps))):
      step = steps[index]
      if step <= remaining and reach[remaining - step]:
        item = search.working[index]
        search.counts[item.origin] += item.factor
        remaining -= step
        break
  return True


def member_finite(
  gens: Sequence[Fraction], x: Fraction
) -> MembershipCertificate | None:
  """Decide ``x`` in ``<gens>`` and return a certificate when it is a member.

  Args:
      gens: Positive generators; certificate positions index into this list.
      x: The candidate element.

  Returns:
      A certificate over ``gens`` or None when ``x`` is not in the monoid.

  Raises:
      PuiseuxError: If ``gens`` is empty or has a non-positive entry.
      SearchBoundExceededError: If the residual coin table is too large.
  """
  if not gens:
    raise PuiseuxError("member_finite needs at least one generator")
  if any(g <= 0 for g in gens):
    raise PuiseuxError("Generators must be positive")
  target = Fraction(x)
  if target < 0:
    return None
  search = _ForcedSearch(
    working=[_Working(Fraction(g), i) for i, g in enumerate(gens)], target=target
  )
  while search.target != 0:
    outcome = search.force()
    if outcome is None:
      return None
    if not outcome:
      if not _solve_scaled(search):
        return None
      break
  return MembershipCertificate.from_counts(search.counts)


def divides(
  monoid: MonoidSpec, b: Fraction, c: Fraction
) -> MembershipCertificate | None:
  """Return a certificate for ``c - b`` when ``b`` divides ``c`` in ``monoid``."""
  difference = Fraction(c) - Fraction(b)
  if difference < 0:
    return None
  return member_finite(generators_of(monoid), difference)


def atoms_finite(gens: Sequence[Fraction]) -> frozenset[Fraction]:
  """Return the atoms of ``<gens>``, i.e. its minimal generating set.

  A generator is an atom exactly when it is not a sum of strictly smaller
  generators.
  """
  values = sorted({Fraction(g) for g in gens})
  atoms: set[Fraction] = set()
  for position, value in enumerate(values):
    smaller = values[:position]
    if not smaller or member_finite(smaller, value) is None:
      atoms.add(value)
  return frozenset(atoms)


def factorizations(
  gens: Sequence[Fraction], x: Fraction
) -> list[MembershipCertificate]:
  """Return every factorization of ``x`` into atoms of ``<gens>``.

  Factorizations are listed in lexicographic order of their exponent
  vectors, with atoms ordered by their first position in ``gens``.
  """
  target = Fraction(x)
  if target < 0:
    return []
  atoms = atoms_finite(gens)
  positions: list[int] = []
  for index, g in enumerate(gens):
    if g in atoms and all(gens[i] != g for i in positions):
      positions.append(index)
  atom_values = [Fraction(gens[i]) for i in positions]
  found: list[MembershipCertificate] = []

  def extend(k: int, remaining: Fraction, prefix: list[int]) -> None:
    if remaining == 0:
      exponents = prefix + [0] * (len(atom_values) - k)
      found.append(
        MembershipCertificate.from_counts(dict(zip(positions, exponents, strict=True)))
      )
      if len(found) > settings.enumeration_cap:
        raise SearchBoundExceededError("Too many factorizations to enumerate")
      return
    if k == len(atom_values):
      return
    atom = atom_values[k]
    rest = atom_values[k + 1 :]
    for count in range(int(remaining // atom) + 1):
      left = remaining - count * atom
      if left == 0 or (rest and member_finite(rest, left) is not None):
        extend(k + 1, left, [*prefix, count])

  extend(0, target, [])
  return found


def enumerate_elements(gens: Sequence[Fraction], bound: Fraction) -> list[Fraction]:
  """Return every element of ``<gens>`` in ``[0, bound]``, sorted.

  Raises:
      SearchBoundExceededError: If more than ``settings.enumeration_cap``
          elements lie below the bound.
  """
  values = sorted({Fraction(g) for g in gens})
  seen: set[Fraction] = {Fraction(0)}
  frontier = [Fraction(0)]
  while frontier:
    following: list[Fraction] = []
    for element in frontier:
      for g in values:
        candidate = element + g
        if candidate > bound:
          break
        if candidate not in seen:
          seen.add(candidate)
          following.append(candidate)
      if len(seen) > settings.enumeration_cap:
        raise SearchBoundExceededError(
          f"More than {settings.enumeration_cap} elements below {bound}"
        )
    frontier = following
  return sorted(seen)


def common_divisors(
  gens: Sequence[Fraction], xs: Sequence[Fraction]
) -> frozenset[Fraction]:
  """Return every ``d`` in ``<gens>`` dividing each element of ``xs``."""
  if not xs:
    raise PuiseuxError("common_divisors needs at least one element")
  if any(x < 0 for x in xs):
    raise PuiseuxError("Elements must be nonnegative")
  candidates = enumerate_elements(gens, min(xs))
  return frozenset(
    d for d in candidates if all(member_finite(gens, x - d) is not None for x in xs)
  )


def divisibility_graph(
  gens: Sequence[Fraction], elements: Sequence[Fraction]
) -> nx.DiGraph:
  """Directed graph with an edge ``d -> e`` whenever ``d`` properly divides ``e``."""
  graph = nx.DiGraph()
  ordered = sorted(elements)
  graph.add_nodes_from(ordered)
  for i, low in enumerate(ordered):
    for high in ordered[i + 1 :]:
      if member_finite(gens, high - low) is not None:
        graph.add_edge(low, high)
  return graph


def mcds(gens: Sequence[Fraction], xs: Sequence[Fraction]) -> frozenset[Fraction]:
  """Return the maximal common divisors of ``xs`` in ``<gens>``."""
  graph = divisibility_graph(gens, list(common_divisors(gens, xs)))
  return frozenset(node for node in graph.nodes if graph.out_degree(node) == 0)


def sparing_witness(monoid: MonoidSpec, p: int, depth: int) -> bool:
  """Check ``v_p(g) >= 0`` for the first ``depth`` generators of ``monoid``."""
  if isinstance(monoid, GeneratorStream):
    generators: Sequence[Fraction] = monoid.take(depth)
  else:
    generators = monoid.generators[:depth]
  return all(p_adic_valuation(g, p) >= 0 for g in generators)

