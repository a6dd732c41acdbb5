"""Lifting functions and the lifted monoid M_phi.

A lifting function attaches to each element s of a subset S of the base
monoid M a prime pi(s) and a numerical monoid N_s containing pi(s). The
lifted monoid is generated by M together with the pieces
``M_s = (s / pi(s)) * N_s``.

S is described by positions in the base generator sequence: s-indices are
1-based (s_1, s_2, ...) and map to 0-based base positions.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import structlog

from puiseux_lift.core.exactnum import Prime, p_adic_valuation
from puiseux_lift.core.puiseux import (
  FiniteGenerators,
  GeneratorStream,
  atoms_finite,
  member_finite,
)
from puiseux_lift.core.report import CheckReport
from puiseux_lift.lifting.oracle import TruncationOracle

if TYPE_CHECKING:
  from collections.abc import Callable, Sequence

  from puiseux_lift.core.certificate import MembershipCertificate
  from puiseux_lift.lifting.oracle import BaseOracle

logger = structlog.get_logger()


class LiftingError(Exception):
  """Base error for the lifting construction."""

  pass


class LiftingValidationError(LiftingError):
  """Raised when a lifting function fails validation at the requested depth."""

  def __init__(self, report: CheckReport) -> None:
    conditions = sorted({str(w.get("condition")) for w in report.witnesses})
    super().__init__(f"Lifting function {report.summary} fails: {conditions}")
    self.report = report


class LiftingFunction:
  """The data (S, pi, N) of a lifting over a base monoid.

  Args:
      base: The monoid M, finite or a generator stream.
      s_position: Maps an s-index (1-based) to its base generator position.
      s_index_at: Inverse of ``s_position``; None for positions outside S.
      prime: Maps an s-index to pi(s).
      numerical: Maps an s-index to generators of N_s.
      label: Human readable name used in reports.
      s_count: Size of S when finite, None when S is infinite.
      increasing_primes: True when pi is strictly increasing in the s-index,
          which lets the decoder rule out primes below the realized range.
  """

  def __init__(
    self,
    base: FiniteGenerators | GeneratorStream,
    *,
    s_position: Callable[[int], int],
    s_index_at: Callable[[int], int | None],
    prime: Callable[[int], int],
    numerical: Callable[[int], Sequence[int]],
    label: str,
    s_count: int | None = None,
    increasing_primes: bool = False,
  ) -> None:
    self.base = base
    self._s_position = s_position
    self._s_index_at = s_index_at
    self._prime = prime
    self._numerical = numerical
    self.label = label
    self.s_count = s_count
    self.increasing_primes = increasing_primes
    self._atoms: dict[int, tuple[int, ...]] = {}
    self._lock = threading.Lock()

  def base_generator(self, position: int) -> Fraction:
    if isinstance(self.base, FiniteGenerators):
      return self.base.generators[position]
    return self.base[position]

  def base_generators(self, depth: int) -> tuple[Fraction, ...]:
    if isinstance(self.base, FiniteGenerators):
      return self.base.generators[:depth]
    return self.base.take(depth)

  def base_size(self) -> int | None:
    if isinstance(self.base, FiniteGenerators):
      return len(self.base.generators)
    return None

  def realized(self, depth: int) -> range:
    """s-indices 1..depth, clipped to the size of S."""
    top = depth if self.s_count is None else min(depth, self.s_count)
    return range(1, top + 1)

  def s_value(self, index: int) -> Fraction:
    return self.base_generator(self._s_position(index))

  def s_position(self, index: int) -> int:
    return self._s_position(index)

  def prime(self, index: int) -> Prime:
    return Prime(self._prime(index))

  def numerical_generators(self, index: int) -> tuple[int, ...]:
    return tuple(int(n) for n in self._numerical(index))

  def numerical_atoms(self, index: int) -> tuple[int, ...]:
    """Minimal generators of N_s, ascending."""
    with self._lock:
      cached = self._atoms.get(index)
    if cached is not None:
      return cached
    generators = [Fraction(n) for n in self.numerical_generators(index) if n > 0]
    atoms = tuple(sorted(int(a) for a in atoms_finite(generators)))
    with self._lock:
      self._atoms[index] = atoms
    return atoms

  def is_trivial(self, index: int) -> bool:
    """True when N_s = pi(s) * N_0; such s are dropped from S."""
    return self.numerical_atoms(index) == (int(self.prime(index)),)

  def effective_s_index(self, position: int) -> int | None:
    """s-index of a base position, or None when outside S or dropped."""
    index = self._s_index_at(position)
    if index is None or self.is_trivial(index):
      return None
    return index

  def numerical_certificate(self, index: int, n: int) -> MembershipCertificate | None:
    """Certificate of n in N_s over ``numerical_atoms(index)``."""
    atoms = [Fraction(a) for a in self.numerical_atoms(index)]
    return member_finite(atoms, Fraction(n))

  def in_numerical(self, index: int, n: int) -> bool:
    if n < 0:
      return False
    return n == 0 or self.numerical_certificate(index, n) is not None

  def piece_unit(self, index: int) -> Fraction:
    """The scale s / pi(s) of M_s."""
    return self.s_value(index) / int(self.prime(index))


@dataclass(frozen=True)
class LiftedGenerator:
  """One generator of M_phi and where it came from.

  ``s_index`` is None for base generators outside S; then ``multiplier`` is 1
  and ``value`` is the base generator itself.
  """

  value: Fraction
  base_position: int
  s_index: int | None
  multiplier: int


class LiftedMonoid:
  """The lifted monoid M_phi with its deduplicated generator stream.

  Generators are produced in diagonal order over (base position, index of
  the minimal generator of N_s), so every generator appears at a finite,
  reproducible position.
  """

  def __init__(self, phi: LiftingFunction, oracle: BaseOracle | None = None) -> None:
    self.phi = phi
    self.oracle: BaseOracle = oracle or TruncationOracle(phi.base)
    self.label = f"{phi.label}-lift"
    self._sources: list[LiftedGenerator] = []
    self._positions: dict[Fraction, int] = {}
    self._diagonal = 0
    self._exhausted = False
    self._lock = threading.Lock()

  def contributions(self, position: int) -> list[LiftedGenerator]:
    """Generators of M_q for the base generator q at ``position``."""
    q = self.phi.base_generator(position)
    index = self.phi.effective_s_index(position)
    if index is None:
      return [LiftedGenerator(q, position, None, 1)]
    unit = self.phi.piece_unit(index)
    return [
      LiftedGenerator(unit * n, position, index, n)
      for n in self.phi.numerical_atoms(index)
    ]

  def _advance(self) -> None:
    """Emit the next diagonal; caller holds the lock."""
    k = self._diagonal
    size = self.phi.base_size()
    emitted_any = False
    for position in range(k + 1):
      if size is not None and position >= size:
        break
      pieces = self.contributions(position)
      offset = k - position
      if offset < len(pieces):
        emitted_any = True
        piece = pieces[offset]
        if piece.value not in self._positions:
          self._positions[piece.value] = len(self._sources)
          self._sources.append(piece)
    self._diagonal += 1
    if size is not None and not emitted_any and k >= size:
      self._exhausted = True

  def _ensure(self, count: int) -> None:
    with self._lock:
      while len(self._sources) < count and not self._exhausted:
        self._advance()

  def _ensure_diagonal(self, diagonal: int) -> None:
    with self._lock:
      while self._diagonal <= diagonal and not self._exhausted:
        self._advance()

  def sources(self, depth: int) -> tuple[LiftedGenerator, ...]:
    self._ensure(depth)
    with self._lock:
      return tuple(self._sources[:depth])

  def source(self, position: int) -> LiftedGenerator:
    sources = self.sources(position + 1)
    if position >= len(sources):
      raise IndexError(f"{self.label} has only {len(sources)} generators")
    return sources[position]

  def generators(self, depth: int) -> tuple[Fraction, ...]:
    return tuple(source.value for source in self.sources(depth))

  def position_of(self, base_position: int, atom_offset: int = 0) -> int:
    """Stream position of the ``atom_offset``-th generator contributed by a base
    position."""
    piece = self.contributions(base_position)[atom_offset]
    self._ensure_diagonal(base_position + atom_offset)
    with self._lock:
      return self._positions[piece.value]

  def position_of_value(self, value: Fraction) -> int | None:
    with self._lock:
      return self._positions.get(value)


def validate_lifting_function(phi: LiftingFunction, depth: int) -> CheckReport:
  """Check the lifting conditions on the first ``depth`` indices.

  Conditions: pi injective; v_{pi(s)}(s) = 0; v_{pi(s)}(g) >= 0 for the first
  ``depth`` base generators; pi(s) in N_s. Elements with N_s = pi(s) * N_0 are
  listed as dropped, not as violations.
  """
  report = CheckReport(
    check_id="lifting.validate",
    anchor="lifting function conditions",
    summary=phi.label,
  )
  generators = phi.base_generators(depth)
  seen: dict[int, int] = {}
  for index in phi.realized(depth):
    s = phi.s_value(index)
    p = phi.prime(index)
    if int(p) in seen:
      report.violate("pi-not-injective", indices=[seen[int(p)], index], prime=int(p))
    else:
      seen[int(p)] = index
    if p_adic_valuation(s, p) != 0:
      report.violate(
        "prime-divides-s", s_index=index, s=s, valuation=p_adic_valuation(s, p)
      )
    for position, g in enumerate(generators):
      if p_adic_valuation(g, p) < 0:
        report.violate(
          "prime-not-spared", s_index=index, prime=int(p), generator_position=position
        )
        break
    if not phi.in_numerical(index, int(p)):
      report.violate("prime-not-in-numerical-monoid", s_index=index, prime=int(p))
    elif phi.is_trivial(index):
      report.add_witness(condition="dropped", s_index=index, prime=int(p))
  logger.debug(
    "lifting_validated", label=phi.label, depth=depth, status=str(report.status)
  )
  return report


def lift_generators(
  phi: LiftingFunction, depth: int, oracle: BaseOracle | None = None
) -> LiftedMonoid:
  """Validate ``phi`` at ``depth`` and build its lifted monoid.

  Raises:
      LiftingValidationError: If any lifting condition fails.
  """
  report = validate_lifting_function(phi, depth)
  if not report.passed:
    raise LiftingValidationError(report)
  return LiftedMonoid(phi, oracle)
