"""Membership certificates: finite multisets of generator positions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from puiseux_lift.core.exactnum import format_rational

if TYPE_CHECKING:
  from collections.abc import Iterable, Mapping, Sequence


class CertificateError(Exception):
  """Base error for malformed certificates."""

  pass


class InvalidCertificateIndexError(CertificateError, IndexError):
  """Raised when a certificate refers to a generator position that is not there."""

  pass


@dataclass(frozen=True)
class MembershipCertificate:
  """A witness ``x = sum(mult * generators[index])``.

  Positions are 0-based indices into the generator sequence the certificate
  was produced against. Entries are kept sorted by position with strictly
  positive multiplicities, so equal multisets compare equal.
  """

  entries: tuple[tuple[int, int], ...] = field(default=())

  def __post_init__(self) -> None:
    merged: Counter[int] = Counter()
    for index, mult in self.entries:
      if index < 0:
        raise InvalidCertificateIndexError(f"Negative generator index {index}")
      if mult < 0:
        raise CertificateError(f"Negative multiplicity {mult} at index {index}")
      merged[index] += mult
    normalized = tuple(sorted((i, m) for i, m in merged.items() if m > 0))
    object.__setattr__(self, "entries", normalized)

  @classmethod
  def from_counts(cls, counts: Mapping[int, int]) -> MembershipCertificate:
    return cls(tuple(counts.items()))

  @classmethod
  def single(cls, index: int, mult: int = 1) -> MembershipCertificate:
    return cls(((index, mult),))

  @property
  def indices(self) -> tuple[int, ...]:
    return tuple(index for index, _ in self.entries)

  @property
  def length(self) -> int:
    """Number of generators in the witness, counted with multiplicity."""
    return sum(mult for _, mult in self.entries)

  def multiplicity(self, index: int) -> int:
    return dict(self.entries).get(index, 0)

  def as_dict(self) -> dict[int, int]:
    return dict(self.entries)

  def __add__(self, other: MembershipCertificate) -> MembershipCertificate:
    return MembershipCertificate(self.entries + other.entries)

  def scale(self, factor: int) -> MembershipCertificate:
    return MembershipCertificate(tuple((i, m * factor) for i, m in self.entries))

  def remap(self, positions: Mapping[int, int]) -> MembershipCertificate:
    """Rename generator positions, e.g. from a sub-list to its parent list."""
    return MembershipCertificate(tuple((positions[i], m) for i, m in self.entries))

  def value(self, generators: Sequence[Fraction]) -> Fraction:
    """Evaluate the witness against a generator sequence.

    Raises:
        InvalidCertificateIndexError: If a position is out of range.
    """
    total = Fraction(0)
    for index, mult in self.entries:
      if index >= len(generators):
        raise InvalidCertificateIndexError(
          f"Generator index {index} outside {len(generators)} generators"
        )
      total += mult * generators[index]
    return total

  def to_json(self, element: Fraction, monoid: str) -> dict[str, Any]:
    return {
      "element": format_rational(element),
      "entries": [{"index": i, "mult": m} for i, m in self.entries],
      "monoid": monoid,
    }


def sum_certificates(
  certificates: Iterable[MembershipCertificate],
) -> MembershipCertificate:
  total = MembershipCertificate()
  for certificate in certificates:
    total = total + certificate
  return total
