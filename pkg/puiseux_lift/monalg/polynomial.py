"""Sparse polynomial expressions with exponents in a Puiseux monoid.

A polynomial lives in the monoid algebra F[M] of an ambient monoid M: every
exponent carries a membership certificate against the ambient's generator
sequence, and exponent sums in products are certified by adding
certificates.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Protocol

import structlog

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import format_rational
from puiseux_lift.core.puiseux import SearchBoundExceededError, member_finite
from puiseux_lift.lifting.decomposition import (
  DecodeVerdict,
  decode_decomposition,
  decomposition_certificate,
)
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from collections.abc import Iterable, Sequence

  from puiseux_lift.lifting.function import LiftedMonoid
  from puiseux_lift.monalg.field import FieldSpec

logger = structlog.get_logger()


class MonoidAlgebraError(Exception):
  """Base error for monoid algebra arithmetic."""

  pass


class AmbientMismatchError(MonoidAlgebraError):
  """Raised when polynomials over different fields or monoids are combined."""

  pass


class ZeroPolynomialError(MonoidAlgebraError):
  """Raised when ord or deg of the zero polynomial is requested."""

  pass


class OutsideMonoidError(MonoidAlgebraError):
  """Raised when an exponent cannot be certified in the ambient monoid."""

  pass


class UndecidedMembershipError(SearchBoundExceededError):
  """Raised when an ambient can neither certify nor refute an exponent."""

  pass


class Ambient(Protocol):
  """The exponent monoid of an algebra."""

  @property
  def label(self) -> str: ...

  def certify(self, exponent: Fraction) -> MembershipCertificate | None:
    """Certificate of ``exponent`` in the monoid, or None if it is not a member.

    Raises:
        UndecidedMembershipError: If membership is not decided within the
            ambient's search bounds.
    """
    ...

  def generators(self, depth: int) -> tuple[Fraction, ...]: ...


@dataclass(frozen=True)
class FiniteAmbient:
  """A finitely generated exponent monoid; certificates are complete."""

  gens: tuple[Fraction, ...]
  label: str = "finite"

  @classmethod
  def of(
    cls, generators: Sequence[Fraction | int], label: str = "finite"
  ) -> FiniteAmbient:
    return cls(tuple(Fraction(g) for g in generators), label)

  def certify(self, exponent: Fraction) -> MembershipCertificate | None:
    if exponent < 0:
      return None
    if exponent == 0:
      return MembershipCertificate()
    try:
      return member_finite(self.gens, exponent)
    except SearchBoundExceededError as exc:
      raise UndecidedMembershipError(str(exc)) from exc

  def generators(self, depth: int) -> tuple[Fraction, ...]:
    return self.gens[:depth]


@dataclass(frozen=True)
class LiftedAmbient:
  """A lifted monoid M_phi, certified through canonical decompositions."""

  lifted: LiftedMonoid
  depth: int

  @property
  def label(self) -> str:
    return self.lifted.label

  def certify(self, exponent: Fraction) -> MembershipCertificate | None:
    if exponent < 0:
      return None
    decoded = decode_decomposition(self.lifted, exponent, self.depth)
    if decoded.verdict is DecodeVerdict.CERTIFIED_OUT:
      return None
    if decoded.decomposition is None:
      raise UndecidedMembershipError(
        f"{format_rational(exponent)} in {self.label} undecided at depth "
        f"{self.depth}: {decoded.reason}"
      )
    return decomposition_certificate(self.lifted, decoded.decomposition)

  def generators(self, depth: int) -> tuple[Fraction, ...]:
    return self.lifted.generators(depth)


@dataclass(frozen=True)
class Term:
  exponent: Fraction
  coefficient: Fraction
  certificate: MembershipCertificate = dataclasses.field(compare=False)


def _certify(ambient: Ambient, exponent: Fraction) -> MembershipCertificate:
  certificate = ambient.certify(exponent)
  if certificate is None:
    raise OutsideMonoidError(
      f"Exponent {format_rational(exponent)} is not certified in {ambient.label}"
    )
  return certificate


@dataclass(frozen=True)
class MonoidPolynomial:
  """An element sum c_i X^{q_i} of F[M], terms sorted by exponent."""

  terms: tuple[Term, ...]
  field: FieldSpec
  ambient: Ambient = dataclasses.field(compare=False)

  @classmethod
  def from_terms(
    cls,
    pairs: Iterable[tuple[Fraction, Fraction | int]],
    field_spec: FieldSpec,
    ambient: Ambient,
  ) -> MonoidPolynomial:
    """Build a polynomial from ``(exponent, coefficient)`` pairs.

    Repeated exponents are merged and zero coefficients dropped.

    Raises:
        OutsideMonoidError: If an exponent is not in the ambient.
        UndecidedMembershipError: If the ambient cannot decide an exponent.
    """
    merged: dict[Fraction, Fraction] = {}
    for exponent, coefficient in pairs:
      key = Fraction(exponent)
      total = merged.get(key, Fraction(0)) + Fraction(coefficient)
      merged[key] = field_spec.normalize(total)
    terms = tuple(
      Term(e, c, _certify(ambient, e)) for e, c in sorted(merged.items()) if c != 0
    )
    return cls(terms, field_spec, ambient)

  @classmethod
  def monomial(
    cls,
    exponent: Fraction,
    field_spec: FieldSpec,
    ambient: Ambient,
    coefficient: Fraction | int = 1,
  ) -> MonoidPolynomial:
    return cls.from_terms([(exponent, coefficient)], field_spec, ambient)

  @classmethod
  def zero(cls, field_spec: FieldSpec, ambient: Ambient) -> MonoidPolynomial:
    return cls((), field_spec, ambient)

  def _check_compatible(self, other: MonoidPolynomial) -> None:
    if self.field != other.field or self.ambient != other.ambient:
      raise AmbientMismatchError(
        f"Cannot combine {self.field.label}[{self.ambient.label}] with "
        f"{other.field.label}[{other.ambient.label}]"
      )

  def _rebuild(
    self, merged: dict[Fraction, tuple[Fraction, MembershipCertificate]]
  ) -> MonoidPolynomial:
    terms = tuple(
      Term(e, c, cert) for e, (c, cert) in sorted(merged.items()) if c != 0
    )
    return MonoidPolynomial(terms, self.field, self.ambient)

  def add(self, other: MonoidPolynomial) -> MonoidPolynomial:
    self._check_compatible(other)
    merged = {t.exponent: (t.coefficient, t.certificate) for t in self.terms}
    for t in other.terms:
      coefficient, certificate = merged.get(t.exponent, (Fraction(0), t.certificate))
      total = self.field.normalize(coefficient + t.coefficient)
      merged[t.exponent] = (total, certificate)
    return self._rebuild(merged)

  def neg(self) -> MonoidPolynomial:
    return MonoidPolynomial(
      tuple(
        Term(t.exponent, self.field.normalize(-t.coefficient), t.certificate)
        for t in self.terms
      ),
      self.field,
      self.ambient,
    )

  def sub(self, other: MonoidPolynomial) -> MonoidPolynomial:
    return self.add(other.neg())

  def mul(self, other: MonoidPolynomial) -> MonoidPolynomial:
    self._check_compatible(other)
    merged: dict[Fraction, tuple[Fraction, MembershipCertificate]] = {}
    for left in self.terms:
      for right in other.terms:
        exponent = left.exponent + right.exponent
        product = left.coefficient * right.coefficient
        coefficient, certificate = merged.get(
          exponent, (Fraction(0), left.certificate + right.certificate)
        )
        merged[exponent] = (self.field.normalize(coefficient + product), certificate)
    return self._rebuild(merged)

  __add__ = add
  __sub__ = sub
  __mul__ = mul
  __neg__ = neg

  @property
  def is_zero(self) -> bool:
    return not self.terms

  @property
  def is_monomial(self) -> bool:
    return len(self.terms) == 1

  @property
  def is_unit(self) -> bool:
    """Units of F[M] for a reduced M are the nonzero constants."""
    return self.is_monomial and self.terms[0].exponent == 0

  def support(self) -> frozenset[Fraction]:
    return frozenset(t.exponent for t in self.terms)

  def ord(self) -> Fraction:
    if not self.terms:
      raise ZeroPolynomialError("The zero polynomial has no order")
    return self.terms[0].exponent

  def deg(self) -> Fraction:
    if not self.terms:
      raise ZeroPolynomialError("The zero polynomial has no degree")
    return self.terms[-1].exponent

  @property
  def leading(self) -> Term:
    if not self.terms:
      raise ZeroPolynomialError("The zero polynomial has no leading term")
    return self.terms[-1]

  def monomial_divide(self, a: Fraction) -> MonoidPolynomial | None:
    """Return g with self = X^a * g.

    Returns:
        The quotient, or None when some exponent minus ``a`` is certified
        outside the ambient.

    Raises:
        UndecidedMembershipError: If the ambient cannot decide a shifted
            exponent.
    """
    shift = Fraction(a)
    if shift < 0:
      raise MonoidAlgebraError(f"Cannot divide by X^{format_rational(shift)}")
    if shift == 0:
      return self
    terms: list[Term] = []
    for t in self.terms:
      certificate = self.ambient.certify(t.exponent - shift)
      if certificate is None:
        return None
      terms.append(Term(t.exponent - shift, t.coefficient, certificate))
    return MonoidPolynomial(tuple(terms), self.field, self.ambient)

  def divide(
    self, divisor: MonoidPolynomial, step_cap: int | None = None
  ) -> MonoidPolynomial | None:
    """Exact division by leading terms.

    Since M is totally ordered and the coefficients form a field, a quotient
    h with self = divisor * h is unique: each step peels off its leading
    term, whose exponent must lie in M and be at least
    ord self - ord divisor. A step whose exponent is certified outside M
    proves non-divisibility.

    Returns:
        The quotient, or None if ``divisor`` does not divide ``self``.

    Raises:
        ZeroPolynomialError: If ``divisor`` is zero.
        SearchBoundExceededError: If more than ``step_cap`` steps are needed,
            or as UndecidedMembershipError if a step exponent is undecided.
    """
    self._check_compatible(divisor)
    if divisor.is_zero:
      raise ZeroPolynomialError("Division by the zero polynomial")
    cap = settings.division_step_cap if step_cap is None else step_cap
    lead = divisor.leading
    inverse = self.field.inverse(lead.coefficient)
    quotient = MonoidPolynomial.zero(self.field, self.ambient)
    if self.is_zero:
      return quotient
    floor = self.ord() - divisor.ord()
    remainder = self
    for _ in range(cap):
      if remainder.is_zero:
        return quotient
      top = remainder.leading
      shift = top.exponent - lead.exponent
      if shift < floor:
        return None
      certificate = self.ambient.certify(shift)
      if certificate is None:
        return None
      step = MonoidPolynomial(
        (Term(shift, self.field.normalize(top.coefficient * inverse), certificate),),
        self.field,
        self.ambient,
      )
      quotient = quotient.add(step)
      remainder = remainder.sub(divisor.mul(step))
    if remainder.is_zero:
      return quotient
    logger.debug("division_step_cap_reached", cap=cap, divisor=str(divisor))
    raise SearchBoundExceededError(f"Division needs more than {cap} steps")

  def to_json(self) -> list[dict[str, Any]]:
    return [
      {
        "exp": format_rational(t.exponent),
        "coef": self.field.format_coefficient(t.coefficient),
      }
      for t in self.terms
    ]

  def __str__(self) -> str:
    if not self.terms:
      return "0"
    return " + ".join(
      f"{self.field.format_coefficient(t.coefficient)}*X^{format_rational(t.exponent)}"
      for t in self.terms
    )
