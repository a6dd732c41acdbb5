"""Coefficient fields: the rationals and prime fields F_p.

Coefficients are stored as ``Fraction`` values in both cases; in F_p they are
kept reduced to integers in ``[0, p)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import isprime

from puiseux_lift.core.exactnum import format_rational


class FieldSpec(BaseModel):
  """Either the rationals (``kind="Q"``) or the prime field F_p."""

  model_config = ConfigDict(extra="forbid", frozen=True)

  kind: Literal["Q", "Fp"] = "Q"
  modulus: int | None = None

  @model_validator(mode="after")
  def check_modulus(self) -> Self:
    if self.kind == "Q" and self.modulus is not None:
      raise ValueError("The rationals take no modulus")
    if self.kind == "Fp" and (self.modulus is None or not isprime(self.modulus)):
      raise ValueError(f"A prime field needs a prime modulus, got {self.modulus}")
    return self

  @classmethod
  def rationals(cls) -> FieldSpec:
    return cls(kind="Q")

  @classmethod
  def prime_field(cls, p: int) -> FieldSpec:
    return cls(kind="Fp", modulus=p)

  @classmethod
  def parse(cls, text: str) -> FieldSpec:
    """Parse the command-line syntax ``q`` or ``fp:P``.

    Raises:
        ValueError: If the text is neither form or P is not prime.
    """
    value = text.strip().lower()
    if value == "q":
      return cls.rationals()
    if value.startswith("fp:"):
      try:
        modulus = int(value[3:])
      except ValueError as e:
        raise ValueError(f"Invalid prime field modulus in {text!r}") from e
      return cls.prime_field(modulus)
    raise ValueError(f"Unknown field {text!r}; expected 'q' or 'fp:P'")

  @property
  def label(self) -> str:
    return "Q" if self.kind == "Q" else f"F_{self.modulus}"

  def normalize(self, value: Fraction | int) -> Fraction:
    """Map a rational into the field."""
    q = Fraction(value)
    if self.modulus is None:
      return q
    p = self.modulus
    if q.denominator % p == 0:
      raise ZeroDivisionError(f"{format_rational(q)} has no image in F_{p}")
    return Fraction(q.numerator * pow(q.denominator, -1, p) % p)

  def inverse(self, value: Fraction) -> Fraction:
    if value == 0:
      raise ZeroDivisionError("Zero has no inverse")
    if self.modulus is None:
      return 1 / value
    return Fraction(pow(int(value), -1, self.modulus))

  def units(self) -> tuple[Fraction, ...]:
    """Coefficient choices tried by bounded searches: all units of F_p, +-1 over Q."""
    if self.modulus is None:
      return (Fraction(1), Fraction(-1))
    return tuple(Fraction(c) for c in range(1, self.modulus))

  def format_coefficient(self, value: Fraction) -> str | int:
    if self.modulus is None:
      return format_rational(value)
    return int(value)
