"""Monoid algebras F[M] over the rationals and prime fields."""

from puiseux_lift.monalg.field import FieldSpec
from puiseux_lift.monalg.polynomial import (
  AmbientMismatchError,
  FiniteAmbient,
  LiftedAmbient,
  MonoidAlgebraError,
  MonoidPolynomial,
  OutsideMonoidError,
  UndecidedMembershipError,
  ZeroPolynomialError,
)
from puiseux_lift.monalg.search import (
  DivisorVerdict,
  FurstenbergResult,
  MainMonoidAmbient,
  a_accp_check,
  binomial_f,
  bounded_factor_search,
  descent_chain,
  furstenberg_divisor,
)

__all__ = [
  "AmbientMismatchError",
  "DivisorVerdict",
  "FieldSpec",
  "FiniteAmbient",
  "FurstenbergResult",
  "LiftedAmbient",
  "MainMonoidAmbient",
  "MonoidAlgebraError",
  "MonoidPolynomial",
  "OutsideMonoidError",
  "UndecidedMembershipError",
  "ZeroPolynomialError",
  "a_accp_check",
  "binomial_f",
  "bounded_factor_search",
  "descent_chain",
  "furstenberg_divisor",
]
