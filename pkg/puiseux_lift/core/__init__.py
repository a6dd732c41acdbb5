"""Exact arithmetic and the finite Puiseux monoid toolkit."""

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import Prime, format_rational, parse_rational
from puiseux_lift.core.puiseux import FiniteGenerators, GeneratorStream, Truncation

__all__ = [
  "FiniteGenerators",
  "GeneratorStream",
  "MembershipCertificate",
  "Prime",
  "Truncation",
  "format_rational",
  "parse_rational",
]
