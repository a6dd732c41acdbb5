"""The lifting construction M -> M_phi and its propositions."""

from puiseux_lift.lifting.checks import (
  AtomClass,
  AtomVerdict,
  ChainBreakError,
  accp_chain_probe,
  check_projection_divisibility,
  classify_atom,
  kmcd_transfer_check,
)
from puiseux_lift.lifting.decomposition import (
  CanonicalDecomposition,
  canonical_decomposition,
  complementary_projection,
  decode_decomposition,
  decomposition_certificate,
  is_ms_projection,
)
from puiseux_lift.lifting.function import (
  LiftedMonoid,
  LiftingError,
  LiftingFunction,
  lift_generators,
  validate_lifting_function,
)
from puiseux_lift.lifting.oracle import BaseOracle, TruncationOracle

__all__ = [
  "AtomClass",
  "AtomVerdict",
  "BaseOracle",
  "CanonicalDecomposition",
  "ChainBreakError",
  "LiftedMonoid",
  "LiftingError",
  "LiftingFunction",
  "TruncationOracle",
  "accp_chain_probe",
  "canonical_decomposition",
  "check_projection_divisibility",
  "classify_atom",
  "complementary_projection",
  "decode_decomposition",
  "decomposition_certificate",
  "is_ms_projection",
  "kmcd_transfer_check",
  "lift_generators",
  "validate_lifting_function",
]
