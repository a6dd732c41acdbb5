"""Unit tests for liftings, canonical decompositions and the lifting checks."""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.report import CheckStatus
from puiseux_lift.lifting.checks import (
  AtomClass,
  ChainBreakError,
  accp_chain_probe,
  check_projection_divisibility,
  classify_atom,
  kmcd_transfer_check,
)
from puiseux_lift.lifting.decomposition import (
  CanonicalDecomposition,
  CertificateVerificationError,
  DecodeVerdict,
  ProjectionPart,
  ProjectionPreconditionError,
  canonical_decomposition,
  complementary_projection,
  decode_decomposition,
  decomposition_certificate,
  is_ms_projection,
  split_mass,
)
from puiseux_lift.lifting.function import (
  LiftedMonoid,
  LiftingFunction,
  LiftingValidationError,
  lift_generators,
  validate_lifting_function,
)
from puiseux_lift.scenarios.dyadic import DyadicOracle, halving_stream
from puiseux_lift.scenarios.grams import grams_prime

if TYPE_CHECKING:
  from collections.abc import Callable, Sequence


def halving_lift(
  prime: Callable[[int], int], numerical: Callable[[int], Sequence[int]]
) -> LiftingFunction:
  return LiftingFunction(
    halving_stream(),
    s_position=lambda index: index - 1,
    s_index_at=lambda position: position + 1,
    prime=prime,
    numerical=numerical,
    label="test",
  )


class TestLiftingFunction:
  """Test validation and the lifted generator stream."""

  def test_grams_generators(self, grams: LiftedMonoid) -> None:
    """Test that the Grams lifting starts 1/3, 1/10, 1/28."""
    assert grams.generators(3) == (Fraction(1, 3), Fraction(1, 10), Fraction(1, 28))
    source = grams.source(1)
    assert source.s_index == 2
    assert source.base_position == 1
    assert source.multiplier == 1

  def test_grams_validates(self, grams: LiftedMonoid) -> None:
    """Test that the Grams data satisfies every lifting condition."""
    report = validate_lifting_function(grams.phi, 8)
    assert report.status is CheckStatus.OK
    assert report.witnesses == []

  def test_prime_dividing_base(self) -> None:
    """Test that pi(s) = 2 over dyadic generators is rejected."""
    phi = halving_lift(lambda _index: 2, lambda _index: (1,))
    report = validate_lifting_function(phi, 3)
    conditions = {w["condition"] for w in report.witnesses}
    assert report.status is CheckStatus.VIOLATION
    assert {"pi-not-injective", "prime-divides-s", "prime-not-spared"} <= conditions
    with pytest.raises(LiftingValidationError, match="prime-not-spared"):
      lift_generators(phi, 3)

  def test_prime_outside_numerical_monoid(self) -> None:
    """Test that pi(s) must lie in N_s."""
    phi = halving_lift(grams_prime, lambda _index: (2,))
    report = validate_lifting_function(phi, 2)
    conditions = [w["condition"] for w in report.witnesses]
    assert conditions == ["prime-not-in-numerical-monoid"] * 2

  def test_trivial_numerical_monoid_is_dropped(self) -> None:
    """Test that N_s = pi(s) N_0 leaves the base generator in place."""
    phi = halving_lift(grams_prime, lambda index: (grams_prime(index),))
    report = validate_lifting_function(phi, 3)
    assert report.passed
    assert [w["condition"] for w in report.witnesses] == ["dropped"] * 3
    lifted = LiftedMonoid(phi, DyadicOracle(lambda exponent: exponent))
    assert lifted.generators(3) == (Fraction(1), Fraction(1, 2), Fraction(1, 4))

  def test_numerical_atoms(self) -> None:
    """Test minimal generators of N_s."""
    phi = halving_lift(grams_prime, lambda _index: (4, 6, 10, 3))
    assert phi.numerical_atoms(1) == (3, 4)
    assert phi.in_numerical(1, 7)
    assert not phi.in_numerical(1, 5)


class TestDecomposition:
  """Test canonical decompositions in the Grams lifting."""

  def test_single_piece(self, grams: LiftedMonoid) -> None:
    """Test that one copy of 1/3 stays an M_s-projection."""
    decomposition = canonical_decomposition(grams, MembershipCertificate.single(0))
    assert decomposition.x0 == 0
    assert decomposition.parts == (ProjectionPart(1, Fraction(1), Fraction(1, 3)),)

  def test_full_copy_moves_to_base(self, grams: LiftedMonoid) -> None:
    """Test that three copies of 1/3 add up to s = 1 in M."""
    decomposition = canonical_decomposition(grams, MembershipCertificate.single(0, 3))
    assert decomposition.x0 == 1
    assert decomposition.parts == ()
    assert decomposition.x0_cert == MembershipCertificate.single(0)

  def test_element_mismatch(self, grams: LiftedMonoid) -> None:
    """Test that the certificate must evaluate to the given element."""
    with pytest.raises(CertificateVerificationError, match="does not evaluate"):
      canonical_decomposition(grams, MembershipCertificate.single(0), Fraction(1, 2))

  def test_split_mass(self, grams: LiftedMonoid) -> None:
    """Test splitting N_s-mass into copies of pi(s) and a remainder."""
    assert split_mass(grams.phi, 1, 7) == (2, 1)
    assert split_mass(grams.phi, 2, 5) == (1, 0)

  def test_decode(self, grams: LiftedMonoid) -> None:
    """Test decoding bare elements."""
    third = decode_decomposition(grams, Fraction(1, 3), 5)
    assert third.verdict is DecodeVerdict.DECOMPOSED
    assert third.decomposition == CanonicalDecomposition(
      Fraction(0), (ProjectionPart(1, Fraction(1), Fraction(1, 3)),)
    )
    half = decode_decomposition(grams, Fraction(1, 2), 5)
    assert half.decomposition == CanonicalDecomposition(Fraction(1, 2))

  def test_decode_certified_out(self, grams: LiftedMonoid) -> None:
    """Test that v_3(x) = -2 proves non-membership."""
    result = decode_decomposition(grams, Fraction(1, 9), 5)
    assert result.verdict is DecodeVerdict.CERTIFIED_OUT
    assert "v_3" in result.reason
    negative = decode_decomposition(grams, Fraction(-1), 5)
    assert negative.verdict is DecodeVerdict.CERTIFIED_OUT

  def test_decode_mixed(self, grams: LiftedMonoid) -> None:
    """Test an element with a base part and two projections."""
    x = Fraction(1, 4) + Fraction(1, 3) + Fraction(3, 10)
    result = decode_decomposition(grams, x, 6)
    assert result.decomposition is not None
    assert result.decomposition.x0 == Fraction(1, 4)
    assert result.decomposition.part(1) == Fraction(1, 3)
    assert result.decomposition.part(2) == Fraction(3, 10)
    assert result.decomposition.value == x

  def test_certificate_round_trip(self, grams: LiftedMonoid) -> None:
    """Test that a decoded decomposition rebuilds into a valid certificate."""
    x = Fraction(5, 4) + Fraction(2, 3)
    result = decode_decomposition(grams, x, 6)
    assert result.decomposition is not None
    certificate = decomposition_certificate(grams, result.decomposition)
    depth = max(certificate.indices) + 1
    assert certificate.value(grams.generators(depth)) == x
    assert canonical_decomposition(grams, certificate) == result.decomposition

  def test_projections(self, grams: LiftedMonoid) -> None:
    """Test M_s-projections of s = 1 with pi(s) = 3."""
    phi = grams.phi
    assert is_ms_projection(phi, 1, Fraction(2, 3))
    assert not is_ms_projection(phi, 1, Fraction(4, 3))
    assert not is_ms_projection(phi, 1, Fraction(1, 2))
    assert complementary_projection(phi, 1, Fraction(1, 3)) == Fraction(2, 3)
    with pytest.raises(ProjectionPreconditionError):
      complementary_projection(phi, 1, Fraction(4, 3))


class TestChecks:
  """Test the atom, ACCP, divisibility and k-MCD checks."""

  def test_classify_atoms(self, grams: LiftedMonoid) -> None:
    """Test the atom partition on Grams elements."""
    assert classify_atom(grams, Fraction(1, 10), 5).kind is AtomClass.ATOM_OF_MS
    not_atom = classify_atom(grams, Fraction(1, 2), 5)
    assert not_atom.kind is AtomClass.NOT_ATOM
    assert not_atom.split is not None
    assert sum(not_atom.split) == Fraction(1, 2)
    assert classify_atom(grams, Fraction(2, 3), 5).kind is AtomClass.NOT_ATOM
    assert classify_atom(grams, Fraction(1, 9), 5).is_atom is False

  def test_accp_chain(self, grams: LiftedMonoid) -> None:
    """Test that 1, 1/2, ..., 1/2^10 is a certified ascending chain of ideals."""
    steps = [Fraction(1, 2**n) for n in range(1, 11)]
    report = accp_chain_probe(grams, Fraction(1), steps, 12)
    assert report.status is CheckStatus.OK
    assert sum(1 for w in report.witnesses if w["condition"] == "step") == 10
    assert report.witnesses[0]["projections"] == ["1", "1/2"]

  def test_accp_chain_break(self, grams: LiftedMonoid) -> None:
    """Test that an increasing pair breaks the chain."""
    with pytest.raises(ChainBreakError, match="terms increase"):
      accp_chain_probe(grams, Fraction(1, 3), [Fraction(1)], 5)

  def test_projection_divisibility(self, grams: LiftedMonoid) -> None:
    """Test both projection laws for 1/3 | 1."""
    b_dec = canonical_decomposition(grams, MembershipCertificate.single(0))
    c_dec = canonical_decomposition(grams, MembershipCertificate.single(0, 3))
    report = check_projection_divisibility(
      grams, b_dec, c_dec, MembershipCertificate.single(0, 2)
    )
    assert report.status is CheckStatus.OK
    conditions = [w["condition"] for w in report.witnesses]
    assert conditions == ["part-one", "part-two"]

  def test_kmcd_transfer(self, grams: LiftedMonoid) -> None:
    """Test that 1/2 is its own unique maximal common divisor on both sides."""
    report = kmcd_transfer_check(grams, [Fraction(1, 2)], 3)
    assert report.status is CheckStatus.OK
    assert {"condition": "mcds", "mcds": ["1/2"]} in report.witnesses
