"""Unit tests for exact rational arithmetic helpers."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from puiseux_lift.config import ParamsOverrides
from puiseux_lift.core.exactnum import (
  NonPositiveRationalError,
  NotPrimeError,
  Prime,
  ScanCapExceededError,
  ZeroValuationError,
  ceil_fraction,
  denominator_lcm,
  format_rational,
  next_prime_satisfying,
  num_den,
  p_adic_valuation,
  parse_rational,
  residue_mod,
)


class TestPrime:
  """Test the certified prime wrapper."""

  def test_accepts_primes(self) -> None:
    """Test that primes are accepted and behave as ints."""
    p = Prime(257)
    assert p == 257
    assert p + 1 == 258
    assert repr(p) == "Prime(257)"

  def test_rejects_composites(self) -> None:
    """Test that composites and non-integers are rejected."""
    with pytest.raises(NotPrimeError, match="4 is not prime"):
      Prime(4)
    with pytest.raises(NotPrimeError, match="Expected an integer"):
      Prime(True)


class TestValuation:
  """Test p-adic valuations."""

  def test_values(self) -> None:
    """Test valuations of integers and fractions."""
    assert p_adic_valuation(Fraction(1, 9), 3) == -2
    assert p_adic_valuation(12, 2) == 2
    assert p_adic_valuation(Fraction(3, 4), 2) == -2
    assert p_adic_valuation(Fraction(-5, 7), 5) == 1
    assert p_adic_valuation(Fraction(130, 131), 7) == 0

  def test_zero(self) -> None:
    """Test that the valuation of zero is an error."""
    with pytest.raises(ZeroValuationError, match="undefined"):
      p_adic_valuation(Fraction(0), 3)

  def test_non_prime_base(self) -> None:
    """Test that the base must be prime."""
    with pytest.raises(NotPrimeError):
      p_adic_valuation(Fraction(1, 2), 6)

  @given(
    st.integers(min_value=1, max_value=10**6),
    st.integers(min_value=1, max_value=10**6),
    st.sampled_from([2, 3, 5, 7, 257]),
  )
  def test_product_rule(self, a: int, b: int, p: int) -> None:
    """Test that v_p(xy) = v_p(x) + v_p(y)."""
    x, y = Fraction(a, b), Fraction(b, a + 1)
    assert p_adic_valuation(x * y, p) == p_adic_valuation(x, p) + p_adic_valuation(y, p)


class TestNextPrime:
  """Test predicate-driven prime scans."""

  def test_lower_bound_is_exclusive(self) -> None:
    """Test that the scan starts strictly above the bound."""
    assert next_prime_satisfying(10, lambda p: True) == 11
    assert next_prime_satisfying(11, lambda p: True) == 13
    assert next_prime_satisfying(256, lambda p: True) == 257

  def test_predicate(self) -> None:
    """Test that rejected primes are skipped."""
    assert next_prime_satisfying(10, lambda p: p % 4 == 1) == 13
    assert next_prime_satisfying(0, lambda p: p % 2 == 1) == 3

  def test_cap(self) -> None:
    """Test that an exhausted scan raises instead of looping."""
    with pytest.raises(ScanCapExceededError, match="within 5 candidates"):
      next_prime_satisfying(1, lambda p: False, cap=5)


class TestSerialization:
  """Test the "n/d" text form of rationals."""

  def test_format(self) -> None:
    """Test lowest-terms formatting."""
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(4) == "4"
    assert format_rational(Fraction(-1, 3)) == "-1/3"

  def test_parse(self) -> None:
    """Test parsing with and without a denominator."""
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational(" 6 / 4 ") == Fraction(3, 2)
    assert parse_rational("-7") == Fraction(-7)

  def test_parse_invalid(self) -> None:
    """Test that malformed text is rejected."""
    with pytest.raises(ValueError, match="Zero denominator"):
      parse_rational("1/0")
    with pytest.raises(ValueError, match="Not a rational"):
      parse_rational("0.5")

  @given(st.fractions())
  def test_parse_inverts_format(self, q: Fraction) -> None:
    """Test that parsing the formatted text gives the value back."""
    assert parse_rational(format_rational(q)) == q

  def test_rational_field(self) -> None:
    """Test that pydantic fields accept and emit the text form."""
    overrides = ParamsOverrides.model_validate({"epsilon": "1/20", "b1": 1})
    assert overrides.epsilon == Fraction(1, 20)
    assert overrides.b1 == Fraction(1)
    assert overrides.to_document() == {"epsilon": "1/20", "b1": "1"}

  def test_rational_field_rejects_floats(self) -> None:
    """Test that floats never sneak into exact parameters."""
    with pytest.raises(ValidationError):
      ParamsOverrides.model_validate({"epsilon": 0.05})


class TestHelpers:
  """Test the small arithmetic helpers."""

  def test_num_den(self) -> None:
    """Test numerator and denominator of positive rationals."""
    assert num_den(Fraction(6, 4)) == (3, 2)
    with pytest.raises(NonPositiveRationalError):
      num_den(Fraction(0))

  def test_ceil(self) -> None:
    """Test exact ceilings."""
    assert ceil_fraction(Fraction(7, 2)) == 4
    assert ceil_fraction(Fraction(-7, 2)) == -3
    assert ceil_fraction(Fraction(4)) == 4

  def test_residue(self) -> None:
    """Test residues of rationals modulo a prime."""
    assert residue_mod(Fraction(1, 2), 5) == 3
    assert residue_mod(Fraction(7), 5) == 2

  def test_denominator_lcm(self) -> None:
    """Test the common denominator of a list."""
    assert denominator_lcm([Fraction(1, 4), Fraction(1, 6)]) == 12
    assert denominator_lcm([]) == 1
