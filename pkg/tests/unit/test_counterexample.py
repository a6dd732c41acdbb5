"""Unit tests for the atomic counterexample monoid and its lifting."""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from puiseux_lift.config import ParamsOverrides
from puiseux_lift.core.puiseux import verify_certificate
from puiseux_lift.core.report import CheckStatus
from puiseux_lift.counterexample.checks import (
  atoms_report,
  claim1_check,
  claim2_check,
  generators_outside_a_check,
  improvement_chain_check,
  inequalities_report,
  unique_factorization_check,
)
from puiseux_lift.counterexample.deciders import (
  CounterexampleOracle,
  MembershipKind,
  a_divisors,
  common_divisor_of_bc_subset,
  improve_common_divisor,
  improvement_chain,
  membership_a,
  membership_m,
)
from puiseux_lift.counterexample.params import (
  CounterexampleError,
  InvariantViolationError,
  a_position,
  b_position,
  build_default_params,
  c_position,
  describe_position,
  main_monoid,
)
from puiseux_lift.counterexample.tables import (
  MainLiftTables,
  build_main_lift,
  main_lifted_monoid,
  s_index_at,
  s_position,
)
from puiseux_lift.lifting.checks import AtomClass, classify_atom

if TYPE_CHECKING:
  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.lifting.function import LiftedMonoid


@pytest.fixture(scope="module")
def tables(params: CounterexampleParams) -> MainLiftTables:
  """Tables checked on the first five s-indices."""
  return build_main_lift(params, 5)


@pytest.fixture(scope="module")
def lifted(tables: MainLiftTables) -> LiftedMonoid:
  """The lifted counterexample, validated at depth 3."""
  return main_lifted_monoid(tables, 3)


class TestParams:
  """Test the default construction and its invariants."""

  def test_defaults(self, params: CounterexampleParams) -> None:
    """Test the canonical constants."""
    assert params.epsilon == Fraction(1, 16)
    assert params.tail_bound == Fraction(1, 128)
    assert params.delta == Fraction(3, 33536)
    assert params.b1 == Fraction(130, 131)
    assert params.c1 == Fraction(136, 137)
    assert params.q_table(4) == [257, 521, 1031, 2053]
    assert params.a(2) == Fraction(1, 257)

  def test_q_index(self, params: CounterexampleParams) -> None:
    """Test recognizing the denominators of A."""
    assert params.q_index(257) == 2
    assert params.q_index(521) == 3
    assert params.q_index(131) is None
    assert params.q_index(263) is None

  def test_a_sum_below_tail_bound(self, params: CounterexampleParams) -> None:
    """Test the strict partial sum bound."""
    assert 0 < params.a_sum(40) < params.tail_bound
    assert params.a_sum(1) == 0
    with pytest.raises(CounterexampleError, match="k = 2"):
      params.q(1)

  def test_overrides_checked(self) -> None:
    """Test that overrides go through the same inequalities."""
    tweaked = build_default_params(ParamsOverrides(epsilon=Fraction(1, 12)))
    assert tweaked.epsilon == Fraction(1, 12)
    with pytest.raises(InvariantViolationError, match="0 < epsilon < 1/10"):
      build_default_params(ParamsOverrides(epsilon=Fraction(1, 5)))
    with pytest.raises(InvariantViolationError, match="b1"):
      build_default_params(ParamsOverrides(b1=Fraction(1, 2)))

  def test_document(self, params: CounterexampleParams) -> None:
    """Test the JSON document of the construction."""
    document = params.to_document(2)
    assert document["delta"] == "3/33536"
    assert document["q"] == [257, 521]
    assert document["b_prime"] == 131


class TestStream:
  """Test the generator order b_1, c_1, a_2, b_2, c_2, a_3, ..."""

  def test_positions(self) -> None:
    """Test the position helpers."""
    assert (b_position(1), c_position(1), a_position(2)) == (0, 1, 2)
    assert (b_position(2), c_position(2), a_position(3)) == (3, 4, 5)
    assert describe_position(5) == ("a", 3)
    assert describe_position(3) == ("b", 2)

  def test_take(self, params: CounterexampleParams) -> None:
    """Test the first generators of M."""
    assert main_monoid(params).take(6) == (
      params.b1,
      params.c1,
      params.a(2),
      params.b1 - params.a(2),
      params.c1 - params.a(2),
      params.a(3),
    )


class TestMembership:
  """Test the complete deciders for <A> and M below 1."""

  def test_a_member(self, params: CounterexampleParams) -> None:
    """Test that coefficients are forced by the denominators."""
    proof = membership_a(params, params.a(2) + 2 * params.a(3))
    assert proof.is_member
    assert proof.coefficients == ((2, 1), (3, 2))

  def test_a_non_members(self, params: CounterexampleParams) -> None:
    """Test the two valuation obstructions."""
    assert not membership_a(params, Fraction(1, 9)).is_member
    squared = membership_a(params, Fraction(1, 257**2))
    assert squared.kind is MembershipKind.NON_MEMBER
    assert "v_257(x) = -2" in squared.reason
    assert membership_a(params, Fraction(1)).kind is MembershipKind.OUT_OF_SCOPE

  def test_m_generator(self, params: CounterexampleParams) -> None:
    """Test that b_2 is recognized as a generator."""
    proof = membership_m(params, params.b(2))
    assert proof.generator == ("b", 2)
    assert proof.coefficients == ()

  def test_m_generator_plus_a(self, params: CounterexampleParams) -> None:
    """Test b_3 + a_2 and its certificate over the stream."""
    value = params.b(3) + params.a(2)
    proof = membership_m(params, value)
    assert proof.generator == ("b", 3)
    assert proof.coefficients == ((2, 1),)
    assert verify_certificate(main_monoid(params), value, proof.certificate)

  def test_m_non_members(self, params: CounterexampleParams) -> None:
    """Test non-members of M below 1."""
    assert not membership_m(params, params.b1 - 2 * params.a(2)).is_member
    both = membership_m(params, params.b1 + params.c1 - 1)
    assert not both.is_member
    assert "both B and C" in both.reason
    assert membership_m(params, Fraction(3, 2)).kind is MembershipKind.OUT_OF_SCOPE

  def test_oracle_atoms(self, params: CounterexampleParams) -> None:
    """Test that the atoms of M are exactly the a_k."""
    oracle = CounterexampleOracle(params)
    assert oracle.is_atom(params.a(2), 5).is_atom is True
    b1 = oracle.is_atom(params.b1, 5)
    assert b1.is_atom is False
    assert b1.split == (params.b1 - params.a(2), params.a(2))
    assert oracle.is_atom(Fraction(1), 5).is_atom is False

  def test_a_divisors(self, params: CounterexampleParams) -> None:
    """Test the divisor box of an element of <A>."""
    x = params.a(2) + 2 * params.a(3)
    divisors = a_divisors(params, x)
    assert len(divisors) == 6
    assert divisors[0] == 0
    assert divisors[-1] == x
    with pytest.raises(CounterexampleError, match="not an element"):
      a_divisors(params, params.b1)


class TestCommonDivisors:
  """Test the argument that b_1 and c_1 have no maximal common divisor."""

  def test_subset_divisor(self, params: CounterexampleParams) -> None:
    """Test that a_{m+1} divides every selected generator."""
    divisor, proofs = common_divisor_of_bc_subset(params, [("b", 1), ("c", 2)])
    assert divisor == params.a(3)
    assert set(proofs) == {"b1", "c2"}
    with pytest.raises(CounterexampleError, match="nonempty"):
      common_divisor_of_bc_subset(params, [])

  def test_improvement_from_zero(self, params: CounterexampleParams) -> None:
    """Test that each step adds the next a_k."""
    chain = improvement_chain(params, 5)
    assert [d for d, _ in chain] == [params.a_sum(n) for n in range(2, 7)]

  def test_improvement_rejects_non_divisors(self, params: CounterexampleParams) -> None:
    """Test that the input must lie in <A>."""
    with pytest.raises(CounterexampleError, match="not in <A>"):
      improve_common_divisor(params, Fraction(1, 9))

  def test_checks(self, params: CounterexampleParams) -> None:
    """Test the claim and chain reports."""
    assert improvement_chain_check(params, 5).status is CheckStatus.OK
    assert claim2_check(params, 2).status is CheckStatus.OK
    assert generators_outside_a_check(params).status is CheckStatus.OK
    assert unique_factorization_check(params, 6).status is CheckStatus.OK


class TestTables:
  """Test the primes and splits of the main lifting."""

  def test_s_indexing(self) -> None:
    """Test the interleaving s_1 = b_1, s_2 = c_1, s_3 = b_2, ..."""
    assert [s_position(n) for n in range(1, 5)] == [0, 1, 3, 4]
    assert s_index_at(2) is None
    assert [s_index_at(p) for p in (0, 1, 3, 4)] == [1, 2, 3, 4]

  def test_invariants(
    self, params: CounterexampleParams, tables: MainLiftTables
  ) -> None:
    """Test the table inequalities and the atom identities."""
    tables.assert_invariants(5)
    for n in range(1, 6):
      assert tables.h_atom(n) + tables.k_atom(n) == tables.s(n)
      assert tables.s(n) / int(tables.p(n)) < params.delta
    primes = [int(tables.p(n)) for n in range(1, 6)]
    assert primes == sorted(set(primes))
    assert inequalities_report(params, tables, 5).status is CheckStatus.OK

  def test_atoms(self, tables: MainLiftTables, lifted: LiftedMonoid) -> None:
    """Test the atom classes of H_s, a_k and s."""
    assert classify_atom(lifted, tables.h_atom(1), 9).kind is AtomClass.ATOM_OF_MS
    a_2 = tables.params.a(2)
    assert classify_atom(lifted, a_2, 9).kind is AtomClass.ATOM_OF_M_NOT_S
    assert classify_atom(lifted, tables.s(1), 9).kind is AtomClass.NOT_ATOM
    assert atoms_report(lifted, tables, 3).status is CheckStatus.OK

  def test_claim1(self, params: CounterexampleParams, lifted: LiftedMonoid) -> None:
    """Test that small elements of the lifting lie in <A>."""
    report = claim1_check(lifted, params, params.a(2) + params.a(3), 9)
    assert report.status is CheckStatus.OK
    assert report.witnesses[0]["condition"] == "in-A"
    with pytest.raises(CounterexampleError, match="1/3"):
      claim1_check(lifted, params, Fraction(1, 2), 9)
