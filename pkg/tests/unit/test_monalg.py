"""Unit tests for monoid algebras F[M] and the factorization searches."""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from puiseux_lift.core.puiseux import SearchBoundExceededError
from puiseux_lift.core.report import CheckStatus
from puiseux_lift.counterexample.deciders import CounterexampleOracle
from puiseux_lift.counterexample.tables import MainLiftTables, main_lifting_function
from puiseux_lift.lifting.function import LiftedMonoid
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
  MainMonoidAmbient,
  SearchBudget,
  a_accp_check,
  binomial_f,
  bounded_factor_search,
  descent_chain,
  exponent_lattice,
  furstenberg_divisor,
)

if TYPE_CHECKING:
  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.lifting.function import LiftedMonoid

Q = FieldSpec.rationals()
F5 = FieldSpec.prime_field(5)
NUMERICAL = FiniteAmbient.of([2, 3], "<2, 3>")
MEMBERS = [0, 2, 3, 4, 5, 6]


def poly(pairs: list[tuple[int, int]], field_spec: FieldSpec = Q) -> MonoidPolynomial:
  return MonoidPolynomial.from_terms(
    [(Fraction(e), c) for e, c in pairs], field_spec, NUMERICAL
  )


@st.composite
def polynomials(draw: st.DrawFn, field_spec: FieldSpec) -> MonoidPolynomial:
  pairs = draw(
    st.lists(
      st.tuples(st.sampled_from(MEMBERS), st.integers(min_value=-3, max_value=3)),
      max_size=4,
    )
  )
  return poly(pairs, field_spec)


@pytest.fixture(scope="module")
def lifted_ambient(params: CounterexampleParams) -> LiftedAmbient:
  """F[M_phi] exponents for the main lifting."""
  lifted = LiftedMonoid(
    main_lifting_function(MainLiftTables(params)), CounterexampleOracle(params)
  )
  return LiftedAmbient(lifted, 9)


class TestFieldSpec:
  """Test coefficient fields."""

  def test_parse(self) -> None:
    """Test the command-line syntax."""
    assert FieldSpec.parse("q") == Q
    assert FieldSpec.parse("fp:5").label == "F_5"
    assert FieldSpec.parse(" FP:7 ") == FieldSpec.prime_field(7)

  def test_parse_invalid(self) -> None:
    """Test rejected field descriptions."""
    with pytest.raises(ValueError, match="Unknown field"):
      FieldSpec.parse("r")
    with pytest.raises(ValueError, match="Invalid prime field modulus"):
      FieldSpec.parse("fp:x")
    with pytest.raises(ValidationError, match="prime modulus"):
      FieldSpec.parse("fp:4")

  def test_arithmetic(self) -> None:
    """Test reduction and inverses in F_5."""
    assert F5.normalize(Fraction(1, 2)) == 3
    assert F5.normalize(-1) == 4
    assert F5.inverse(Fraction(2)) == 3
    assert Q.inverse(Fraction(2, 3)) == Fraction(3, 2)
    with pytest.raises(ZeroDivisionError):
      F5.normalize(Fraction(1, 5))
    assert F5.units() == tuple(Fraction(c) for c in range(1, 5))
    assert Q.units() == (Fraction(1), Fraction(-1))


class TestRingLaws:
  """Test that F[<2, 3>] is a commutative ring."""

  @settings(deadline=None)
  @given(st.data())
  def test_laws(self, data: st.DataObject) -> None:
    """Test associativity, commutativity and distributivity."""
    field_spec = data.draw(st.sampled_from([Q, F5]))
    f = data.draw(polynomials(field_spec))
    g = data.draw(polynomials(field_spec))
    h = data.draw(polynomials(field_spec))
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f * (g + h) == f * g + f * h
    assert (f - f).is_zero

  @settings(deadline=None)
  @given(polynomials(Q), polynomials(Q))
  def test_product_divides(self, f: MonoidPolynomial, g: MonoidPolynomial) -> None:
    """Test that exact division undoes multiplication."""
    if g.is_zero:
      return
    assert (f * g).divide(g, step_cap=200) == f


class TestPolynomial:
  """Test construction, division and errors."""

  def test_from_terms(self) -> None:
    """Test merging, dropping zeros and rendering."""
    f = poly([(3, 1), (2, 2), (3, 1), (4, 0)])
    assert f.support() == frozenset({Fraction(2), Fraction(3)})
    assert f.ord() == 2
    assert f.deg() == 3
    assert str(f) == "2*X^2 + 2*X^3"
    assert f.to_json() == [{"exp": "2", "coef": "2"}, {"exp": "3", "coef": "2"}]
    assert poly([(2, 3)], F5).to_json() == [{"exp": "2", "coef": 3}]

  def test_outside_monoid(self) -> None:
    """Test that exponents must be certified."""
    with pytest.raises(OutsideMonoidError, match="not certified"):
      poly([(1, 1)])

  def test_units(self) -> None:
    """Test that only nonzero constants are units."""
    assert poly([(0, 2)]).is_unit
    assert not poly([(2, 1)]).is_unit
    assert not poly([(0, 1), (2, 1)]).is_unit

  def test_divide(self) -> None:
    """Test exact division by leading terms."""
    f = poly([(2, 1), (5, 1)])
    assert f.divide(poly([(2, 1)])) == poly([(0, 1), (3, 1)])
    assert f.divide(poly([(3, 1)])) is None
    g = poly([(0, 1), (2, 1)])
    assert (poly([(2, 1), (3, 1)]) * g).divide(g) == poly([(2, 1), (3, 1)])

  def test_divide_step_cap(self) -> None:
    """Test that long divisions stop at the cap."""
    g = poly([(0, 1), (2, 1)])
    product = poly([(2, 1), (3, 1)]) * g
    with pytest.raises(SearchBoundExceededError, match="more than 1 steps"):
      product.divide(g, step_cap=1)

  def test_monomial_divide(self) -> None:
    """Test division by X^a."""
    f = poly([(4, 1), (5, 1)])
    assert f.monomial_divide(Fraction(2)) == poly([(2, 1), (3, 1)])
    assert f.monomial_divide(Fraction(3)) is None
    with pytest.raises(MonoidAlgebraError, match="Cannot divide"):
      f.monomial_divide(Fraction(-1))

  def test_monomial_divide_undecided(self, grams: LiftedMonoid) -> None:
    """Test that an undecided exponent is not reported as non-divisibility."""
    shallow = MonoidPolynomial.monomial(Fraction(1), Q, LiftedAmbient(grams, 3))
    with pytest.raises(UndecidedMembershipError, match="undecided at depth 3"):
      shallow.monomial_divide(Fraction(1, 416))
    deep = LiftedAmbient(grams, 8)
    quotient = MonoidPolynomial.monomial(Fraction(1), Q, deep).monomial_divide(
      Fraction(1, 416)
    )
    assert quotient == MonoidPolynomial.monomial(Fraction(415, 416), Q, deep)

  def test_undecided_is_a_search_bound(self, params: CounterexampleParams) -> None:
    """Test that <A> above 1 raises the search-bound error."""
    ambient = MainMonoidAmbient(params, "A")
    with pytest.raises(SearchBoundExceededError, match="undecided"):
      ambient.certify(Fraction(1))
    assert ambient.certify(Fraction(-1)) is None

  def test_zero(self) -> None:
    """Test the zero polynomial."""
    zero = MonoidPolynomial.zero(Q, NUMERICAL)
    with pytest.raises(ZeroPolynomialError, match="no order"):
      zero.ord()
    with pytest.raises(ZeroPolynomialError, match="zero polynomial"):
      poly([(2, 1)]).divide(zero)
    assert zero.divide(poly([(2, 1)])) == zero

  def test_mismatch(self) -> None:
    """Test that fields and ambients must agree."""
    with pytest.raises(AmbientMismatchError):
      poly([(2, 1)]) + poly([(2, 1)], F5)
    other = MonoidPolynomial.monomial(Fraction(1), Q, FiniteAmbient.of([1]))
    with pytest.raises(AmbientMismatchError):
      poly([(2, 1)]) * other


class TestSearch:
  """Test lattices and bounded factor searches."""

  def test_budget(self) -> None:
    """Test that spending stops at the cap."""
    budget = SearchBudget(cap=2)
    assert budget.spend()
    assert budget.spend()
    assert not budget.spend()
    assert budget.capped
    assert not budget.complete

  def test_lattice(self) -> None:
    """Test sums of at most two generators."""
    lattice = exponent_lattice(NUMERICAL, 2, Fraction(6))
    assert sorted(lattice) == [Fraction(n) for n in (0, 2, 3, 4, 5, 6)]

  def test_lattice_counts_undecided(self, grams: LiftedMonoid) -> None:
    """Test that generators beyond the decoder depth make the lattice incomplete."""
    budget = SearchBudget(cap=10)
    lattice = exponent_lattice(LiftedAmbient(grams, 3), 5, Fraction(1), 1, budget)
    assert sorted(lattice) == [
      Fraction(0),
      Fraction(1, 28),
      Fraction(1, 10),
      Fraction(1, 3),
    ]
    assert budget.undecided == 2
    assert not budget.complete
    complete = SearchBudget(cap=10)
    deep = exponent_lattice(LiftedAmbient(grams, 5), 5, Fraction(1), 1, complete)
    assert len(deep) == 6
    assert complete.complete

  def test_finds_factorization(self) -> None:
    """Test that (X^2 + 1)(X^3 + 1) is split."""
    f = poly([(0, 1), (2, 1), (3, 1), (5, 1)])
    report = bounded_factor_search(f, 2)
    assert not report.theorem_backed
    assert any(w["condition"] == "factorization" for w in report.witnesses)

  def test_irreducible_within_bounds(self) -> None:
    """Test a binomial without proper factors in the lattice."""
    report = bounded_factor_search(poly([(0, 1), (2, 1)]), 2)
    assert report.status is CheckStatus.OK
    assert report.witnesses[0]["condition"] == "irreducible-within-bounds"

  def test_zero_rejected(self) -> None:
    """Test that the zero polynomial cannot be factored."""
    with pytest.raises(ZeroPolynomialError):
      bounded_factor_search(MonoidPolynomial.zero(Q, NUMERICAL), 2)


class TestCounterexampleAlgebra:
  """Test F[M] and F[M_phi] for the counterexample."""

  def test_binomial(self, params: CounterexampleParams) -> None:
    """Test f = X^b1 + X^c1 in F[M]."""
    f = binomial_f(params, Q)
    assert f.support() == frozenset({params.b1, params.c1})
    assert f.ambient == MainMonoidAmbient(params)

  @pytest.mark.parametrize("field_spec", [Q, F5], ids=["Q", "F5"])
  def test_descent_chain(
    self, params: CounterexampleParams, field_spec: FieldSpec
  ) -> None:
    """Test the never-ending monomial descent of f."""
    report = descent_chain(params, field_spec, 15)
    assert report.status is CheckStatus.OK
    assert len(report.witnesses) == 14

  def test_descent_chain_length(self, params: CounterexampleParams) -> None:
    """Test that the chain needs at least one step."""
    with pytest.raises(MonoidAlgebraError, match="n_max >= 2"):
      descent_chain(params, Q, 1)

  def test_monomial_atom_divisor(
    self, params: CounterexampleParams, lifted_ambient: LiftedAmbient
  ) -> None:
    """Test that a shared a_k gives a monomial divisor."""
    a2 = params.a(2)
    g = MonoidPolynomial.from_terms([(a2, 1), (2 * a2, 1)], Q, lifted_ambient)
    result = furstenberg_divisor(g, params, 6)
    assert result.verdict is DivisorVerdict.MONOMIAL_ATOM
    assert result.divisor == MonoidPolynomial.monomial(a2, Q, lifted_ambient)
    assert result.divisor is not None
    assert result.cofactor is not None
    assert result.divisor * result.cofactor == g

  def test_irreducible_divisor(
    self, params: CounterexampleParams, lifted_ambient: LiftedAmbient
  ) -> None:
    """Test that 1 + X^a_2 is its own irreducible divisor."""
    g = MonoidPolynomial.from_terms([(0, 1), (params.a(2), 1)], Q, lifted_ambient)
    result = furstenberg_divisor(g, params, 6)
    assert result.verdict is DivisorVerdict.IRREDUCIBLE_WITHIN_BOUNDS
    assert result.divisor == g
    assert result.cofactor is not None
    assert result.cofactor.is_unit

  def test_divisor_preconditions(
    self, params: CounterexampleParams, lifted_ambient: LiftedAmbient
  ) -> None:
    """Test that units and large degrees are rejected."""
    unit = MonoidPolynomial.monomial(Fraction(0), Q, lifted_ambient)
    with pytest.raises(MonoidAlgebraError, match="Units"):
      furstenberg_divisor(unit, params, 6)
    big = MonoidPolynomial.monomial(params.b1, Q, lifted_ambient)
    with pytest.raises(MonoidAlgebraError, match="deg g < 1/3"):
      furstenberg_divisor(big, params, 6)

  def test_a_accp(self, params: CounterexampleParams) -> None:
    """Test that divisor sets in <A> are finite boxes."""
    report = a_accp_check(params, [params.a(2) + 2 * params.a(3), params.a(4)])
    assert report.status is CheckStatus.OK
    assert [w["count"] for w in report.witnesses] == [6, 2]
