"""Factorization evidence in F[M]: the descent chain of X^b1 + X^c1, bounded
factor searches over a finite exponent lattice, and irreducible divisors of
low-degree polynomials.

Bounded searches never prove irreducibility in the whole algebra; their
reports are ``theorem_backed=False`` and read "within bounds".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Literal

import structlog

from puiseux_lift.core.exactnum import format_rational
from puiseux_lift.core.puiseux import SearchBoundExceededError
from puiseux_lift.core.report import CheckReport
from puiseux_lift.counterexample.deciders import (
  MembershipKind,
  a_divisors,
  membership_a,
  membership_m,
)
from puiseux_lift.counterexample.params import CounterexampleError, main_monoid
from puiseux_lift.lifting.oracle import TruncationOracle, Verdict
from puiseux_lift.monalg.polynomial import (
  MonoidAlgebraError,
  MonoidPolynomial,
  OutsideMonoidError,
  Term,
  UndecidedMembershipError,
  ZeroPolynomialError,
)
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from collections.abc import Iterable, Iterator, Mapping, Sequence

  from puiseux_lift.core.certificate import MembershipCertificate
  from puiseux_lift.counterexample.params import CounterexampleParams
  from puiseux_lift.monalg.field import FieldSpec
  from puiseux_lift.monalg.polynomial import Ambient

logger = structlog.get_logger()

ONE_THIRD = Fraction(1, 3)

# Positions of M's stream searched when an exponent is at least 1.
FALLBACK_DEPTH = 12


@dataclass(frozen=True)
class MainMonoidAmbient:
  """The counterexample monoid M, or its submonoid <A>, as an exponent monoid.

  Certificates index the main generator stream b_1, c_1, a_2, b_2, ... in
  both cases. Below 1 membership is decided completely. At or above 1, M
  is searched in its first FALLBACK_DEPTH generators and <A> is undecided.
  """

  params: CounterexampleParams
  submonoid: Literal["M", "A"] = "M"

  @property
  def label(self) -> str:
    return "M" if self.submonoid == "M" else "<A>"

  def certify(self, exponent: Fraction) -> MembershipCertificate | None:
    value = Fraction(exponent)
    if value < 0:
      return None
    if self.submonoid == "A":
      proof = membership_a(self.params, value)
      if proof.kind is MembershipKind.OUT_OF_SCOPE:
        raise UndecidedMembershipError(
          f"{format_rational(value)} in <A> undecided: {proof.reason}"
        )
      return proof.certificate if proof.is_member else None
    if value >= 1:
      decision = TruncationOracle(main_monoid(self.params)).member(
        value, FALLBACK_DEPTH
      )
      if decision.is_member:
        return decision.certificate
      if decision.verdict is Verdict.NON_MEMBER:
        return None
      raise UndecidedMembershipError(
        f"{format_rational(value)} in M undecided: {decision.reason}"
      )
    proof = membership_m(self.params, value)
    return proof.certificate if proof.is_member else None

  def generators(self, depth: int) -> tuple[Fraction, ...]:
    if self.submonoid == "A":
      return tuple(self.params.a(k) for k in range(2, depth + 2))
    return main_monoid(self.params).take(depth)


def binomial_f(params: CounterexampleParams, field_spec: FieldSpec) -> MonoidPolynomial:
  """f(X) = X^b1 + X^c1, the polynomial with no factorization into irreducibles."""
  return MonoidPolynomial.from_terms(
    [(params.b1, 1), (params.c1, 1)], field_spec, MainMonoidAmbient(params)
  )


def descent_chain(
  params: CounterexampleParams, field_spec: FieldSpec, n_max: int
) -> CheckReport:
  """Rebuild f = (X^a_2 ... X^a_n) * (X^b_n + X^c_n) exactly for n = 2..n_max.

  Each cofactor X^b_n + X^c_n is again divisible by X^a_{n+1}, so peeling
  monomial atoms never reaches an irreducible cofactor.

  Raises:
      MonoidAlgebraError: If ``n_max`` is below 2.
  """
  if n_max < 2:
    raise MonoidAlgebraError(f"descent_chain needs n_max >= 2, got {n_max}")
  ambient = MainMonoidAmbient(params)
  report = CheckReport(
    check_id=f"monalg.descent_chain.{field_spec.label}",
    anchor="X^b1 + X^c1 cannot be factored into irreducibles",
    summary=f"n <= {n_max} over {field_spec.label}",
  )
  f = binomial_f(params, field_spec)
  prefix = MonoidPolynomial.monomial(Fraction(0), field_spec, ambient)
  for n in range(2, n_max + 1):
    prefix = prefix * MonoidPolynomial.monomial(params.a(n), field_spec, ambient)
    cofactor = MonoidPolynomial.from_terms(
      [(params.b(n), 1), (params.c(n), 1)], field_spec, ambient
    )
    product = prefix * cofactor
    if product != f:
      report.violate("reconstruction", n=n, product=product)
      continue
    following = cofactor.monomial_divide(params.a(n + 1))
    expected = MonoidPolynomial.from_terms(
      [(params.b(n + 1), 1), (params.c(n + 1), 1)], field_spec, ambient
    )
    if following is None:
      report.violate("cofactor-not-divisible", n=n, divisor=params.a(n + 1))
    elif following != expected:
      report.violate("cofactor-mismatch", n=n, quotient=following)
    else:
      report.add_witness(
        condition="descent",
        n=n,
        monomial_exponent=prefix.deg(),
        cofactor=cofactor,
        next_divisor=params.a(n + 1),
      )
  logger.debug(
    "descent_chain_done",
    field=field_spec.label,
    n_max=n_max,
    status=str(report.status),
  )
  return report


@dataclass
class SearchBudget:
  """Counters shared by the candidate loops of one search."""

  cap: int
  tried: int = 0
  undecided: int = 0
  capped: bool = False

  @property
  def complete(self) -> bool:
    return not self.capped and self.undecided == 0

  def spend(self) -> bool:
    if self.tried >= self.cap:
      self.capped = True
      return False
    self.tried += 1
    return True


def exponent_lattice(
  ambient: Ambient,
  depth: int,
  bound: Fraction,
  terms: int = 2,
  budget: SearchBudget | None = None,
) -> dict[Fraction, MembershipCertificate]:
  """Sums of at most ``terms`` of the first ``depth`` generators, up to ``bound``.

  Sums the ambient cannot decide are left out and counted as undecided in
  ``budget``.
  """
  generators = sorted({g for g in ambient.generators(depth) if 0 < g <= bound})
  values = {Fraction(0)}
  frontier = {Fraction(0)}
  for _ in range(terms):
    frontier = {v + g for v in frontier for g in generators if v + g <= bound}
    values |= frontier
  return _certified(ambient, values, budget)


def _certified(
  ambient: Ambient, values: Iterable[Fraction], budget: SearchBudget | None
) -> dict[Fraction, MembershipCertificate]:
  lattice: dict[Fraction, MembershipCertificate] = {}
  for value in sorted(values):
    try:
      certificate = ambient.certify(value)
    except UndecidedMembershipError as exc:
      logger.debug(
        "lattice_value_undecided", value=format_rational(value), reason=str(exc)
      )
      if budget is not None:
        budget.undecided += 1
      continue
    if certificate is not None:
      lattice[value] = certificate
  return lattice


def _candidates(
  lattice: Mapping[Fraction, MembershipCertificate],
  field_spec: FieldSpec,
  ambient: Ambient,
  support_bound: int,
  max_degree: Fraction,
) -> Iterator[MonoidPolynomial]:
  """Monic nonunits supported on the lattice, fewest terms and lowest degree first."""
  values = sorted(v for v in lattice if v <= max_degree)
  for size in range(1, support_bound + 1):
    supports = sorted(itertools.combinations(values, size), key=lambda s: (s[-1], s))
    for support in supports:
      if support[-1] == 0:
        continue
      lead = Term(support[-1], Fraction(1), lattice[support[-1]])
      for coefficients in itertools.product(field_spec.units(), repeat=size - 1):
        lower = tuple(
          Term(e, c, lattice[e])
          for e, c in zip(support[:-1], coefficients, strict=True)
        )
        yield MonoidPolynomial((*lower, lead), field_spec, ambient)


def proper_factorizations(
  f: MonoidPolynomial,
  lattice: Mapping[Fraction, MembershipCertificate],
  support_bound: int,
  budget: SearchBudget,
) -> Iterator[tuple[MonoidPolynomial, MonoidPolynomial]]:
  """Yield ``(g, h)`` with f = g * h, both nonunits and g drawn from the lattice."""
  for g in _candidates(lattice, f.field, f.ambient, support_bound, f.deg()):
    if not budget.spend():
      return
    try:
      h = f.divide(g)
    except SearchBoundExceededError:
      budget.undecided += 1
      continue
    if h is not None and not h.is_unit:
      yield g, h


def _is_factorable(
  f: MonoidPolynomial,
  lattice: Mapping[Fraction, MembershipCertificate],
  support_bound: int,
  budget: SearchBudget,
) -> bool | None:
  """True if a proper factorization exists within bounds, None if undecided."""
  if f.is_unit:
    return False
  local = SearchBudget(cap=budget.cap)
  found = next(proper_factorizations(f, lattice, support_bound, local), None)
  budget.undecided += local.undecided
  if found is not None:
    return True
  return False if local.complete else None


def bounded_factor_search(
  f: MonoidPolynomial,
  depth: int,
  max_factors: int = 8,
  support_bound: int = 2,
  lattice_terms: int = 2,
  max_candidates: int | None = None,
) -> CheckReport:
  """Search for factorizations f = g * h inside a finite exponent lattice.

  The lattice holds sums of at most ``lattice_terms`` of the ambient's first
  ``depth`` generators, up to deg f; g ranges over monic polynomials with at
  most ``support_bound`` terms there. For each factorization found the
  report records whether g or h factors again within the same bounds.

  Raises:
      ZeroPolynomialError: If f is zero.
  """
  if f.is_zero:
    raise ZeroPolynomialError("Cannot factor the zero polynomial")
  report = CheckReport(
    check_id="monalg.bounded_factor_search",
    anchor="bounded evidence for non-atomicity of F[M]",
    theorem_backed=False,
    summary=(
      f"depth {depth}, support <= {support_bound}, "
      f"lattice terms <= {lattice_terms}"
    ),
  )
  budget = SearchBudget(cap=max_candidates or settings.max_candidates)
  if f.is_unit:
    report.add_witness(condition="unit", f=f)
    return report
  lattice = exponent_lattice(f.ambient, depth, f.deg(), lattice_terms, budget)
  found = 0
  for g, h in proper_factorizations(f, lattice, support_bound, budget):
    report.add_witness(
      condition="factorization",
      g=g,
      h=h,
      g_factorable=_is_factorable(g, lattice, support_bound, budget),
      h_factorable=_is_factorable(h, lattice, support_bound, budget),
    )
    found += 1
    if found >= max_factors:
      break
  if found == 0:
    if budget.complete:
      report.add_witness(
        condition="irreducible-within-bounds", f=f, lattice_size=len(lattice)
      )
    else:
      report.mark_inconclusive(
        "search budget exhausted", tried=budget.tried, undecided=budget.undecided
      )
  elif budget.capped:
    report.mark_inconclusive("candidate cap reached", tried=budget.tried)
  logger.debug(
    "bounded_factor_search_done",
    found=found,
    tried=budget.tried,
    undecided=budget.undecided,
  )
  return report


class DivisorVerdict(StrEnum):
  MONOMIAL_ATOM = "monomial-atom"
  IRREDUCIBLE_WITHIN_BOUNDS = "irreducible-within-bounds"
  INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class FurstenbergResult:
  """An irreducible divisor of g with its cofactor, both in g's algebra."""

  verdict: DivisorVerdict
  divisor: MonoidPolynomial | None = None
  cofactor: MonoidPolynomial | None = None
  steps: int = 0
  reason: str = ""
  chain: tuple[MonoidPolynomial, ...] = field(default=())

  @property
  def found(self) -> bool:
    return self.verdict is not DivisorVerdict.INCONCLUSIVE


def _common_atom(params: CounterexampleParams, f: MonoidPolynomial) -> int | None:
  """Least k with a_k dividing every exponent of f in <A>."""
  common: set[int] | None = None
  for exponent in f.support():
    keys = {k for k, c in membership_a(params, exponent).coefficients if c > 0}
    common = keys if common is None else common & keys
    if not common:
      return None
  return min(common) if common else None


def _divisor_lattice(
  params: CounterexampleParams, f: MonoidPolynomial, budget: SearchBudget
) -> dict[Fraction, MembershipCertificate]:
  values: set[Fraction] = set()
  for exponent in f.support():
    values.update(a_divisors(params, exponent))
  return _certified(f.ambient, values, budget)


def furstenberg_divisor(
  g: MonoidPolynomial,
  params: CounterexampleParams,
  depth: int,
  support_bound: int = 2,
) -> FurstenbergResult:
  """Find an irreducible divisor of a nonunit g with deg g < 1/3.

  Every exponent below 1/3 of the lifted monoid lies in <A>, so g lives in
  F[<A>]. The search descends: a monomial X^a_k dividing every term is an
  irreducible divisor; otherwise a proper divisor is searched among
  polynomials supported on divisors of g's exponents, and the descent
  continues from it for at most ``depth`` steps.

  Raises:
      ZeroPolynomialError: If g is zero.
      MonoidAlgebraError: If g is a unit or deg g >= 1/3.
      OutsideMonoidError: If an exponent of g is not in <A>.
  """
  if g.is_zero:
    raise ZeroPolynomialError("The zero polynomial has no irreducible divisor")
  if g.is_unit:
    raise MonoidAlgebraError("Units have no irreducible divisor")
  if g.deg() >= ONE_THIRD:
    raise MonoidAlgebraError(f"furstenberg_divisor needs deg g < 1/3, got {g.deg()}")
  submonoid = MainMonoidAmbient(params, "A")
  try:
    current = MonoidPolynomial.from_terms(
      [(t.exponent, t.coefficient) for t in g.terms], g.field, submonoid
    )
  except OutsideMonoidError as exc:
    raise OutsideMonoidError(f"Support of g leaves <A>: {exc}") from exc
  cofactor = MonoidPolynomial.monomial(Fraction(0), g.field, submonoid)
  chain: list[MonoidPolynomial] = [current]
  budget = SearchBudget(cap=settings.max_candidates)
  verdict: DivisorVerdict | None = None
  step = 0
  for step in range(1, depth + 1):
    k = _common_atom(params, current)
    if k is not None:
      rest = current.monomial_divide(params.a(k))
      if rest is None:
        raise CounterexampleError(
          f"a_{k} was forced into every exponent but does not divide"
        )
      cofactor = cofactor * rest
      current = MonoidPolynomial.monomial(params.a(k), g.field, submonoid)
      verdict = DivisorVerdict.MONOMIAL_ATOM
      break
    step_budget = SearchBudget(cap=budget.cap)
    try:
      lattice = _divisor_lattice(params, current, step_budget)
    except SearchBoundExceededError as exc:
      return FurstenbergResult(DivisorVerdict.INCONCLUSIVE, steps=step, reason=str(exc))
    candidates = proper_factorizations(current, lattice, support_bound, step_budget)
    found = next(candidates, None)
    budget.tried += step_budget.tried
    if found is None:
      if not step_budget.complete:
        return FurstenbergResult(
          DivisorVerdict.INCONCLUSIVE,
          steps=step,
          reason=(
            f"{step_budget.undecided} undecided divisions, "
            f"capped={step_budget.capped}"
          ),
        )
      verdict = DivisorVerdict.IRREDUCIBLE_WITHIN_BOUNDS
      break
    divisor, rest = found
    cofactor = cofactor * rest
    current = divisor
    chain.append(current)
  if verdict is None:
    return FurstenbergResult(
      DivisorVerdict.INCONCLUSIVE,
      steps=depth,
      reason=f"descent longer than {depth} steps",
    )
  if current * cofactor != chain[0]:
    raise MonoidAlgebraError("Divisor times cofactor does not reconstruct g")
  try:
    divisor_out = _rehome(current, g)
    cofactor_out = _rehome(cofactor, g)
  except UndecidedMembershipError as exc:
    return FurstenbergResult(DivisorVerdict.INCONCLUSIVE, steps=step, reason=str(exc))
  logger.debug(
    "furstenberg_divisor_found",
    verdict=str(verdict),
    steps=step,
    divisor=str(divisor_out),
  )
  return FurstenbergResult(verdict, divisor_out, cofactor_out, step, chain=tuple(chain))


def _rehome(f: MonoidPolynomial, like: MonoidPolynomial) -> MonoidPolynomial:
  return MonoidPolynomial.from_terms(
    [(t.exponent, t.coefficient) for t in f.terms], like.field, like.ambient
  )


def a_accp_check(params: CounterexampleParams, xs: Sequence[Fraction]) -> CheckReport:
  """Every x in <A> below 1 has finitely many divisors, each certified.

  A chain of principal ideals through x in <A> runs through divisors of x,
  so a finite divisor set bounds every such chain.
  """
  report = CheckReport(
    check_id="monalg.a_accp",
    anchor="<A> satisfies ACCP",
    summary=f"{len(xs)} elements",
  )
  for x in xs:
    proof = membership_a(params, x)
    if not proof.is_member:
      report.violate("not-in-A", x=x, reason=proof.reason)
      continue
    try:
      divisors = a_divisors(params, x)
    except SearchBoundExceededError as exc:
      report.mark_inconclusive(str(exc), x=x)
      continue
    expected = 1
    for _, c in proof.coefficients:
      expected *= c + 1
    uncertified = [d for d in divisors if not membership_a(params, x - d).is_member]
    if uncertified or len(divisors) != expected:
      report.violate(
        "divisor-box",
        x=x,
        count=len(divisors),
        expected=expected,
        uncertified=uncertified,
      )
    else:
      report.add_witness(condition="finite-divisors", x=x, count=len(divisors))
  return report
