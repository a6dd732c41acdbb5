"""The atomic monoid M_phi whose monoid algebras are not atomic."""

from puiseux_lift.counterexample.deciders import (
  CounterexampleOracle,
  MembershipKind,
  MembershipProof,
  a_divisors,
  common_divisor_of_bc_subset,
  improve_common_divisor,
  membership_a,
  membership_m,
)
from puiseux_lift.counterexample.params import (
  CounterexampleError,
  CounterexampleParams,
  InvariantViolationError,
  build_default_params,
  main_monoid,
)
from puiseux_lift.counterexample.tables import (
  MainLiftTables,
  build_main_lift,
  main_lifted_monoid,
)

__all__ = [
  "CounterexampleError",
  "CounterexampleOracle",
  "CounterexampleParams",
  "InvariantViolationError",
  "MainLiftTables",
  "MembershipKind",
  "MembershipProof",
  "a_divisors",
  "build_default_params",
  "build_main_lift",
  "common_divisor_of_bc_subset",
  "improve_common_divisor",
  "main_lifted_monoid",
  "main_monoid",
  "membership_a",
  "membership_m",
]
