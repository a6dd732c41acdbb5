"""Shared report schema for every check the verifier runs."""

from __future__ import annotations

from collections.abc import Mapping
from enum import StrEnum
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BaseModel, ConfigDict, Field

from puiseux_lift.core.certificate import MembershipCertificate
from puiseux_lift.core.exactnum import format_rational


class CheckStatus(StrEnum):
  """Outcome of a check.

  - OK: every assertion held
  - VIOLATION: an assertion failed; for theorem-backed checks this is a defect
  - INCONCLUSIVE: a bounded search ran out of budget; never a failure
  """

  OK = "ok"
  VIOLATION = "violation"
  INCONCLUSIVE = "inconclusive"


class DefectError(Exception):
  """A theorem-backed check produced a violation."""

  def __init__(self, report: CheckReport) -> None:
    reasons = ", ".join(str(w.get("condition", "?")) for w in report.witnesses)
    super().__init__(f"{report.check_id} violated: {reasons}")
    self.report = report


def jsonable(value: Any) -> Any:
  """Convert rationals, certificates and containers into JSON-ready values."""
  if isinstance(value, bool) or value is None or isinstance(value, str):
    return value
  if isinstance(value, Fraction):
    return format_rational(value)
  if isinstance(value, int):
    return int(value)
  if isinstance(value, MembershipCertificate):
    return [{"index": i, "mult": m} for i, m in value.entries]
  if isinstance(value, BaseModel):
    return value.model_dump(mode="json")
  if isinstance(value, Mapping):
    return {str(k): jsonable(v) for k, v in value.items()}
  if isinstance(value, list | tuple | set | frozenset):
    items = [jsonable(v) for v in value]
    if isinstance(value, set | frozenset):
      items.sort(key=str)
    return items
  if hasattr(value, "to_json"):
    return value.to_json()
  raise TypeError(f"Cannot serialize {type(value).__name__} into a report")


class CheckReport(BaseModel):
  """Result of one verification check.

  Witness entries are stored already converted to JSON-ready values so the
  report can be dumped canonically without custom encoders.
  """

  model_config = ConfigDict(extra="forbid")

  check_id: Annotated[str, Field(min_length=1)]
  anchor: Annotated[str, Field(min_length=1, description="Statement checked")]
  status: CheckStatus = CheckStatus.OK
  theorem_backed: bool = True
  summary: str = ""
  witnesses: list[dict[str, Any]] = Field(default_factory=list)

  def add_witness(self, **data: Any) -> None:
    self.witnesses.append(jsonable(data))

  def violate(self, condition: str, **data: Any) -> None:
    """Record a failed assertion and flip the status to VIOLATION."""
    self.status = CheckStatus.VIOLATION
    self.add_witness(condition=condition, **data)

  def mark_inconclusive(self, reason: str, **data: Any) -> None:
    if self.status is CheckStatus.OK:
      self.status = CheckStatus.INCONCLUSIVE
    self.add_witness(condition="inconclusive", reason=reason, **data)

  @property
  def passed(self) -> bool:
    return self.status is not CheckStatus.VIOLATION

  @property
  def is_defect(self) -> bool:
    return self.theorem_backed and self.status is CheckStatus.VIOLATION

  def raise_for_status(self) -> CheckReport:
    """Raise ``DefectError`` on a violation, otherwise return ``self``."""
    if self.status is CheckStatus.VIOLATION:
      raise DefectError(self)
    return self
