"""Parameter override files for the verification scenarios.

A config file is a JSON (or YAML) mapping whose keys mirror the tunable
fields of the counterexample construction. Every override goes through the
same invariant checks as the defaults.
"""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any

import yaml
from pydantic import BaseModel, ConfigDict, Field

from puiseux_lift.core.exactnum import RationalStr


class ParamsOverrides(BaseModel):
  """Overrides for the counterexample parameters; unset fields keep defaults."""

  model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

  epsilon: RationalStr | None = None
  q_offset: Annotated[
    int | None,
    Field(
      default=None, ge=1, description="q_n is the least prime above 2^(n + q_offset)"
    ),
  ]
  b1: RationalStr | None = None
  c1: RationalStr | None = None

  @classmethod
  def from_yaml(cls, content: str) -> ParamsOverrides:
    """Parse and validate overrides from JSON or YAML text.

    Raises:
        ValueError: If the text is not valid YAML or does not match the schema.
    """
    try:
      data = yaml.safe_load(content)
    except yaml.YAMLError as e:
      raise ValueError(f"Invalid config syntax: {e}") from e

    if data is None:
      data = {}

    return cls.model_validate(data)

  @classmethod
  def from_yaml_file(cls, path: Path | str) -> ParamsOverrides:
    """Load and validate overrides from a file.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ValueError: If the content is invalid.
    """
    path = Path(path)
    if not path.exists():
      raise FileNotFoundError(f"Config file not found: {path}")

    return cls.from_yaml(path.read_text(encoding="utf-8"))

  def to_document(self) -> dict[str, Any]:
    return self.model_dump(mode="json", exclude_none=True)


def load_overrides(path: Path | str | None) -> ParamsOverrides | None:
  """Load overrides from file, returning None if path is None."""
  if path is None:
    return None
  return ParamsOverrides.from_yaml_file(path)


def format_validation_errors(errors: list[Any]) -> str:
  """Format Pydantic validation errors for user-friendly display.

  Args:
      errors: List of error dictionaries from ValidationError

  Returns:
      Formatted error message string
  """
  lines = ["Invalid parameter configuration:", ""]
  for error in errors:
    loc = ".".join(str(x) for x in error["loc"])
    msg = error["msg"]
    lines.append(f"  - {loc}: {msg}")
  return "\n".join(lines)
