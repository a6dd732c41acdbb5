"""Unit tests for parameter override files."""

from __future__ import annotations

from fractions import Fraction
from textwrap import dedent
from typing import TYPE_CHECKING

import pytest
from pydantic import ValidationError

if TYPE_CHECKING:
  from pathlib import Path

from puiseux_lift.config import (
  ParamsOverrides,
  format_validation_errors,
  load_overrides,
)


class TestParamsOverrides:
  """Test parsing and validation of overrides."""

  def test_defaults(self) -> None:
    """Test that unset fields stay None."""
    overrides = ParamsOverrides()
    assert overrides.epsilon is None
    assert overrides.q_offset is None
    assert overrides.to_document() == {}

  def test_from_yaml(self) -> None:
    """Test loading every field from YAML."""
    overrides = ParamsOverrides.from_yaml(
      dedent("""
        epsilon: 1/12
        q_offset: 7
        b1: 130/131
        c1: "136/137"
      """)
    )
    assert overrides.epsilon == Fraction(1, 12)
    assert overrides.q_offset == 7
    assert overrides.b1 == Fraction(130, 131)
    assert overrides.c1 == Fraction(136, 137)

  def test_from_json(self) -> None:
    """Test that JSON text is accepted as YAML."""
    overrides = ParamsOverrides.from_yaml('{"epsilon": "1/12"}')
    assert overrides.epsilon == Fraction(1, 12)

  def test_from_yaml_empty(self) -> None:
    """Test that empty text keeps every default."""
    assert ParamsOverrides.from_yaml("") == ParamsOverrides()


class TestParamsOverridesValidation:
  """Test rejected override files."""

  def test_invalid_yaml_syntax(self) -> None:
    """Test that invalid YAML syntax raises ValueError."""
    with pytest.raises(ValueError, match="Invalid config syntax"):
      ParamsOverrides.from_yaml("epsilon: [1/12")

  def test_extra_fields_rejected(self) -> None:
    """Test that unknown fields are rejected."""
    with pytest.raises(ValidationError) as exc:
      ParamsOverrides.from_yaml("delta: 1/2")
    assert "Extra inputs" in str(exc.value)

  def test_q_offset_positive(self) -> None:
    """Test that q_offset must be at least 1."""
    with pytest.raises(ValidationError) as exc:
      ParamsOverrides.from_yaml("q_offset: 0")
    assert "q_offset" in str(exc.value)

  def test_floats_rejected(self) -> None:
    """Test that decimal constants are refused."""
    with pytest.raises(ValidationError):
      ParamsOverrides.from_yaml("epsilon: 0.05")


class TestLoading:
  """Test loading overrides from files."""

  def test_from_yaml_file(self, tmp_path: Path) -> None:
    """Test loading from file."""
    config_file = tmp_path / "params.yaml"
    config_file.write_text("epsilon: 1/12")

    assert load_overrides(config_file) == ParamsOverrides(epsilon=Fraction(1, 12))

  def test_from_yaml_file_not_found(self, tmp_path: Path) -> None:
    """Test FileNotFoundError when file missing."""
    with pytest.raises(FileNotFoundError, match="Config file not found"):
      ParamsOverrides.from_yaml_file(tmp_path / "missing.yaml")

  def test_no_path(self) -> None:
    """Test that no path means no overrides."""
    assert load_overrides(None) is None


class TestFormatValidationErrors:
  """Test error formatting helper."""

  def test_format_errors(self) -> None:
    """Test the header and one line per error."""
    errors = [
      {"loc": ("epsilon",), "msg": "Value error, Not a rational"},
      {"loc": ("q_offset",), "msg": "Input should be greater than or equal to 1"},
    ]
    lines = format_validation_errors(errors).splitlines()
    assert lines[0] == "Invalid parameter configuration:"
    assert "  - epsilon: Value error, Not a rational" in lines
    assert "  - q_offset: Input should be greater than or equal to 1" in lines
