"""Integration tests running the full verification scenarios."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from puiseux_lift.core.report import CheckStatus
from puiseux_lift.counterexample.checks import atoms_report
from puiseux_lift.counterexample.params import build_default_params
from puiseux_lift.counterexample.tables import build_main_lift, main_lifted_monoid
from puiseux_lift.monalg.field import FieldSpec
from puiseux_lift.scenarios import (
  Scenario,
  ScenarioName,
  canonical_json,
  emit_report,
  run_scenario,
)
from puiseux_lift.settings import settings

if TYPE_CHECKING:
  from pathlib import Path


@pytest.fixture
def small_samples(monkeypatch: pytest.MonkeyPatch) -> None:
  """Keep randomized sampling short."""
  monkeypatch.setattr(settings, "uniqueness_samples", 100)
  monkeypatch.setattr(settings, "divisibility_samples", 50)


@pytest.mark.integration
@pytest.mark.usefixtures("small_samples")
class TestScenarioRuns:
  """Every scenario passes at a moderate depth."""

  @pytest.mark.parametrize("name", list(ScenarioName), ids=str)
  def test_scenario_passes(self, name: ScenarioName, tmp_path: Path) -> None:
    """Test that no theorem-backed check is violated."""
    report = run_scenario(Scenario(name=name, depth=6))
    assert report.exit_code == 0, [c.check_id for c in report.defects]
    files = emit_report(report, tmp_path)
    assert files.json_path.exists()

  def test_main_theorem_is_deterministic(self) -> None:
    """Test that equal scenarios give byte-identical documents."""
    scenario = Scenario(name=ScenarioName.MAIN_THEOREM, depth=5, seed=11)
    first = canonical_json(run_scenario(scenario).to_document())
    second = canonical_json(run_scenario(scenario).to_document())
    assert first == second

  def test_main_theorem_checks(self) -> None:
    """Test the descent and improvement checks of the main theorem."""
    scenario = Scenario(
      name=ScenarioName.MAIN_THEOREM, depth=5, field=FieldSpec.prime_field(7)
    )
    report = run_scenario(scenario)
    by_id = {check.check_id: check for check in report.checks}
    for label in ("Q", "F_5", "F_7"):
      descent = by_id[f"monalg.descent_chain.{label}"]
      assert descent.status is CheckStatus.OK
      assert len(descent.witnesses) == 14
    improvement = by_id["counterexample.improvement_chain"]
    assert improvement.status is CheckStatus.OK


@pytest.mark.integration
class TestDeepChecks:
  """Checks at the default depth."""

  def test_atoms_at_depth_ten(self) -> None:
    """Test that H_s, K_s and a_k are atoms and s is not, up to depth 10."""
    params = build_default_params()
    tables = build_main_lift(params, 10)
    lifted = main_lifted_monoid(tables, 10)
    assert atoms_report(lifted, tables, 10).status is CheckStatus.OK
