from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
  log_level: str = "INFO"

  # Search caps: exceeding any of these is a loud error or an
  # "inconclusive" verdict, never a silent answer.
  scan_cap: int = Field(
    default=10_000_000,
    gt=0,
    description="Maximum candidates examined by a prime scan",
  )
  dp_cap: int = Field(
    default=2_000_000,
    gt=0,
    description="Largest scaled target accepted by the coin reachability table",
  )
  enumeration_cap: int = Field(
    default=200_000,
    gt=0,
    description="Largest number of elements a truncation enumeration may produce",
  )
  division_step_cap: int = Field(default=64, gt=0)
  max_candidates: int = Field(default=20_000, gt=0)

  # Randomised sampling sizes used by the scenario runner
  uniqueness_samples: int = Field(default=1000, gt=0)
  divisibility_samples: int = Field(default=500, gt=0)

  verify_out: Path | None = Field(
    default=None,
    description="Report directory; overrides --out when set",
  )

  model_config = SettingsConfigDict(
    env_file=(".env", ".env.secrets"),
    env_file_encoding="utf-8",
    extra="ignore",
  )


settings = Settings()
