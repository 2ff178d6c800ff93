"""Process-wide settings read from the environment (prefix ``GPF_``)."""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="GPF_", env_file=".env", extra="ignore")

    output_root: Path = Path("runs")
    dimension_cap: int = Field(default=200_000, gt=0)
    dense_threshold: int = Field(default=2000, gt=0)
    max_nested_order: int = Field(default=20, ge=0)
    sparsity_budget: int = Field(default=50_000_000, gt=0)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
