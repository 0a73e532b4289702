"""Application configuration using Pydantic Settings."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings with environment variable support (prefix ``ENTSTRUCT_``)."""

    model_config = SettingsConfigDict(
        env_prefix="ENTSTRUCT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    environment: str = "development"
    log_level: str = "INFO"
    output_dir: str = "runs"

    # Dense oracle
    oracle_cap: int = 10  # largest qubit count the 2^n x 2^n path will build

    # Dataset generation
    per_composition: int = 15000
    generation_chunk_size: int = 1000
    threads: int | None = None  # None means every available core
    sampler_attempt_cap: int = 1_000_000

    # Training
    learning_rate: float = 1e-3
    batch_size: int = 256

    # Analysis
    sweep_points: int = 10001
    validation_points: int = 1001
    anchor_points: int = 1001
    bound_tolerance: float = 0.05


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
