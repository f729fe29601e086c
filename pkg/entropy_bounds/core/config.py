"""Library configuration using Pydantic Settings.

This module provides type-safe environment variable management for the
numeric tolerances, solver limits and runtime knobs shared by every
sub-package.
"""

from functools import lru_cache

from pydantic import computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables (prefix ``ENTROPY_BOUNDS_``).

    Attributes:
        ENV: Runtime environment (development, production). Selects the log sink.
        LOG_LEVEL: Minimum level emitted by the loguru sink.
        MAX_WORKERS: Thread pool size for Monte Carlo trials.
        SHOW_PROGRESS: Show tqdm progress bars for trial loops.
        NORMALIZATION_TOL: Allowed deviation of a probability vector from 1.
        LP_MAX_SUPPORT: Largest support size accepted by the transport LP.
        METRIC_CHECK_MAX_SUPPORT: Largest support on which the triangle
            inequality is checked exhaustively.
        LEGENDRE_GRID_SIZE: Number of log-spaced lambda points in a CGF envelope.
        LEGENDRE_LAMBDA_CAP: Upper end of the lambda grid for envelopes with b = inf.
        RENYI_LAMBDA_MAX: Upper end of the lambda grid for the Renyi condition fit.
        DEFAULT_SEED: Seed used when none is given.
        DEFAULT_EPSILON: Typicality level for ERM runs.
        NEWTON_MAX_ITER: Iteration cap for exponential-family projections.
        NEWTON_TOL: Stationarity tolerance ``max|grad A(theta) - mu|``.
        MAX_RESAMPLES: Retries for boundary samples in the expfam experiment.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ENTROPY_BOUNDS_",
        case_sensitive=True,
        extra="ignore",
    )

    # Runtime
    ENV: str = "development"
    LOG_LEVEL: str = "INFO"
    MAX_WORKERS: int = 4
    SHOW_PROGRESS: bool = False

    # Numerics
    NORMALIZATION_TOL: float = 1e-12
    LP_MAX_SUPPORT: int = 64
    METRIC_CHECK_MAX_SUPPORT: int = 32
    LEGENDRE_GRID_SIZE: int = 512
    LEGENDRE_LAMBDA_CAP: float = 1e6
    RENYI_LAMBDA_MAX: float = 50.0

    # Experiments
    DEFAULT_SEED: int = 0
    DEFAULT_EPSILON: float = 0.1
    NEWTON_MAX_ITER: int = 200
    NEWTON_TOL: float = 1e-8
    MAX_RESAMPLES: int = 50

    @computed_field  # type: ignore[misc]
    @property
    def is_production(self) -> bool:
        """Whether logs should be emitted as JSON lines.

        Returns:
            True when ``ENV`` is ``production``.
        """
        return self.ENV.lower() == "production"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance.

    Returns:
        Settings instance loaded from environment.
    """
    return Settings()


settings = get_settings()
