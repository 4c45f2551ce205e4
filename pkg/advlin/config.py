"""Application configuration using Pydantic Settings."""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Runtime
    ADVLIN_SEED: int = 0
    ADVLIN_OUT_DIR: str = "results"
    ADVLIN_JOBS: int = 1

    # Logging
    ADVLIN_LOG_LEVEL: str = "INFO"
    ADVLIN_LOG_JSON: bool = True

    # Data model
    MU: float = 1.0
    SIGMA: float = 1.0
    DIMENSION: int = 100

    # Training
    ETA: float = 0.001
    INIT_SIGMA: float = 1.0
    HINGE_MARGIN: int = 1

    # 1-d sign-count experiment
    SIGN_COUNT_ITERATIONS: int = 100_000
    SIGN_COUNT_EPS_GRID: str = "0:20:0.5"
    SIGN_COUNT_N_TEST: int = 100_000

    # 100-d epoch experiment
    N_TRAIN: int = 100_000
    N_TEST: int = 100_000
    EPOCHS: int = 200

    # Expected dynamics
    DYNAMICS_HORIZON: int = 100_000
    DYNAMICS_THETA0: str = "1/1000000"
    DETECT_CYCLE_MAX_STEPS: int = 1_000_000

    # Shifted-intercept experiment
    INTERCEPT_ETA: float = 0.01
    INTERCEPT_STEPS: int = 10_000
    INTERCEPT_N: int = 2_000
    INTERCEPT_MU1: float = 2.0
    INTERCEPT_MU2: float = 1.0
    INTERCEPT_SIGMA: float = 0.25

    # Artifacts
    CSV_SIGNIFICANT_DIGITS: int = 17

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore"
    )


# Global settings instance
settings = Settings()
