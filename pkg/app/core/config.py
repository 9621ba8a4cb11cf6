# app/core/config.py
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    PROJECT_NAME: str = "Quasi-Banach Averages"
    API_V1_STR: str = "/api/v1"

    SERVER_HOST: str = "127.0.0.1"
    SERVER_PORT: int = 8000
    LOG_LEVEL: str = "INFO"

    # Construction defaults (overridable per run by flags or a config file)
    DEFAULT_P: float = 0.5
    DEFAULT_VARIANT: str = "thm13"
    DEFAULT_Q_CAP: int = 60
    DEFAULT_TOL: float = 1e-9

    # Only exact cancellation removes a coordinate
    ZERO_TOL: float = 1e-300
    # Absolute bound for a full block partial sum
    VANISHING_TOL: float = 1e-12

    # 17 significant digits round-trip any double
    CSV_DIGITS: int = 17

    # Search budgets
    ORACLE_MAX_Q: int = 6
    ORACLE_MAX_POINTS: int = 2_000_000
    VERIFY_MAX_Q: int = 20
    EXHAUSTIVE_MAX_Q: int = 8

    model_config = SettingsConfigDict(env_file=".env", extra='ignore')

settings = Settings()
