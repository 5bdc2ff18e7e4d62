from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    THREADS: int = 4
    MAX_QUBITS: int = 10
    VERDICT_TOL: float = 1e-9
    SVD_FLOOR: float = 1e-12
    EXHAUSTIVE_LIMIT: int = 12
    MAX_ALLOCATIONS: int = 200_000
    GRID_STEPS: int = 100
    SEED: int = 0
    LOG_JSON: bool = False
    LOG_LEVEL: str = "WARNING"
    model_config = SettingsConfigDict(
        env_prefix="SEPTENSOR_", env_file=".env", env_file_encoding="utf-8"
    )


settings = Settings()
