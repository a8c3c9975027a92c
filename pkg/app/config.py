from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="OSHP_")

    # Logging
    log_level: str = "INFO"

    # Evaluation
    threads: int = 1
    eval_chunk_symbols: int = 4096

    # Training
    train_log_every: int = 100


@lru_cache
def get_settings() -> Settings:
    return Settings()
