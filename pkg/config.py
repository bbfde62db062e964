from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_prefix="GTRS_"
    )

    seed: int = Field(0, ge=0)
    oracle_budget: int = Field(16, ge=1)
    log_level: str = "WARNING"


config = Settings()
