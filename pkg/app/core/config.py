from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()

BASE_DIR = Path(__file__).resolve().parents[2]


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
    SCENARIO_DIR: Path = BASE_DIR / "scenarios"
    WORKERS: int = 1
    AUDIT: bool = False

    model_config = SettingsConfigDict(env_file=".env", env_prefix="PRT_", extra="ignore")


@lru_cache()
def get_settings():
    return Settings()
