from typing import Literal, Optional
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # App Configuration
    APP_NAME: str = "Like-Mindedness Community Benchmark"

    # Logfire Configuration
    LOGFIRE_TOKEN: Optional[str] = None
    LOG_CONSOLE: bool = True
    LOG_LEVEL: Literal["debug", "info", "notice", "warn", "error"] = "info"

    # Quality Function Configuration
    MODULARITY_VARIANT: Literal["newman", "paper_literal"] = "newman"

    # Ratings Dataset Filters
    MOVIE_MAX_POPULARITY: int = 50
    MIN_RATINGS: int = 5
    MIN_FRIENDS: int = 5

    # Follow Dataset Filters
    CELEB_THRESHOLD: int = 10000
    MIN_NONCELEBRITY_FRIENDS: int = 5000

    # Algorithm Configuration
    GN_NODE_WARNING: int = 5000
    LOUVAIN_AGGREGATE: bool = False
    SWEEP_WORKERS: int = 1

    # Storage Configuration
    SIM_CACHE_PATH: Optional[str] = None
    OUTPUT_PATH: str = "./bench_output/"

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()

def get_settings() -> Settings:
    """Get application settings."""
    return settings
