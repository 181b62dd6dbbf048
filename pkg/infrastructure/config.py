"""
Configuration settings for the QCS network simulator
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Process-level configuration; everything about a run lives in its scenario file
    """

    # Basic App Settings
    APP_NAME: str = "QCS Network Simulator"
    APP_VERSION: str = "0.1.0"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False

    # Worker count: 1 = sequential, -1 = all cores
    QCS_THREADS: int = 1

    # Paths
    SCENARIO_DIR: str = "scenarios"
    OUTPUT_DIR: str = "out"

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"  # Ignore additional environment variables
