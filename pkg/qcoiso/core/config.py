from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path

class Settings(BaseSettings):
    APP_NAME: str = 'qcoiso'
    LOG_LEVEL: str = 'INFO'

    # Hard ceiling on the word degree any quotient or template computation may reach
    MAX_DEGREE: int = 10
    # Extra degree allowed when searching products for coideal membership
    DEGREE_SLACK: int = 2
    # Explicit u*R*v ideal certificates are only produced below this many candidate words
    IDEAL_CERTIFICATE_MAX_WORDS: int = 400

    # Worker threads for per-generator and per-pair checks; 0 means one per core
    MAX_WORKERS: int = 0
    # Upper bound applied to MAX_WORKERS and to --jobs
    WORKER_CAP: int = 8

    # sqlite file holding computed quotient bases; empty disables the on-disk cache
    BASIS_CACHE_PATH: Path | None = Path('qcoiso_data/basis_cache.db')

    model_config = SettingsConfigDict(env_file='.env', env_file_encoding='utf-8', env_prefix='QCOISO_', extra='ignore')

settings = Settings()
