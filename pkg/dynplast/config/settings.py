# dynplast/config/settings.py

import os
import logging
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from dynplast.common.exceptions import ConfigurationError

logger = logging.getLogger(__name__)
load_dotenv()

DEFAULT_OUTPUT_DIR = "runs"
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_WORKERS = 1


@dataclass(frozen=True)
class Settings:
    """Process-level defaults; command-line flags override them."""
    output_dir: Path
    log_level: str
    workers: int


def get_settings() -> Settings:
    """Read DYNPLAST_OUTPUT_DIR, DYNPLAST_LOG_LEVEL and DYNPLAST_WORKERS; none is required."""
    workers_raw = os.getenv("DYNPLAST_WORKERS", str(DEFAULT_WORKERS))
    try:
        workers = int(workers_raw)
    except ValueError as e:
        raise ConfigurationError(f"DYNPLAST_WORKERS must be an integer, got {workers_raw!r}",
                                 key="DYNPLAST_WORKERS", original_error=e)
    if workers < 1:
        raise ConfigurationError("DYNPLAST_WORKERS must be at least 1", key="DYNPLAST_WORKERS")
    return Settings(
        output_dir=Path(os.getenv("DYNPLAST_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)),
        log_level=os.getenv("DYNPLAST_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper(),
        workers=workers,
    )
