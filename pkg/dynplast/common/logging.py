"""
Logging setup for simulations, sweeps and verification.

Every record carries a ``run_context`` field naming the command and the run it
belongs to (the first 12 hex digits of the config hash, or the run directory
for commands that start from one). Log files live outside run directories so
that run artifacts stay byte-identical across reruns.
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

HASH_PREFIX_LEN = 12

DEFAULT_FORMAT = "%(asctime)s [%(levelname)s] [%(run_context)s] %(name)s: %(message)s"
DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class RunContextFilter(logging.Filter):
    """Stamps records with the command and run they belong to."""

    def __init__(self):
        super().__init__()
        self.command: Optional[str] = None
        self.run: Optional[str] = None

    @property
    def label(self) -> str:
        parts = [p for p in (self.command, self.run) if p]
        return " ".join(parts) if parts else "-"

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_context = self.label
        return True


_RUN_CONTEXT = RunContextFilter()


def run_label(config_hash: Optional[str] = None, run_dir: Optional[Union[str, Path]] = None) -> Optional[str]:
    if config_hash:
        return config_hash[:HASH_PREFIX_LEN]
    if run_dir:
        return Path(run_dir).name
    return None


def bind_run_context(
    command: Optional[str] = None,
    config_hash: Optional[str] = None,
    run_dir: Optional[Union[str, Path]] = None,
) -> str:
    """Set the command and run stamped on subsequent records; returns the label."""
    _RUN_CONTEXT.command = command
    _RUN_CONTEXT.run = run_label(config_hash, run_dir)
    return _RUN_CONTEXT.label


def configure_logging(
    level: Union[int, str] = logging.INFO,
    log_file: Optional[str] = None,
    log_format: str = DEFAULT_FORMAT,
    date_format: str = DEFAULT_DATE_FORMAT,
) -> None:
    """
    Configure logging for the command-line tools.

    Args:
        level: Logging level, as an int or a name such as "DEBUG" (default: INFO)
        log_file: Optional path to log file
        log_format: Log message format; may use the run_context field
        date_format: Date format in log messages
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    formatter = logging.Formatter(log_format, date_format)
    handlers = [logging.StreamHandler(sys.stdout)]
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))

    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        handler.addFilter(_RUN_CONTEXT)

    logging.basicConfig(level=level, handlers=handlers, force=True)


def create_run_log_file(
    base_dir: Union[str, Path] = "logs",
    command: str = "run",
    config_hash: Optional[str] = None,
    run_dir: Optional[Union[str, Path]] = None,
) -> str:
    """
    Timestamped log path dynplast_<command>[_<run>]_<timestamp>.log under base_dir.

    The run part is the config-hash prefix, or the run directory name when no
    hash is known.
    """
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_dir = Path(base_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    run = run_label(config_hash, run_dir)
    stem = "_".join(p for p in ("dynplast", command.replace("-", "_"), run, timestamp) if p)
    return str(log_dir / f"{stem}.log")
