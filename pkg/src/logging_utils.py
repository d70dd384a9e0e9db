# src/logging_utils.py
#18 Oct 2026

import logging
from datetime import datetime
from pathlib import Path

from src.system.safety import require_safe_path

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"
CONSOLE_FORMAT = "[%(levelname)s] %(message)s"
CURRENT_LOG_FILE = None


class ExperimentLoggingAdapter(logging.LoggerAdapter):
    """Prefixes every message with the running experiment, e.g. [simulate euler2d]."""

    def __init__(self, logger, experiment: str | None = None):
        super().__init__(logger, {})
        self.experiment = experiment

    def process(self, msg, kwargs):
        if self.experiment:
            return f"[{self.experiment}] {msg}", kwargs
        return msg, kwargs


def log_file_name(run_label: str | None = None) -> str:
    stamp = datetime.now().strftime("%Y%m%d.%H%M%S")
    if run_label:
        return f"splitform_lab_{stamp}_{run_label.replace(' ', '_')}.log"
    return f"splitform_lab_{stamp}.log"


def configure_logger(log_dir: Path, run_label: str | None = None, reuse_existing: bool = False,
                     level=logging.INFO) -> Path:
    """
    Routes the root logger to one file per run and mirrors warnings to stderr.
    - log_dir: target log directory (must be safe)
    - run_label: appended to the file name, e.g. "simulate euler2d"
    - reuse_existing: keep appending to CURRENT_LOG_FILE when it already lives in log_dir
    Returns: Path to CURRENT_LOG_FILE
    """
    global CURRENT_LOG_FILE

    log_dir = Path(log_dir)
    require_safe_path(log_dir, "Logging Directory")
    log_dir.mkdir(parents=True, exist_ok=True)

    append = reuse_existing and CURRENT_LOG_FILE is not None and CURRENT_LOG_FILE.parent == log_dir
    if not append:
        CURRENT_LOG_FILE = log_dir / log_file_name(run_label)

    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
        handler.close()

    logging.basicConfig(filename=CURRENT_LOG_FILE, filemode="a" if append else "w", level=level, format=LOG_FORMAT)

    console = logging.StreamHandler()
    console.setLevel(logging.WARNING)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    logging.root.addHandler(console)

    return CURRENT_LOG_FILE
