#src/preferences.py
#18 Oct 2026

import logging
import os
import json
from pathlib import Path

from src.numerics.errors import ConfigError
from src.system.safety import require_safe_path

CONFIG_PATH = Path(__file__).parent.parent / "config" / "config.json"
PROJECT_ROOT = Path(__file__).resolve().parents[1]
DEFAULT_CONFIG = {
    "gamma": 1.4,
    "cfl": 0.05,
    "seed": 0,
    "threads": 1,
    "log_dir": str(PROJECT_ROOT / "logs"),
    "log_level": "INFO",
    "output_dir": str(PROJECT_ROOT / "output"),
    "ic": "density_wave",
}


def load_config(path: Path | None = None, logger=None) -> dict:
    """
    Reads the JSON config at path (default CONFIG_PATH) merged over DEFAULT_CONFIG.
    Missing or blank values take the default; a missing or corrupted file
    falls back to the defaults entirely.
    """
    logger = logger or logging.getLogger(__name__)
    path = Path(path) if path else CONFIG_PATH
    if not path.exists():
        log = logger.warning if path != CONFIG_PATH else logger.debug
        log(f"Config file {path} missing. Using default settings.")
        return DEFAULT_CONFIG.copy()

    try:
        with open(path, "r") as f:
            loaded = json.load(f)
    except json.JSONDecodeError:
        logger.error(f"Config file {path} is corrupted. Using default settings.")
        return DEFAULT_CONFIG.copy()

    if not isinstance(loaded, dict):
        logger.error(f"Config file {path} is not a JSON object. Using default settings.")
        return DEFAULT_CONFIG.copy()

    # Merge loaded config with defaults (fill missing or blank values)
    config = {}
    for key, default in DEFAULT_CONFIG.items():
        value = loaded.get(key, default)
        if isinstance(value, str):
            value = value.strip()
        config[key] = value if value != "" else default
    return config


def save_config(new_data: dict, path: Path | None = None) -> dict:
    """Merges new_data into the stored config and writes it back."""
    path = Path(path) if path else CONFIG_PATH
    config = _load_config(path)
    config.update(new_data)  # merge instead of overwrite
    _write_config(config, path)
    return config


def _load_config(path: Path = CONFIG_PATH) -> dict:
    if path.exists():
        try:
            with open(path, "r") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is corrupted: {e}") from e
    return {}


def _write_config(config: dict, path: Path = CONFIG_PATH):
    os.makedirs(path.parent, exist_ok=True)
    with open(path, "w") as f:
        json.dump(config, f, indent=2)


def get_log_path(config: dict | None = None) -> Path:
    config = config or load_config()
    path = Path(config.get("log_dir") or DEFAULT_CONFIG["log_dir"])
    require_safe_path(path, "Log Directory")
    path.mkdir(exist_ok=True, parents=True)
    return path


def get_output_dir(config: dict | None = None) -> Path:
    config = config or load_config()
    path = Path(config.get("output_dir") or DEFAULT_CONFIG["output_dir"])
    require_safe_path(path, "Output Directory")
    return path
