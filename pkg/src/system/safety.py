# src/system/safety.py
#18 Oct 2026

from pathlib import Path
import logging

PACKAGE_ROOT = Path(__file__).resolve().parents[1]


def get_protected_folders() -> list[Path]:
    """
    Folders that experiment outputs and logs must never be written into.
    """
    return [PACKAGE_ROOT]


def is_safe_path(path: Path, logger=None) -> bool:
    """
    Checks that a path may be used as a log directory or output target:
    not a filesystem root and not inside the package source tree.
    """
    logger = logger or logging.getLogger(__name__)

    try:
        path = Path(path).resolve()

        if path == Path(path.anchor):
            return False

        for base in get_protected_folders():
            if path == base or path.is_relative_to(base):
                return False

        return True

    except Exception as e:
        logger.warning(f"[safety] Path resolution failed for {path}: {e}")
        return False


def is_safe_output_file(path: Path, logger=None) -> bool:
    """
    is_safe_path() plus: the target is not an existing directory.
    """
    return is_safe_path(path, logger=logger) and not Path(path).is_dir()


def require_safe_path(path: Path, purpose: str = "unspecified", logger=None) -> None:
    """
    Raises RuntimeError if the given directory path is unsafe.
    """
    logger = logger or logging.getLogger(__name__)
    if not is_safe_path(path, logger=logger):
        msg = f"[SAFETY BLOCK] Unsafe path for {purpose}: {path}. {explain_path_rejection(path, logger=logger)}"
        logger.error(msg)
        raise RuntimeError(msg)


def require_safe_output_file(path: Path, purpose: str = "output", logger=None) -> None:
    """
    Raises RuntimeError if the given file target is unsafe.
    """
    logger = logger or logging.getLogger(__name__)
    if not is_safe_output_file(path, logger=logger):
        msg = f"[SAFETY BLOCK] Unsafe file for {purpose}: {path}. {explain_path_rejection(path, logger=logger)}"
        logger.error(msg)
        raise RuntimeError(msg)


def explain_path_rejection(path: Path, logger=None) -> str:
    """
    Returns a diagnostic explanation of why a path is considered unsafe.
    """
    logger = logger or logging.getLogger(__name__)
    try:
        path = Path(path).resolve()
    except Exception as e:
        logger.warning(f"Path resolution failed for {path}: {e}")
        return f"Rejected path '{path}': could not resolve."

    reasons = []
    if path == Path(path.anchor):
        reasons.append("it is the root of the filesystem.")
    if any(path == base or path.is_relative_to(base) for base in get_protected_folders()):
        reasons.append("it is inside the package source tree.")
    if path.is_dir():
        reasons.append("it is an existing directory.")

    return f"Rejected path '{path}': " + " ".join(reasons) if reasons else f"Path '{path}' is safe."
