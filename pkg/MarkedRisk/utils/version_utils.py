"""
Version lookup for run manifests.

The version lives in version.txt at the project root. Manifests record it
so a replayed run can tell whether the code that produced it has moved on.
"""
import logging
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

UNKNOWN_VERSION = 'unknown'


def get_version_from_local(version_file_path: Path) -> Optional[str]:
    """
    Read version from local version.txt file.

    Args:
        version_file_path: Path to version.txt file

    Returns:
        Version string if file exists and is readable, None otherwise
    """
    try:
        if version_file_path.exists():
            version = version_file_path.read_text(encoding='utf-8').strip()
            if version:
                return version
        else:
            logger.warning("Local version file not found: %s", version_file_path)
    except OSError as e:
        logger.warning("Couldn't read local version file (%s): %s", version_file_path, type(e).__name__)
    return None


def get_app_version(base_dir: Optional[Path] = None) -> str:
    """
    Get application version from the local version.txt.

    Args:
        base_dir: Project root holding version.txt. Defaults to the
                  directory above the MarkedRisk package.

    Returns:
        Version string, or 'unknown' when the file is missing
    """
    if base_dir is None:
        base_dir = Path(__file__).resolve().parent.parent.parent
    version = get_version_from_local(Path(base_dir) / 'version.txt')
    return version or UNKNOWN_VERSION
