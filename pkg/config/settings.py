"""
Django settings for the MarkedRisk project.

Only what the experiment commands need is configured: no database,
no middleware, no templates. Every MARKEDRISK_* knob can be overridden
from the environment (or a .env file next to manage.py).
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Application version - read from the local version.txt file
from MarkedRisk.utils.version_utils import get_app_version
from MarkedRisk.utils.settings_utils import KNOB_DEFAULTS
APP_VERSION = get_app_version(base_dir=BASE_DIR)

# Nothing is served, the key only satisfies Django's startup checks
SECRET_KEY = os.getenv('SECRET_KEY', 'markedrisk-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'


def env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    try:
        return int(value)
    except ValueError as exc:
        raise RuntimeError(f'{name} must be an integer, got {value!r}.') from exc


def env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    try:
        return float(value)
    except ValueError as exc:
        raise RuntimeError(f'{name} must be a number, got {value!r}.') from exc


INSTALLED_APPS = [
    'MarkedRisk',
]

DATABASES = {}

USE_TZ = True
TIME_ZONE = 'UTC'

# Simulation and quadrature knobs
MARKEDRISK_THREADS = env_int('MARKEDRISK_THREADS', KNOB_DEFAULTS['MARKEDRISK_THREADS'])
MARKEDRISK_CHUNK_SIZE = env_int('MARKEDRISK_CHUNK_SIZE', KNOB_DEFAULTS['MARKEDRISK_CHUNK_SIZE'])
MARKEDRISK_QUAD_NODES_K2 = env_int('MARKEDRISK_QUAD_NODES_K2', KNOB_DEFAULTS['MARKEDRISK_QUAD_NODES_K2'])
MARKEDRISK_QUAD_NODES_K3 = env_int('MARKEDRISK_QUAD_NODES_K3', KNOB_DEFAULTS['MARKEDRISK_QUAD_NODES_K3'])
MARKEDRISK_QUAD_NODES_HIGH = env_int('MARKEDRISK_QUAD_NODES_HIGH', KNOB_DEFAULTS['MARKEDRISK_QUAD_NODES_HIGH'])
MARKEDRISK_QUAD_RTOL = env_float('MARKEDRISK_QUAD_RTOL', KNOB_DEFAULTS['MARKEDRISK_QUAD_RTOL'])
MARKEDRISK_REJECTION_CAP = env_int('MARKEDRISK_REJECTION_CAP', KNOB_DEFAULTS['MARKEDRISK_REJECTION_CAP'])
MARKEDRISK_POISSON_TAIL = env_float('MARKEDRISK_POISSON_TAIL', KNOB_DEFAULTS['MARKEDRISK_POISSON_TAIL'])
MARKEDRISK_OUTPUT_DIR = os.getenv('MARKEDRISK_OUTPUT_DIR', KNOB_DEFAULTS['MARKEDRISK_OUTPUT_DIR'])
MARKEDRISK_LOG_LEVEL = os.getenv('MARKEDRISK_LOG_LEVEL', KNOB_DEFAULTS['MARKEDRISK_LOG_LEVEL']).upper()

# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'rich': {
            'format': '%(name)s: %(message)s',
            'datefmt': '[%X]',
        },
    },
    'handlers': {
        'console': {
            'class': 'rich.logging.RichHandler',
            'formatter': 'rich',
            'level': MARKEDRISK_LOG_LEVEL,
            'show_path': False,
            'rich_tracebacks': True,
        },
    },
    'loggers': {
        'MarkedRisk': {
            'handlers': ['console'],
            'level': MARKEDRISK_LOG_LEVEL,
            'propagate': False,
        },
    },
}
