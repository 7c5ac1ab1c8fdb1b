"""
Access to the MARKEDRISK_* knobs.

Library code calls get_knob() so it keeps working when imported outside
a configured Django project: the built-in defaults are used then.
"""
import os
from typing import Any

KNOB_DEFAULTS = {
    'MARKEDRISK_THREADS': os.cpu_count() or 1,
    'MARKEDRISK_CHUNK_SIZE': 65536,
    'MARKEDRISK_QUAD_NODES_K2': 256,
    'MARKEDRISK_QUAD_NODES_K3': 96,
    'MARKEDRISK_QUAD_NODES_HIGH': 24,
    'MARKEDRISK_QUAD_RTOL': 1e-6,
    'MARKEDRISK_REJECTION_CAP': 1_000_000,
    'MARKEDRISK_POISSON_TAIL': 1e-15,
    'MARKEDRISK_OUTPUT_DIR': 'runs',
    'MARKEDRISK_LOG_LEVEL': 'INFO',
}


def get_knob(name: str) -> Any:
    """
    Return a knob from Django settings, or its built-in default.

    Args:
        name: Knob name, e.g. 'MARKEDRISK_CHUNK_SIZE'

    Returns:
        The configured value
    """
    if name not in KNOB_DEFAULTS:
        raise KeyError(f'Unknown knob: {name}')
    from django.conf import settings
    if not settings.configured:
        return KNOB_DEFAULTS[name]
    return getattr(settings, name, KNOB_DEFAULTS[name])
