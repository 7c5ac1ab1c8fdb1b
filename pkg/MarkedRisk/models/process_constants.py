"""
Base process kinds
"""


class ProcessKind:
    """
    Ground point process constants used by models, services and commands.

    Args:
        None

    Returns:
        None
    """
    POISSON = 'poisson'
    GAMMA_RENEWAL = 'gamma-renewal'
    GRID = 'grid'
    BINOMIAL = 'binomial'

    # Keep choice tuples in sync with the constants above.
    CHOICES = [
        (POISSON, 'Homogeneous Poisson'),
        (GAMMA_RENEWAL, 'Stationary Gamma(2,1) renewal'),
        (GRID, 'Deterministic grid'),
        (BINOMIAL, 'Binomial (uniform times)'),
    ]

    # Kinds whose factorial moment measures have a density
    CONTINUOUS = (POISSON, GAMMA_RENEWAL, BINOMIAL)
    # Kinds whose point count is a fixed n
    FIXED_COUNT = (GRID, BINOMIAL)

    @classmethod
    def values(cls) -> list[str]:
        return [value for value, _ in cls.CHOICES]


# Gamma(shape=2, rate=1) inter-arrivals
GAMMA_SHAPE = 2.0
GAMMA_RATE = 1.0
GAMMA_MEAN_GAP = GAMMA_SHAPE / GAMMA_RATE
