"""
Standard Pareto mark law and its limit measure.
"""
import math
from dataclasses import dataclass


def _check_alpha(alpha: float) -> float:
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not math.isfinite(alpha) or alpha <= 0:
        raise ValueError(f'alpha must be a positive finite number, got {alpha!r}')
    return float(alpha)


@dataclass(frozen=True)
class ParetoLaw:
    """Claim sizes with survival x^(-alpha) on [1, inf)."""
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, 'alpha', _check_alpha(self.alpha))

    @property
    def mean(self) -> float:
        """E[X], infinite for alpha <= 1."""
        if self.alpha <= 1.0:
            return math.inf
        return self.alpha / (self.alpha - 1.0)


@dataclass(frozen=True)
class LimitMeasure:
    """mu(dx) = alpha x^(-alpha-1) dx on (0, inf)."""
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, 'alpha', _check_alpha(self.alpha))

    def tail_mass(self, r: float) -> float:
        """mu((r, inf)) = r^(-alpha)."""
        if not r > 0:
            raise ValueError(f'r must be positive, got {r}')
        if math.isinf(r):
            return 0.0
        return r ** (-self.alpha)

    def interval_mass(self, low: float, high: float) -> float:
        """mu((low, high]); high may be infinite."""
        if not low > 0:
            raise ValueError(f'Mark interval must be bounded away from 0, got lower bound {low}')
        if high < low:
            raise ValueError(f'Empty mark interval ({low}, {high}]')
        return self.tail_mass(low) - self.tail_mass(high)
