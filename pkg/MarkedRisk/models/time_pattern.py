import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TimePattern:
    """Sorted arrival times of one realisation on [0, horizon]."""
    horizon: float
    times: tuple[float, ...] = ()

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f'horizon must be positive and finite, got {self.horizon}')
        if any(t < 0 or t > self.horizon for t in times):
            raise ValueError(f'times must lie in [0, {self.horizon}]')
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError('times must be sorted')
        object.__setattr__(self, 'times', times)

    @property
    def count(self) -> int:
        return len(self.times)

    def count_in(self, low: float, high: float) -> int:
        """Number of arrivals in (low, high]."""
        return sum(1 for t in self.times if low < t <= high)
