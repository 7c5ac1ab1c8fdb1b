import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MarkedPattern:
    """
    One realisation of the marked point process.

    `points` holds (time, mark) pairs sorted by time; marks are claim sizes.
    """
    horizon: float
    points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        points = tuple((float(t), float(x)) for t, x in self.points)
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f'horizon must be positive and finite, got {self.horizon}')
        for t, x in points:
            if t < 0 or t > self.horizon:
                raise ValueError(f'time {t} outside [0, {self.horizon}]')
            if not x > 0:
                raise ValueError(f'marks must be strictly positive, got {x}')
        if any(a[0] > b[0] for a, b in zip(points, points[1:])):
            raise ValueError('points must be sorted by time')
        object.__setattr__(self, 'points', points)

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.points)

    @property
    def marks(self) -> tuple[float, ...]:
        return tuple(x for _, x in self.points)

    @property
    def count(self) -> int:
        return len(self.points)
