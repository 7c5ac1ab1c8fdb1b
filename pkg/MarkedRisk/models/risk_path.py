import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RiskPath:
    """
    Right-continuous step path plus an optional linear drift.

    `jumps` are (time, size) pairs sorted by time. Sizes are strictly
    positive except on centered paths, which store the signed
    contributions x - c and record c in `centering`.
    """
    horizon: float
    jumps: tuple[tuple[float, float], ...] = ()
    drift: float = 0.0
    centering: float = 0.0

    def __post_init__(self):
        jumps = tuple((float(t), float(size)) for t, size in self.jumps)
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f'horizon must be positive and finite, got {self.horizon}')
        for t, size in jumps:
            if t < 0 or t > self.horizon:
                raise ValueError(f'jump time {t} outside [0, {self.horizon}]')
            if self.centering == 0.0 and not size > 0:
                raise ValueError(f'jump sizes must be strictly positive, got {size}')
        if any(a[0] > b[0] for a, b in zip(jumps, jumps[1:])):
            raise ValueError('jumps must be sorted by time')
        object.__setattr__(self, 'jumps', jumps)
        object.__setattr__(self, 'drift', float(self.drift))
        object.__setattr__(self, 'centering', float(self.centering))

    @property
    def jump_count(self) -> int:
        return len(self.jumps)

    @property
    def is_pure_jump(self) -> bool:
        return self.drift == 0.0

    @property
    def sizes(self) -> tuple[float, ...]:
        return tuple(size for _, size in self.jumps)
