"""
Description of the ground point process on [0, T].
"""
import math
from dataclasses import dataclass
from typing import Optional

from MarkedRisk.models.process_constants import GAMMA_MEAN_GAP, ProcessKind


@dataclass(frozen=True)
class BaseProcessModel:
    """
    Ground process on [0, horizon].

    Poisson needs `rate`, Grid and Binomial need `n`; the Gamma renewal
    process is fully determined by its inter-arrival law.
    """
    kind: str
    horizon: float
    rate: Optional[float] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ProcessKind.values():
            raise ValueError(f'Unknown process kind {self.kind!r}; choose from {ProcessKind.values()}')
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f'horizon must be positive and finite, got {self.horizon}')
        if self.kind == ProcessKind.POISSON:
            if self.rate is None or not (math.isfinite(self.rate) and self.rate > 0):
                raise ValueError(f'Poisson rate must be positive, got {self.rate}')
        elif self.rate is not None:
            raise ValueError(f'rate is only meaningful for the Poisson process, got {self.rate}')
        if self.kind in ProcessKind.FIXED_COUNT:
            if self.n is None or isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
                raise ValueError(f'{self.kind} needs a positive integer n, got {self.n}')
            object.__setattr__(self, 'n', int(self.n))
        elif self.n is not None:
            raise ValueError(f'n is only meaningful for grid and binomial processes, got {self.n}')

    @classmethod
    def poisson(cls, rate: float, horizon: float) -> 'BaseProcessModel':
        return cls(ProcessKind.POISSON, float(horizon), rate=float(rate))

    @classmethod
    def gamma_renewal(cls, horizon: float) -> 'BaseProcessModel':
        return cls(ProcessKind.GAMMA_RENEWAL, float(horizon))

    @classmethod
    def grid(cls, n: int, horizon: float) -> 'BaseProcessModel':
        return cls(ProcessKind.GRID, float(horizon), n=n)

    @classmethod
    def binomial(cls, n: int, horizon: float) -> 'BaseProcessModel':
        return cls(ProcessKind.BINOMIAL, float(horizon), n=n)

    @classmethod
    def from_options(cls, kind: str, horizon: float, rate: Optional[float] = None,
                     n: Optional[int] = None) -> 'BaseProcessModel':
        """Build a model from command options, ignoring parameters the kind does not use."""
        if kind == ProcessKind.POISSON:
            return cls.poisson(1.0 if rate is None else rate, horizon)
        if kind == ProcessKind.GAMMA_RENEWAL:
            return cls.gamma_renewal(horizon)
        if kind == ProcessKind.GRID:
            return cls.grid(n, horizon)
        if kind == ProcessKind.BINOMIAL:
            return cls.binomial(n, horizon)
        raise ValueError(f'Unknown process kind {kind!r}; choose from {ProcessKind.values()}')

    @property
    def is_continuous(self) -> bool:
        return self.kind in ProcessKind.CONTINUOUS

    @property
    def mean_gap(self) -> float:
        """Mean inter-arrival time (tau) of the stationary versions."""
        if self.kind == ProcessKind.POISSON:
            return 1.0 / self.rate
        if self.kind == ProcessKind.GAMMA_RENEWAL:
            return GAMMA_MEAN_GAP
        return self.horizon / self.n

    def describe(self) -> dict:
        info = {'kind': self.kind, 'T': self.horizon}
        if self.rate is not None:
            info['rate'] = self.rate
        if self.n is not None:
            info['n'] = self.n
        return info
