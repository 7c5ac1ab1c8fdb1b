from dataclasses import dataclass, replace
from typing import Optional

from MarkedRisk.models.base_process_model import BaseProcessModel
from MarkedRisk.models.pareto_law import ParetoLaw


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything a Monte Carlo run depends on.

    Event parameters (x, r, t0, t1, u, eps) are optional; each estimator
    checks the ones it needs. `threads` affects speed only.
    """
    model: BaseProcessModel
    alpha: float
    k: int
    samples: int
    seed: int
    chunk_size: int = 65536
    threads: int = 1
    x: Optional[float] = None
    r: Optional[float] = None
    t0: Optional[float] = None
    t1: Optional[float] = None
    u: Optional[float] = None
    eps: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.samples, bool) or int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f'samples must be a positive integer, got {self.samples}')
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f'seed must be a non-negative integer, got {self.seed}')
        if int(self.chunk_size) != self.chunk_size or self.chunk_size < 1:
            raise ValueError(f'chunk_size must be a positive integer, got {self.chunk_size}')
        if int(self.threads) != self.threads or self.threads < 1:
            raise ValueError(f'threads must be a positive integer, got {self.threads}')
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 0:
            raise ValueError(f'k must be a non-negative integer, got {self.k}')
        ParetoLaw(self.alpha)
        for name in ('samples', 'seed', 'chunk_size', 'threads', 'k'):
            object.__setattr__(self, name, int(getattr(self, name)))

    @property
    def law(self) -> ParetoLaw:
        return ParetoLaw(self.alpha)

    def require(self, *names: str) -> tuple:
        """Return the named event parameters, rejecting missing ones."""
        values = []
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ValueError(f'{name} is required for this estimate')
            values.append(value)
        return tuple(values)

    def evolve(self, **changes) -> 'ExperimentConfig':
        return replace(self, **changes)
