from dataclasses import dataclass


@dataclass(frozen=True)
class TailEstimate:
    """
    Monte Carlo probability estimate with its Wilson interval.

    `p_hat`, `ci_low` and `ci_high` are raw probabilities; `scale` is the
    multiplier (n^(k+1), 1/F(x)^(k+1), ...) applied by the scaled_* views.
    """
    p_hat: float
    hits: int
    samples: int
    ci_low: float
    ci_high: float
    scale: float = 1.0

    def __post_init__(self):
        if self.samples < 1 or not 0 <= self.hits <= self.samples:
            raise ValueError(f'Invalid hit count {self.hits} of {self.samples}')
        if not 0.0 <= self.ci_low <= self.p_hat <= self.ci_high <= 1.0:
            raise ValueError(f'Inconsistent interval {self.ci_low} <= {self.p_hat} <= {self.ci_high}')

    @property
    def zero_hits(self) -> bool:
        return self.hits == 0

    @property
    def scaled_estimate(self) -> float:
        return self.p_hat * self.scale

    @property
    def scaled_ci(self) -> tuple[float, float]:
        return self.ci_low * self.scale, self.ci_high * self.scale

    @property
    def standard_error(self) -> float:
        return (self.p_hat * (1.0 - self.p_hat) / self.samples) ** 0.5

    def to_dict(self) -> dict:
        low, high = self.scaled_ci
        return {
            'p_hat': self.p_hat,
            'hits': self.hits,
            'samples': self.samples,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
            'scale': self.scale,
            'scaled_estimate': self.scaled_estimate,
            'scaled_ci': [low, high],
            'zero_hits': self.zero_hits,
        }
