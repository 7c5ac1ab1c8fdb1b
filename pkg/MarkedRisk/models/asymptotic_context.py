from dataclasses import dataclass

from MarkedRisk.models.base_process_model import BaseProcessModel
from MarkedRisk.models.pareto_law import ParetoLaw


@dataclass(frozen=True)
class AsymptoticContext:
    """Base process, tail index and reinsurance order k of a limit statement."""
    model: BaseProcessModel
    alpha: float
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 0:
            raise ValueError(f'k must be a non-negative integer, got {self.k}')
        object.__setattr__(self, 'k', int(self.k))
        ParetoLaw(self.alpha)
        # Imported here to keep models free of service imports at load time
        from MarkedRisk.services.point_processes import count_factorial_moment
        moment = count_factorial_moment(self.model, self.k + 1)
        if not moment > 0:
            raise ValueError(
                f'The order-{self.k + 1} factorial moment of {self.model.kind} vanishes; '
                'no non-null limit measure exists'
            )
        object.__setattr__(self, '_moment', moment)

    @property
    def law(self) -> ParetoLaw:
        return ParetoLaw(self.alpha)

    @property
    def factorial_moment(self) -> float:
        """E[N^[k+1]], cached at construction."""
        return self._moment
