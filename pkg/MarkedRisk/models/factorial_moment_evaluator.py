from dataclasses import dataclass

from MarkedRisk.models.base_process_model import BaseProcessModel


@dataclass(frozen=True)
class FactorialMomentEvaluator:
    """Factorial moment measure M_k of a base process, for a fixed order k >= 1."""
    model: BaseProcessModel
    order: int

    def __post_init__(self):
        if isinstance(self.order, bool) or int(self.order) != self.order or self.order < 1:
            raise ValueError(f'order must be a positive integer, got {self.order}')
        object.__setattr__(self, 'order', int(self.order))
