"""
Cylinder events {pi(A_i) = m_i} over disjoint time x mark boxes.
"""
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MarkBox:
    """(t_low, t_high] x (x_low, x_high]; x_high may be infinite."""
    t_low: float
    t_high: float
    x_low: float
    x_high: float = math.inf

    def __post_init__(self):
        if not self.t_low <= self.t_high:
            raise ValueError(f'Invalid time interval ({self.t_low}, {self.t_high}]')
        if not self.x_low > 0:
            raise ValueError(f'Mark interval must be bounded away from 0, got lower bound {self.x_low}')
        if not self.x_low <= self.x_high:
            raise ValueError(f'Invalid mark interval ({self.x_low}, {self.x_high}]')

    @property
    def time_interval(self) -> tuple[float, float]:
        return self.t_low, self.t_high

    def overlaps(self, other: 'MarkBox') -> bool:
        times = max(self.t_low, other.t_low) < min(self.t_high, other.t_high)
        marks = max(self.x_low, other.x_low) < min(self.x_high, other.x_high)
        return times and marks

    def contains(self, t: float, x: float) -> bool:
        return self.t_low < t <= self.t_high and self.x_low < x <= self.x_high


@dataclass(frozen=True)
class CylinderEvent:
    boxes: tuple[MarkBox, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        boxes = tuple(self.boxes)
        counts = tuple(int(c) for c in self.counts)
        if len(boxes) != len(counts):
            raise ValueError('Need exactly one count per box')
        if not boxes:
            raise ValueError('A cylinder event needs at least one box')
        if any(c < 0 for c in counts):
            raise ValueError(f'counts must be non-negative, got {counts}')
        if sum(counts) < 1:
            raise ValueError('counts must sum to at least 1')
        for i, box in enumerate(boxes):
            for other in boxes[i + 1:]:
                if box.overlaps(other):
                    raise ValueError(f'Boxes {box} and {other} overlap')
        object.__setattr__(self, 'boxes', boxes)
        object.__setattr__(self, 'counts', counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def occurs(self, points) -> bool:
        """True when each box holds exactly its count of the given (time, mark) points."""
        for box, count in zip(self.boxes, self.counts):
            if sum(1 for t, x in points if box.contains(t, x)) != count:
                return False
        return True
