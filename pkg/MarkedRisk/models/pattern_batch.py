"""
Many independent realisations stored as flat arrays.

Path i owns the slice offsets[i]:offsets[i] + counts[i] of `times` and
`marks`; within a path the times are sorted. All order-statistic queries
are vectorised over paths.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from MarkedRisk.models.marked_pattern import MarkedPattern


@dataclass(frozen=True, eq=False)
class PatternBatch:
    horizon: float
    counts: np.ndarray
    times: np.ndarray
    marks: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        times = np.asarray(self.times, dtype=float)
        if counts.ndim != 1 or times.ndim != 1:
            raise ValueError('counts and times must be one-dimensional')
        if np.any(counts < 0) or int(counts.sum()) != times.size:
            raise ValueError('counts must be non-negative and sum to the number of times')
        object.__setattr__(self, 'counts', counts)
        object.__setattr__(self, 'times', times)
        if self.marks is not None:
            marks = np.asarray(self.marks, dtype=float)
            if marks.shape != times.shape:
                raise ValueError('marks must match times')
            object.__setattr__(self, 'marks', marks)

    @property
    def size(self) -> int:
        return int(self.counts.size)

    @property
    def offsets(self) -> np.ndarray:
        if 'offsets' not in self._cache:
            offsets = np.zeros(self.size, dtype=np.int64)
            np.cumsum(self.counts[:-1], out=offsets[1:])
            self._cache['offsets'] = offsets
        return self._cache['offsets']

    @property
    def path_ids(self) -> np.ndarray:
        if 'path_ids' not in self._cache:
            self._cache['path_ids'] = np.repeat(np.arange(self.size), self.counts)
        return self._cache['path_ids']

    def with_marks(self, marks: np.ndarray) -> 'PatternBatch':
        return PatternBatch(self.horizon, self.counts, self.times, marks)

    def scaled(self, factor: float) -> 'PatternBatch':
        if not factor > 0:
            raise ValueError(f'factor must be positive, got {factor}')
        return self.with_marks(self._require_marks() * factor)

    def pattern(self, index: int) -> MarkedPattern:
        start = int(self.offsets[index])
        stop = start + int(self.counts[index])
        marks = self._require_marks()
        return MarkedPattern(self.horizon, tuple(zip(self.times[start:stop], marks[start:stop])))

    def _require_marks(self) -> np.ndarray:
        if self.marks is None:
            raise ValueError('This batch carries no marks')
        return self.marks

    def counts_in(self, low: float, high: float) -> np.ndarray:
        """Per-path number of arrivals in (low, high]."""
        inside = (self.times > low) & (self.times <= high)
        return np.bincount(self.path_ids[inside], minlength=self.size)

    def ranked(self, t: Optional[float] = None, values: Optional[np.ndarray] = None):
        """
        Sort points inside each path by decreasing value.

        Args:
            t: Keep only points with time <= t (all points when None)
            values: Per-point values to rank, the marks by default

        Returns:
            (path_ids, values, times, rank) of the kept points, rank 0
            being the largest value of its path
        """
        values = self._require_marks() if values is None else values
        keep = slice(None) if t is None else self.times <= t
        ids = self.path_ids[keep]
        vals = values[keep]
        times = self.times[keep]
        order = np.lexsort((-vals, ids))
        ids, vals, times = ids[order], vals[order], times[order]
        kept = np.bincount(ids, minlength=self.size)
        starts = np.zeros(self.size, dtype=np.int64)
        np.cumsum(kept[:-1], out=starts[1:])
        rank = np.arange(ids.size) - starts[ids]
        return ids, vals, times, rank

    def count_exceed(self, r: float) -> np.ndarray:
        return np.bincount(self.path_ids[self._require_marks() > r], minlength=self.size)

    def mark_order_stat(self, j: int) -> np.ndarray:
        """j-th largest mark of every path, 0 where a path has fewer than j points."""
        if j < 1:
            raise ValueError(f'j must be positive, got {j}')
        ids, vals, _, rank = self.ranked()
        out = np.zeros(self.size)
        hit = rank == j - 1
        out[ids[hit]] = vals[hit]
        return out

    def top_claims(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """(marks, times) of the j largest claims per path, NaN-padded, shape (size, j)."""
        ids, vals, times, rank = self.ranked()
        marks_out = np.full((self.size, j), np.nan)
        times_out = np.full((self.size, j), np.nan)
        hit = rank < j
        marks_out[ids[hit], rank[hit]] = vals[hit]
        times_out[ids[hit], rank[hit]] = times[hit]
        return marks_out, times_out

    def total(self, t: Optional[float] = None) -> np.ndarray:
        marks = self._require_marks()
        keep = slice(None) if t is None else self.times <= t
        return np.bincount(self.path_ids[keep], weights=marks[keep], minlength=self.size)

    def covered_risk(self, k: int, t: Optional[float] = None) -> np.ndarray:
        ids, vals, _, rank = self.ranked(t)
        hit = rank < k
        return np.bincount(ids[hit], weights=vals[hit], minlength=self.size)

    def residual_risk(self, k: int, t: Optional[float] = None) -> np.ndarray:
        """Sum of all but the k largest claims up to t, summed directly to avoid cancellation."""
        ids, vals, _, rank = self.ranked(t)
        hit = rank >= k
        return np.bincount(ids[hit], weights=vals[hit], minlength=self.size)

    def factorial_counts(self, k: int) -> np.ndarray:
        """N (N-1) ... (N-k+1) per path."""
        counts = self.counts.astype(float)
        out = np.ones(self.size)
        for i in range(k):
            out *= np.clip(counts - i, 0.0, None)
        return out
