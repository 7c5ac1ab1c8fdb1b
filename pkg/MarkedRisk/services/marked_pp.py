"""
Independently marked point processes: marking, scaling, mark order
statistics and the limit measure of k+1 large marks.
"""
import logging
import math
from typing import Optional

import numpy as np

from MarkedRisk.models import (
    BaseProcessModel,
    CylinderEvent,
    ExperimentConfig,
    FactorialMomentEvaluator,
    LimitMeasure,
    MarkedPattern,
    ParetoLaw,
    PatternBatch,
    ProcessKind,
    TailEstimate,
    TimePattern,
)
from MarkedRisk.services import heavy_tails
from MarkedRisk.services.point_processes import count_factorial_moment, factorial_moment_box

logger = logging.getLogger(__name__)


def mark(times: TimePattern, law: ParetoLaw, rng: np.random.Generator) -> MarkedPattern:
    """Attach one independent Pareto mark to every arrival."""
    marks = heavy_tails.sample(law, rng, times.count)
    return MarkedPattern(times.horizon, tuple(zip(times.times, marks)))


def mark_batch(batch: PatternBatch, law: ParetoLaw, rng: np.random.Generator) -> PatternBatch:
    return batch.with_marks(heavy_tails.sample(law, rng, batch.times.size))


def scale(pattern: MarkedPattern, factor: float) -> MarkedPattern:
    """(t, x) -> (t, factor * x); times are untouched."""
    if not factor > 0:
        raise ValueError(f'factor must be positive, got {factor}')
    return MarkedPattern(pattern.horizon, tuple((t, factor * x) for t, x in pattern.points))


def mark_order_stat(pattern: MarkedPattern, j: int) -> float:
    """j-th largest mark, 0 when the pattern has fewer than j points."""
    if j < 1:
        raise ValueError(f'j must be positive, got {j}')
    marks = sorted(pattern.marks, reverse=True)
    return marks[j - 1] if j <= len(marks) else 0.0


def count_exceed(pattern: MarkedPattern, r: float) -> int:
    if not r > 0:
        raise ValueError(f'r must be positive, got {r}')
    return sum(1 for x in pattern.marks if x > r)


def limit_cylinder_mass(model: BaseProcessModel, alpha: float, k: int, event: CylinderEvent) -> float:
    """
    Mass of a cylinder event under the limit measure of k+1 large marks.

    The limit charges configurations with exactly k+1 points, so the mass
    is M_{k+1}(I_1^{m_1} x ... ) * prod mu(J_i)^{m_i} / prod m_i! for
    boxes I_i x J_i with counts m_i.

    Args:
        model: Ground process
        alpha: Tail index
        k: Order, the event counts must sum to k+1
        event: Disjoint boxes with their counts

    Returns:
        Limit mass
    """
    if event.total != k + 1:
        raise ValueError(f'Event counts must sum to k+1 = {k + 1}, got {event.total}')
    measure = LimitMeasure(alpha)
    time_box = []
    mark_factor = 1.0
    for box, count in zip(event.boxes, event.counts):
        if count == 0:
            continue
        if box.t_low < 0 or box.t_high > model.horizon:
            raise ValueError(f'Time interval {box.time_interval} is not inside [0, {model.horizon}]')
        time_box.extend([box.time_interval] * count)
        mark_factor *= measure.interval_mass(box.x_low, box.x_high) ** count / math.factorial(count)
    if mark_factor == 0.0:
        return 0.0
    time_mass = factorial_moment_box(FactorialMomentEvaluator(model, k + 1), time_box)
    return time_mass * mark_factor


def cylinder_event_occurs(batch: PatternBatch, event: CylinderEvent) -> np.ndarray:
    """Vectorised indicator of `event` on every path of a marked batch."""
    hit = np.ones(batch.size, dtype=bool)
    marks = batch.marks
    for box, count in zip(event.boxes, event.counts):
        inside = ((batch.times > box.t_low) & (batch.times <= box.t_high)
                  & (marks > box.x_low) & (marks <= box.x_high))
        hit &= np.bincount(batch.path_ids[inside], minlength=batch.size) == count
    return hit


def hrv_pp_limit(model: BaseProcessModel, alpha: float, k: int, r: float) -> float:
    """lim n^(k+1) P(k+1 marks exceed a_n r) = E[N^[k+1]] / (k+1)! * r^(-alpha (k+1))."""
    if not r > 0:
        raise ValueError(f'r must be positive, got {r}')
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    moment = count_factorial_moment(model, k + 1)
    return moment / math.factorial(k + 1) * LimitMeasure(alpha).tail_mass(r) ** (k + 1)


def mc_hrv_pp(model: BaseProcessModel, alpha: float, k: int, r: float, n: int, samples: int, seed: int,
              chunk_size: Optional[int] = None, threads: Optional[int] = None) -> TailEstimate:
    """
    Monte Carlo estimate of n^(k+1) P(count_exceed(a_n^-1 Pi, r) >= k+1).

    Args:
        model: Ground process
        alpha: Tail index
        k: Order
        r: Level of the rescaled marks
        n: Scaling index, a_n = n^(1/alpha)
        samples: Number of simulated paths
        seed: Run seed
        chunk_size: Paths per substream, the configured default when None
        threads: Worker cap, the configured default when None

    Returns:
        TailEstimate with scale n^(k+1)
    """
    from MarkedRisk.services import montecarlo

    level = heavy_tails.norming(alpha, n) * r
    config = montecarlo.make_config(model, alpha, k, samples, seed, chunk_size, threads, r=r)

    def event(batch: PatternBatch) -> np.ndarray:
        return batch.count_exceed(level) >= k + 1

    return montecarlo.estimate(config, event, scale=float(n) ** (k + 1))


def exact_hrv_oracle(model: BaseProcessModel, alpha: float, k: int, r: float, n: int) -> float:
    """n^(k+1) times the exact probability that k+1 marks exceed a_n r."""
    from MarkedRisk.services import montecarlo

    level = heavy_tails.norming(alpha, n) * r
    return montecarlo.exact_orderstat_tail(model, alpha, k, level).probability * float(n) ** (k + 1)


# ---------------------------------------------------------------------------
# Triangular arrays
# ---------------------------------------------------------------------------

def triangular_count(n: int) -> int:
    """Default row length m_n = ceil(sqrt(n))."""
    if n < 1:
        raise ValueError(f'n must be positive, got {n}')
    return math.isqrt(n - 1) + 1


def triangular_model(kind: str, m_n: int, horizon: float = 1.0) -> BaseProcessModel:
    """Row model of a triangular array: grid or binomial with m_n points."""
    if kind not in ProcessKind.FIXED_COUNT:
        raise ValueError(f'Triangular arrays need a fixed point count (grid or binomial), got {kind!r}')
    return BaseProcessModel.from_options(kind, horizon, n=m_n)


def hrv_triangular_limit(alpha: float, k: int, r: float) -> float:
    """r^(-alpha (k+1)) / (k+1)!, the limit for a normalised row intensity."""
    return LimitMeasure(alpha).tail_mass(r) ** (k + 1) / math.factorial(k + 1)


def exact_triangular_oracle(n: int, m_n: int, alpha: float, k: int, r: float) -> float:
    """n^(k+1) P(Binomial(m_n, survival(a_{n m_n} r)) >= k+1)."""
    from MarkedRisk.services import montecarlo

    p = heavy_tails.survival(ParetoLaw(alpha), heavy_tails.norming(alpha, n * m_n) * r)
    tail = montecarlo.binomial_tail(np.array([m_n]), p, k + 1)[0]
    return float(tail) * float(n) ** (k + 1)


def mc_hrv_triangular(kind: str, alpha: float, k: int, r: float, n: int, samples: int, seed: int,
                      m_n: Optional[int] = None, horizon: float = 1.0,
                      chunk_size: Optional[int] = None, threads: Optional[int] = None) -> TailEstimate:
    """
    Triangular-array check: n^(k+1) P(k+1 of the m_n marks exceed a_{n m_n} r).
    """
    from MarkedRisk.services import montecarlo

    m_n = triangular_count(n) if m_n is None else m_n
    model = triangular_model(kind, m_n, horizon)
    level = heavy_tails.norming(alpha, n * m_n) * r
    config = montecarlo.make_config(model, alpha, k, samples, seed, chunk_size, threads, r=r)

    def event(batch: PatternBatch) -> np.ndarray:
        return batch.count_exceed(level) >= k + 1

    return montecarlo.estimate(config, event, scale=float(n) ** (k + 1))

