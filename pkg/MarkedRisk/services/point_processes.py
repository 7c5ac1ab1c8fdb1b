"""
Base arrival processes on [0, T] and their factorial moment measures.

Four ground processes are supported: homogeneous Poisson, the stationary
renewal process with Gamma(2, 1) gaps, the deterministic grid iT/n and the
binomial process of n uniform times. Time intervals are half-open (a, b].
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np
from scipy import stats

from MarkedRisk.models import (
    BaseProcessModel,
    FactorialMomentEvaluator,
    PatternBatch,
    ProcessKind,
    TimePattern,
)
from MarkedRisk.models.process_constants import GAMMA_MEAN_GAP, GAMMA_RATE, GAMMA_SHAPE
from MarkedRisk.utils.quadrature_utils import QuadratureResult, richardson_box
from MarkedRisk.utils.settings_utils import get_knob

logger = logging.getLogger(__name__)

Interval = tuple[float, float]

# Exponential(rate 1/2) proposal for the equilibrium delay: density ratio bound 2 e^(-1/2)
_DELAY_PROPOSAL_SCALE = 2.0


@dataclass(frozen=True)
class Intensity:
    """Expected point count and the normalised time law as a CDF on [0, T]."""
    total: float
    time_cdf: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CountLaw:
    """Point-count pmf over `support`; `truncation` is the probability mass left out."""
    support: np.ndarray
    pmf: np.ndarray
    truncation: float


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def equilibrium_delay_sample(rng: np.random.Generator, size: int) -> tuple[np.ndarray, float]:
    """
    First arrival of the stationary Gamma(2, 1) renewal process.

    The delay has density (1 + t) e^(-t) / 2 and is drawn by rejection
    from Exponential(rate 1/2) proposals, accepting with probability
    (1 + t) e^(-(t - 1)/2) / 2.

    Args:
        rng: Random stream
        size: Number of delays

    Returns:
        (delays, acceptance_rate)
    """
    out = np.empty(size)
    filled = 0
    proposed = 0
    accepted = 0
    while filled < size:
        need = size - filled
        batch = need + need // 4 + 16
        t = rng.exponential(_DELAY_PROPOSAL_SCALE, batch)
        keep = rng.random(batch) < 0.5 * (1.0 + t) * np.exp(-0.5 * (t - 1.0))
        taken = t[keep][:need]
        out[filled:filled + taken.size] = taken
        filled += taken.size
        proposed += batch
        accepted += int(keep.sum())
    rate = accepted / proposed if proposed else 1.0
    logger.debug("Equilibrium delay acceptance rate %.4f over %d proposals", rate, proposed)
    return out, rate


def sample(model: BaseProcessModel, rng: np.random.Generator) -> TimePattern:
    """
    Draw one TimePattern.

    Args:
        model: Ground process
        rng: Random stream

    Returns:
        Sorted arrival times in [0, T]; the first arrival beyond T is discarded
    """
    horizon = model.horizon
    if model.kind == ProcessKind.GRID:
        return TimePattern(horizon, tuple(horizon * i / model.n for i in range(1, model.n + 1)))
    if model.kind == ProcessKind.BINOMIAL:
        return TimePattern(horizon, tuple(np.sort(rng.uniform(0.0, horizon, model.n))))

    times = []
    if model.kind == ProcessKind.POISSON:
        t = rng.exponential(1.0 / model.rate)
        while t <= horizon:
            times.append(t)
            t += rng.exponential(1.0 / model.rate)
    else:
        delay, _ = equilibrium_delay_sample(rng, 1)
        t = float(delay[0])
        while t <= horizon:
            times.append(t)
            t += rng.gamma(GAMMA_SHAPE, 1.0 / GAMMA_RATE)
    return TimePattern(horizon, tuple(times))


def sample_batch(model: BaseProcessModel, rng: np.random.Generator, size: int) -> PatternBatch:
    """
    Draw `size` independent TimePatterns as one flat PatternBatch.

    Same laws as sample(); marks are attached later by the marked_pp service.
    """
    if size < 0:
        raise ValueError(f'size must be non-negative, got {size}')
    horizon = model.horizon

    if model.kind == ProcessKind.GRID:
        grid = horizon * np.arange(1, model.n + 1) / model.n
        return PatternBatch(horizon, np.full(size, model.n), np.tile(grid, size))

    if model.kind == ProcessKind.BINOMIAL:
        times = np.sort(rng.uniform(0.0, horizon, (size, model.n)), axis=1)
        return PatternBatch(horizon, np.full(size, model.n), times.ravel())

    if model.kind == ProcessKind.POISSON:
        counts = rng.poisson(model.rate * horizon, size)
        times = rng.uniform(0.0, horizon, int(counts.sum()))
        ids = np.repeat(np.arange(size), counts)
        order = np.lexsort((times, ids))
        return PatternBatch(horizon, counts, times[order])

    # Gamma renewal: advance every still-active path by one gap per round
    current, _ = equilibrium_delay_sample(rng, size)
    active = np.arange(size)
    id_rounds = []
    time_rounds = []
    while active.size:
        inside = current <= horizon
        active = active[inside]
        current = current[inside]
        if not active.size:
            break
        id_rounds.append(active)
        time_rounds.append(current)
        current = current + rng.gamma(GAMMA_SHAPE, 1.0 / GAMMA_RATE, active.size)
    if id_rounds:
        ids = np.concatenate(id_rounds)
        times = np.concatenate(time_rounds)
        order = np.argsort(ids, kind='stable')
        ids, times = ids[order], times[order]
    else:
        ids = np.empty(0, dtype=np.int64)
        times = np.empty(0)
    return PatternBatch(horizon, np.bincount(ids, minlength=size), times)


# ---------------------------------------------------------------------------
# Intensity and count laws
# ---------------------------------------------------------------------------

def intensity(model: BaseProcessModel) -> Intensity:
    """E[N] and the normalised first factorial moment measure as a CDF."""
    horizon = model.horizon
    if model.kind == ProcessKind.GRID:
        n = model.n

        def grid_cdf(t):
            t = np.asarray(t, dtype=float)
            return np.clip(np.floor(t * n / horizon + 1e-9) / n, 0.0, 1.0)

        return Intensity(float(n), grid_cdf)

    def uniform_cdf(t):
        return np.clip(np.asarray(t, dtype=float) / horizon, 0.0, 1.0)

    if model.kind == ProcessKind.POISSON:
        return Intensity(model.rate * horizon, uniform_cdf)
    if model.kind == ProcessKind.BINOMIAL:
        return Intensity(float(model.n), uniform_cdf)
    return Intensity(horizon / GAMMA_MEAN_GAP, uniform_cdf)


def count_law(model: BaseProcessModel, tail: Optional[float] = None) -> CountLaw:
    """
    Point-count pmf for exact oracles.

    Poisson counts are truncated where the remaining tail mass drops below
    `tail`; the renewal count law has no closed form and is rejected.
    """
    if model.kind in ProcessKind.FIXED_COUNT:
        return CountLaw(np.array([model.n]), np.array([1.0]), 0.0)
    if model.kind != ProcessKind.POISSON:
        raise ValueError(f'No closed-form count pmf for the {model.kind} process')
    tail = get_knob('MARKEDRISK_POISSON_TAIL') if tail is None else tail
    mean = model.rate * model.horizon
    upper = int(stats.poisson.isf(tail, mean)) + 1
    support = np.arange(upper + 1)
    return CountLaw(support, stats.poisson.pmf(support, mean), float(stats.poisson.sf(upper, mean)))


# ---------------------------------------------------------------------------
# Factorial moment densities
# ---------------------------------------------------------------------------

def renewal_density_gamma21(t):
    """u(t) = (1 - e^(-2t)) / 2, the renewal density of Gamma(2, 1) gaps."""
    values = np.asarray(t, dtype=float)
    if np.any(values < 0):
        raise ValueError(f't must be non-negative, got {t}')
    out = -0.5 * np.expm1(-2.0 * values)
    return float(out) if out.ndim == 0 else out


def _renewal_density_points(points: np.ndarray) -> np.ndarray:
    """tau^-1 * prod u(gaps) for every row of an (N, k) array."""
    if points.shape[1] == 1:
        return np.full(points.shape[0], 1.0 / GAMMA_MEAN_GAP)
    gaps = np.diff(np.sort(points, axis=1), axis=1)
    return np.prod(-0.5 * np.expm1(-2.0 * gaps), axis=1) / GAMMA_MEAN_GAP


def _density_function(evaluator: FactorialMomentEvaluator) -> Callable[[np.ndarray], np.ndarray]:
    model = evaluator.model
    k = evaluator.order
    if model.kind == ProcessKind.POISSON:
        return lambda pts: np.full(pts.shape[0], model.rate ** k)
    if model.kind == ProcessKind.BINOMIAL:
        value = _falling_factorial(model.n, k) / model.horizon ** k
        return lambda pts: np.full(pts.shape[0], value)
    if model.kind == ProcessKind.GAMMA_RENEWAL:
        return _renewal_density_points
    raise ValueError('The grid process has no factorial moment density')


def factorial_moment_density(evaluator: FactorialMomentEvaluator, t: Sequence[float]) -> float:
    """
    Density of M_k at the time tuple t.

    Args:
        evaluator: Process and order k
        t: k times in [0, T]

    Returns:
        Poisson rate^k, binomial n^[k] / T^k, renewal tau^-1 prod u(sorted gaps)
    """
    point = np.asarray(t, dtype=float).reshape(1, -1)
    if point.shape[1] != evaluator.order:
        raise ValueError(f'Expected {evaluator.order} times, got {point.shape[1]}')
    if np.any(point < 0) or np.any(point > evaluator.model.horizon):
        raise ValueError(f'times must lie in [0, {evaluator.model.horizon}]')
    return float(_density_function(evaluator)(point)[0])


def _falling_factorial(n: int, k: int) -> float:
    if k > n:
        return 0.0
    return float(math.perm(n, k))


def _check_box(box: Sequence[Interval], evaluator: FactorialMomentEvaluator) -> list[Interval]:
    intervals = [(float(a), float(b)) for a, b in box]
    if len(intervals) != evaluator.order:
        raise ValueError(f'Expected {evaluator.order} intervals, got {len(intervals)}')
    horizon = evaluator.model.horizon
    for a, b in intervals:
        if a < 0 or b > horizon or b < a:
            raise ValueError(f'Interval ({a}, {b}] is not a sub-interval of [0, {horizon}]')
    return intervals


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def _grid_box(model: BaseProcessModel, intervals: list[Interval]) -> float:
    """Ordered tuples of distinct grid points, one per interval (inclusion-exclusion)."""
    n, horizon = model.n, model.horizon

    def points_in(low, high):
        if high <= low:
            return 0
        return int(math.floor(high * n / horizon + 1e-9) - math.floor(low * n / horizon + 1e-9))

    total = 0
    for partition in _set_partitions(list(range(len(intervals)))):
        term = 1
        for block in partition:
            low = max(intervals[i][0] for i in block)
            high = min(intervals[i][1] for i in block)
            size = len(block)
            term *= (-1) ** (size - 1) * math.factorial(size - 1) * points_in(low, high)
            if term == 0:
                break
        total += term
    return float(total)


def gamma_pair_box(first: Interval, second: Interval) -> float:
    """
    Exact M_2 mass of (a, b] x (c, d] for the Gamma(2, 1) renewal process.

    Uses K(z) = z^2/8 - (2|z| - 1 + e^(-2|z|))/16, whose second derivative
    is the pair density tau^-1 u(|z|).
    """
    (a, b), (c, d) = first, second

    def K(z):
        z = abs(z)
        return z * z / 8.0 - (2.0 * z + math.expm1(-2.0 * z)) / 16.0

    return K(b - c) - K(a - c) - K(b - d) + K(a - d)


def m2_gamma(horizon: float) -> float:
    """E[N(T)(N(T) - 1)] = T^2/4 - (2T - 1 + e^(-2T))/8."""
    if not horizon > 0:
        raise ValueError(f'T must be positive, got {horizon}')
    return horizon ** 2 / 4.0 - (2.0 * horizon + math.expm1(-2.0 * horizon)) / 8.0


def m2_box_gamma(t0: float) -> float:
    """M_2([0, t0]^2) = t0^2/4 - (e^(-2 t0) - 1 + 2 t0)/8."""
    if not t0 > 0:
        raise ValueError(f't0 must be positive, got {t0}')
    return t0 ** 2 / 4.0 - (math.expm1(-2.0 * t0) + 2.0 * t0) / 8.0


def m3_gamma(horizon: float) -> float:
    """E[N(T)(N(T) - 1)(N(T) - 2)] = 3/4 (T^3/6 - T^2/2 + 3T/4 - 1/2 + (T + 2) e^(-2T)/4)."""
    if not horizon > 0:
        raise ValueError(f'T must be positive, got {horizon}')
    t = horizon
    return 0.75 * (t ** 3 / 6.0 - t ** 2 / 2.0 + 0.75 * t + ((t + 2.0) * math.expm1(-2.0 * t) + t) / 4.0)


def m3_box_gamma(t0: float, t1: float) -> float:
    """M_3([0, t0]^2 x (t0, t1]) for the Gamma(2, 1) renewal process."""
    if not t0 > 0:
        raise ValueError(f't0 must be positive, got {t0}')
    if not t1 > t0:
        raise ValueError(f't1 must exceed t0, got t0={t0}, t1={t1}')
    width = t1 - t0
    decay = math.exp(-2.0 * t0)
    return (
        t0 ** 2 * width / 8.0
        - width * (math.expm1(-2.0 * t0) + 2.0 * t0) / 16.0
        + math.expm1(-2.0 * width) * (t0 * decay + decay + t0 - 1.0) / 16.0
    )


def default_nodes(order: int) -> int:
    if order <= 2:
        return get_knob('MARKEDRISK_QUAD_NODES_K2')
    if order == 3:
        return get_knob('MARKEDRISK_QUAD_NODES_K3')
    return get_knob('MARKEDRISK_QUAD_NODES_HIGH')


def quadrature_box(evaluator: FactorialMomentEvaluator, box: Sequence[Interval],
                   nodes: Optional[int] = None, rtol: Optional[float] = None) -> QuadratureResult:
    """
    Integrate the factorial moment density over a box numerically.

    Args:
        evaluator: Continuous process and order k
        box: k intervals inside [0, T]
        nodes: Nodes per axis, the configured default for k when None
        rtol: Convergence tolerance, MARKEDRISK_QUAD_RTOL when None

    Returns:
        QuadratureResult with the convergence flag
    """
    intervals = _check_box(box, evaluator)
    nodes = default_nodes(evaluator.order) if nodes is None else nodes
    rtol = get_knob('MARKEDRISK_QUAD_RTOL') if rtol is None else rtol
    if any(b == a for a, b in intervals):
        return QuadratureResult(0.0, 0.0, True)
    return richardson_box(_density_function(evaluator), intervals, nodes, rtol)


def _matches_m3_box(intervals: list[Interval]) -> Optional[tuple[float, float]]:
    """Detect [0, t0]^2 x (t0, t1] in any coordinate order."""
    for i, (c, d) in enumerate(intervals):
        others = [iv for j, iv in enumerate(intervals) if j != i]
        if others[0] == others[1] and others[0][0] == 0.0 and others[0][1] == c and d > c > 0:
            return c, d
    return None


def factorial_moment_box(evaluator: FactorialMomentEvaluator, box: Sequence[Interval]) -> float:
    """
    M_k mass of a product of time intervals.

    Closed forms are used for Poisson, binomial and grid boxes and for the
    renewal boxes of order 1 and 2, order-3 cubes and [0, t0]^2 x (t0, t1];
    other renewal boxes go through quadrature_box().
    """
    intervals = _check_box(box, evaluator)
    model = evaluator.model
    widths = [b - a for a, b in intervals]
    if any(w == 0.0 for w in widths):
        return 0.0
    if model.kind == ProcessKind.POISSON:
        return float(np.prod([model.rate * w for w in widths]))
    if model.kind == ProcessKind.BINOMIAL:
        return _falling_factorial(model.n, evaluator.order) * float(np.prod([w / model.horizon for w in widths]))
    if model.kind == ProcessKind.GRID:
        return _grid_box(model, intervals)

    if evaluator.order == 1:
        return widths[0] / GAMMA_MEAN_GAP
    if evaluator.order == 2:
        return gamma_pair_box(intervals[0], intervals[1])
    if evaluator.order == 3:
        if intervals[0] == intervals[1] == intervals[2]:
            # stationary increments: a cube only depends on its side
            return m3_gamma(widths[0])
        shape = _matches_m3_box(intervals)
        if shape is not None:
            return m3_box_gamma(*shape)
    return quadrature_box(evaluator, intervals).value


def count_factorial_moment(model: BaseProcessModel, k: int) -> float:
    """E[N (N-1) ... (N-k+1)]."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f'k must be a positive integer, got {k}')
    k = int(k)
    if model.kind == ProcessKind.POISSON:
        return (model.rate * model.horizon) ** k
    if model.kind in ProcessKind.FIXED_COUNT:
        return _falling_factorial(model.n, k)
    if k == 2:
        return m2_gamma(model.horizon)
    if k == 3:
        return m3_gamma(model.horizon)
    evaluator = FactorialMomentEvaluator(model, k)
    return factorial_moment_box(evaluator, [(0.0, model.horizon)] * k)

