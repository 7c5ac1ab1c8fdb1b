"""
Seeded, chunk-parallel Monte Carlo estimation and exact oracles.

Chunk c of a run with seed s always draws from the substream keyed by
(s, c); chunks run on a thread pool and are reduced in chunk order, so an
estimate does not depend on the number of workers.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import special, stats

from MarkedRisk.models import (
    AsymptoticContext,
    BaseProcessModel,
    ExperimentConfig,
    MarkedPattern,
    ParetoLaw,
    PatternBatch,
    RiskPath,
    TailEstimate,
)
from MarkedRisk.services import asymptotics, heavy_tails, point_processes
from MarkedRisk.services.exceptions import EventEvaluationError, RejectionCapExceeded
from MarkedRisk.services.marked_pp import mark_batch
from MarkedRisk.utils.rng_utils import auxiliary_stream, chunk_sizes, substream
from MarkedRisk.utils.settings_utils import get_knob
from MarkedRisk.utils.stats_utils import wilson_interval

logger = logging.getLogger(__name__)

BatchEvent = Callable[[PatternBatch], np.ndarray]
ChunkFunction = Callable[[PatternBatch, np.random.Generator], Any]

# Two-sided 1% Kolmogorov-Smirnov coefficient sqrt(-ln(0.005) / 2)
KS_TWO_SAMPLE_COEFFICIENT_1PCT = math.sqrt(-math.log(0.005) / 2.0)


def make_config(model: BaseProcessModel, alpha: float, k: int, samples: int, seed: int,
                chunk_size: Optional[int] = None, threads: Optional[int] = None, **event) -> ExperimentConfig:
    """Build an ExperimentConfig, filling chunk size and threads from the settings knobs."""
    return ExperimentConfig(
        model=model,
        alpha=alpha,
        k=k,
        samples=samples,
        seed=seed,
        chunk_size=get_knob('MARKEDRISK_CHUNK_SIZE') if chunk_size is None else chunk_size,
        threads=get_knob('MARKEDRISK_THREADS') if threads is None else threads,
        **event,
    )


def run_chunks(config: ExperimentConfig, chunk_fn: ChunkFunction) -> list:
    """
    Simulate marked batches chunk by chunk and apply `chunk_fn` to each.

    Args:
        config: Model, mark law, sample size, seed and parallelism
        chunk_fn: Called with (marked batch, chunk generator)

    Returns:
        chunk_fn results in chunk order
    """
    sizes = chunk_sizes(config.samples, config.chunk_size)
    law = config.law

    def run(index: int):
        rng = substream(config.seed, index)
        batch = point_processes.sample_batch(config.model, rng, sizes[index])
        batch = mark_batch(batch, law, rng)
        try:
            return chunk_fn(batch, rng)
        except RejectionCapExceeded:
            raise
        except Exception as exc:
            raise EventEvaluationError(config.seed, index, exc) from exc

    workers = min(config.threads, len(sizes))
    logger.debug("Running %d chunks of up to %d paths on %d workers", len(sizes), config.chunk_size, workers)
    if workers <= 1:
        return [run(index) for index in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(len(sizes))))


def tail_estimate(hits: int, samples: int, scale: float = 1.0, label: str = '') -> TailEstimate:
    low, high = wilson_interval(hits, samples)
    if hits == 0:
        logger.warning("Zero hits in %d samples%s; reporting the one-sided bound",
                       samples, f' for {label}' if label else '')
    return TailEstimate(p_hat=hits / samples, hits=hits, samples=samples, ci_low=low, ci_high=high, scale=scale)


def estimate(config: ExperimentConfig, event: BatchEvent, scale: float = 1.0, label: str = '') -> TailEstimate:
    """
    Estimate P(event) by plain Monte Carlo.

    Args:
        config: Experiment configuration
        event: Maps a marked PatternBatch to one boolean per path
        scale: Multiplier recorded on the estimate
        label: Name used in log lines

    Returns:
        TailEstimate with a Wilson 95% interval
    """
    def count_hits(batch: PatternBatch, rng: np.random.Generator) -> int:
        outcome = np.asarray(event(batch))
        if outcome.shape != (batch.size,):
            raise ValueError(f'Event returned shape {outcome.shape}, expected ({batch.size},)')
        return int(np.count_nonzero(outcome))

    hits = sum(run_chunks(config, count_hits))
    return tail_estimate(hits, config.samples, scale, label)


def pattern_event(predicate: Callable[[MarkedPattern], bool]) -> BatchEvent:
    """Lift a predicate on single MarkedPatterns to a batch event (path by path)."""
    def event(batch: PatternBatch) -> np.ndarray:
        return np.fromiter((bool(predicate(batch.pattern(i))) for i in range(batch.size)),
                           dtype=bool, count=batch.size)
    return event


def risk_event(predicate: Callable[[RiskPath], bool]) -> BatchEvent:
    """Lift a predicate on RiskPaths to a batch event (path by path)."""
    from MarkedRisk.services.risk_paths import build_risk
    return pattern_event(lambda pattern: predicate(build_risk(pattern)))


def orderstat_event(k: int, x: float) -> BatchEvent:
    """{X_{N-k:N} > x}: at least k+1 claims exceed x."""
    return lambda batch: batch.count_exceed(x) >= k + 1


def residual_event(k: int, x: float, t: Optional[float] = None) -> BatchEvent:
    return lambda batch: batch.residual_risk(k, t) > x


def void_event() -> BatchEvent:
    return lambda batch: batch.counts == 0


# ---------------------------------------------------------------------------
# Exact oracles
# ---------------------------------------------------------------------------

class ExactTail(NamedTuple):
    probability: float
    truncation: float
    max_count: int


def binomial_tail(n: np.ndarray, p: float, k: int) -> np.ndarray:
    """P(Binomial(n, p) >= k) through the regularised incomplete beta function."""
    n = np.asarray(n, dtype=float)
    if k <= 0:
        return np.ones_like(n)
    out = np.zeros_like(n)
    feasible = n >= k
    out[feasible] = special.betainc(k, n[feasible] - k + 1.0, p)
    return out


def exact_orderstat_tail(model: BaseProcessModel, alpha: float, k: int, x: float,
                         tail: Optional[float] = None) -> ExactTail:
    """
    Exact P(X_{N-k:N} > x) = sum_n P(N = n) P(Binomial(n, x^-alpha) >= k+1).

    Args:
        model: Ground process with a computable count pmf
        alpha: Tail index
        k: Order
        x: Level
        tail: Poisson truncation mass, MARKEDRISK_POISSON_TAIL when None

    Returns:
        ExactTail with the truncated probability mass as error bound
    """
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    law = point_processes.count_law(model, tail)
    p = heavy_tails.survival(ParetoLaw(alpha), x)
    terms = law.pmf * binomial_tail(law.support, p, k + 1)
    return ExactTail(math.fsum(terms.tolist()), law.truncation, int(law.support[-1]))


# ---------------------------------------------------------------------------
# Convergence tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    point: float
    estimate: TailEstimate
    asymptote: float
    oracle: Optional[float] = None

    @property
    def ratio(self) -> float:
        if self.asymptote == 0.0:
            return math.nan
        return self.estimate.scaled_estimate / self.asymptote

    @property
    def oracle_ratio(self) -> Optional[float]:
        if self.oracle is None or self.asymptote == 0.0:
            return None
        return self.oracle / self.asymptote


def convergence_table(config: ExperimentConfig, grid: Sequence[float],
                      estimator: Callable[[ExperimentConfig, float], TailEstimate],
                      asymptote: Callable[[float], float],
                      oracle: Optional[Callable[[float], float]] = None) -> list[ConvergenceRow]:
    """
    One estimate per grid point, every point run with the config's seed.

    Args:
        config: Shared experiment configuration
        grid: Values of n or x
        estimator: Produces the scaled TailEstimate at a grid point
        asymptote: Limit value at a grid point
        oracle: Optional exact scaled value at a grid point

    Returns:
        Rows in grid order
    """
    if not grid:
        raise ValueError('grid must not be empty')
    rows = []
    for point in grid:
        result = estimator(config, point)
        rows.append(ConvergenceRow(point, result, asymptote(point), oracle(point) if oracle else None))
        if result.zero_hits:
            logger.warning("Grid point %s produced no hits", point)
    return rows


def hrv_convergence_table(config: ExperimentConfig, n_grid: Sequence[int], oracle: bool = False) -> list[ConvergenceRow]:
    """mc_hrv_pp over n against hrv_pp_limit."""
    from MarkedRisk.services import marked_pp

    (r,) = config.require('r')
    limit = marked_pp.hrv_pp_limit(config.model, config.alpha, config.k, r)

    def run(cfg: ExperimentConfig, n: float) -> TailEstimate:
        return marked_pp.mc_hrv_pp(cfg.model, cfg.alpha, cfg.k, r, int(n), cfg.samples, cfg.seed,
                                   cfg.chunk_size, cfg.threads)

    exact = None
    if oracle:
        def exact(n):
            return marked_pp.exact_hrv_oracle(config.model, config.alpha, config.k, r, int(n))
    return convergence_table(config, n_grid, run, lambda n: limit, exact)


def residual_tail_estimate(config: ExperimentConfig, x: float) -> TailEstimate:
    """P(R_k^-(T) > x), scaled by x^(alpha (k+1))."""
    return estimate(config, residual_event(config.k, x), scale=x ** (config.alpha * (config.k + 1)),
                    label=f'residual risk > {x}')


def orderstat_tail_estimate(config: ExperimentConfig, x: float) -> TailEstimate:
    """P(X_{N-k:N} > x), scaled by x^(alpha (k+1))."""
    return estimate(config, orderstat_event(config.k, x), scale=x ** (config.alpha * (config.k + 1)),
                    label=f'order statistic > {x}')


def residual_convergence_table(config: ExperimentConfig, x_grid: Sequence[float], statistic: str = 'residual',
                               oracle: bool = False) -> list[ConvergenceRow]:
    """Residual-risk (or order-statistic) tail over x against the residual_tail asymptote."""
    if statistic not in ('residual', 'orderstat'):
        raise ValueError(f"statistic must be 'residual' or 'orderstat', got {statistic!r}")
    ctx = AsymptoticContext(config.model, config.alpha, config.k)
    constant = ctx.factorial_moment / math.factorial(config.k + 1)
    estimator = residual_tail_estimate if statistic == 'residual' else orderstat_tail_estimate
    exact = None
    if oracle:
        def exact(x):
            value = exact_orderstat_tail(config.model, config.alpha, config.k, x).probability
            return value * x ** (config.alpha * (config.k + 1))
    return convergence_table(config, x_grid, estimator, lambda x: constant, exact)


def step2_negligibility(config: ExperimentConfig, x_grid: Sequence[float]) -> list[tuple[float, TailEstimate]]:
    """
    P(sum of all but the k+1 largest claims > x) / x^(-alpha (k+1)) over x.

    The ratio should decrease toward 0: the residual tail is carried by
    the (k+1)-th largest claim alone.
    """
    rows = []
    for x in x_grid:
        scale = x ** (config.alpha * (config.k + 1))
        result = estimate(config, residual_event(config.k + 1, x), scale=scale, label=f'step-2 sum > {x}')
        rows.append((x, result))
    return rows


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    standard_error: float
    samples: int


def factorial_moment_estimate(config: ExperimentConfig, order: int) -> MomentEstimate:
    """Sample mean of N (N-1) ... (N-order+1) with its standard error."""
    def moments(batch: PatternBatch, rng: np.random.Generator) -> tuple[float, float]:
        values = batch.factorial_counts(order)
        return float(values.sum()), float(np.square(values).sum())

    parts = run_chunks(config, moments)
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    n = config.samples
    mean = total / n
    variance = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return MomentEstimate(mean, math.sqrt(variance / n), n)


# ---------------------------------------------------------------------------
# Conditional limit law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KSCheck:
    statistic: float
    pvalue: float
    critical: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.samples > 0 and self.statistic < self.critical


@dataclass(frozen=True)
class ConditionalSummary:
    x: float
    conditioned: int
    samples: int
    exactly_k1_frequency: float
    time_check: Optional[KSCheck]
    size_check: Optional[KSCheck]
    sufficient: bool
    limit_acceptance_rate: float = 1.0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def check(value: Optional[KSCheck]):
            if value is None:
                return None
            return {'statistic': value.statistic, 'pvalue': value.pvalue, 'critical': value.critical,
                    'samples': value.samples, 'pass': value.passed}
        return {
            'x': self.x,
            'conditioned': self.conditioned,
            'samples': self.samples,
            'exactly_k1_frequency': self.exactly_k1_frequency,
            'time_check': check(self.time_check),
            'size_check': check(self.size_check),
            'sufficient': self.sufficient,
            'limit_acceptance_rate': self.limit_acceptance_rate,
            'notes': list(self.notes),
        }


def conditional_diagnostics(config: ExperimentConfig, x: float, min_hits: int = 500,
                            limit_draws: Optional[int] = None) -> ConditionalSummary:
    """
    Compare paths with R_k^-(T) > x against the conditional limit law.

    Reports (a) the frequency of exactly k+1 claims above x, (b) a KS test
    of the times of the k+1 largest claims against the normalised
    intensity, and (c) a two-sample KS test of largest claim / x against
    the largest jump of draws from the limit law.
    """
    k = config.k
    ctx = AsymptoticContext(config.model, config.alpha, k)

    def collect(batch: PatternBatch, rng: np.random.Generator):
        conditioned = batch.residual_risk(k) > x
        marks, times = batch.top_claims(k + 1)
        exceed = batch.count_exceed(x)[conditioned]
        chosen = times[conditioned].ravel()
        return (int(conditioned.sum()), int(np.count_nonzero(exceed == k + 1)),
                chosen[~np.isnan(chosen)], marks[conditioned, 0] / x)

    parts = run_chunks(config, collect)
    hits = sum(p[0] for p in parts)
    exactly = sum(p[1] for p in parts)
    notes = []
    if hits == 0:
        logger.warning("No path exceeded the residual level %s", x)
        return ConditionalSummary(x, 0, config.samples, math.nan, None, None, False, notes=['no conditioned paths'])
    sufficient = hits >= min_hits
    if not sufficient:
        notes.append(f'only {hits} conditioned paths, {min_hits} recommended')
        logger.warning("Conditional diagnostics at x=%s rest on %d paths", x, hits)

    times = np.concatenate([p[2] for p in parts])
    largest = np.concatenate([p[3] for p in parts])

    time_cdf = point_processes.intensity(config.model).time_cdf
    time_test = stats.kstest(times, time_cdf)
    time_check = KSCheck(float(time_test.statistic), float(time_test.pvalue),
                         float(stats.kstwo.ppf(0.99, times.size)), int(times.size))

    draws = max(hits, 5000) if limit_draws is None else limit_draws
    limit = asymptotics.sample_conditional_limit_batch(ctx, auxiliary_stream(config.seed), draws)
    limit_largest = limit.sizes.max(axis=1)
    size_test = stats.ks_2samp(largest, limit_largest)
    critical = KS_TWO_SAMPLE_COEFFICIENT_1PCT * math.sqrt((largest.size + draws) / (largest.size * draws))
    size_check = KSCheck(float(size_test.statistic), float(size_test.pvalue), critical, int(largest.size))

    return ConditionalSummary(
        x=x,
        conditioned=hits,
        samples=config.samples,
        exactly_k1_frequency=exactly / hits,
        time_check=time_check,
        size_check=size_check,
        sufficient=sufficient,
        limit_acceptance_rate=limit.acceptance_rate,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Residual risk monitoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonitoringEstimate:
    """Conditional frequency P(R(t1) > u x | x < R(t0) < (1+eps) x) and its conditioning counts."""
    estimate: Optional[TailEstimate]
    conditioned: int
    hits: int
    samples: int
    too_rare: bool

    @property
    def conditioning_probability(self) -> float:
        return self.conditioned / self.samples


def monitoring_mc(config: ExperimentConfig, x: float, t0: float, t1: float, u: float, eps: float,
                  min_conditioned: int = 100) -> MonitoringEstimate:
    """
    Estimate the monitoring ratio scaled by 1 / F(x) = x^alpha.

    Args:
        config: Experiment configuration
        x: Conditioning level
        t0: Observation time
        t1: Later time, t0 < t1 <= T
        u: Target multiple of x
        eps: Width of the conditioning band
        min_conditioned: Conditioned paths below which the result is flagged

    Returns:
        MonitoringEstimate, with estimate None when nothing was conditioned
    """
    if not 0 < t0 < t1 <= config.model.horizon:
        raise ValueError(f'Need 0 < t0 < t1 <= T, got t0={t0}, t1={t1}')
    if not u > 1:
        raise ValueError(f'u must exceed 1, got {u}')
    if not eps > 0:
        raise ValueError(f'eps must be positive, got {eps}')
    k = config.k

    def count(batch: PatternBatch, rng: np.random.Generator) -> tuple[int, int]:
        early = batch.residual_risk(k, t0)
        conditioned = (early > x) & (early < (1.0 + eps) * x)
        late = batch.residual_risk(k, t1)
        return int(conditioned.sum()), int(np.count_nonzero(conditioned & (late > u * x)))

    parts = run_chunks(config, count)
    conditioned = sum(p[0] for p in parts)
    hits = sum(p[1] for p in parts)
    too_rare = conditioned < min_conditioned
    if too_rare:
        logger.warning("Monitoring band at x=%s, eps=%s holds only %d paths", x, eps, conditioned)
    result = None
    if conditioned:
        result = tail_estimate(hits, conditioned, scale=x ** config.alpha, label='monitoring')
    return MonitoringEstimate(result, conditioned, hits, config.samples, too_rare)


# ---------------------------------------------------------------------------
# Interval coverage
# ---------------------------------------------------------------------------

class CoverageResult(NamedTuple):
    fraction: float
    covered: int
    repetitions: int


def coverage_check(p: float, samples: int, repetitions: int, seed: int, confidence: float = 0.95) -> CoverageResult:
    """Share of Wilson intervals containing p over repeated Bernoulli(p) experiments."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f'p must lie in [0, 1], got {p}')
    if repetitions < 1:
        raise ValueError(f'repetitions must be positive, got {repetitions}')
    hits = substream(seed, 0).binomial(samples, p, repetitions)
    covered = 0
    for h in hits:
        low, high = wilson_interval(int(h), samples, confidence)
        covered += low <= p <= high
    return CoverageResult(covered / repetitions, int(covered), repetitions)
