"""
Limit values of residual-risk tails, path tails and residual risk
monitoring, plus samplers from the conditional limit law.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from MarkedRisk.models import AsymptoticContext, BaseProcessModel, FactorialMomentEvaluator, ProcessKind, RiskPath
from MarkedRisk.models.process_constants import GAMMA_MEAN_GAP
from MarkedRisk.services import heavy_tails
from MarkedRisk.services.exceptions import RejectionCapExceeded
from MarkedRisk.services.point_processes import factorial_moment_box
from MarkedRisk.utils.settings_utils import get_knob

logger = logging.getLogger(__name__)


class MonitoringFactor:
    """
    Variants of the Pareto factor f(u) in the monitoring limit.

    CLOSED_FORM is (u-1)^(-(k+1) alpha) + ((u-1)^(-alpha) - 1)_+.
    LIMIT_LAW integrates the conditional limit law directly and gives
    (u-1)^(-alpha) max(u-1, 1)^(-k alpha); both agree for u >= 2.
    """
    CLOSED_FORM = 'closed-form'
    LIMIT_LAW = 'limit-law'

    CHOICES = [
        (CLOSED_FORM, 'Two-term closed form'),
        (LIMIT_LAW, 'Conditional limit law'),
    ]

    @classmethod
    def values(cls) -> list[str]:
        return [value for value, _ in cls.CHOICES]


def _level_constant(ctx: AsymptoticContext) -> float:
    return ctx.factorial_moment / math.factorial(ctx.k + 1)


def residual_tail(ctx: AsymptoticContext, x: float) -> float:
    """
    Asymptote of P(R_k^-(T) > x): E[N^[k+1]] / (k+1)! * x^(-alpha (k+1)).

    Args:
        ctx: Process, tail index and order
        x: Level, above 1

    Returns:
        Asymptotic probability
    """
    if not x > 1:
        raise ValueError(f'x must exceed 1, got {x}')
    return _level_constant(ctx) * x ** (-ctx.alpha * (ctx.k + 1))


def path_tail(ctx: AsymptoticContext, r: float) -> float:
    """Limit of n^(k+1) P(Delta_{k+1}(a_n^-1 R) > 2r)."""
    if not r > 0:
        raise ValueError(f'r must be positive, got {r}')
    return _level_constant(ctx) * (2.0 * r) ** (-ctx.alpha * (ctx.k + 1))


def pareto_factor(u: float, alpha: float, k: int, variant: str = MonitoringFactor.CLOSED_FORM) -> float:
    """
    Pareto factor f(u) of the monitoring limit.

    Args:
        u: Target multiple, above 1
        alpha: Tail index
        k: Order
        variant: One of MonitoringFactor.values()

    Returns:
        f(u)
    """
    if not u > 1:
        raise ValueError(f'u must exceed 1, got {u}')
    if variant not in MonitoringFactor.values():
        raise ValueError(f'Unknown factor variant {variant!r}; choose from {MonitoringFactor.values()}')
    w = u - 1.0
    single = w ** (-alpha)
    if variant == MonitoringFactor.LIMIT_LAW:
        return single * max(w, 1.0) ** (-k * alpha)
    return w ** (-(k + 1) * alpha) + max(0.0, single - 1.0)


def monitoring_measure_ratio(model: BaseProcessModel, k: int, t0: float, t1: float) -> float:
    """
    M_{k+2}([0, t0]^(k+1) x (t0, t1]) / M_{k+1}([0, t0]^(k+1)).

    The grid process is rejected: its factorial moment measures have atoms.
    """
    if model.kind == ProcessKind.GRID:
        raise ValueError('Monitoring limits need continuous factorial moment measures; the grid process has atoms')
    if not 0 < t0 < t1 <= model.horizon:
        raise ValueError(f'Need 0 < t0 < t1 <= T, got t0={t0}, t1={t1}, T={model.horizon}')
    early = [(0.0, float(t0))] * (k + 1)
    denominator = factorial_moment_box(FactorialMomentEvaluator(model, k + 1), early)
    numerator = factorial_moment_box(FactorialMomentEvaluator(model, k + 2), early + [(float(t0), float(t1))])
    if not denominator > 0 or not numerator > 0:
        raise ValueError(f'The order-{k + 2} factorial moment measure of {model.kind} is null on this window')
    return numerator / denominator


def monitoring_limit(ctx: AsymptoticContext, u: float, t0: float, t1: float,
                     variant: str = MonitoringFactor.CLOSED_FORM) -> float:
    """Limit of x^alpha P(R_k^-(t1) > u x | x < R_k^-(t0) < (1+eps) x) as x grows and eps shrinks."""
    factor = pareto_factor(u, ctx.alpha, ctx.k, variant)
    return monitoring_measure_ratio(ctx.model, ctx.k, t0, t1) * factor


def gamma_early_window_ratio(t1: float) -> float:
    """(e^(-2 t1) + 2 t1 - 1) / 4, the renewal measure ratio as t0 -> 0."""
    if not t1 > 0:
        raise ValueError(f't1 must be positive, got {t1}')
    return (math.expm1(-2.0 * t1) + 2.0 * t1) / 4.0


def monitoring_limit_t0zero_gamma(t1: float, u: float, alpha: float, k: int,
                                  variant: str = MonitoringFactor.CLOSED_FORM) -> float:
    """Gamma(2, 1) renewal monitoring limit as t0 -> 0."""
    return gamma_early_window_ratio(t1) * pareto_factor(u, alpha, k, variant)


def poisson_early_window_ratio(t1: float) -> float:
    """t1 / tau for the Poisson process with the renewal process's mean gap."""
    return t1 / GAMMA_MEAN_GAP


# ---------------------------------------------------------------------------
# Conditional limit law
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConditionalLimitSample:
    """Draws from the conditional limit law: rows of k+1 jump times and sizes."""
    horizon: float
    times: np.ndarray
    sizes: np.ndarray
    acceptance_rate: float

    def path(self, index: int) -> RiskPath:
        order = np.argsort(self.times[index], kind='stable')
        jumps = tuple(zip(self.times[index][order], self.sizes[index][order]))
        return RiskPath(self.horizon, jumps)


def _sample_limit_times(model: BaseProcessModel, k: int, rng: np.random.Generator, size: int,
                        cap: int) -> tuple[np.ndarray, float]:
    horizon = model.horizon
    points = k + 1
    if model.kind in (ProcessKind.POISSON, ProcessKind.BINOMIAL):
        return rng.uniform(0.0, horizon, (size, points)), 1.0
    if model.kind == ProcessKind.GRID:
        # uniform over ordered tuples of distinct grid points
        picks = np.argsort(rng.random((size, model.n)), axis=1)[:, :points]
        return horizon * (picks + 1) / model.n, 1.0

    # Gamma renewal: uniform proposals accepted with prob prod (1 - e^(-2 gap)),
    # the density over its bound tau^-1 (1/2)^k
    out = np.empty((size, points))
    filled = 0
    attempts = 0
    accepted = 0
    limit = cap * max(size, 1)
    while filled < size:
        if attempts >= limit:
            raise RejectionCapExceeded(attempts, filled, size)
        need = size - filled
        batch = min(max(2 * need, 64), limit - attempts)
        proposal = rng.uniform(0.0, horizon, (batch, points))
        gaps = np.diff(np.sort(proposal, axis=1), axis=1)
        keep = rng.random(batch) < np.prod(-np.expm1(-2.0 * gaps), axis=1)
        taken = proposal[keep][:need]
        out[filled:filled + taken.shape[0]] = taken
        filled += taken.shape[0]
        attempts += batch
        accepted += int(keep.sum())
    return out, accepted / attempts


def sample_conditional_limit_batch(ctx: AsymptoticContext, rng: np.random.Generator, size: int,
                                   cap: Optional[int] = None) -> ConditionalLimitSample:
    """
    Draw `size` paths of the conditional limit law.

    Sizes are i.i.d. standard Pareto(alpha); times come independently from
    the normalised M_{k+1}.

    Args:
        ctx: Process, tail index and order
        rng: Random stream
        size: Number of paths
        cap: Rejection attempts allowed per path, MARKEDRISK_REJECTION_CAP when None

    Returns:
        ConditionalLimitSample with the time sampler's acceptance rate
    """
    if size < 1:
        raise ValueError(f'size must be positive, got {size}')
    cap = get_knob('MARKEDRISK_REJECTION_CAP') if cap is None else cap
    times, rate = _sample_limit_times(ctx.model, ctx.k, rng, size, cap)
    if ctx.model.kind == ProcessKind.GAMMA_RENEWAL:
        logger.info("Conditional limit time sampler acceptance rate %.4f", rate)
    sizes = heavy_tails.sample(ctx.law, rng, (size, ctx.k + 1))
    return ConditionalLimitSample(ctx.model.horizon, times, sizes, rate)


def sample_conditional_limit(ctx: AsymptoticContext, rng: np.random.Generator,
                             cap: Optional[int] = None) -> RiskPath:
    """One (k+1)-jump path from the conditional limit law."""
    return sample_conditional_limit_batch(ctx, rng, 1, cap).path(0)
