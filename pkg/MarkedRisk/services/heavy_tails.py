"""
Standard Pareto marks: survival, quantile, sampling, norming and the
truncated-moment ratio behind the Karamata lemma.
"""
import math
from typing import Optional, Union

import numpy as np
from scipy import integrate

from MarkedRisk.models import LimitMeasure, ParetoLaw

ArrayLike = Union[float, np.ndarray]


def survival(law: ParetoLaw, x: ArrayLike) -> ArrayLike:
    """
    P(X > x) = max(x, 1)^(-alpha).

    Args:
        law: Mark law
        x: Level(s), non-negative

    Returns:
        Probability, a float for scalar input
    """
    values = np.asarray(x, dtype=float)
    if np.any(values < 0) or np.any(np.isnan(values)):
        raise ValueError(f'x must be non-negative, got {x}')
    with np.errstate(over='ignore', under='ignore'):
        out = np.maximum(values, 1.0) ** (-law.alpha)
    return float(out) if out.ndim == 0 else out


def quantile(law: ParetoLaw, p: ArrayLike) -> ArrayLike:
    """Inverse of survival on (0, 1]: the x >= 1 with survival(x) = p."""
    values = np.asarray(p, dtype=float)
    if np.any(values <= 0) or np.any(values > 1) or np.any(np.isnan(values)):
        raise ValueError(f'p must lie in (0, 1], got {p}')
    out = values ** (-1.0 / law.alpha)
    return float(out) if out.ndim == 0 else out


def from_uniform(law: ParetoLaw, uniform: ArrayLike) -> ArrayLike:
    """Inverse transform (1 - U)^(-1/alpha) for U in [0, 1)."""
    values = np.asarray(uniform, dtype=float)
    out = (1.0 - values) ** (-1.0 / law.alpha)
    return float(out) if out.ndim == 0 else out


def sample(law: ParetoLaw, rng: np.random.Generator, size: Optional[int] = None) -> ArrayLike:
    """Draw claim sizes; a single float when size is None."""
    return from_uniform(law, rng.random(size))


def norming(alpha: float, n: int) -> float:
    """a_n = n^(1/alpha), exact for standard Pareto marks."""
    ParetoLaw(alpha)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f'n must be a positive integer, got {n}')
    return float(n) ** (1.0 / alpha)


def limit_tail_mass(alpha: float, r: float) -> float:
    return LimitMeasure(alpha).tail_mass(r)


def limit_interval_mass(alpha: float, low: float, high: float = math.inf) -> float:
    """mu((low, high]) = low^(-alpha) - high^(-alpha)."""
    return LimitMeasure(alpha).interval_mass(low, high)


def centering_constant(law: ParetoLaw) -> float:
    """E[X] when it is finite, 0 otherwise."""
    if law.alpha > 1.0:
        return law.alpha / (law.alpha - 1.0)
    return 0.0


def karamata_limit(alpha: float, p: float) -> float:
    if not p > alpha:
        raise ValueError(f'p must exceed alpha ({alpha}), got {p}')
    return alpha / (p - alpha)


def truncated_moment_ratio(law: ParetoLaw, p: float, x: float) -> float:
    """
    E[(X/x)^p 1{X <= x}] / P(X > x) in closed form.

    Equals (alpha / (p - alpha)) (1 - x^(alpha - p)), increasing to
    alpha / (p - alpha) as x grows.
    """
    limit = karamata_limit(law.alpha, p)
    if not x >= 1.0:
        raise ValueError(f'x must be at least 1, got {x}')
    if math.isinf(x):
        return limit
    return limit * -math.expm1((law.alpha - p) * math.log(x))


def truncated_moment_quadrature(law: ParetoLaw, p: float, x: float) -> float:
    """The same ratio by numerical integration of the Pareto density."""
    karamata_limit(law.alpha, p)
    if not 1.0 <= x < math.inf:
        raise ValueError(f'x must be finite and at least 1, got {x}')
    if x == 1.0:
        return 0.0
    alpha = law.alpha

    # substitute y = x * s so the integrand lives on [1/x, 1]
    def integrand(s):
        return s ** p * alpha * (x * s) ** (-alpha - 1.0) * x

    value, _ = integrate.quad(integrand, 1.0 / x, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return value / x ** (-alpha)
