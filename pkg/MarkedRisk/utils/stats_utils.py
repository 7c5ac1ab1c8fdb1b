"""
Binomial confidence intervals and related helpers.
"""
import math

from scipy.stats import norm


def wilson_interval(hits: int, samples: int, confidence: float = 0.95) -> tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.

    When there are no hits the one-sided upper bound is returned with a
    lower bound of zero, so rare-event cells still get a usable interval.

    Args:
        hits: Number of successes
        samples: Number of trials
        confidence: Confidence level in (0, 1)

    Returns:
        (low, high) with 0 <= low <= hits/samples <= high <= 1
    """
    if samples <= 0:
        raise ValueError(f'samples must be positive, got {samples}')
    if hits < 0 or hits > samples:
        raise ValueError(f'hits must lie in [0, {samples}], got {hits}')
    if not 0.0 < confidence < 1.0:
        raise ValueError(f'confidence must lie in (0, 1), got {confidence}')

    n = float(samples)
    if hits == 0:
        z = norm.ppf(confidence)
        return 0.0, float(min(1.0, z * z / (n + z * z)))

    z = norm.ppf(1.0 - (1.0 - confidence) / 2.0)
    p_hat = hits / n
    z2 = z * z
    denominator = 1.0 + z2 / n
    center = (p_hat + z2 / (2.0 * n)) / denominator
    margin = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denominator
    low = max(0.0, center - margin)
    high = min(1.0, center + margin)
    # keep the point estimate inside after rounding
    return float(min(low, p_hat)), float(max(high, p_hat))
