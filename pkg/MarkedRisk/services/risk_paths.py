"""
Risk processes R(t) = sum of claims up to t, their jump order statistics,
cone distances and the largest-claims reinsurance split.
"""
import math
from pathlib import Path
from typing import Optional

import numpy as np

from MarkedRisk.models import MarkedPattern, ParetoLaw, PatternBatch, RiskPath, TailEstimate
from MarkedRisk.services import heavy_tails
from MarkedRisk.utils.output_utils import write_csv


def build_risk(pattern: MarkedPattern) -> RiskPath:
    return RiskPath(pattern.horizon, pattern.points)


def build_centered_risk(pattern: MarkedPattern, c: float) -> RiskPath:
    """Path with signed jumps x - c at the arrival times."""
    if c == 0.0:
        return build_risk(pattern)
    return RiskPath(pattern.horizon, tuple((t, x - c) for t, x in pattern.points), centering=c)


def _check_time(path: RiskPath, t: float) -> float:
    if not 0.0 <= t <= path.horizon:
        raise ValueError(f't must lie in [0, {path.horizon}], got {t}')
    return float(t)


def evaluate(path: RiskPath, t: float) -> float:
    """Right-continuous value R(t)."""
    t = _check_time(path, t)
    return math.fsum(size for time, size in path.jumps if time <= t) + path.drift * t


def _require_claims(path: RiskPath, name: str):
    """Centered paths carry x - c, not claim sizes."""
    if path.centering != 0.0:
        raise ValueError(f'{name} ranks claim sizes; centered paths are not supported')


def _ranked_sizes(path: RiskPath, t: Optional[float] = None) -> list[float]:
    """Jump sizes up to t, largest first; ties keep time order."""
    jumps = path.jumps if t is None else [j for j in path.jumps if j[0] <= t]
    return [size for _, size in sorted(jumps, key=lambda j: (-j[1], j[0]))]


def delta(path: RiskPath, k: int) -> float:
    """k-th largest absolute jump, 0 when there are fewer than k jumps."""
    if k < 1:
        raise ValueError(f'k must be positive, got {k}')
    sizes = sorted((abs(size) for size in path.sizes), reverse=True)
    return sizes[k - 1] if k <= len(sizes) else 0.0


def dist_to_Dk(path: RiskPath, k: int) -> float:
    """Distance to the paths with at most k jumps: half the (k+1)-th largest jump."""
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    return delta(path, k + 1) / 2.0


def dist_to_Jk(path: RiskPath, k: int) -> float:
    """Distance to the pure-jump paths with at most k jumps: all but the k largest jumps."""
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    if not path.is_pure_jump:
        raise ValueError('dist_to_Jk needs a pure-jump path (drift 0)')
    _require_claims(path, 'dist_to_Jk')
    return math.fsum(_ranked_sizes(path)[k:])


def covered_risk(path: RiskPath, k: int, t: float) -> float:
    """Sum of the k largest claims up to t."""
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    _require_claims(path, 'covered_risk')
    t = _check_time(path, t)
    return math.fsum(_ranked_sizes(path, t)[:k])


def residual_risk(path: RiskPath, k: int, t: float) -> float:
    """
    Retained risk at t: all claims up to t except the k largest.

    A drift term, when present, is retained, so residual + covered = R(t).
    """
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    _require_claims(path, 'residual_risk')
    t = _check_time(path, t)
    return math.fsum(_ranked_sizes(path, t)[k:]) + path.drift * t


def export_csv(path: RiskPath, destination: Path) -> Path:
    """Write (time, value_right_limit) at every jump epoch."""
    rows = []
    running = 0.0
    for time, size in path.jumps:
        running += size
        rows.append((time, running + path.drift * time))
    return write_csv(destination, ('time', 'value_right_limit'), rows)


# ---------------------------------------------------------------------------
# Centered triangular arrays
# ---------------------------------------------------------------------------

def centered_jump_order_stat(batch: PatternBatch, c: float, j: int) -> np.ndarray:
    """j-th largest |x - c| per path, 0 where a path has fewer than j claims."""
    ids, vals, _, rank = batch.ranked(values=np.abs(batch.marks - c))
    out = np.zeros(batch.size)
    hit = rank == j - 1
    out[ids[hit]] = vals[hit]
    return out


def centered_path_limit(alpha: float, k: int, r: float) -> float:
    """(2r)^(-alpha (k+1)) / (k+1)! for a normalised row intensity."""
    if not r > 0:
        raise ValueError(f'r must be positive, got {r}')
    return (2.0 * r) ** (-alpha * (k + 1)) / math.factorial(k + 1)


def mc_centered_path_tail(kind: str, alpha: float, k: int, r: float, n: int, samples: int, seed: int,
                          m_n: Optional[int] = None, horizon: float = 1.0,
                          chunk_size: Optional[int] = None, threads: Optional[int] = None) -> TailEstimate:
    """
    n^(k+1) P(Delta_{k+1}(a_{n m_n}^-1 R~) > 2r) for the centered row risk process R~.

    Claims are centered by E[X] when alpha > 1 and left alone otherwise.
    """
    from MarkedRisk.services import marked_pp, montecarlo

    m_n = marked_pp.triangular_count(n) if m_n is None else m_n
    model = marked_pp.triangular_model(kind, m_n, horizon)
    c = heavy_tails.centering_constant(ParetoLaw(alpha))
    level = 2.0 * r * heavy_tails.norming(alpha, n * m_n)
    config = montecarlo.make_config(model, alpha, k, samples, seed, chunk_size, threads, r=r)

    def event(batch: PatternBatch) -> np.ndarray:
        return centered_jump_order_stat(batch, c, k + 1) > level

    return montecarlo.estimate(config, event, scale=float(n) ** (k + 1), label='centered path tail')
