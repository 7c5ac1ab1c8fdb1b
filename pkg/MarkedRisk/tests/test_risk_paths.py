import math

import numpy as np
import pytest

from MarkedRisk.models import MarkedPattern, PatternBatch, RiskPath
from MarkedRisk.services import risk_paths


@pytest.fixture
def path():
    """Claims 2, 9, 5 at times 1, 2, 3."""
    return RiskPath(3.0, ((1.0, 2.0), (2.0, 9.0), (3.0, 5.0)))


def test_evaluate_is_right_continuous(path):
    assert risk_paths.evaluate(path, 0.5) == 0.0
    assert risk_paths.evaluate(path, 2.0) == 11.0
    assert risk_paths.evaluate(path, 2.5) == 11.0
    assert risk_paths.evaluate(path, 3.0) == 16.0
    with pytest.raises(ValueError):
        risk_paths.evaluate(path, 3.5)


def test_jump_order_statistics(path):
    assert [risk_paths.delta(path, k) for k in (1, 2, 3, 4)] == [9.0, 5.0, 2.0, 0.0]


@pytest.mark.parametrize('k, d_dk, d_jk', [(0, 4.5, 16.0), (1, 2.5, 7.0), (2, 1.0, 2.0), (3, 0.0, 0.0)])
def test_cone_distances(path, k, d_dk, d_jk):
    assert risk_paths.dist_to_Dk(path, k) == d_dk
    assert risk_paths.dist_to_Jk(path, k) == d_jk
    assert 2.0 * d_dk <= d_jk


def test_reinsurance_split(path):
    assert risk_paths.covered_risk(path, 1, 3.0) == 9.0
    assert risk_paths.residual_risk(path, 1, 3.0) == 7.0
    assert risk_paths.covered_risk(path, 1, 1.5) == 2.0
    assert risk_paths.residual_risk(path, 1, 1.5) == 0.0
    assert risk_paths.residual_risk(path, 0, 2.0) == 11.0


def test_ties_are_broken_by_time():
    path = RiskPath(2.0, ((0.5, 3.0), (1.0, 3.0), (1.5, 1.0)))
    assert risk_paths.covered_risk(path, 1, 2.0) == 3.0
    assert risk_paths.residual_risk(path, 1, 2.0) == 4.0


def test_empty_path():
    path = RiskPath(1.0)
    assert risk_paths.evaluate(path, 1.0) == 0.0
    assert risk_paths.dist_to_Dk(path, 0) == 0.0
    assert risk_paths.dist_to_Jk(path, 0) == 0.0


def test_drift_is_retained():
    path = RiskPath(2.0, ((1.0, 4.0),), drift=-1.5)
    assert risk_paths.evaluate(path, 2.0) == pytest.approx(1.0)
    assert risk_paths.residual_risk(path, 1, 2.0) == pytest.approx(-3.0)
    assert risk_paths.covered_risk(path, 1, 2.0) + risk_paths.residual_risk(path, 1, 2.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        risk_paths.dist_to_Jk(path, 0)


def test_sizes_must_be_positive():
    with pytest.raises(ValueError):
        RiskPath(1.0, ((0.5, -1.0),))
    with pytest.raises(ValueError):
        RiskPath(1.0, ((0.8, 1.0), (0.5, 1.0)))


def test_centered_path():
    pattern = MarkedPattern(2.0, ((0.5, 1.2), (1.0, 10.0), (1.5, 2.0)))
    centered = risk_paths.build_centered_risk(pattern, 3.0)
    assert centered.centering == 3.0
    assert centered.sizes == pytest.approx((-1.8, 7.0, -1.0))
    assert risk_paths.evaluate(centered, 2.0) == pytest.approx(13.2 - 9.0)
    assert risk_paths.delta(centered, 2) == pytest.approx(1.8)
    with pytest.raises(ValueError):
        risk_paths.dist_to_Jk(centered, 1)
    assert risk_paths.build_centered_risk(pattern, 0.0).centering == 0.0


@pytest.mark.parametrize('split', [risk_paths.covered_risk, risk_paths.residual_risk])
def test_reinsurance_split_rejects_centered_paths(split):
    pattern = MarkedPattern(2.0, ((0.5, 1.2), (1.0, 10.0), (1.5, 2.0)))
    # -1.8 ranks above -1.0 by |x - c| but below it as a claim
    with pytest.raises(ValueError, match='centered'):
        split(risk_paths.build_centered_risk(pattern, 3.0), 1, 2.0)
    assert split(risk_paths.build_centered_risk(pattern, 0.0), 1, 2.0) == split(risk_paths.build_risk(pattern), 1, 2.0)


def test_homogeneity(path):
    scaled = RiskPath(path.horizon, tuple((t, 3.0 * x) for t, x in path.jumps))
    for k in range(4):
        assert risk_paths.dist_to_Dk(scaled, k) == pytest.approx(3.0 * risk_paths.dist_to_Dk(path, k))
        assert risk_paths.dist_to_Jk(scaled, k) == pytest.approx(3.0 * risk_paths.dist_to_Jk(path, k))


def test_batch_split_matches_path_functions(small_batch):
    for t in (0.3, 0.6, 1.0):
        covered = small_batch.covered_risk(1, t)
        residual = small_batch.residual_risk(1, t)
        np.testing.assert_allclose(covered + residual, small_batch.total(t))
        for index in range(small_batch.size):
            single = risk_paths.build_risk(small_batch.pattern(index))
            assert residual[index] == pytest.approx(risk_paths.residual_risk(single, 1, t))
            assert covered[index] == pytest.approx(risk_paths.covered_risk(single, 1, t))


def test_batch_helpers(small_batch):
    np.testing.assert_array_equal(small_batch.counts_in(0.3, 1.0), [2, 0, 1])
    np.testing.assert_array_equal(small_batch.factorial_counts(2), [6.0, 0.0, 2.0])
    np.testing.assert_allclose(small_batch.total(), [10.0, 0.0, 5.5])
    with pytest.raises(ValueError):
        PatternBatch(1.0, np.array([2]), np.array([0.5]))


def test_export_csv(path, tmp_path):
    target = risk_paths.export_csv(path, tmp_path / 'risk.csv')
    assert target.read_text().splitlines() == ['time,value_right_limit', '1.0,2.0', '2.0,11.0', '3.0,16.0']


def test_centered_jump_order_stat():
    batch = PatternBatch(1.0, np.array([3, 1]), np.array([0.1, 0.2, 0.3, 0.5]), np.array([1.0, 6.0, 3.5, 2.0]))
    np.testing.assert_allclose(risk_paths.centered_jump_order_stat(batch, 3.0, 1), [3.0, 1.0])
    np.testing.assert_allclose(risk_paths.centered_jump_order_stat(batch, 3.0, 2), [2.0, 0.0])


def test_centered_path_limit():
    assert risk_paths.centered_path_limit(1.0, 1, 1.0) == 0.125
    assert risk_paths.centered_path_limit(2.0, 0, 0.5) == 1.0


def test_centered_monte_carlo_matches_the_exact_tail():
    # alpha = 1: no centering, so Delta_2 > 2 a_{n m} r means two marks above 2 a_{n m} r
    n, m_n, samples = 4, 2, 40_000
    result = risk_paths.mc_centered_path_tail('binomial', 1.0, 1, 1.0, n, samples, seed=4, m_n=m_n,
                                              chunk_size=10_000, threads=2)
    p = 1.0 / (2.0 * n * m_n)
    exact = p * p
    assert result.scale == n ** 2
    assert abs(result.p_hat - exact) <= 4.0 * math.sqrt(exact * (1.0 - exact) / samples)


def test_centered_exact_tail_approaches_its_limit():
    n, m_n = 100, 10
    p = 1.0 / (2.0 * n * m_n)
    exact = (1.0 - (1.0 - p) ** m_n - m_n * p * (1.0 - p) ** (m_n - 1)) * n ** 2
    assert exact == pytest.approx(risk_paths.centered_path_limit(1.0, 1, 1.0), rel=0.15)


def test_centered_tail_with_finite_mean_claims():
    result = risk_paths.mc_centered_path_tail('grid', 1.5, 0, 0.5, 10, 2_000, seed=1, chunk_size=500, threads=1)
    assert result.samples == 2_000
    assert result.scale == 10.0
