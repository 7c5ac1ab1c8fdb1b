import math

import numpy as np
import pytest
from scipy import stats

from MarkedRisk.models import BaseProcessModel, ExperimentConfig
from MarkedRisk.services import marked_pp, montecarlo, risk_paths
from MarkedRisk.services.exceptions import EventEvaluationError


@pytest.fixture
def config(poisson_model):
    return montecarlo.make_config(poisson_model, 1.0, 1, 20_000, seed=17, chunk_size=5_000, threads=1)


def close_to(result, expected, width=4.0):
    return abs(result.p_hat - expected) <= width * math.sqrt(expected * (1.0 - expected) / result.samples)


class TestConfig:
    def test_defaults_come_from_settings(self, poisson_model, settings):
        settings.MARKEDRISK_CHUNK_SIZE = 1_000
        settings.MARKEDRISK_THREADS = 3
        config = montecarlo.make_config(poisson_model, 1.0, 1, 10, seed=0)
        assert (config.chunk_size, config.threads) == (1_000, 3)

    @pytest.mark.parametrize('changes', [{'samples': 0}, {'seed': -1}, {'k': -1}, {'alpha': 0.0}, {'threads': 0}])
    def test_validation(self, poisson_model, changes):
        values = {'model': poisson_model, 'alpha': 1.0, 'k': 1, 'samples': 10, 'seed': 0}
        values.update(changes)
        with pytest.raises(ValueError):
            ExperimentConfig(**values)

    def test_require(self, config):
        assert config.evolve(x=3.0).require('x') == (3.0,)
        with pytest.raises(ValueError):
            config.require('t0')


class TestEstimates:
    def test_void_probability(self):
        config = montecarlo.make_config(BaseProcessModel.poisson(0.5, 2.0), 1.0, 0, 20_000, seed=3, chunk_size=4_000)
        assert close_to(montecarlo.estimate(config, montecarlo.void_event()), math.exp(-1.0))

    def test_orderstat_event_matches_exact_tail(self, config):
        result = montecarlo.estimate(config, montecarlo.orderstat_event(1, 5.0))
        assert close_to(result, 1.0 - 2.0 / math.e)

    def test_thread_count_does_not_change_the_result(self, config):
        event = montecarlo.orderstat_event(1, 5.0)
        first = montecarlo.estimate(config, event)
        assert montecarlo.estimate(config.evolve(threads=4), event) == first

    def test_path_by_path_events_agree_with_vectorised_ones(self, config):
        small = config.evolve(samples=2_000, chunk_size=1_000)
        vectorised = montecarlo.estimate(small, montecarlo.orderstat_event(1, 5.0))
        lifted = montecarlo.estimate(small, montecarlo.pattern_event(lambda p: marked_pp.count_exceed(p, 5.0) >= 2))
        assert lifted.hits == vectorised.hits
        residual = montecarlo.estimate(small, montecarlo.residual_event(1, 20.0))
        on_paths = montecarlo.estimate(small, montecarlo.risk_event(
            lambda path: risk_paths.residual_risk(path, 1, path.horizon) > 20.0))
        assert on_paths.hits == residual.hits

    def test_zero_hits(self, config):
        result = montecarlo.estimate(config, lambda batch: np.zeros(batch.size, dtype=bool))
        assert result.zero_hits
        assert result.ci_low == 0.0 and result.ci_high > 0.0

    def test_failing_event_reports_its_substream(self, config):
        def broken(batch):
            raise ZeroDivisionError('boom')
        with pytest.raises(EventEvaluationError) as info:
            montecarlo.estimate(config, broken)
        assert info.value.substream_key == (17, 0)
        assert isinstance(info.value.cause, ZeroDivisionError)

    def test_event_shape_is_checked(self, config):
        with pytest.raises(EventEvaluationError):
            montecarlo.estimate(config, lambda batch: np.ones(3, dtype=bool))

    def test_factorial_moment_estimate(self, config):
        moment = montecarlo.factorial_moment_estimate(config, 2)
        assert abs(moment.mean - 25.0) <= 5.0 * moment.standard_error
        assert moment.samples == 20_000


class TestExactOracles:
    def test_binomial_tail(self):
        np.testing.assert_allclose(montecarlo.binomial_tail(np.array([1, 5, 10]), 0.1, 2),
                                   [0.0, stats.binom.sf(1, 5, 0.1), stats.binom.sf(1, 10, 0.1)])
        np.testing.assert_array_equal(montecarlo.binomial_tail(np.array([3]), 0.5, 0), [1.0])

    def test_poisson_truncation_is_reported(self, poisson_model):
        exact = montecarlo.exact_orderstat_tail(poisson_model, 1.0, 1, 5.0, tail=1e-12)
        assert exact.probability == pytest.approx(1.0 - 2.0 / math.e, rel=1e-10)
        assert exact.truncation < 1e-12
        assert exact.max_count > 5

    def test_renewal_has_no_oracle(self, gamma_model):
        with pytest.raises(ValueError):
            montecarlo.exact_orderstat_tail(gamma_model, 1.0, 1, 5.0)


class TestTables:
    def test_hrv_table(self, config):
        rows = montecarlo.hrv_convergence_table(config.evolve(r=1.0), [2, 5], oracle=True)
        assert [row.point for row in rows] == [2, 5]
        assert all(row.asymptote == pytest.approx(12.5) for row in rows)
        for row in rows:
            assert row.oracle == pytest.approx(marked_pp.exact_hrv_oracle(config.model, 1.0, 1, 1.0, row.point))
            assert row.ratio == pytest.approx(row.estimate.scaled_estimate / 12.5)

    def test_hrv_table_needs_a_level(self, config):
        with pytest.raises(ValueError):
            montecarlo.hrv_convergence_table(config, [10])

    def test_residual_table(self, config):
        rows = montecarlo.residual_convergence_table(config, [5.0, 10.0], statistic='orderstat', oracle=True)
        assert rows[0].oracle == pytest.approx((1.0 - 2.0 / math.e) * 25.0, rel=1e-9)
        assert rows[0].oracle_ratio == pytest.approx(rows[0].oracle / 12.5)
        with pytest.raises(ValueError):
            montecarlo.residual_convergence_table(config, [5.0], statistic='mean')

    def test_residual_dominates_order_statistic_in_the_tail(self, config):
        # R_k^- > x whenever the (k+1)-th largest claim exceeds x
        residual = montecarlo.estimate(config, montecarlo.residual_event(1, 10.0))
        orderstat = montecarlo.estimate(config, montecarlo.orderstat_event(1, 10.0))
        assert residual.hits >= orderstat.hits

    def test_step2_rows(self, config):
        rows = montecarlo.step2_negligibility(config, [5.0, 20.0])
        assert [x for x, _ in rows] == [5.0, 20.0]
        assert rows[0][1].hits >= rows[1][1].hits


class TestConditionalDiagnostics:
    def test_poisson_diagnostics(self, poisson_model):
        config = montecarlo.make_config(poisson_model, 1.0, 1, 200_000, seed=21, chunk_size=50_000, threads=2)
        summary = montecarlo.conditional_diagnostics(config, 50.0, min_hits=300, limit_draws=5_000)
        assert summary.conditioned >= 300 and summary.sufficient
        assert 0.25 < summary.exactly_k1_frequency <= 1.0
        # Poisson arrival times are uniform whatever the marks
        assert summary.time_check.statistic < 2.0 * summary.time_check.critical
        assert summary.size_check.samples == summary.conditioned
        payload = summary.to_dict()
        assert payload['time_check']['samples'] == 2 * summary.conditioned

    def test_no_conditioned_paths(self, config):
        summary = montecarlo.conditional_diagnostics(config, 1e12)
        assert summary.conditioned == 0
        assert summary.time_check is None and not summary.sufficient


class TestMonitoring:
    def test_counts(self, poisson_model):
        config = montecarlo.make_config(poisson_model, 1.0, 1, 50_000, seed=8, chunk_size=10_000)
        outcome = montecarlo.monitoring_mc(config, 5.0, 1.0, 2.0, 2.5, 0.4, min_conditioned=10_000)
        assert 0 <= outcome.hits <= outcome.conditioned <= 50_000
        assert outcome.too_rare
        assert outcome.conditioning_probability == outcome.conditioned / 50_000
        if outcome.estimate is not None:
            assert outcome.estimate.scale == 5.0

    def test_rejects_bad_windows(self, config):
        with pytest.raises(ValueError):
            montecarlo.monitoring_mc(config, 5.0, 2.0, 1.0, 2.5, 0.1)
        with pytest.raises(ValueError):
            montecarlo.monitoring_mc(config, 5.0, 1.0, 2.0, 1.0, 0.1)


def test_wilson_coverage_is_near_nominal():
    result = montecarlo.coverage_check(0.01, 10_000, 2_000, seed=1)
    assert 0.92 <= result.fraction <= 0.98
    assert result.repetitions == 2_000


@pytest.mark.parametrize('k', [0, 1, 2])
def test_orderstat_estimates_match_the_oracle(config, k):
    x = 10.0
    exact = montecarlo.exact_orderstat_tail(config.model, 1.0, k, x).probability
    # exceedances of x form a Poisson(lambda T / x) count
    assert exact == pytest.approx(stats.poisson.sf(k, 0.5), rel=1e-9)
    assert close_to(montecarlo.estimate(config, montecarlo.orderstat_event(k, x)), exact)


def test_single_point_oracle():
    exact = montecarlo.exact_orderstat_tail(BaseProcessModel.binomial(1, 1.0), 1.5, 0, 4.0)
    assert exact.probability == pytest.approx(4.0 ** -1.5)
    assert exact.truncation == 0.0


def test_sure_event(config):
    result = montecarlo.estimate(config, lambda batch: np.ones(batch.size, dtype=bool))
    assert result.p_hat == 1.0 and result.ci_high == 1.0
