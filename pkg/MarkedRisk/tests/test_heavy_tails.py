import math

import numpy as np
import pytest

from MarkedRisk.models import LimitMeasure, ParetoLaw
from MarkedRisk.services import heavy_tails
from MarkedRisk.utils.rng_utils import substream


@pytest.fixture
def law():
    return ParetoLaw(2.0)


def test_survival(law):
    assert heavy_tails.survival(law, 0.5) == 1.0
    assert heavy_tails.survival(law, 10.0) == pytest.approx(0.01)
    np.testing.assert_allclose(heavy_tails.survival(law, np.array([1.0, 2.0, 4.0])), [1.0, 0.25, 0.0625])


def test_survival_rejects_negative_levels(law):
    with pytest.raises(ValueError):
        heavy_tails.survival(law, -1.0)


def test_quantile_inverts_survival(law):
    for x in (1.0, 3.5, 250.0):
        assert heavy_tails.quantile(law, heavy_tails.survival(law, x)) == pytest.approx(x)
    with pytest.raises(ValueError):
        heavy_tails.quantile(law, 0.0)


@pytest.mark.parametrize('alpha', [0.0, -1.0, math.inf, True])
def test_rejects_bad_tail_index(alpha):
    with pytest.raises(ValueError):
        ParetoLaw(alpha)


def test_sample_law():
    alpha = 1.5
    draws = heavy_tails.sample(ParetoLaw(alpha), substream(3, 0), 200_000)
    assert draws.min() >= 1.0
    # log X is exponential with mean 1/alpha
    logs = np.log(draws)
    assert abs(logs.mean() - 1.0 / alpha) < 4.0 * logs.std() / math.sqrt(logs.size)


def test_single_draw_is_a_float(law):
    assert isinstance(heavy_tails.sample(law, substream(1, 0)), float)


def test_norming():
    assert heavy_tails.norming(2.0, 100) == pytest.approx(10.0)
    assert heavy_tails.norming(1.0, 7) == 7.0
    with pytest.raises(ValueError):
        heavy_tails.norming(1.0, 0)


def test_norming_matches_survival():
    alpha, n = 1.5, 1000
    law = ParetoLaw(alpha)
    assert n * heavy_tails.survival(law, heavy_tails.norming(alpha, n)) == pytest.approx(1.0)


def test_limit_measure():
    assert heavy_tails.limit_tail_mass(1.0, 4.0) == 0.25
    assert heavy_tails.limit_interval_mass(1.0, 2.0, 4.0) == pytest.approx(0.25)
    assert heavy_tails.limit_interval_mass(2.0, 1.0) == 1.0
    assert LimitMeasure(1.0).tail_mass(math.inf) == 0.0
    with pytest.raises(ValueError):
        heavy_tails.limit_interval_mass(1.0, 0.0, 1.0)


def test_centering_constant():
    assert heavy_tails.centering_constant(ParetoLaw(1.5)) == pytest.approx(3.0)
    assert heavy_tails.centering_constant(ParetoLaw(1.0)) == 0.0
    assert ParetoLaw(0.5).mean == math.inf


class TestTruncatedMoments:
    def test_closed_form(self):
        law = ParetoLaw(1.5)
        assert heavy_tails.truncated_moment_ratio(law, 2.0, 100.0) == pytest.approx(2.7)
        assert heavy_tails.truncated_moment_ratio(law, 2.0, 1.0) == 0.0
        assert heavy_tails.truncated_moment_ratio(law, 2.0, math.inf) == 3.0

    @pytest.mark.parametrize('x', [2.0, 10.0, 1000.0, 1e6])
    def test_quadrature_agrees(self, x):
        law = ParetoLaw(1.5)
        closed = heavy_tails.truncated_moment_ratio(law, 2.0, x)
        assert heavy_tails.truncated_moment_quadrature(law, 2.0, x) == pytest.approx(closed, rel=1e-8)

    def test_increases_to_the_limit(self):
        law = ParetoLaw(0.8)
        values = [heavy_tails.truncated_moment_ratio(law, 1.0, x) for x in (10.0, 100.0, 1e4, 1e8)]
        assert values == sorted(values)
        assert values[-1] < heavy_tails.karamata_limit(0.8, 1.0)
        assert values[-1] == pytest.approx(4.0, rel=5e-2)

    def test_requires_p_above_alpha(self):
        with pytest.raises(ValueError):
            heavy_tails.karamata_limit(2.0, 2.0)
        with pytest.raises(ValueError):
            heavy_tails.truncated_moment_ratio(ParetoLaw(2.0), 1.0, 10.0)
