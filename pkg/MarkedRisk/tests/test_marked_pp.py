import math

import numpy as np
import pytest
from scipy import stats

from MarkedRisk.models import BaseProcessModel, CylinderEvent, MarkBox, MarkedPattern, ParetoLaw, TimePattern
from MarkedRisk.services import marked_pp, montecarlo
from MarkedRisk.utils.rng_utils import substream


@pytest.fixture
def pattern():
    return MarkedPattern(4.0, ((0.5, 2.0), (1.5, 9.0), (3.0, 5.0)))


def test_mark_keeps_times():
    times = TimePattern(2.0, (0.1, 0.4, 1.9))
    marked = marked_pp.mark(times, ParetoLaw(1.0), substream(1, 0))
    assert marked.times == times.times
    assert all(x >= 1.0 for x in marked.marks)


def test_order_statistics_and_counts(pattern):
    assert marked_pp.mark_order_stat(pattern, 1) == 9.0
    assert marked_pp.mark_order_stat(pattern, 3) == 2.0
    assert marked_pp.mark_order_stat(pattern, 4) == 0.0
    assert marked_pp.count_exceed(pattern, 4.0) == 2
    assert marked_pp.count_exceed(pattern, 9.0) == 0
    with pytest.raises(ValueError):
        marked_pp.mark_order_stat(pattern, 0)


def test_scale(pattern):
    scaled = marked_pp.scale(pattern, 0.5)
    assert scaled.times == pattern.times
    assert scaled.marks == (1.0, 4.5, 2.5)
    with pytest.raises(ValueError):
        marked_pp.scale(pattern, 0.0)


def test_marked_pattern_validation():
    with pytest.raises(ValueError):
        MarkedPattern(1.0, ((0.5, 0.0),))
    with pytest.raises(ValueError):
        MarkedPattern(1.0, ((0.5, 1.0), (0.2, 1.0)))


def test_batch_order_statistics(small_batch):
    np.testing.assert_array_equal(small_batch.count_exceed(2.5), [2, 0, 1])
    np.testing.assert_array_equal(small_batch.mark_order_stat(1), [5.0, 0.0, 4.0])
    np.testing.assert_array_equal(small_batch.mark_order_stat(2), [3.0, 0.0, 1.5])
    np.testing.assert_array_equal(small_batch.mark_order_stat(3), [2.0, 0.0, 0.0])
    marks, times = small_batch.top_claims(2)
    np.testing.assert_array_equal(marks, [[5.0, 3.0], [np.nan, np.nan], [4.0, 1.5]])
    np.testing.assert_array_equal(times, [[0.5, 0.9], [np.nan, np.nan], [0.2, 0.7]])


def test_batch_matches_single_patterns(small_batch):
    for index in range(small_batch.size):
        single = small_batch.pattern(index)
        for j in (1, 2, 3):
            assert small_batch.mark_order_stat(j)[index] == marked_pp.mark_order_stat(single, j)
    assert small_batch.pattern(2).points == ((0.2, 4.0), (0.7, 1.5))
    np.testing.assert_array_equal(small_batch.scaled(2.0).marks, small_batch.marks * 2.0)


class TestCylinderEvents:
    def test_overlapping_boxes_are_rejected(self):
        with pytest.raises(ValueError):
            CylinderEvent((MarkBox(0.0, 2.0, 1.0), MarkBox(1.0, 3.0, 2.0, 5.0)), (1, 1))

    def test_marks_must_stay_away_from_zero(self):
        with pytest.raises(ValueError):
            MarkBox(0.0, 1.0, 0.0)

    def test_occurs(self, pattern, small_batch):
        event = CylinderEvent((MarkBox(0.0, 2.0, 1.0), MarkBox(2.0, 4.0, 4.0)), (2, 1))
        assert event.total == 3
        assert event.occurs(pattern.points)
        batch_event = CylinderEvent((MarkBox(0.0, 0.6, 2.5),), (1,))
        np.testing.assert_array_equal(marked_pp.cylinder_event_occurs(small_batch, batch_event), [True, False, True])

    def test_limit_mass_over_whole_window(self, poisson_model):
        event = CylinderEvent((MarkBox(0.0, 10.0, 1.0),), (2,))
        assert marked_pp.limit_cylinder_mass(poisson_model, 1.0, 1, event) == pytest.approx(12.5)
        assert marked_pp.hrv_pp_limit(poisson_model, 1.0, 1, 1.0) == pytest.approx(12.5)

    def test_limit_mass_of_split_boxes(self, poisson_model):
        event = CylinderEvent((MarkBox(0.0, 5.0, 1.0), MarkBox(5.0, 10.0, 2.0, 4.0)), (1, 1))
        # M_2 = 2.5 * 2.5, mu masses 1 and 1/4
        assert marked_pp.limit_cylinder_mass(poisson_model, 1.0, 1, event) == pytest.approx(6.25 * 0.25)

    def test_limit_mass_needs_k_plus_one_points(self, poisson_model):
        event = CylinderEvent((MarkBox(0.0, 10.0, 1.0),), (1,))
        with pytest.raises(ValueError):
            marked_pp.limit_cylinder_mass(poisson_model, 1.0, 1, event)

    def test_limit_mass_for_renewal_process(self, gamma_model):
        event = CylinderEvent((MarkBox(0.0, 1.0, 1.0), MarkBox(2.0, 4.0, 1.0)), (1, 1))
        from MarkedRisk.services.point_processes import gamma_pair_box
        assert marked_pp.limit_cylinder_mass(gamma_model, 2.0, 1, event) == pytest.approx(
            gamma_pair_box((0.0, 1.0), (2.0, 4.0)))


class TestHiddenRegularVariation:
    def test_limit(self, poisson_model):
        assert marked_pp.hrv_pp_limit(poisson_model, 2.0, 2, 2.0) == pytest.approx(125.0 / 6.0 * 2.0 ** -6)

    def test_poisson_oracle_is_a_thinned_poisson_tail(self, poisson_model):
        # exceedances of a_n r form a Poisson(lambda T p) count
        value = marked_pp.exact_hrv_oracle(poisson_model, 1.0, 1, 1.0, 100)
        assert value == pytest.approx(stats.poisson.sf(1, 0.05) * 1e4, rel=1e-10)

    def test_monte_carlo_matches_oracle(self, poisson_model):
        result = marked_pp.mc_hrv_pp(poisson_model, 1.0, 1, 1.0, 100, 200_000, seed=5, chunk_size=50_000, threads=1)
        oracle = marked_pp.exact_hrv_oracle(poisson_model, 1.0, 1, 1.0, 100)
        assert result.scale == 1e4
        assert abs(result.scaled_estimate - oracle) <= 4.0 * result.scale * math.sqrt(oracle / 1e4 / 200_000)
        low, high = result.scaled_ci
        assert low <= result.scaled_estimate <= high

    def test_thread_count_does_not_change_the_estimate(self, poisson_model):
        single = marked_pp.mc_hrv_pp(poisson_model, 1.0, 1, 1.0, 10, 40_000, seed=9, chunk_size=5_000, threads=1)
        pooled = marked_pp.mc_hrv_pp(poisson_model, 1.0, 1, 1.0, 10, 40_000, seed=9, chunk_size=5_000, threads=4)
        assert single == pooled

    def test_grid_oracle(self):
        model = BaseProcessModel.grid(10, 1.0)
        value = montecarlo.exact_orderstat_tail(model, 1.0, 1, 10.0).probability
        assert value == pytest.approx(stats.binom.sf(1, 10, 0.1))


class TestTriangularArrays:
    def test_row_length(self):
        assert [marked_pp.triangular_count(n) for n in (1, 10, 16, 17)] == [1, 4, 4, 5]

    def test_rows_need_a_fixed_count(self):
        with pytest.raises(ValueError):
            marked_pp.triangular_model('poisson', 4)

    def test_limit(self):
        assert marked_pp.hrv_triangular_limit(1.0, 1, 1.0) == 0.5

    def test_oracle_approaches_the_limit(self):
        m_n = 32
        value = marked_pp.exact_triangular_oracle(1000, m_n, 1.0, 1, 1.0)
        assert value / marked_pp.hrv_triangular_limit(1.0, 1, 1.0) == pytest.approx((m_n - 1) / m_n, rel=1e-3)

    def test_monte_carlo_matches_oracle(self):
        # n = 4, m_n = 2: both marks must exceed a_8 = 8, probability 1/64
        result = marked_pp.mc_hrv_triangular('binomial', 1.0, 1, 1.0, 4, 20_000, seed=3, m_n=2,
                                             chunk_size=5_000, threads=2)
        oracle = marked_pp.exact_triangular_oracle(4, 2, 1.0, 1, 1.0)
        assert oracle == pytest.approx(0.25)
        assert abs(result.scaled_estimate - oracle) <= 4.0 * 16.0 * math.sqrt((1 / 64) * (63 / 64) / 20_000)


class TestScaling:
    @pytest.mark.parametrize('u', [0.5, 1.0, 3.0])
    def test_order_statistics_scale_with_the_marks(self, pattern, u):
        scaled = marked_pp.scale(pattern, u)
        for j in (1, 2, 3, 4):
            assert marked_pp.mark_order_stat(scaled, j) == pytest.approx(u * marked_pp.mark_order_stat(pattern, j))

    def test_scaling_composes(self, pattern):
        twice = marked_pp.scale(marked_pp.scale(pattern, 0.3), 7.0)
        once = marked_pp.scale(pattern, 2.1)
        assert twice.times == once.times
        assert twice.marks == pytest.approx(once.marks)

    @pytest.mark.parametrize('alpha, k', [(1.0, 0), (0.5, 1), (2.0, 2)])
    def test_limit_is_homogeneous_in_the_level(self, poisson_model, gamma_model, alpha, k):
        for model in (poisson_model, gamma_model):
            base = marked_pp.hrv_pp_limit(model, alpha, k, 1.5)
            for u in (0.25, 2.0, 10.0):
                expected = u ** (-alpha * (k + 1)) * base
                assert marked_pp.hrv_pp_limit(model, alpha, k, 1.5 * u) == pytest.approx(expected)


def split_masses(model, alpha, k, parent, count, s, others=(), other_counts=()):
    """Limit masses of every way to share `count` points between the two halves of `parent` cut at s."""
    left = MarkBox(parent.t_low, s, parent.x_low, parent.x_high)
    right = MarkBox(s, parent.t_high, parent.x_low, parent.x_high)
    return [
        marked_pp.limit_cylinder_mass(
            model, alpha, k, CylinderEvent((left, right) + tuple(others), (j, count - j) + tuple(other_counts)))
        for j in range(count + 1)
    ]


class TestCylinderAdditivity:
    PARENT = MarkBox(0.0, 4.0, 1.0)
    OTHER = MarkBox(5.0, 8.0, 2.0, 6.0)

    @pytest.mark.parametrize('k, count, with_other', [(0, 1, False), (1, 2, False), (1, 1, True),
                                                      (2, 3, False), (2, 2, True)])
    @pytest.mark.parametrize('process, rel', [('poisson_model', 1e-12), ('gamma_model', 1e-4)])
    def test_splitting_a_box_in_time(self, request, process, rel, k, count, with_other):
        model = request.getfixturevalue(process)
        others, other_counts = ((self.OTHER,), (1,)) if with_other else ((), ())
        parent = marked_pp.limit_cylinder_mass(
            model, 1.5, k, CylinderEvent((self.PARENT,) + others, (count,) + other_counts))
        parts = split_masses(model, 1.5, k, self.PARENT, count, 1.5, others, other_counts)
        assert parent > 0
        assert math.fsum(parts) == pytest.approx(parent, rel=rel)


def random_event(rng, horizon):
    """Random k <= 2 and up to three boxes with disjoint time intervals."""
    k = int(rng.integers(0, 3))
    size = int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(0.0, horizon, 2 * size))
    boxes = []
    for i in range(size):
        low = float(rng.uniform(1.0, 3.0))
        high = math.inf if rng.random() < 0.5 else low * float(rng.uniform(1.5, 4.0))
        boxes.append(MarkBox(float(cuts[2 * i]), float(cuts[2 * i + 1]), low, high))
    counts = rng.multinomial(k + 1, [1.0 / size] * size)
    return k, CylinderEvent(tuple(boxes), tuple(int(c) for c in counts))


def integrate_limit_measure(model, alpha, k, event, rng, draws):
    """
    Monte Carlo integral of (lambda x mu)^(k+1) / (k+1)! over configurations in `event`.

    Points are drawn from lambda x mu restricted to marks above the lowest box
    floor; returns (total mass of that region, hit fraction).
    """
    floor = min(box.x_low for box in event.boxes)
    per_point = model.rate * model.horizon * floor ** -alpha
    times = rng.uniform(0.0, model.horizon, (draws, k + 1))
    marks = floor * (1.0 - rng.random((draws, k + 1))) ** (-1.0 / alpha)
    hit = np.ones(draws, dtype=bool)
    for box, count in zip(event.boxes, event.counts):
        inside = (times > box.t_low) & (times <= box.t_high) & (marks > box.x_low) & (marks <= box.x_high)
        hit &= inside.sum(axis=1) == count
    return per_point ** (k + 1) / math.factorial(k + 1), float(hit.mean())


@pytest.mark.parametrize('case', range(10))
def test_limit_mass_matches_integration(poisson_model, case):
    rng = substream(60, case)
    k, event = random_event(rng, poisson_model.horizon)
    alpha = float(rng.choice([0.5, 1.0, 2.0]))
    draws = 100_000
    region, share = integrate_limit_measure(poisson_model, alpha, k, event, rng, draws)
    expected = marked_pp.limit_cylinder_mass(poisson_model, alpha, k, event) / region
    assert 0.0 < expected <= 1.0
    assert abs(share - expected) <= 4.0 * math.sqrt(expected * (1.0 - expected) / draws)
