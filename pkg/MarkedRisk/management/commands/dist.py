"""
Cone distances and the reinsurance split of a risk path.
Usage: python manage.py dist --jumps 2,9,5 --k 1
"""
import math

import numpy as np

from MarkedRisk.management.experiment_command import ExperimentCommand, ExperimentResult, float_list
from MarkedRisk.models import MarkedPattern, RiskPath
from MarkedRisk.services import marked_pp, risk_paths
from MarkedRisk.utils.rng_utils import substream


class Command(ExperimentCommand):
    help = 'Compute d(R, D_k), d(R, J_k) and the residual/covered split; optionally property-test random paths.'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--jumps', default='2,9,5',
                            help='Comma-separated claim sizes, positive (default: %(default)s)')
        parser.add_argument('--times', default=None,
                            help='Comma-separated jump times, time units (default: 1, 2, ...)')
        parser.add_argument('--T', type=float, default=None,
                            help='Horizon, time units (default: the last jump time)')
        parser.add_argument('--k', type=int, default=1, help='Order (default: %(default)s)')
        parser.add_argument('--property-paths', type=int, default=0,
                            help='Random paths for the identity checks, 0 to skip (default: %(default)s)')

    def run_experiment(self, options):
        k = options['k']
        if k < 0:
            raise ValueError(f'--k must be non-negative, got {k}')
        sizes = float_list(options['jumps'], 'jumps')
        if options['times'] is None:
            times = [float(i + 1) for i in range(len(sizes))]
        else:
            times = float_list(options['times'], 'times')
        if len(times) != len(sizes):
            raise ValueError('--times and --jumps must have the same length')
        horizon = options['T'] if options['T'] is not None else max(times)
        path = RiskPath(horizon, tuple(sorted(zip(times, sizes))))

        d_dk = risk_paths.dist_to_Dk(path, k)
        d_jk = risk_paths.dist_to_Jk(path, k)
        residual = risk_paths.residual_risk(path, k, horizon)
        covered = risk_paths.covered_risk(path, k, horizon)

        result = ExperimentResult(estimate=d_jk)
        result.add_table('distances', ('quantity', 'value'), [
            ('d_Dk', d_dk),
            ('d_Jk', d_jk),
            ('delta_k1', risk_paths.delta(path, k + 1)),
            ('residual_risk', residual),
            ('covered_risk', covered),
            ('total', risk_paths.evaluate(path, horizon)),
        ])
        result.details = {'d_Dk': d_dk, 'd_Jk': d_jk, 'residual_risk': residual, 'covered_risk': covered}
        result.headline = {'d_Dk': d_dk, 'd_Jk': d_jk}

        if options['property_paths'] > 0:
            failures = property_suite(options['property_paths'], options['seed'])
            result.add_table('property_checks', ('property', 'failures'), sorted(failures.items()))
            result.details['property_paths'] = options['property_paths']
            result.details['property_failures'] = failures
            result.passed = not any(failures.values())
        return result


def property_suite(paths: int, seed: int) -> dict:
    """Check the distance identities on random marked patterns; returns failure counts."""
    rng = substream(seed, 0)
    failures = {'cone_order': 0, 'homogeneity': 0, 'order_statistic': 0, 'conservation': 0}
    for _ in range(paths):
        count = int(rng.integers(0, 12))
        times = np.sort(rng.uniform(0.0, 10.0, count))
        marks = (1.0 - rng.random(count)) ** -1.0
        pattern = MarkedPattern(10.0, tuple(zip(times, marks)))
        path = risk_paths.build_risk(pattern)
        scale = float(rng.uniform(0.1, 10.0))
        scaled = risk_paths.build_risk(marked_pp.scale(pattern, scale))
        t = float(rng.uniform(0.0, 10.0))
        for k in range(4):
            d_dk = risk_paths.dist_to_Dk(path, k)
            d_jk = risk_paths.dist_to_Jk(path, k)
            if 2.0 * d_dk > d_jk * (1 + 1e-12):
                failures['cone_order'] += 1
            if not (math.isclose(risk_paths.dist_to_Dk(scaled, k), scale * d_dk, rel_tol=1e-12, abs_tol=1e-300)
                    and math.isclose(risk_paths.dist_to_Jk(scaled, k), scale * d_jk, rel_tol=1e-9, abs_tol=1e-300)):
                failures['homogeneity'] += 1
            if risk_paths.delta(path, k + 1) != marked_pp.mark_order_stat(pattern, k + 1):
                failures['order_statistic'] += 1
            total = risk_paths.evaluate(path, t)
            split = risk_paths.residual_risk(path, k, t) + risk_paths.covered_risk(path, k, t)
            if not math.isclose(split, total, rel_tol=1e-12, abs_tol=1e-12):
                failures['conservation'] += 1
    return failures
