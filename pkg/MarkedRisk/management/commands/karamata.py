"""
Truncated Pareto moments against the Karamata limit.
Usage: python manage.py karamata --alpha 1.5 --p 2 --x-grid 10,100,1000 --assert 1e-6
"""
from MarkedRisk.management.experiment_command import ExperimentCommand, ExperimentResult, float_list
from MarkedRisk.models import ParetoLaw
from MarkedRisk.services import heavy_tails


class Command(ExperimentCommand):
    help = 'E[(X/x)^p 1{X <= x}] / P(X > x): closed form versus quadrature, and its approach to alpha/(p-alpha).'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--alpha', type=float, default=1.5,
                            help='Pareto tail index, dimensionless (default: %(default)s)')
        parser.add_argument('--p', type=float, default=2.0,
                            help='Moment order, above alpha (default: %(default)s)')
        parser.add_argument('--x-grid', default='10,100,1000',
                            help='Comma-separated truncation levels, claim-size units (default: %(default)s)')

    def run_experiment(self, options):
        law = ParetoLaw(options['alpha'])
        p = options['p']
        limit = heavy_tails.karamata_limit(law.alpha, p)
        rows = []
        worst = 0.0
        closed_values = []
        for x in float_list(options['x_grid'], 'x_grid'):
            closed = heavy_tails.truncated_moment_ratio(law, p, x)
            numeric = heavy_tails.truncated_moment_quadrature(law, p, x)
            gap = abs(numeric / closed - 1.0) if closed else abs(numeric)
            worst = max(worst, gap)
            closed_values.append(closed)
            rows.append([x, closed, numeric, gap, limit])

        monotone = all(a < b for a, b in zip(closed_values, closed_values[1:])) and closed_values[-1] < limit
        tolerance = options['assert_tolerance']
        passed = None if tolerance is None else bool(worst <= tolerance and monotone)
        result = ExperimentResult(estimate=closed_values[-1], asymptote=limit,
                                  ratio=closed_values[-1] / limit, passed=passed)
        result.add_table('karamata', ('x', 'closed_form', 'quadrature', 'relative_difference', 'limit'), rows)
        result.details = {'max_relative_difference': worst, 'monotone': monotone}
        return result
