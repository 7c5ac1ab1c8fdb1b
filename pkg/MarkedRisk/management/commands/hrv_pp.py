"""
Hidden regular variation of the marked point process: n^(k+1) P(k+1
rescaled marks exceed r) over a grid of n against its limit.
Usage: python manage.py hrv_pp --model poisson --rate 0.5 --T 10 --alpha 1 --k 1 --r 1 --n-grid 10,30,100,300
"""
from MarkedRisk.management.experiment_command import (
    ExperimentCommand,
    ExperimentResult,
    estimate_columns,
    int_list,
    within,
)
from MarkedRisk.services import montecarlo


class Command(ExperimentCommand):
    help = 'Monte Carlo n^(k+1) P(count of marks above a_n r >= k+1) over an n grid versus the limit constant.'

    def add_experiment_arguments(self, parser):
        self.add_model_arguments(parser)
        self.add_tail_arguments(parser)
        parser.add_argument('--r', type=float, default=1.0,
                            help='Level of the rescaled marks, claim-size units (default: %(default)s)')
        parser.add_argument('--n-grid', default='10,30,100,300',
                            help='Comma-separated scaling indices n (default: %(default)s)')
        parser.add_argument('--oracle', action='store_true',
                            help='Add the exact count-pmf oracle column (Poisson, grid, binomial)')
        self.add_samples_argument(parser)

    def run_experiment(self, options):
        model = self.build_model(options)
        grid = int_list(options['n_grid'], 'n_grid')
        config = montecarlo.make_config(model, options['alpha'], options['k'], options['samples'],
                                        r=options['r'], **self.run_parameters(options))
        rows = montecarlo.hrv_convergence_table(config, grid, oracle=options['oracle'])

        header = ['n', 'scaled_estimate', 'ci_low', 'ci_high', 'asymptote', 'ratio']
        if options['oracle']:
            header.append('oracle')
        table = []
        for row in rows:
            values = [int(row.point), *estimate_columns(row.estimate), row.asymptote, row.ratio]
            if options['oracle']:
                values.append(row.oracle)
            table.append(values)

        final = rows[-1]
        result = ExperimentResult(
            estimate=final.estimate.scaled_estimate,
            asymptote=final.asymptote,
            ratio=final.ratio,
            ci=final.estimate.scaled_ci,
            passed=within(final.ratio, options['assert_tolerance']),
        )
        result.add_table('convergence', header, table)
        result.details = {
            'model': model.describe(),
            'zero_hit_points': [int(row.point) for row in rows if row.estimate.zero_hits],
            'final_hits': final.estimate.hits,
        }
        if options['oracle']:
            result.details['final_oracle'] = final.oracle
        return result
