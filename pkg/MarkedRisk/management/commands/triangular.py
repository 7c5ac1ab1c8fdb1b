"""
Triangular arrays: rows of m_n grid or binomial points with marks scaled
by a_{n m_n}, raw and centered.
Usage: python manage.py triangular --model binomial --alpha 1.5 --k 1 --r 1 --n-grid 10,100,1000
"""
from MarkedRisk.management.experiment_command import (
    ExperimentCommand,
    ExperimentResult,
    estimate_columns,
    int_list,
    safe_ratio,
    within,
)
from MarkedRisk.models import ProcessKind
from MarkedRisk.services import marked_pp, risk_paths


class Command(ExperimentCommand):
    help = 'Triangular-array n^(k+1) tails over an n grid versus their limits; --centered checks the centered risk path.'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--model', default=ProcessKind.BINOMIAL, choices=list(ProcessKind.FIXED_COUNT),
                            help='Row process (default: %(default)s)')
        parser.add_argument('--T', type=float, default=1.0, help='Horizon, time units (default: %(default)s)')
        self.add_tail_arguments(parser)
        parser.add_argument('--r', type=float, default=1.0,
                            help='Level of the rescaled marks, claim-size units (default: %(default)s)')
        parser.add_argument('--n-grid', default='10,100,1000',
                            help='Comma-separated array indices n (default: %(default)s)')
        parser.add_argument('--m-n', type=int, default=None,
                            help='Fixed row length m_n (default: ceil(sqrt(n)))')
        parser.add_argument('--centered', action='store_true',
                            help='Check the centered risk path tail P(Delta_{k+1} > 2r) instead of the mark count')
        self.add_samples_argument(parser)

    def run_experiment(self, options):
        alpha, k, r = options['alpha'], options['k'], options['r']
        centered = options['centered']
        params = self.run_parameters(options)
        if centered:
            limit = risk_paths.centered_path_limit(alpha, k, r)
        else:
            limit = marked_pp.hrv_triangular_limit(alpha, k, r)

        table = []
        last = None
        for n in int_list(options['n_grid'], 'n_grid'):
            m_n = options['m_n'] or marked_pp.triangular_count(n)
            if centered:
                outcome = risk_paths.mc_centered_path_tail(options['model'], alpha, k, r, n, options['samples'],
                                                           params['seed'], m_n, options['T'],
                                                           params['chunk_size'], params['threads'])
                oracle = None
            else:
                outcome = marked_pp.mc_hrv_triangular(options['model'], alpha, k, r, n, options['samples'],
                                                      params['seed'], m_n, options['T'],
                                                      params['chunk_size'], params['threads'])
                oracle = marked_pp.exact_triangular_oracle(n, m_n, alpha, k, r)
            columns = estimate_columns(outcome)
            table.append([n, m_n, *columns, oracle, limit, safe_ratio(columns[0], limit)])
            last = (outcome, columns, oracle)

        outcome, columns, oracle = last
        ratio = safe_ratio(columns[0], limit)
        result = ExperimentResult(estimate=columns[0], asymptote=limit, ratio=ratio, ci=columns[1:],
                                  passed=within(ratio, options['assert_tolerance']))
        result.add_table('triangular', ('n', 'm_n', 'scaled_estimate', 'ci_low', 'ci_high', 'oracle', 'limit',
                                        'ratio'), table)
        result.details = {'model': options['model'], 'centered': centered, 'final_oracle': oracle,
                          'final_hits': outcome.hits}
        return result
