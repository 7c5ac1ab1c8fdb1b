"""
Tail of the retained risk after removing the k largest claims.
Usage: python manage.py residual_tail --model poisson --rate 0.5 --T 10 --alpha 1 --k 1 --x 200 --oracle
"""
from MarkedRisk.management.experiment_command import (
    ExperimentCommand,
    ExperimentResult,
    estimate_columns,
    float_list,
    safe_ratio,
    within,
)
from MarkedRisk.models import AsymptoticContext
from MarkedRisk.services import asymptotics, montecarlo


class Command(ExperimentCommand):
    help = 'P(R_k^-(T) > x) (or P(X_{N-k:N} > x)) by Monte Carlo and exact oracle against the asymptote.'

    def add_experiment_arguments(self, parser):
        self.add_model_arguments(parser)
        self.add_tail_arguments(parser)
        parser.add_argument('--x', default='20,50,100,200',
                            help='Comma-separated claim-size levels, above 1 (default: %(default)s)')
        parser.add_argument('--statistic', default='residual', choices=['residual', 'orderstat'],
                            help='Residual risk R_k^-(T) or the (k+1)-th largest claim (default: %(default)s)')
        parser.add_argument('--oracle', action='store_true',
                            help='Evaluate the exact order-statistic oracle (Poisson, grid, binomial)')
        self.add_samples_argument(parser)

    def run_experiment(self, options):
        model = self.build_model(options)
        alpha, k = options['alpha'], options['k']
        grid = float_list(options['x'], 'x')
        ctx = AsymptoticContext(model, alpha, k)
        samples = options['samples']
        if samples < 0:
            raise ValueError(f'--samples must be non-negative, got {samples}')

        rows = []
        if samples > 0:
            config = montecarlo.make_config(model, alpha, k, samples, **self.run_parameters(options))
            rows = montecarlo.residual_convergence_table(config, grid, options['statistic'])
        table = []
        final = {}
        for index, x in enumerate(grid):
            asymptote = asymptotics.residual_tail(ctx, x)
            oracle = None
            if options['oracle']:
                oracle = montecarlo.exact_orderstat_tail(model, alpha, k, x).probability
            estimate = ci = None
            if rows:
                estimate, low, high = estimate_columns(rows[index].estimate, scaled=False)
                ci = (low, high)
            table.append([x, estimate, ci[0] if ci else None, ci[1] if ci else None, oracle, asymptote,
                          safe_ratio(estimate, asymptote), safe_ratio(oracle, asymptote)])
            final = {'x': x, 'estimate': estimate, 'ci': ci, 'oracle': oracle, 'asymptote': asymptote}

        value = final['estimate'] if final['estimate'] is not None else final['oracle']
        ratio = safe_ratio(value, final['asymptote'])
        result = ExperimentResult(
            estimate=value,
            asymptote=final['asymptote'],
            ratio=ratio,
            ci=final['ci'],
            passed=within(ratio, options['assert_tolerance']),
        )
        result.add_table('residual_tail', ('x', 'estimate', 'ci_low', 'ci_high', 'oracle', 'asymptote',
                                           'ratio', 'oracle_ratio'), table)
        result.details = {
            'model': model.describe(),
            'statistic': options['statistic'],
            'oracle': final['oracle'],
            'oracle_ratio': safe_ratio(final['oracle'], final['asymptote']),
        }
        return result
