"""
Conditional limit law diagnostics for paths with a large residual risk.
Usage: python manage.py cond_law --model poisson --rate 0.5 --T 10 --alpha 1 --k 1 --x 50 --samples 2000000
"""
from MarkedRisk.management.experiment_command import ExperimentCommand, ExperimentResult
from MarkedRisk.services import montecarlo


class Command(ExperimentCommand):
    help = 'Among paths with R_k^-(T) > x: share with exactly k+1 big claims and KS checks of times and sizes.'

    def add_experiment_arguments(self, parser):
        self.add_model_arguments(parser)
        self.add_tail_arguments(parser)
        parser.add_argument('--x', type=float, default=50.0,
                            help='Residual-risk level, claim-size units (default: %(default)s)')
        parser.add_argument('--min-hits', type=int, default=500,
                            help='Conditioned paths below which the summary is flagged (default: %(default)s)')
        parser.add_argument('--limit-draws', type=int, default=None,
                            help='Draws from the limit law for the size test (default: max(hits, 5000))')
        self.add_samples_argument(parser, default=1_000_000)

    def run_experiment(self, options):
        model = self.build_model(options)
        config = montecarlo.make_config(model, options['alpha'], options['k'], options['samples'],
                                        x=options['x'], **self.run_parameters(options))
        summary = montecarlo.conditional_diagnostics(config, options['x'], options['min_hits'],
                                                     options['limit_draws'])
        rows = [('conditioned', summary.conditioned), ('exactly_k1_frequency', summary.exactly_k1_frequency)]
        for name, check in (('time', summary.time_check), ('size', summary.size_check)):
            if check is not None:
                rows.extend([
                    (f'{name}_ks_statistic', check.statistic),
                    (f'{name}_ks_critical', check.critical),
                    (f'{name}_ks_pvalue', check.pvalue),
                ])

        passed = None
        tolerance = options['assert_tolerance']
        if tolerance is not None:
            passed = bool(
                summary.sufficient
                and summary.exactly_k1_frequency > 1.0 - tolerance
                and summary.time_check.passed
                and summary.size_check.passed
            )
        result = ExperimentResult(estimate=summary.exactly_k1_frequency, asymptote=1.0,
                                  ratio=summary.exactly_k1_frequency, passed=passed)
        result.add_table('diagnostics', ('metric', 'value'), rows)
        result.details = summary.to_dict()
        return result
