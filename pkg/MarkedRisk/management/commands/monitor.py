"""
Residual risk monitoring: chance that the retained risk at t1 exceeds
u x given it sits just above x at t0.
Usage: python manage.py monitor --model poisson --rate 0.5 --T 10 --alpha 1 --k 1 --t0 1 --t1 2 --u 2.5 --x 10
"""
from MarkedRisk.management.experiment_command import (
    ExperimentCommand,
    ExperimentResult,
    estimate_columns,
    float_list,
    safe_ratio,
    within,
)
from MarkedRisk.models import AsymptoticContext, ProcessKind
from MarkedRisk.services import asymptotics, montecarlo


class Command(ExperimentCommand):
    help = 'Monte Carlo residual-risk monitoring over shrinking bands versus the monitoring limit.'

    def add_experiment_arguments(self, parser):
        self.add_model_arguments(parser)
        self.add_tail_arguments(parser)
        parser.add_argument('--t0', type=float, default=1.0, help='Observation time, time units (default: %(default)s)')
        parser.add_argument('--t1', type=float, default=2.0, help='Later time, time units (default: %(default)s)')
        parser.add_argument('--u', type=float, default=2.5,
                            help='Target multiple of x, dimensionless, above 1 (default: %(default)s)')
        parser.add_argument('--x', type=float, default=10.0,
                            help='Conditioning level, claim-size units (default: %(default)s)')
        parser.add_argument('--eps', default='0.4,0.2,0.1',
                            help='Comma-separated relative band widths, shrinking (default: %(default)s)')
        parser.add_argument('--factor', default=asymptotics.MonitoringFactor.CLOSED_FORM,
                            choices=asymptotics.MonitoringFactor.values(),
                            help='Pareto factor variant of the limit (default: %(default)s)')
        parser.add_argument('--t0-zero', action='store_true',
                            help='Gamma renewal only: compare the limit as t0 shrinks with the t0 -> 0 expression')
        parser.add_argument('--t0-grid', default='0.1,0.01,0.001',
                            help='Shrinking t0 values for --t0-zero, time units (default: %(default)s)')
        parser.add_argument('--min-conditioned', type=int, default=100,
                            help='Conditioned paths below which a band is flagged (default: %(default)s)')
        self.add_samples_argument(parser, default=1_000_000)

    def run_experiment(self, options):
        if options['t0_zero']:
            return self.run_t0_zero(options)

        model = self.build_model(options)
        alpha, k = options['alpha'], options['k']
        t0, t1, u, x = options['t0'], options['t1'], options['u'], options['x']
        ctx = AsymptoticContext(model, alpha, k)
        limit = asymptotics.monitoring_limit(ctx, u, t0, t1, options['factor'])
        bands = float_list(options['eps'], 'eps')

        config = montecarlo.make_config(model, alpha, k, options['samples'], x=x, t0=t0, t1=t1, u=u,
                                        **self.run_parameters(options))
        table = []
        flagged = []
        last = None
        for eps in bands:
            outcome = montecarlo.monitoring_mc(config, x, t0, t1, u, eps, options['min_conditioned'])
            if outcome.too_rare:
                flagged.append(eps)
            columns = estimate_columns(outcome.estimate) if outcome.estimate else [None, None, None]
            table.append([eps, *columns, outcome.conditioned, outcome.hits, limit, safe_ratio(columns[0], limit)])
            last = (outcome, columns)

        outcome, columns = last
        ratio = safe_ratio(columns[0], limit)
        result = ExperimentResult(
            estimate=columns[0],
            asymptote=limit,
            ratio=ratio,
            ci=columns[1:] if outcome.estimate else None,
            passed=within(ratio, options['assert_tolerance']),
        )
        result.add_table('monitoring', ('eps', 'scaled_estimate', 'ci_low', 'ci_high', 'conditioned', 'hits',
                                        'limit', 'ratio'), table)
        result.details = {
            'model': model.describe(),
            'measure_ratio': asymptotics.monitoring_measure_ratio(model, k, t0, t1),
            'pareto_factor': asymptotics.pareto_factor(u, alpha, k, options['factor']),
            'factor_variant': options['factor'],
            'too_rare_bands': flagged,
            'conditioning_probability': outcome.conditioning_probability,
        }
        return result

    def run_t0_zero(self, options):
        if options['model'] != ProcessKind.GAMMA_RENEWAL:
            raise ValueError('--t0-zero applies to the gamma-renewal model only')
        model = self.build_model(options)
        alpha, k, t1, u = options['alpha'], options['k'], options['t1'], options['u']
        ctx = AsymptoticContext(model, alpha, k)
        target = asymptotics.monitoring_limit_t0zero_gamma(t1, u, alpha, k, options['factor'])
        factor = asymptotics.pareto_factor(u, alpha, k, options['factor'])
        poisson = asymptotics.poisson_early_window_ratio(t1) * factor

        table = []
        value = None
        for t0 in float_list(options['t0_grid'], 't0_grid'):
            value = asymptotics.monitoring_limit(ctx, u, t0, t1, options['factor'])
            table.append([t0, value, target, safe_ratio(value, target)])

        ratio = safe_ratio(value, target)
        result = ExperimentResult(estimate=value, asymptote=target, ratio=ratio,
                                  passed=within(ratio, options['assert_tolerance']))
        result.add_table('t0_zero', ('t0', 'limit', 't0_zero_limit', 'ratio'), table)
        result.details = {
            'gamma_window_ratio': asymptotics.gamma_early_window_ratio(t1),
            'poisson_counterpart': poisson,
            'repulsion_holds': target < poisson,
        }
        return result
