"""
Sample marked patterns and their risk paths.
Usage: python manage.py simulate --model grid --n 4 --T 1 --alpha 1 --seed 7
"""
from MarkedRisk.management.experiment_command import ExperimentCommand, ExperimentResult
from MarkedRisk.models import ParetoLaw
from MarkedRisk.services import marked_pp, point_processes, risk_paths
from MarkedRisk.utils.rng_utils import substream


class Command(ExperimentCommand):
    help = 'Sample marked point patterns and write them with their risk paths as CSV.'

    def add_experiment_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument('--alpha', type=float, default=1.0,
                            help='Pareto tail index, dimensionless (default: %(default)s)')
        parser.add_argument('--paths', type=int, default=1,
                            help='Number of independent patterns (default: %(default)s)')
        parser.add_argument('--center', type=float, default=0.0,
                            help='Claim-size centering c; risk paths get jumps x - c (default: %(default)s)')

    def run_experiment(self, options):
        model = self.build_model(options)
        law = ParetoLaw(options['alpha'])
        paths = options['paths']
        if paths < 1:
            raise ValueError(f'--paths must be positive, got {paths}')

        result = ExperimentResult()
        counts = []
        totals = []
        for index in range(paths):
            rng = substream(options['seed'], index)
            pattern = marked_pp.mark(point_processes.sample(model, rng), law, rng)
            risk = risk_paths.build_centered_risk(pattern, options['center'])
            suffix = '' if paths == 1 else f'_{index:03d}'
            result.add_table(f'pattern{suffix}', ('time', 'mark'), list(pattern.points))
            running = 0.0
            rows = []
            for t, size in risk.jumps:
                running += size
                rows.append((t, running))
            result.add_table(f'risk_path{suffix}', ('time', 'value_right_limit'), rows)
            counts.append(pattern.count)
            totals.append(risk_paths.evaluate(risk, model.horizon))

        result.details = {'model': model.describe(), 'alpha': law.alpha, 'counts': counts, 'totals': totals}
        result.headline = {'paths': paths, 'counts': counts}
        return result
