"""
Shared plumbing of the experiment commands.

Every command resolves its options (flags, then an optional JSON config
file), runs, writes its tables plus summary.json and manifest.json under
<out>/<command>/, renders a rich table and maps failures onto exit codes:
2 for usage errors, 1 for a violated --assert tolerance, 3 for runtime
failures.
"""
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from django.core.management.base import BaseCommand, CommandError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from MarkedRisk.models import BaseProcessModel, ProcessKind, RunManifest, TailEstimate
from MarkedRisk.services.exceptions import EventEvaluationError, RejectionCapExceeded
from MarkedRisk.utils.output_utils import file_digest, format_value, jsonable, read_json, write_csv, write_json
from MarkedRisk.utils.settings_utils import get_knob
from MarkedRisk.utils.version_utils import get_app_version

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240101

# Options Django adds to every command; they never reach a manifest
DJANGO_OPTIONS = {'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color', 'force_color', 'skip_checks'}
# Options that only choose where results go
LOCATION_OPTIONS = {'out', 'config'}


@dataclass
class ExperimentResult:
    """What a command hands back to the shared writer."""
    estimate: Optional[float] = None
    asymptote: Optional[float] = None
    ratio: Optional[float] = None
    ci: Optional[Sequence[float]] = None
    passed: Optional[bool] = None
    details: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    headline: Optional[dict] = None

    def add_table(self, name: str, header: Sequence[str], rows: list):
        self.tables[name] = (tuple(header), rows)

    def summary(self, command: str) -> dict:
        return {
            'command': command,
            'estimate': self.estimate,
            'asymptote': self.asymptote,
            'ratio': self.ratio,
            'ci': list(self.ci) if self.ci is not None else None,
            'pass': self.passed,
            'details': self.details,
        }


def float_list(value: Any, name: str) -> list[float]:
    """Parse '10,30,100' (or a JSON list) into floats."""
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [item for item in str(value).split(',') if item.strip()]
    try:
        values = [float(item) for item in items]
    except (TypeError, ValueError) as exc:
        raise ValueError(f'--{name.replace("_", "-")} must be a comma-separated list of numbers, got {value!r}') from exc
    if not values:
        raise ValueError(f'--{name.replace("_", "-")} must not be empty')
    return values


def int_list(value: Any, name: str) -> list[int]:
    values = float_list(value, name)
    if any(v != int(v) for v in values):
        raise ValueError(f'--{name.replace("_", "-")} must hold integers, got {value!r}')
    return [int(v) for v in values]


def within(ratio: Optional[float], tolerance: Optional[float]) -> Optional[bool]:
    """|ratio - 1| <= tolerance, None when no tolerance was requested."""
    if tolerance is None:
        return None
    if ratio is None or not math.isfinite(ratio):
        return False
    return abs(ratio - 1.0) <= tolerance


def safe_ratio(value: Optional[float], reference: Optional[float]) -> Optional[float]:
    if value is None or reference is None or reference == 0.0:
        return None
    return value / reference


class ExperimentCommand(BaseCommand):
    requires_system_checks = []
    default_samples = 100_000

    @property
    def command_name(self) -> str:
        return self.__class__.__module__.rsplit('.', 1)[-1]

    # -- arguments ---------------------------------------------------------

    def add_arguments(self, parser):
        """
        Register the options shared by every experiment command.

        Args:
            parser: ArgumentParser instance used by Django.

        Returns:
            None
        """
        parser.add_argument('--seed', type=int, default=DEFAULT_SEED,
                            help='Master seed, a non-negative integer (default: %(default)s)')
        parser.add_argument('--threads', type=int, default=None,
                            help='Worker threads for Monte Carlo chunks (default: MARKEDRISK_THREADS); '
                                 'results do not depend on it')
        parser.add_argument('--chunk-size', type=int, default=None,
                            help='Paths per random substream (default: MARKEDRISK_CHUNK_SIZE)')
        parser.add_argument('--out', default=None,
                            help='Output root directory; files go to <out>/<command>/ (default: MARKEDRISK_OUTPUT_DIR)')
        parser.add_argument('--config', default=None,
                            help='JSON file of option values (underscore names) overriding the flags')
        parser.add_argument('--assert', dest='assert_tolerance', type=float, default=None,
                            help='Relative tolerance to check; exit code 1 when it is violated')
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def add_model_arguments(self, parser, default_model: str = ProcessKind.POISSON, kinds: Optional[list] = None):
        parser.add_argument('--model', default=default_model, choices=kinds or ProcessKind.values(),
                            help='Ground process (default: %(default)s)')
        parser.add_argument('--rate', type=float, default=0.5,
                            help='Poisson intensity, claims per unit time (default: %(default)s)')
        parser.add_argument('--T', type=float, default=10.0,
                            help='Horizon, time units (default: %(default)s)')
        parser.add_argument('--n', type=int, default=None,
                            help='Point count of the grid and binomial processes')

    def add_tail_arguments(self, parser, default_k: int = 1):
        parser.add_argument('--alpha', type=float, default=1.0,
                            help='Pareto tail index, dimensionless (default: %(default)s)')
        parser.add_argument('--k', type=int, default=default_k,
                            help='Order: number of largest claims removed (default: %(default)s)')

    def add_samples_argument(self, parser, default: Optional[int] = None):
        parser.add_argument('--samples', type=int, default=self.default_samples if default is None else default,
                            help='Simulated paths per estimate (default: %(default)s)')

    # -- option helpers ----------------------------------------------------

    def build_model(self, options: dict) -> BaseProcessModel:
        kind = options['model']
        return BaseProcessModel.from_options(
            kind,
            options['T'],
            rate=options.get('rate') if kind == ProcessKind.POISSON else None,
            n=options.get('n') if kind in ProcessKind.FIXED_COUNT else None,
        )

    def run_parameters(self, options: dict) -> dict:
        """seed, chunk size and thread cap with the configured defaults filled in."""
        threads = options.get('threads') or get_knob('MARKEDRISK_THREADS')
        chunk_size = options.get('chunk_size') or get_knob('MARKEDRISK_CHUNK_SIZE')
        return {'seed': options['seed'], 'chunk_size': chunk_size, 'threads': threads}

    def resolve_options(self, options: dict) -> dict:
        resolved = dict(options)
        config_path = options.get('config')
        if config_path:
            try:
                overrides = read_json(config_path)
            except (OSError, json.JSONDecodeError) as exc:
                raise CommandError(f'Cannot read config file {config_path}: {exc}', returncode=2) from exc
            if not isinstance(overrides, dict):
                raise CommandError('The config file must hold a JSON object', returncode=2)
            unknown = set(overrides) - set(options) - DJANGO_OPTIONS
            if unknown:
                raise CommandError(f'Unknown option(s) in config file: {sorted(unknown)}', returncode=2)
            resolved.update(overrides)
        return resolved

    def manifest_options(self, options: dict) -> dict:
        return {key: value for key, value in sorted(options.items())
                if key not in DJANGO_OPTIONS and key not in LOCATION_OPTIONS}

    # -- main flow ---------------------------------------------------------

    def run_experiment(self, options: dict) -> ExperimentResult:
        raise NotImplementedError

    def handle(self, *args, **options):
        """
        Run the experiment and write its outputs.

        Args:
            *args: Unused positional arguments from Django.
            **options: Parsed command options.

        Returns:
            None
        """
        options = self.resolve_options(options)
        started = time.perf_counter()
        try:
            result = self.run_experiment(options)
        except CommandError:
            raise
        except (RejectionCapExceeded, EventEvaluationError) as exc:
            raise CommandError(str(exc), returncode=3) from exc
        except ValueError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        except (RuntimeError, ArithmeticError, MemoryError) as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=3) from exc
        wall_time = time.perf_counter() - started

        out_dir = Path(options.get('out') or get_knob('MARKEDRISK_OUTPUT_DIR')) / self.command_name
        summary = result.summary(self.command_name)
        self.write_outputs(out_dir, result, summary, options, wall_time)
        self.render(result, summary)

        if result.passed is False:
            raise CommandError(f'{self.command_name}: assertion failed (see {out_dir / "summary.json"})', returncode=1)

    def write_outputs(self, out_dir: Path, result: ExperimentResult, summary: dict, options: dict,
                      wall_time: float) -> RunManifest:
        written = []
        for name, (header, rows) in result.tables.items():
            written.append(write_csv(out_dir / f'{name}.csv', header, rows))
        written.append(write_json(out_dir / 'summary.json', summary))
        manifest = RunManifest(
            command=self.command_name,
            options=jsonable(self.manifest_options(options)),
            seed=options['seed'],
            version=get_app_version(),
            wall_time=wall_time,
            digests={path.name: file_digest(path) for path in written},
        )
        write_json(out_dir / 'manifest.json', manifest.to_dict())
        logger.info("Wrote %d output files and manifest to %s", len(written), out_dir)
        return manifest

    def render(self, result: ExperimentResult, summary: dict):
        buffer = io.StringIO()
        console = Console(file=buffer, width=120, color_system=None, force_terminal=False)
        for name, (header, rows) in result.tables.items():
            table = Table(title=name, show_lines=False)
            for column in header:
                table.add_column(column, justify='right')
            for row in rows[:50]:
                table.add_row(*[_display(value) for value in row])
            if len(rows) > 50:
                table.caption = f'{len(rows) - 50} more rows in {name}.csv'
            console.print(table)
        status = {True: '[OK] pass', False: '[FAIL] fail', None: 'no assertion'}[result.passed]
        lines = [f'{label}: {_display(summary[key])}' for key, label in
                 (('estimate', 'estimate'), ('asymptote', 'asymptote'), ('ratio', 'ratio'))]
        if summary['ci'] is not None:
            lines.append(f'ci: [{_display(summary["ci"][0])}, {_display(summary["ci"][1])}]')
        lines.append(status)
        console.print(Panel('\n'.join(lines), title=self.command_name, padding=(0, 2), width=80))
        self.stdout.write(buffer.getvalue().rstrip('\n'))
        headline = result.headline if result.headline is not None else summary
        self.stdout.write(json.dumps(jsonable(headline), sort_keys=False))


def _display(value: Any) -> str:
    if isinstance(value, float) and math.isfinite(value):
        return f'{value:.6g}'
    return format_value(value)


def estimate_columns(result: TailEstimate, scaled: bool = True) -> list[float]:
    """(estimate, ci_low, ci_high) of a TailEstimate, scaled or raw."""
    if scaled:
        low, high = result.scaled_ci
        return [result.scaled_estimate, low, high]
    return [result.p_hat, result.ci_low, result.ci_high]
