"""
Re-run a command from its manifest and compare output digests.
Usage: python manage.py replay --manifest runs/hrv_pp/manifest.json
"""
import io
import tempfile
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError

from MarkedRisk.management.experiment_command import ExperimentCommand, ExperimentResult
from MarkedRisk.models import RunManifest
from MarkedRisk.utils.output_utils import file_digest, read_json
from MarkedRisk.utils.version_utils import get_app_version


class Command(ExperimentCommand):
    help = 'Replay a RunManifest into a scratch directory and check that every output digest matches.'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--manifest', required=True, help='Path to a manifest.json written by a command')

    def run_experiment(self, options):
        try:
            manifest = RunManifest.from_dict(read_json(options['manifest']))
        except OSError as exc:
            raise ValueError(f'Cannot read manifest {options["manifest"]}: {exc}') from exc
        if manifest.command == self.command_name:
            raise ValueError('A replay manifest cannot be replayed')

        with tempfile.TemporaryDirectory(prefix='markedrisk-replay-') as scratch:
            try:
                call_command(manifest.command, out=scratch, stdout=io.StringIO(), **manifest.options)
            except CommandError as exc:
                # a failed assertion still writes every output
                if exc.returncode != 1:
                    raise RuntimeError(f'Replayed command failed: {exc}') from exc
            output_dir = Path(scratch) / manifest.command
            rows = []
            for name, expected in sorted(manifest.digests.items()):
                target = output_dir / name
                actual = file_digest(target) if target.exists() else None
                rows.append((name, expected, actual, actual == expected))

        matched = all(row[3] for row in rows)
        result = ExperimentResult(estimate=float(sum(row[3] for row in rows)), asymptote=float(len(rows)),
                                  passed=matched)
        result.add_table('replay', ('file', 'expected_sha256', 'actual_sha256', 'match'), rows)
        result.details = {
            'command': manifest.command,
            'manifest_version': manifest.version,
            'current_version': get_app_version(),
            'all_match': matched,
        }
        return result
