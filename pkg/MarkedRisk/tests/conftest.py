import io
from pathlib import Path

import numpy as np
import pytest
from django.core.management import call_command

from MarkedRisk.models import BaseProcessModel, PatternBatch


@pytest.fixture
def poisson_model():
    """Rate 0.5 on [0, 10]: five expected claims."""
    return BaseProcessModel.poisson(0.5, 10.0)


@pytest.fixture
def gamma_model():
    return BaseProcessModel.gamma_renewal(10.0)


@pytest.fixture
def small_batch():
    """Three paths: three claims, none, two claims."""
    return PatternBatch(
        horizon=1.0,
        counts=np.array([3, 0, 2]),
        times=np.array([0.1, 0.5, 0.9, 0.2, 0.7]),
        marks=np.array([2.0, 5.0, 3.0, 4.0, 1.5]),
    )


@pytest.fixture
def run_command(tmp_path):
    """Run a management command into tmp_path; returns (stdout, output directory)."""
    def run(name, *args, **options):
        stdout = io.StringIO()
        call_command(name, *args, out=str(tmp_path), stdout=stdout, **options)
        return stdout.getvalue(), Path(tmp_path) / name
    return run
