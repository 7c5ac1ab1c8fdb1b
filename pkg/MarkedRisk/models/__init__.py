from MarkedRisk.models.asymptotic_context import AsymptoticContext  # noqa: F401
from MarkedRisk.models.base_process_model import BaseProcessModel  # noqa: F401
from MarkedRisk.models.cylinder_event import CylinderEvent, MarkBox  # noqa: F401
from MarkedRisk.models.experiment_config import ExperimentConfig  # noqa: F401
from MarkedRisk.models.factorial_moment_evaluator import FactorialMomentEvaluator  # noqa: F401
from MarkedRisk.models.marked_pattern import MarkedPattern  # noqa: F401
from MarkedRisk.models.pareto_law import LimitMeasure, ParetoLaw  # noqa: F401
from MarkedRisk.models.pattern_batch import PatternBatch  # noqa: F401
from MarkedRisk.models.process_constants import ProcessKind  # noqa: F401
from MarkedRisk.models.risk_path import RiskPath  # noqa: F401
from MarkedRisk.models.run_manifest import RunManifest  # noqa: F401
from MarkedRisk.models.tail_estimate import TailEstimate  # noqa: F401
from MarkedRisk.models.time_pattern import TimePattern  # noqa: F401

__all__ = [
    'AsymptoticContext',
    'BaseProcessModel',
    'CylinderEvent',
    'ExperimentConfig',
    'FactorialMomentEvaluator',
    'LimitMeasure',
    'MarkBox',
    'MarkedPattern',
    'ParetoLaw',
    'PatternBatch',
    'ProcessKind',
    'RiskPath',
    'RunManifest',
    'TailEstimate',
    'TimePattern',
]
