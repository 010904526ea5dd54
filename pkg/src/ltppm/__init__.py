"""Large-scale multi-objective optimization by KDE importance sampling and
trend-predicted offspring, with the LSMOP benchmark suite and SP/IGD metrics.
"""

from .core import (
    BoxBounds,
    BudgetExhausted,
    EvaluationBudget,
    Particle,
    RandomStream,
    clamp_to_bounds,
    dominates,
    evaluate_counted,
)
from .metrics import MetricReport, MetricUndefined, igd, spacing
from .optimizer import Archive, OptimizerConfig, RunTrace, TraceRow, run, truncate, update_archive
from .problems import LsmopInstance, make_lsmop, problem_from_name, reference_front
from .sampling import ImportanceDistribution, density, importance_distribution, isample, sparseness
from .tpm import TpmConfig, randpick, rotation_to_axis, tpm_generate

__all__ = [
    "Archive",
    "BoxBounds",
    "BudgetExhausted",
    "EvaluationBudget",
    "ImportanceDistribution",
    "LsmopInstance",
    "MetricReport",
    "MetricUndefined",
    "OptimizerConfig",
    "Particle",
    "RandomStream",
    "RunTrace",
    "TpmConfig",
    "TraceRow",
    "clamp_to_bounds",
    "density",
    "dominates",
    "evaluate_counted",
    "igd",
    "importance_distribution",
    "isample",
    "make_lsmop",
    "problem_from_name",
    "randpick",
    "reference_front",
    "rotation_to_axis",
    "run",
    "spacing",
    "sparseness",
    "tpm_generate",
    "truncate",
    "update_archive",
]

__version__ = "0.1.0"
