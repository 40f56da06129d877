"""Statistical verification: estimators, experiments and the self-check suite."""

from gibbswave.verify.estimators import (
    bootstrap_ks_threshold,
    weighted_ks,
    weighted_mean_se,
    weighted_quantile,
    weighted_survival,
)
from gibbswave.verify.experiments import (
    ConvergenceTable,
    GrowthReport,
    InvarianceReport,
    MomentTable,
    Observable,
    StrichartzResult,
    TailTable,
    convergence_experiment,
    growth_experiment,
    invariance_test,
    moment_check,
    parse_observable,
    parse_observables,
    strichartz_probe,
    strichartz_ratio,
    tail_check,
)
from gibbswave.verify.validate import CheckResult, validation_suite

__all__ = [
    "CheckResult",
    "ConvergenceTable",
    "GrowthReport",
    "InvarianceReport",
    "MomentTable",
    "Observable",
    "StrichartzResult",
    "TailTable",
    "bootstrap_ks_threshold",
    "convergence_experiment",
    "growth_experiment",
    "invariance_test",
    "moment_check",
    "parse_observable",
    "parse_observables",
    "strichartz_probe",
    "strichartz_ratio",
    "tail_check",
    "validation_suite",
    "weighted_ks",
    "weighted_mean_se",
    "weighted_quantile",
    "weighted_survival",
]
