"""Supervised low-rank matrix completion with active feature acquisition."""

from .acquisition import (
    CostModel,
    InformativenessTracker,
    ScoredEntry,
    informativeness,
    select_cost_ratio,
    select_top_k,
)
from .bounds import BoundParams, Lemma3Result, lemma3_check, theorem1_bound
from .completion import (
    ApgState,
    CompletionConfig,
    CompletionResult,
    apg_minimize,
    fit,
    grad_g,
    svt,
)
from .data_io import DatasetSpec, load_dataset, write_dataset, write_matrix, write_records
from .harness import (
    ExperimentPlan,
    ExperimentResult,
    Oracle,
    RoundRecord,
    init_mask,
    make_split,
    reconstruction_errors,
    run_experiment,
)
from .linear_model import (
    LabeledSplit,
    LinearModel,
    accuracy,
    auc,
    decision_values,
    predict,
    train_ridge,
)
from .matrix import (
    PartialMatrix,
    SvdFactors,
    coherence,
    frobenius_norm,
    project_omega,
    svd,
    trace_norm,
)
from .poss import BiObjectiveProblem, Solution, SolutionArchive, poss_optimize

__version__ = "0.1.0"

__all__ = [
    "ApgState",
    "BiObjectiveProblem",
    "BoundParams",
    "CompletionConfig",
    "CompletionResult",
    "CostModel",
    "DatasetSpec",
    "ExperimentPlan",
    "ExperimentResult",
    "InformativenessTracker",
    "LabeledSplit",
    "Lemma3Result",
    "LinearModel",
    "Oracle",
    "PartialMatrix",
    "RoundRecord",
    "ScoredEntry",
    "Solution",
    "SolutionArchive",
    "SvdFactors",
    "accuracy",
    "apg_minimize",
    "auc",
    "coherence",
    "decision_values",
    "fit",
    "frobenius_norm",
    "grad_g",
    "informativeness",
    "init_mask",
    "lemma3_check",
    "load_dataset",
    "make_split",
    "poss_optimize",
    "predict",
    "project_omega",
    "reconstruction_errors",
    "run_experiment",
    "select_cost_ratio",
    "select_top_k",
    "svd",
    "svt",
    "theorem1_bound",
    "trace_norm",
    "train_ridge",
    "write_dataset",
    "write_matrix",
    "write_records",
]
