"""Simultaneous discovery of multiple diverse sparse feature subsets.

A mixture of diagonal Gaussians approximates the multimodal posterior over
linear-model coefficients under a sparsity-inducing prior; each fitted
component yields one candidate feature subset.  The package also ships the
synthetic benchmark generator and the support-recovery metric suite used to
validate the method.
"""

from sparsemix.data import Dataset, load_csv, save_csv, scale_features
from sparsemix.extract import (
    CandidateSolution,
    ExtractionSpec,
    extract,
    extract_full,
    extract_outlier,
    extract_top,
    solution_union,
)
from sparsemix.kernels import BACKEND as KERNEL_BACKEND
from sparsemix.metrics import PerformanceCategory, RecoveryMetrics, categorize, score
from sparsemix.objective import FitConfig, jaccard_penalty, log_likelihood, soft_support
from sparsemix.optimizer import AdamMoments, OptimizationTrace, adam_step, fit
from sparsemix.posterior import VariationalState, init_state, log_q, sample_component
from sparsemix.priors import PriorSpec, grad_log_prior, log_prior
from sparsemix.synthgen import GeneratorSpec, GroundTruth, generate

__version__ = "0.1.0"

__all__ = [
    "AdamMoments",
    "CandidateSolution",
    "Dataset",
    "ExtractionSpec",
    "FitConfig",
    "GeneratorSpec",
    "GroundTruth",
    "KERNEL_BACKEND",
    "OptimizationTrace",
    "PerformanceCategory",
    "PriorSpec",
    "RecoveryMetrics",
    "VariationalState",
    "adam_step",
    "categorize",
    "extract",
    "extract_full",
    "extract_outlier",
    "extract_top",
    "fit",
    "generate",
    "grad_log_prior",
    "init_state",
    "jaccard_penalty",
    "load_csv",
    "log_likelihood",
    "log_prior",
    "log_q",
    "sample_component",
    "save_csv",
    "scale_features",
    "score",
    "soft_support",
    "solution_union",
]
