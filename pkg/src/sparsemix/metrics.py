"""Support-recovery scoring of found features against generating features.

Beyond recall/precision/F1/Jaccard, the success index SI = recall / problem
sparsity measures the improvement over random guessing in a sparse search
space, and ASI = precision * SI penalizes over-selection.
"""

import csv
import os
from dataclasses import dataclass
from enum import Enum

from sparsemix.errors import InputError


class PerformanceCategory(Enum):
    EXCELLENT = "Excellent"
    GOOD = "Good"
    MODERATE = "Moderate"
    POOR = "Poor"


F1_THRESHOLDS = (
    (0.85, PerformanceCategory.EXCELLENT),
    (0.71, PerformanceCategory.GOOD),
    (0.565, PerformanceCategory.MODERATE),
)


@dataclass
class RecoveryMetrics:
    recall: float
    precision: float
    f1: float
    jaccard: float
    si: float
    asi: float
    n_found: int
    n_generating: int
    n_intersection: int
    p: int


def score(found, generating, p):
    """Recovery metrics of a found feature set against the generating set."""
    found = {int(j) for j in found}
    generating = {int(j) for j in generating}
    if not generating:
        raise InputError("generating feature set is empty")
    if any(not 0 <= j < p for j in found | generating):
        raise InputError(f"feature indices must lie in [0, {p})")
    inter = len(found & generating)
    recall = inter / len(generating)
    precision = inter / len(found) if found else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    jaccard = inter / len(found | generating)
    si = p * inter / len(generating) ** 2
    asi = precision * si
    return RecoveryMetrics(
        recall=recall, precision=precision, f1=f1, jaccard=jaccard, si=si, asi=asi,
        n_found=len(found), n_generating=len(generating), n_intersection=inter, p=p,
    )


def categorize(f1):
    """Performance band for an F1 value (thresholds inclusive downward)."""
    if not 0.0 <= f1 <= 1.0:
        raise InputError(f"f1 value {f1} outside [0, 1]")
    for cutoff, category in F1_THRESHOLDS:
        if f1 >= cutoff:
            return category
    return PerformanceCategory.POOR


METRIC_COLUMNS = ["F1 Score", "ASI", "Recall", "Jaccard", "Precision", "SI"]


def metrics_row(metrics):
    """Values in the results-table column order."""
    return [metrics.f1, metrics.asi, metrics.recall, metrics.jaccard,
            metrics.precision, metrics.si]


def append_metrics_csv(metrics, path, prefix=None, extra_header=None):
    """Append one metrics row (creating the header if the file is new)."""
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="\n") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow((extra_header or []) + METRIC_COLUMNS + ["category"])
        writer.writerow(
            (prefix or [])
            + [repr(float(v)) for v in metrics_row(metrics)]
            + [categorize(metrics.f1).value]
        )
