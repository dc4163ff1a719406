"""Datasets with per-cell missingness, CSV ingestion, and feature scaling."""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from sparsemix.errors import ParseError, ValidationError

TASKS = ("regression", "classification")


@dataclass
class Dataset:
    """Feature matrix (NaN marks a missing cell), target, and task kind.

    `observed` and `x_filled` (missing cells zeroed, so that masked inner
    products are plain matrix products) are derived on construction.
    """

    x: np.ndarray
    y: np.ndarray
    task: str
    feature_names: list = None
    observed: np.ndarray = field(init=False, repr=False)
    x_filled: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.x.ndim != 2:
            raise ValidationError("x must be a 2-d matrix")
        n, p = self.x.shape
        if self.y.shape != (n,):
            raise ValidationError(f"y has shape {self.y.shape}, expected ({n},)")
        if self.task not in TASKS:
            raise ValidationError(f"unknown task {self.task!r}")
        if not np.all(np.isfinite(self.y)):
            raise ValidationError("y contains non-finite values")
        if self.task == "classification" and not np.all(np.isin(self.y, (0.0, 1.0))):
            raise ValidationError("classification targets must be 0/1")
        if np.any(np.isinf(self.x)):
            raise ValidationError("x contains infinite values")
        if self.feature_names is None:
            self.feature_names = default_feature_names(p)
        if len(self.feature_names) != p:
            raise ValidationError("feature_names length does not match x")
        self.observed = ~np.isnan(self.x)
        rows_empty = ~self.observed.any(axis=1)
        if rows_empty.any():
            bad = int(np.flatnonzero(rows_empty)[0])
            raise ValidationError(
                f"sample {bad} has no observed features; its masked likelihood is undefined"
            )
        self.x_filled = np.where(self.observed, self.x, 0.0)

    @property
    def n_samples(self):
        return self.x.shape[0]

    @property
    def n_features(self):
        return self.x.shape[1]


def default_feature_names(p):
    width = len(str(max(p - 1, 0)))
    return [f"f{j:0{width}d}" for j in range(p)]


def infer_task(y):
    return "classification" if np.all(np.isin(y, (0.0, 1.0))) else "regression"


def load_csv(path, target_column, task=None):
    """Parse a numeric CSV with a header row into a Dataset.

    Empty cells and NaN tokens become missing feature cells; a missing or
    non-numeric target is an error, as is any non-numeric feature cell.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty") from None
        if target_column not in header:
            raise ParseError(f"{path}: target column {target_column!r} not in header")
        t_col = header.index(target_column)
        feature_names = [h for i, h in enumerate(header) if i != t_col]
        rows, targets = [], []
        for r, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise ParseError(f"{path}: row {r} has {len(record)} cells, expected {len(header)}")
            feats = []
            for i, cell in enumerate(record):
                value = _parse_cell(cell, path, r, header[i])
                if i == t_col:
                    if value is None or np.isnan(value):
                        raise ParseError(f"{path}: row {r} is missing its target value")
                    targets.append(value)
                else:
                    feats.append(np.nan if value is None else value)
            rows.append(feats)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    x = np.array(rows, dtype=np.float64)
    y = np.array(targets, dtype=np.float64)
    if task is None:
        task = infer_task(y)
    return Dataset(x=x, y=y, task=task, feature_names=feature_names)


def _parse_cell(cell, path, row, column):
    text = cell.strip()
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise ParseError(
            f"{path}: non-numeric value {cell!r} at row {row}, column {column!r}"
        ) from None


def save_csv(dataset, path, target_column="target"):
    """Write a Dataset as CSV; missing cells are empty, floats round-trip exactly."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [target_column])
        for i in range(dataset.n_samples):
            row = [
                "" if not dataset.observed[i, j] else repr(float(dataset.x[i, j]))
                for j in range(dataset.n_features)
            ]
            row.append(repr(float(dataset.y[i])))
            writer.writerow(row)


@dataclass
class ScalerParams:
    """Per-column affine transform x -> (x - offset) / scale."""

    mode: str
    offset: np.ndarray
    scale: np.ndarray


def scale_features(dataset, mode):
    """Column-wise minmax or standardization over observed cells only.

    Missing cells stay missing.  Constant columns pass through unchanged
    (offset 0, scale 1) with a warning.
    """
    if mode not in ("minmax", "standard", "none"):
        raise ValidationError(f"unknown scaling mode {mode!r}")
    p = dataset.n_features
    offset = np.zeros(p)
    scale = np.ones(p)
    if mode != "none":
        constant = []
        for j in range(p):
            col = dataset.x[dataset.observed[:, j], j]
            if col.size == 0:
                constant.append(j)
                continue
            if mode == "minmax":
                lo, hi = col.min(), col.max()
                if hi > lo:
                    offset[j], scale[j] = lo, hi - lo
                else:
                    constant.append(j)
            else:
                mean, std = col.mean(), col.std()
                if std > 0:
                    offset[j], scale[j] = mean, std
                else:
                    constant.append(j)
        if constant:
            warnings.warn(
                f"{len(constant)} constant column(s) left unscaled "
                f"(first: {dataset.feature_names[constant[0]]})",
                stacklevel=2,
            )
    x = (dataset.x - offset) / scale
    scaled = Dataset(x=x, y=dataset.y.copy(), task=dataset.task,
                     feature_names=list(dataset.feature_names))
    return scaled, ScalerParams(mode=mode, offset=offset, scale=scale)
