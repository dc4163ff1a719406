"""Turning a fitted state into discrete candidate solutions.

Three modes: every feature above a |mu| threshold ("full"), the largest-D
features per component ("top"), or features whose |mu| is an outlier of the
component's importance profile ("outlier").
"""

import csv
from dataclasses import dataclass

import numpy as np

from sparsemix.errors import ConfigError

LOW_WEIGHT_CUTOFF = 1e-3
MAD_NORMAL_CONSISTENCY = 1.4826


@dataclass
class CandidateSolution:
    """One component's extracted feature subset.

    `features` holds (feature index, mu value) pairs sorted by |mu|
    descending, ties broken by lower index.
    """

    component_index: int
    features: list
    weight: float
    low_weight: bool = False
    zero_spread: bool = False

    def indices(self):
        return [j for j, _ in self.features]


@dataclass
class ExtractionSpec:
    mode: str = "top"
    mu_threshold: float | None = None
    top_d: int = 1
    outlier_multiplier: float = 3.0
    outlier_center: str = "mean"

    def __post_init__(self):
        if self.mode not in ("full", "top", "outlier"):
            raise ConfigError(f"unknown extraction mode {self.mode!r}")
        if self.mode == "full" and self.mu_threshold is None:
            raise ConfigError("full extraction requires mu_threshold")
        if self.mu_threshold is not None and self.mu_threshold < 0:
            raise ConfigError("mu_threshold must be nonnegative")
        if self.mode == "top" and self.top_d < 1:
            raise ConfigError("top_d must be a positive integer")
        if self.mode == "outlier":
            if self.outlier_multiplier <= 0:
                raise ConfigError("outlier_multiplier must be positive")
            if self.outlier_center not in ("mean", "median"):
                raise ConfigError(f"unknown outlier_center {self.outlier_center!r}")


def extract(state, spec):
    """Dispatch on spec.mode."""
    if spec.mode == "full":
        return extract_full(state, spec.mu_threshold)
    if spec.mode == "top":
        return extract_top(state, spec.top_d, spec.mu_threshold)
    return extract_outlier(state, spec.outlier_multiplier, spec.outlier_center)


def _ranked(mu_row):
    # stable argsort of -|mu| keeps ascending index order among ties
    return np.argsort(-np.abs(mu_row), kind="stable")


def _solution(state, k, picked):
    mu_row = state.mu[k]
    alpha = state.weights()
    feats = [(int(j), float(mu_row[j])) for j in picked]
    return CandidateSolution(
        component_index=k,
        features=feats,
        weight=float(alpha[k]),
        low_weight=bool(alpha[k] < LOW_WEIGHT_CUTOFF),
    )


def extract_full(state, mu_threshold):
    """All features with |mu| above the threshold, per component."""
    if mu_threshold < 0:
        raise ConfigError("mu_threshold must be nonnegative")
    out = []
    for k in range(state.n_components):
        order = _ranked(state.mu[k])
        picked = [j for j in order if abs(state.mu[k][j]) > mu_threshold]
        out.append(_solution(state, k, picked))
    return out


def extract_top(state, top_d, mu_threshold=None):
    """The top_d features by |mu| per component, optionally pre-thresholded."""
    if not 1 <= top_d <= state.n_features:
        raise ConfigError(f"top_d must lie in [1, {state.n_features}]")
    out = []
    for k in range(state.n_components):
        order = _ranked(state.mu[k])
        if mu_threshold is not None:
            order = [j for j in order if abs(state.mu[k][j]) > mu_threshold]
        out.append(_solution(state, k, order[:top_d]))
    return out


def extract_outlier(state, multiplier=3.0, center="mean"):
    """Features whose |mu| exceeds center + multiplier * spread, per component.

    center="mean" uses mean/standard deviation of the |mu| profile;
    center="median" uses median/scaled median absolute deviation.  A profile
    with zero spread yields an empty, flagged solution.
    """
    if multiplier <= 0:
        raise ConfigError("outlier_multiplier must be positive")
    if center not in ("mean", "median"):
        raise ConfigError(f"unknown outlier_center {center!r}")
    out = []
    for k in range(state.n_components):
        mags = np.abs(state.mu[k])
        if center == "mean":
            loc, spread = mags.mean(), mags.std()
        else:
            loc = np.median(mags)
            spread = MAD_NORMAL_CONSISTENCY * np.median(np.abs(mags - loc))
        if spread == 0.0:
            sol = _solution(state, k, [])
            sol.zero_spread = True
            out.append(sol)
            continue
        cutoff = loc + multiplier * spread
        picked = [j for j in _ranked(state.mu[k]) if mags[j] > cutoff]
        out.append(_solution(state, k, picked))
    return out


def solution_union(solutions):
    """Deduplicated union of feature indices across candidate solutions."""
    found = set()
    for sol in solutions:
        found.update(sol.indices())
    return found


def save_solutions(solutions, path, feature_names=None):
    """Tabular export: component, rank, feature, mu, alpha."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "rank", "feature", "mu", "alpha"])
        for sol in solutions:
            for rank, (j, mu) in enumerate(sol.features):
                name = feature_names[j] if feature_names is not None else f"f{j}"
                writer.writerow([sol.component_index, rank, name, repr(mu), repr(sol.weight)])


def load_solution_features(path, feature_names):
    """Feature-index union recorded in a solutions file."""
    index = {name: j for j, name in enumerate(feature_names)}
    found = set()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            found.add(index[row["feature"]])
    return found
