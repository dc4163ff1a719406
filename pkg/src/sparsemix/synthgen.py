"""Synthetic benchmark generator with multiple planted sparse solutions.

Construction: one primary support gets i.i.d. standard-normal features and
uniform(2, 10) weights (random sign per entry by default); the latent target
is their product.  Every further support reuses the primary support's data
through a random square mixing matrix, with weights solved by pseudo-inverse
so each support reproduces the latent target exactly before noise.  All
remaining columns are pure noise, white noise is added everywhere, and the
target is either the latent value (regression) or a thresholded sigmoid of
it (classification, threshold picked to hit the requested class balance).
"""

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit

from sparsemix.data import Dataset, default_feature_names
from sparsemix.errors import ConfigError, GenerationError

PINV_RESIDUAL_TOL = 1e-8
MAX_MIXING_RETRIES = 10


@dataclass(frozen=True)
class GeneratorSpec:
    n_samples: int = 100
    n_features: int = 200
    n_solutions: int = 3
    solution_sparsity: int = 5
    noise_std: float = 0.1
    nan_ratio: float = 0.0
    task: str = "classification"
    class_balance: float = 0.5
    weight_range: tuple = (2.0, 10.0)
    signed_weights: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1 or self.n_features < 1:
            raise ConfigError("n_samples and n_features must be positive")
        if self.n_solutions < 1 or self.solution_sparsity < 1:
            raise ConfigError("n_solutions and solution_sparsity must be positive")
        if self.n_solutions * self.solution_sparsity > self.n_features:
            raise ConfigError(
                f"{self.n_solutions} disjoint supports of size {self.solution_sparsity} "
                f"do not fit into {self.n_features} features"
            )
        if self.noise_std < 0:
            raise ConfigError("noise_std must be nonnegative")
        if not 0.0 <= self.nan_ratio < 1.0:
            raise ConfigError("nan_ratio must lie in [0, 1)")
        if self.task not in ("regression", "classification"):
            raise ConfigError(f"unknown task {self.task!r}")
        if not 0.0 < self.class_balance < 1.0:
            raise ConfigError("class_balance must lie strictly inside (0, 1)")
        lo, hi = self.weight_range
        if not 0 < lo <= hi:
            raise ConfigError("weight_range must satisfy 0 < low <= high")


@dataclass
class GroundTruth:
    supports: list                     # n_solutions disjoint index arrays
    weights: list                      # matching coefficient vectors
    y_latent: np.ndarray
    spec: GeneratorSpec = None
    mixing_note: str = "dependent-support mixing matrices have i.i.d. standard-normal entries"

    def all_features(self):
        out = set()
        for s in self.supports:
            out.update(int(j) for j in s)
        return out


def generate(spec):
    """Build (Dataset, GroundTruth) from a GeneratorSpec; fully seed-driven."""
    rng = np.random.default_rng(spec.seed)
    n, p = spec.n_samples, spec.n_features
    s = spec.solution_sparsity

    chosen = rng.permutation(p)[: spec.n_solutions * s]
    supports = [np.sort(chosen[k * s : (k + 1) * s]) for k in range(spec.n_solutions)]

    x = np.zeros((n, p))
    x_primary = rng.standard_normal((n, s))
    x[:, supports[0]] = x_primary
    lo, hi = spec.weight_range
    w0 = rng.uniform(lo, hi, size=s)
    if spec.signed_weights:
        w0 = w0 * (rng.integers(0, 2, size=s) * 2 - 1)
    y_latent = x_primary @ w0
    weights = [w0]

    for k in range(1, spec.n_solutions):
        block, w_k = _dependent_block(x_primary, y_latent, rng)
        x[:, supports[k]] = block
        weights.append(w_k)

    in_support = np.zeros(p, dtype=bool)
    in_support[chosen] = True
    x[:, ~in_support] = rng.normal(0.0, spec.noise_std, size=(n, int((~in_support).sum())))
    x += rng.normal(0.0, spec.noise_std, size=(n, p))

    if spec.task == "regression":
        y = y_latent.copy()
    else:
        probs = expit(y_latent)
        threshold = np.quantile(probs, 1.0 - spec.class_balance)
        y = (probs > threshold).astype(np.float64)

    if spec.nan_ratio > 0:
        mask = rng.random((n, p)) < spec.nan_ratio
        # keep every sample identifiable: restore one cell in fully-masked rows
        for i in np.flatnonzero(mask.all(axis=1)):
            mask[i, rng.integers(p)] = False
        x[mask] = np.nan

    dataset = Dataset(x=x, y=y, task=spec.task, feature_names=default_feature_names(p))
    truth = GroundTruth(supports=supports, weights=weights, y_latent=y_latent, spec=spec)
    return dataset, truth


def _dependent_block(x_primary, y_latent, rng):
    """Features spanning the primary block, with weights hitting y_latent exactly."""
    norm = np.linalg.norm(y_latent)
    for _ in range(MAX_MIXING_RETRIES):
        mixing = rng.standard_normal((x_primary.shape[1], x_primary.shape[1]))
        block = x_primary @ mixing
        w = np.linalg.pinv(block) @ y_latent
        residual = np.linalg.norm(block @ w - y_latent)
        if norm == 0.0 or residual <= PINV_RESIDUAL_TOL * norm:
            return block, w
    raise GenerationError(
        f"could not solve dependent-support weights in {MAX_MIXING_RETRIES} attempts "
        "(mixing matrices kept coming out rank deficient)"
    )


def save_ground_truth(truth, path):
    """JSON sidecar: supports, weights, latent target, spec echo."""
    payload = {
        "supports": [[int(j) for j in s] for s in truth.supports],
        "weights": [[float(v) for v in w] for w in truth.weights],
        "y_latent": [float(v) for v in truth.y_latent],
        "spec": asdict(truth.spec) if truth.spec is not None else None,
        "mixing_note": truth.mixing_note,
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_ground_truth(path):
    with open(path) as fh:
        payload = json.load(fh)
    spec = payload.get("spec")
    if spec is not None:
        spec["weight_range"] = tuple(spec["weight_range"])
        spec = GeneratorSpec(**spec)
    return GroundTruth(
        supports=[np.array(s, dtype=int) for s in payload["supports"]],
        weights=[np.array(w) for w in payload["weights"]],
        y_latent=np.array(payload["y_latent"]),
        spec=spec,
    )
