"""Adam-driven stochastic ascent on the regularized objective."""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from sparsemix import posterior, priors
from sparsemix.errors import DivergenceError
from sparsemix.objective import objective_and_gradients
from sparsemix.posterior import StateGrads, VariationalState, init_state

DIVERGENCE_MAGNITUDE = 1e7
DIVERGENCE_PATIENCE = 50
TRACE_TOP_K = 5


@dataclass
class AdamMoments:
    """Running first/second moments, one slot per state parameter."""

    first: StateGrads
    second: StateGrads
    step_count: int = 0

    @classmethod
    def zeros_like(cls, state):
        return cls(StateGrads.zeros_like(state), StateGrads.zeros_like(state))


def adam_step(state, grads, moments, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam ascent step; returns new (state, moments).

    `lr` is either one shared rate or a {parameter name: rate} mapping
    (Adam is invariant to gradient rescaling, so a slower block needs its
    own rate rather than a scaled gradient).
    """
    rates = lr if isinstance(lr, dict) else {}
    t = moments.step_count + 1
    new_first, new_second, updated = {}, {}, {}
    for name in ("mu", "rho", "weight_logits"):
        g = getattr(grads, name)
        rate = rates.get(name, lr) if rates else lr
        m1 = beta1 * getattr(moments.first, name) + (1.0 - beta1) * g
        m2 = beta2 * getattr(moments.second, name) + (1.0 - beta2) * g * g
        m1_hat = m1 / (1.0 - beta1**t)
        m2_hat = m2 / (1.0 - beta2**t)
        new_first[name] = m1
        new_second[name] = m2
        updated[name] = getattr(state, name) + rate * m1_hat / (np.sqrt(m2_hat) + eps)
    return (
        VariationalState(**updated),
        AdamMoments(StateGrads(**new_first), StateGrads(**new_second), t),
    )


@dataclass
class TraceRecord:
    iteration: int
    objective: float
    elbo: float
    penalty: float
    top_mu_mean: np.ndarray     # mean of the top-k |mu| per component
    top_features: np.ndarray    # (m, k) indices of those entries


@dataclass
class OptimizationTrace:
    records: list = field(default_factory=list)

    def append(self, record):
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValueError("trace iterations must be strictly increasing")
        self.records.append(record)

    def iterations(self):
        return np.array([r.iteration for r in self.records])

    def objectives(self):
        return np.array([r.objective for r in self.records])

    def save_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "objective", "elbo", "penalty"])
            for r in self.records:
                writer.writerow(
                    [r.iteration, repr(r.objective), repr(r.elbo), repr(r.penalty)]
                )


def _snapshot(state, k):
    mags = np.abs(state.mu)
    k = min(k, mags.shape[1])
    order = np.argsort(-mags, axis=1, kind="stable")[:, :k]
    top = np.take_along_axis(mags, order, axis=1)
    return top.mean(axis=1), order


class _EpochBatcher:
    """Without-replacement batches, reshuffled whenever an epoch runs out."""

    def __init__(self, n, batch_size, rng):
        self.n = n
        self.batch_size = min(batch_size, n)
        self.rng = rng
        self._perm = rng.permutation(n)
        self._pos = 0

    def next(self):
        if self._pos + self.batch_size > self.n:
            self._perm = self.rng.permutation(self.n)
            self._pos = 0
        batch = self._perm[self._pos : self._pos + self.batch_size]
        self._pos += self.batch_size
        return batch


def fit(dataset, config):
    """Run the full optimization loop; returns (final state, trace).

    Fully reproducible from config.seed: prior support sampling, state
    initialization, batching, and the per-component draws all consume one
    seeded generator in a fixed order.
    """
    config.validate(dataset.n_samples)
    rng = np.random.default_rng(config.seed)
    prior = priors.resolve(config.prior, dataset.n_features, rng)
    run_config = _with_prior(config, prior)
    state = init_state(
        dataset.n_features, config.n_components, rng,
        init_mu_std=config.init_mu_std, init_sigma=config.init_sigma,
    )
    moments = AdamMoments.zeros_like(state)
    batcher = _EpochBatcher(dataset.n_samples, config.batch_size, rng)
    trace = OptimizationTrace()
    trace_every = max(1, config.n_iterations // config.trace_points)

    bad_streak = 0
    for t in range(1, config.n_iterations + 1):
        batch = batcher.next()
        result = objective_and_gradients(dataset, state, run_config, batch, rng)
        if not np.isfinite(result.value) or abs(result.value) > DIVERGENCE_MAGNITUDE:
            bad_streak += 1
            if bad_streak >= DIVERGENCE_PATIENCE:
                raise DivergenceError(
                    f"objective stayed non-finite or above {DIVERGENCE_MAGNITUDE:g} for "
                    f"{DIVERGENCE_PATIENCE} consecutive iterations (last value "
                    f"{result.value:g}); check feature scaling or lower var_spike/learning_rate"
                )
        else:
            bad_streak = 0
        if t == 1 or t == config.n_iterations or t % trace_every == 0:
            top_mean, top_idx = _snapshot(state, TRACE_TOP_K)
            trace.append(
                TraceRecord(
                    iteration=t,
                    objective=result.value,
                    elbo=result.elbo,
                    penalty=result.penalty,
                    top_mu_mean=top_mean,
                    top_features=top_idx,
                )
            )
        state, moments = adam_step(
            state, result.grads, moments,
            lr={
                "mu": config.learning_rate,
                "rho": config.learning_rate,
                "weight_logits": config.learning_rate * config.weight_lr_scale,
            },
            beta1=config.adam_beta1, beta2=config.adam_beta2, eps=config.adam_eps,
        )
    return state, trace


def _with_prior(config, prior):
    return config if prior is config.prior else replace(config, prior=prior)
