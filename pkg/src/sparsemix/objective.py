"""Regularized variational objective and its exact gradients.

The objective for one iteration is

    value = sum_k alpha_k * [ loglik(beta_k) + logprior(beta_k) - log q(beta_k) ]
            - lambda_jaccard * soft_jaccard(mu)

with one reparameterized draw beta_k per mixture component (stratified
sampling, weighted by the mixture weights) and the likelihood evaluated on a
minibatch rescaled to a full-data estimate.  Gradients are exact derivatives
of this estimator: pathwise through the draws, direct through the weights'
softmax and through the penalty.
"""

from dataclasses import dataclass, field

import numpy as np

from sparsemix import posterior, priors
from sparsemix.errors import ConfigError
from sparsemix.posterior import StateGrads, softplus, sigmoid
from sparsemix.priors import PriorSpec

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class FitConfig:
    """Hyperparameters for one fit."""

    prior: PriorSpec = field(default_factory=PriorSpec)
    n_components: int = 3
    lambda_jaccard: float = 500.0
    noise_var: float = 1.0
    n_iterations: int = 4000
    batch_size: int = 32
    learning_rate: float = 0.05
    weight_lr_scale: float = 0.02
    jaccard_tau: float = 0.05
    likelihood: str = "auto"
    seed: int = 0
    samples_per_component: int = 1
    init_mu_std: float = 0.01
    init_sigma: float = 0.1
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    trace_points: int = 200

    def validate(self, n_samples=None):
        if self.n_components < 1:
            raise ConfigError("n_components must be at least 1")
        if self.n_iterations < 1:
            raise ConfigError("n_iterations must be at least 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if n_samples is not None and self.batch_size > n_samples:
            raise ConfigError(
                f"batch_size {self.batch_size} exceeds the {n_samples} available samples"
            )
        if self.lambda_jaccard < 0:
            raise ConfigError("lambda_jaccard must be nonnegative")
        if self.noise_var <= 0:
            raise ConfigError("noise_var must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.weight_lr_scale < 0:
            raise ConfigError("weight_lr_scale must be nonnegative")
        if self.jaccard_tau <= 0:
            raise ConfigError("jaccard_tau must be positive")
        if self.likelihood not in ("auto", "gaussian", "bernoulli"):
            raise ConfigError(f"unknown likelihood {self.likelihood!r}")
        if self.samples_per_component < 1:
            raise ConfigError("samples_per_component must be at least 1")


def log_likelihood(dataset, beta, batch, noise_var=1.0):
    """Masked log likelihood of one coefficient vector on a batch.

    Each sample contributes only through its observed features; the batch
    sum is rescaled by n/|batch| to estimate the full-data value.  The
    family follows the task: Gaussian for regression, Bernoulli-logistic
    for classification.
    """
    values, _ = _loglik_batch(dataset, np.atleast_2d(beta), _check_batch(dataset, batch),
                              noise_var, _family("auto", dataset), want_grad=False)
    return float(values[0])


def _family(likelihood, dataset):
    if likelihood != "auto":
        return likelihood
    return "gaussian" if dataset.task == "regression" else "bernoulli"


def _check_batch(dataset, batch):
    batch = np.asarray(batch, dtype=np.intp)
    if batch.size == 0:
        raise ConfigError("batch is empty")
    if batch.min() < 0 or batch.max() >= dataset.n_samples:
        raise ConfigError("batch indices out of range")
    return batch


def _loglik_batch(dataset, betas, batch, noise_var, family="gaussian", want_grad=True):
    """Values (and d/d beta) of the rescaled masked likelihood, one row per beta."""
    xb = dataset.x_filled[batch]            # (b, p); missing cells are zero
    yb = dataset.y[batch]
    scale = dataset.n_samples / len(batch)
    eta = xb @ betas.T                      # (b, s)
    if family == "gaussian":
        resid = yb[:, None] - eta
        values = -0.5 * ((resid * resid) / noise_var + LOG_2PI + np.log(noise_var)).sum(axis=0)
        pull = resid / noise_var if want_grad else None
    else:
        # y*eta - softplus(eta), the stable Bernoulli-logistic form
        values = (yb[:, None] * eta - softplus(eta)).sum(axis=0)
        pull = yb[:, None] - sigmoid(eta) if want_grad else None
    grads = scale * (xb.T @ pull).T if want_grad else None
    return scale * values, grads


def soft_support(mu_row, tau):
    """Differentiable support indicator: tanh(|mu| / tau), in [0, 1)."""
    if tau <= 0:
        raise ConfigError("jaccard_tau must be positive")
    return np.tanh(np.abs(mu_row) / tau)


def jaccard_penalty(state, tau):
    """Average pairwise soft Jaccard similarity between component supports."""
    value, _ = _jaccard_and_grad(state.mu, tau, want_grad=False)
    return value


def _jaccard_and_grad(mu, tau, want_grad=True):
    m = mu.shape[0]
    if m < 2:
        return 0.0, (np.zeros_like(mu) if want_grad else None)
    s = soft_support(mu, tau)
    ds_dmu = (1.0 - s * s) * np.sign(mu) / tau if want_grad else None
    grad_s = np.zeros_like(mu) if want_grad else None
    total = 0.0
    for k in range(m):
        for l in range(k + 1, m):
            lo = np.minimum(s[k], s[l])
            hi = np.maximum(s[k], s[l])
            union = hi.sum()
            if union <= 0.0:
                continue
            inter = lo.sum()
            total += inter / union
            if want_grad:
                # 0.5 splits ties so the subgradient matches central differences
                is_min_k = np.where(s[k] < s[l], 1.0, np.where(s[k] == s[l], 0.5, 0.0))
                is_max_k = 1.0 - is_min_k
                common = 1.0 / union
                grad_s[k] += is_min_k * common - (inter / union**2) * is_max_k
                grad_s[l] += (1.0 - is_min_k) * common - (inter / union**2) * (1.0 - is_max_k)
    n_pairs = m * (m - 1) / 2
    value = total / n_pairs
    if not want_grad:
        return value, None
    return value, grad_s * ds_dmu / n_pairs


@dataclass
class ObjectiveResult:
    value: float
    elbo: float
    penalty: float
    grads: StateGrads


def objective_and_gradients(dataset, state, config, batch, rng, noise=None):
    """One stochastic evaluation of the regularized objective and its gradients.

    `noise` injects the standard-normal draws (shape (m, p)) for frozen-noise
    tests; it requires samples_per_component == 1.
    """
    m, p = state.mu.shape
    if p != dataset.n_features:
        raise ConfigError("state width does not match dataset features")
    if m != config.n_components:
        raise ConfigError("state component count does not match config")
    batch = _check_batch(dataset, batch)
    n_rep = config.samples_per_component
    if noise is not None:
        noise = np.asarray(noise, dtype=np.float64)
        if n_rep != 1 or noise.shape != (m, p):
            raise ConfigError("injected noise must be one (m, p) draw per component")
        eps = noise[None, :, :]
    else:
        eps = rng.standard_normal((n_rep, m, p))

    sigma = state.sigma()
    alpha = state.weights()
    betas = (state.mu[None, :, :] + sigma[None, :, :] * eps).reshape(n_rep * m, p)

    ll, d_ll = _loglik_batch(dataset, betas, batch, config.noise_var,
                             _family(config.likelihood, dataset))
    lp, d_lp = priors.log_prior_and_grad(betas, config.prior)
    lq, q_mu, q_rho, q_logits, q_beta = posterior.logq_batch_grads(state, betas)

    terms = (ll + lp - lq).reshape(n_rep, m)
    per_component = terms.mean(axis=0)                       # (m,)
    elbo = float(alpha @ per_component)

    penalty, d_pen = 0.0, None
    if config.lambda_jaccard > 0 and m >= 2:
        penalty, d_pen = _jaccard_and_grad(state.mu, config.jaccard_tau)
    value = elbo - config.lambda_jaccard * penalty

    # pathwise piece through each draw; draw t*m + k belongs to component k
    w = np.tile(alpha, n_rep) / n_rep
    d_beta = w[:, None] * (d_ll + d_lp - q_beta)             # (n_rep*m, p)
    d_beta = d_beta.reshape(n_rep, m, p)
    grad_mu = d_beta.sum(axis=0)
    grad_rho = (d_beta * eps).sum(axis=0) * sigmoid(state.rho)

    # direct dependence of log q on the state, for every draw
    grad_mu -= np.einsum("s,smp->mp", w, q_mu)
    grad_rho -= np.einsum("s,smp->mp", w, q_rho)
    grad_logits = alpha * (per_component - elbo)
    grad_logits -= np.einsum("s,sm->m", w, q_logits)

    if d_pen is not None:
        grad_mu -= config.lambda_jaccard * d_pen

    grads = StateGrads(mu=grad_mu, rho=grad_rho, weight_logits=grad_logits)
    return ObjectiveResult(value=value, elbo=elbo, penalty=penalty, grads=grads)
