"""Mixture-of-diagonal-Gaussians variational family.

Component scales live on an unconstrained axis through a softplus transform
and mixture weights through a softmax, so every finite parameter value maps
to a valid (positive scale, simplex weight) configuration.
"""

import csv
from dataclasses import dataclass

import numpy as np

from sparsemix.errors import InputError

LOG_2PI = float(np.log(2.0 * np.pi))


def softplus(x):
    return np.logaddexp(0.0, x)


def softplus_inv(y):
    y = np.asarray(y, dtype=np.float64)
    # log(expm1(y)), switching to the asymptote well before expm1 overflows
    small = y < 30.0
    out = np.where(small, np.log(np.expm1(np.where(small, y, 1.0))), y)
    return out


def softmax(x):
    z = np.exp(x - np.max(x))
    return z / z.sum()


def sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))


@dataclass
class VariationalState:
    """Free parameters of the mixture: means, pre-softplus scales, weight logits."""

    mu: np.ndarray             # (m, p)
    rho: np.ndarray            # (m, p)
    weight_logits: np.ndarray  # (m,)

    @property
    def n_components(self):
        return self.mu.shape[0]

    @property
    def n_features(self):
        return self.mu.shape[1]

    def sigma(self):
        return softplus(self.rho)

    def weights(self):
        return softmax(self.weight_logits)

    def copy(self):
        return VariationalState(self.mu.copy(), self.rho.copy(), self.weight_logits.copy())


@dataclass
class StateGrads:
    """A quantity with the same shape as the state (gradients, moments)."""

    mu: np.ndarray
    rho: np.ndarray
    weight_logits: np.ndarray

    @classmethod
    def zeros_like(cls, state):
        return cls(
            np.zeros_like(state.mu),
            np.zeros_like(state.rho),
            np.zeros_like(state.weight_logits),
        )


@dataclass
class ComponentSample:
    """One reparameterized draw: beta = mu[k] + softplus(rho[k]) * noise."""

    component_index: int
    beta: np.ndarray
    noise: np.ndarray


def init_state(p, m, rng, init_mu_std=0.01, init_sigma=0.1):
    """Fresh state: small random means, constant scales, uniform weights."""
    if p < 1 or m < 1:
        raise InputError("need at least one feature and one component")
    mu = rng.normal(0.0, init_mu_std, size=(m, p))
    rho = np.full((m, p), float(softplus_inv(init_sigma)))
    return VariationalState(mu=mu, rho=rho, weight_logits=np.zeros(m))


def sample_component(state, k, rng):
    """Reparameterized draw from component k with the noise kept for gradients."""
    if not 0 <= k < state.n_components:
        raise InputError(f"component index {k} out of range [0, {state.n_components})")
    noise = rng.standard_normal(state.n_features)
    beta = state.mu[k] + softplus(state.rho[k]) * noise
    return ComponentSample(component_index=k, beta=beta, noise=noise)


def log_q(state, beta):
    """Mixture log density at one point, via log-sum-exp over components."""
    return float(_logq_values(state, np.atleast_2d(beta))[0][0])


def _component_log_dens(state, betas):
    # c[s, k] = log alpha_k + log N(beta_s; mu_k, diag sigma_k^2)
    sigma = state.sigma()
    diff = betas[:, None, :] - state.mu[None, :, :]
    quad = (diff / sigma[None, :, :]) ** 2
    log_norm = -0.5 * (LOG_2PI + 2.0 * np.log(sigma))
    log_alpha = state.weight_logits - _logsumexp(state.weight_logits)
    return log_alpha[None, :] + (log_norm[None, :, :] - 0.5 * quad).sum(axis=2)


def _logq_values(state, betas):
    c = _component_log_dens(state, betas)
    hi = c.max(axis=1)
    vals = hi + np.log(np.exp(c - hi[:, None]).sum(axis=1))
    return vals, c


def logq_batch_grads(state, betas):
    """Values and all partial derivatives of log q at each row of `betas`.

    Returns (values, d_mu, d_rho, d_logits, d_beta) with leading sample axis;
    derivatives are taken at fixed beta (the pathwise chain through a sample
    is the caller's business).
    """
    betas = np.atleast_2d(betas)
    n_s = betas.shape[0]
    sigma = state.sigma()
    alpha = state.weights()
    values, c = _logq_values(state, betas)
    resp = np.exp(c - values[:, None])                      # (s, m)
    diff = betas[:, None, :] - state.mu[None, :, :]         # (s, m, p)
    inv_var = 1.0 / (sigma * sigma)
    pull = diff * inv_var[None, :, :]
    d_mu = resp[:, :, None] * pull
    d_sigma = resp[:, :, None] * (diff * pull / sigma[None, :, :] - 1.0 / sigma[None, :, :])
    d_rho = d_sigma * sigmoid(state.rho)[None, :, :]
    d_logits = resp - alpha[None, :]
    d_beta = -(resp[:, :, None] * pull).sum(axis=1)
    return values, d_mu, d_rho, d_logits, d_beta


def log_q_grads(state, beta):
    """Single-point variant of `logq_batch_grads`."""
    values, d_mu, d_rho, d_logits, d_beta = logq_batch_grads(state, beta)
    return values[0], StateGrads(d_mu[0], d_rho[0], d_logits[0]), d_beta[0]


def _logsumexp(x):
    hi = np.max(x)
    return hi + np.log(np.exp(x - hi).sum())


# ---------------------------------------------------------------------------
# flat tabular serialization (component, feature, mu, sigma, alpha)

def save_state(state, path, feature_names=None):
    """Write the state as a flat table; floats use shortest round-trip repr."""
    m, p = state.mu.shape
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(p)]
    sigma = state.sigma()
    alpha = state.weights()
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "feature", "mu", "sigma", "alpha"])
        for k in range(m):
            for j in range(p):
                writer.writerow(
                    [k, feature_names[j], repr(float(state.mu[k, j])),
                     repr(float(sigma[k, j])), repr(float(alpha[k]))]
                )


def load_state(path):
    """Inverse of `save_state`; returns (state, feature_names)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append(row)
    if not rows:
        raise InputError(f"state file {path} is empty")
    components = sorted({int(r["component"]) for r in rows})
    m = len(components)
    names = []
    for r in rows:
        if int(r["component"]) != components[0]:
            break
        names.append(r["feature"])
    p = len(names)
    mu = np.empty((m, p))
    sigma = np.empty((m, p))
    alpha = np.empty(m)
    for i, r in enumerate(rows):
        k, j = divmod(i, p)
        mu[k, j] = float(r["mu"])
        sigma[k, j] = float(r["sigma"])
        alpha[k] = float(r["alpha"])
    state = VariationalState(
        mu=mu,
        rho=softplus_inv(sigma),
        weight_logits=np.log(np.clip(alpha, 1e-300, None)),
    )
    return state, names
