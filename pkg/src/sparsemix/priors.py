"""Sparsity-inducing log priors over coefficient vectors, with analytic gradients.

Three families are supported:

* ``sss`` -- structured spike-and-slab: a uniform mixture over all (or a
  fixed sample of) size-D supports, slab Gaussian on active coordinates and
  spike Gaussian elsewhere.  Enforces exactly D large entries.
* ``ss`` -- independent per-coordinate spike-and-slab mixture.
* ``student`` -- independent Student-t coordinates.

All density math is done in log space; the sss support sum is evaluated
either by explicit enumeration, by an exact O(p*D) symmetric-polynomial
recurrence (``dp_exact``), or over a fixed random sample of supports.
"""

import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
from scipy.special import expit, gammaln

from sparsemix import kernels
from sparsemix.errors import ConfigError, InputError

LOG_2PI = math.log(2.0 * math.pi)

ENUMERATE_LIMIT = 10_000       # enumerate when C(p, D) is at most this
DP_COST_LIMIT = 1_000_000      # dp_exact when p * D is at most this


@dataclass(frozen=True)
class PriorSpec:
    """Configuration of one coefficient prior.

    ``support_mode`` applies to kind="sss" only: "auto" picks enumerate /
    dp_exact / sampled by problem size, the other values force a mode.
    Sampled supports are drawn once (see `resolve`) and then frozen.
    """

    kind: str = "sss"
    var_spike: float = 1e-3
    var_slab: float = 1.0
    sparsity: int = 1
    inclusion_prob: float = 0.5
    student_dof: float = 3.0
    student_scale: float = 1.0
    support_mode: str = "auto"
    n_sampled_supports: int = 256
    sampled_supports: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("sss", "ss", "student"):
            raise ConfigError(f"unknown prior kind {self.kind!r}")
        if self.kind in ("sss", "ss"):
            if self.var_spike <= 0 or self.var_slab <= 0:
                raise ConfigError("prior variances must be positive")
            if self.var_spike > self.var_slab:
                raise ConfigError(
                    f"var_spike={self.var_spike} exceeds var_slab={self.var_slab}; "
                    "the spike must be the narrow component"
                )
        if self.kind == "sss":
            if self.sparsity < 1:
                raise ConfigError("sparsity must be a positive integer")
            if self.support_mode not in ("auto", "enumerate", "dp_exact", "sampled"):
                raise ConfigError(f"unknown support_mode {self.support_mode!r}")
            if self.n_sampled_supports < 1:
                raise ConfigError("n_sampled_supports must be positive")
        if self.kind == "ss" and not 0.0 < self.inclusion_prob < 1.0:
            raise ConfigError("inclusion_prob must lie strictly inside (0, 1)")
        if self.kind == "student" and (self.student_dof <= 0 or self.student_scale <= 0):
            raise ConfigError("student_dof and student_scale must be positive")


def auto_support_mode(p, sparsity):
    """Mode the "auto" setting resolves to for a given problem size."""
    if _log_comb(p, sparsity) <= math.log(ENUMERATE_LIMIT):
        return "enumerate"
    if p * sparsity <= DP_COST_LIMIT:
        return "dp_exact"
    return "sampled"


def resolve(spec, p, rng):
    """Pin a spec to a feature count: resolve "auto" and draw sampled supports.

    The sampled support set is drawn once here and is immutable afterwards,
    so the prior (and hence the objective) is stationary during a fit.
    """
    if spec.kind != "sss":
        return spec
    if spec.sparsity > p:
        raise ConfigError(f"sparsity {spec.sparsity} exceeds feature count {p}")
    mode = spec.support_mode
    if mode == "auto":
        mode = auto_support_mode(p, spec.sparsity)
    supports = spec.sampled_supports
    if mode == "sampled" and supports is None:
        supports = np.stack(
            [rng.choice(p, size=spec.sparsity, replace=False) for _ in range(spec.n_sampled_supports)]
        )
        supports.setflags(write=False)
    return replace(spec, support_mode=mode, sampled_supports=supports)


# ---------------------------------------------------------------------------
# dispatch

def log_prior(beta, spec):
    """Log prior density at a coefficient vector."""
    return _value_and_grad(np.atleast_2d(_check_beta(beta)), spec, want_grad=False)[0][0]


def grad_log_prior(beta, spec):
    """Gradient of the log prior density at a coefficient vector."""
    return _value_and_grad(np.atleast_2d(_check_beta(beta)), spec, want_grad=True)[1][0]


def log_prior_and_grad(betas, spec):
    """Batched (values, gradients) over rows of `betas`; the fit hot path."""
    betas = np.atleast_2d(_check_beta(betas))
    return _value_and_grad(betas, spec, want_grad=True)


def log_prior_sss(beta, spec):
    _require_kind(spec, "sss")
    return log_prior(beta, spec)


def grad_log_prior_sss(beta, spec):
    _require_kind(spec, "sss")
    return grad_log_prior(beta, spec)


def log_prior_ss(beta, spec):
    _require_kind(spec, "ss")
    return log_prior(beta, spec)


def grad_log_prior_ss(beta, spec):
    _require_kind(spec, "ss")
    return grad_log_prior(beta, spec)


def log_prior_student(beta, spec):
    _require_kind(spec, "student")
    return log_prior(beta, spec)


def grad_log_prior_student(beta, spec):
    _require_kind(spec, "student")
    return grad_log_prior(beta, spec)


def _require_kind(spec, kind):
    if spec.kind != kind:
        raise ConfigError(f"prior kind is {spec.kind!r}, expected {kind!r}")


def _check_beta(beta):
    beta = np.asarray(beta, dtype=np.float64)
    if not np.all(np.isfinite(beta)):
        raise InputError("beta contains non-finite entries")
    return beta


# ---------------------------------------------------------------------------
# implementations

def _value_and_grad(betas, spec, want_grad):
    if spec.kind == "sss":
        return _sss(betas, spec, want_grad)
    if spec.kind == "ss":
        return _ss(betas, spec, want_grad)
    return _student(betas, spec, want_grad)


def _gauss_logpdf(x, var):
    return -0.5 * (LOG_2PI + math.log(var) + x * x / var)


def _log_comb(p, d):
    return gammaln(p + 1) - gammaln(d + 1) - gammaln(p - d + 1)


def _sss(betas, spec, want_grad):
    n_rows, p = betas.shape
    d = spec.sparsity
    if d > p:
        raise ConfigError(f"sparsity {d} exceeds feature count {p}")
    mode = spec.support_mode
    if mode == "auto":
        mode = auto_support_mode(p, d)

    lp_spike = _gauss_logpdf(betas, spec.var_spike)
    lp_slab = _gauss_logpdf(betas, spec.var_slab)
    ratio = lp_slab - lp_spike
    base = lp_spike.sum(axis=1)

    if mode == "dp_exact":
        total, loo = kernels.log_esp_with_loo(ratio, d)
        values = base + total - _log_comb(p, d)
        if not want_grad:
            return values, None
        with np.errstate(over="ignore"):
            resp = np.exp(ratio + loo - total[:, None])
        resp = np.clip(resp, 0.0, 1.0)
    else:
        if mode == "sampled":
            supports = spec.sampled_supports
            if supports is None:
                raise ConfigError(
                    "sampled support mode requires supports drawn at construction; "
                    "call priors.resolve(spec, p, rng) first"
                )
        else:
            if _log_comb(p, d) > math.log(ENUMERATE_LIMIT) + 1e-9:
                raise ConfigError(
                    f"refusing to enumerate C({p},{d}) supports; use dp_exact or sampled"
                )
            supports = np.array(list(combinations(range(p), d)), dtype=np.intp)
        scores = ratio[:, supports].sum(axis=2)                   # (n_rows, n_supports)
        hi = scores.max(axis=1, keepdims=True)
        norm = np.exp(scores - hi)
        log_total = hi[:, 0] + np.log(norm.sum(axis=1))
        values = base + log_total - math.log(supports.shape[0])
        if not want_grad:
            return values, None
        weights = norm / norm.sum(axis=1, keepdims=True)          # support posteriors
        resp = np.zeros_like(betas)
        flat = supports.ravel()
        for b in range(n_rows):
            np.add.at(resp[b], flat, np.repeat(weights[b], d))
        resp = np.clip(resp, 0.0, 1.0)

    score_slab = -betas / spec.var_slab
    score_spike = -betas / spec.var_spike
    grads = resp * score_slab + (1.0 - resp) * score_spike
    return values, grads


def _ss(betas, spec, want_grad):
    pi = spec.inclusion_prob
    a = math.log(pi) + _gauss_logpdf(betas, spec.var_slab)
    b = math.log1p(-pi) + _gauss_logpdf(betas, spec.var_spike)
    values = np.logaddexp(a, b).sum(axis=1)
    if not want_grad:
        return values, None
    resp = expit(a - b)
    grads = resp * (-betas / spec.var_slab) + (1.0 - resp) * (-betas / spec.var_spike)
    return values, grads


def _student(betas, spec, want_grad):
    nu, scale = spec.student_dof, spec.student_scale
    z = betas / scale
    const = (
        gammaln((nu + 1.0) / 2.0)
        - gammaln(nu / 2.0)
        - 0.5 * math.log(nu * math.pi)
        - math.log(scale)
    )
    values = (const - 0.5 * (nu + 1.0) * np.log1p(z * z / nu)).sum(axis=1)
    if not want_grad:
        return values, None
    grads = -(nu + 1.0) * betas / (nu * scale * scale + betas * betas)
    return values, grads
