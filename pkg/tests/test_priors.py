"""Prior log densities and gradients against enumeration and finite differences."""

import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import cauchy, norm

from conftest import central_diff, rel_error
from sparsemix import priors
from sparsemix.errors import ConfigError, InputError
from sparsemix.priors import PriorSpec


def enumeration_oracle(beta, var_spike, var_slab, d):
    """Direct sum over all size-d supports with scipy normal densities."""
    p = len(beta)
    total = 0.0
    count = 0
    for support in itertools.combinations(range(p), d):
        term = 1.0
        for j in range(p):
            var = var_slab if j in support else var_spike
            term *= norm.pdf(beta[j], scale=math.sqrt(var))
        total += term
        count += 1
    return math.log(total / count)


def sss_spec(d, mode, **kw):
    return PriorSpec(kind="sss", sparsity=d, support_mode=mode, **kw)


class TestStructuredSpikeSlab:
    def test_two_feature_example(self):
        # both supports contribute identically at the origin
        spec = sss_spec(1, "enumerate", var_spike=0.01, var_slab=1.0)
        value = priors.log_prior_sss(np.zeros(2), spec)
        expected = math.log(norm.pdf(0.0)) + math.log(norm.pdf(0.0, scale=0.1))
        assert np.isclose(value, expected, atol=1e-12)
        assert np.isclose(value, 0.46470, atol=1e-4)

    @pytest.mark.parametrize("mode", ["enumerate", "dp_exact", "sampled"])
    def test_modes_agree_at_origin(self, mode, rng):
        spec = priors.resolve(sss_spec(2, mode), 6, rng)
        value = priors.log_prior_sss(np.zeros(6), spec)
        reference = priors.log_prior_sss(np.zeros(6), sss_spec(2, "enumerate"))
        assert np.isclose(value, reference, atol=1e-12)

    def test_dp_equals_enumeration_p6_d2(self, rng):
        beta = rng.normal(0.0, 1.0, 6)
        v_enum = priors.log_prior_sss(beta, sss_spec(2, "enumerate"))
        v_dp = priors.log_prior_sss(beta, sss_spec(2, "dp_exact"))
        assert abs(v_enum - v_dp) < 1e-10
        assert np.isclose(v_enum, enumeration_oracle(beta, 1e-3, 1.0, 2), atol=1e-9)

    def test_gradient_zero_at_origin(self):
        grad = priors.grad_log_prior_sss(np.zeros(4), sss_spec(1, "dp_exact"))
        assert np.allclose(grad, 0.0, atol=1e-12)

    def test_gradient_matches_finite_differences(self, rng):
        spec = sss_spec(1, "dp_exact")
        beta = rng.normal(0.0, 1.0, 4)
        grad = priors.grad_log_prior_sss(beta, spec)
        fd = central_diff(lambda b: priors.log_prior_sss(b, spec), beta)
        assert rel_error(grad, fd) < 1e-5

    def test_dp_gradient_equals_enumeration_gradient(self, rng):
        beta = rng.normal(0.0, 1.0, 6)
        g_enum = priors.grad_log_prior_sss(beta, sss_spec(2, "enumerate"))
        g_dp = priors.grad_log_prior_sss(beta, sss_spec(2, "dp_exact"))
        assert np.max(np.abs(g_enum - g_dp)) < 1e-9

    def test_exchangeable_under_permutation(self, rng):
        beta = rng.normal(0.0, 1.0, 7)
        for mode in ("enumerate", "dp_exact"):
            spec = sss_spec(3, mode)
            base = priors.log_prior_sss(beta, spec)
            perm = priors.log_prior_sss(beta[rng.permutation(7)], spec)
            assert np.isclose(base, perm, atol=1e-10)

    def test_equal_variances_reduce_to_pure_slab(self, rng):
        beta = rng.normal(0.0, 1.0, 8)
        spec = sss_spec(3, "dp_exact", var_spike=1.0, var_slab=1.0)
        value = priors.log_prior_sss(beta, spec)
        slab = norm.logpdf(beta, scale=1.0).sum()
        assert abs(value - slab) / abs(slab) < 1e-8

    def test_sampled_supports_fixed_after_resolve(self, rng):
        spec = priors.resolve(sss_spec(2, "sampled", n_sampled_supports=32), 12, rng)
        beta = rng.normal(0.0, 1.0, 12)
        assert priors.log_prior_sss(beta, spec) == priors.log_prior_sss(beta, spec)
        assert spec.sampled_supports.shape == (32, 2)
        with pytest.raises(ValueError):
            spec.sampled_supports[0, 0] = 5

    def test_sampled_mode_without_resolve_rejected(self):
        with pytest.raises(ConfigError):
            priors.log_prior_sss(np.zeros(4), sss_spec(2, "sampled"))

    def test_sparsity_larger_than_p_rejected(self):
        with pytest.raises(ConfigError):
            priors.log_prior_sss(np.zeros(2), sss_spec(3, "enumerate"))

    def test_non_finite_beta_rejected(self):
        spec = sss_spec(1, "dp_exact")
        with pytest.raises(InputError):
            priors.log_prior_sss(np.array([0.0, np.nan]), spec)
        with pytest.raises(InputError):
            priors.grad_log_prior_sss(np.array([np.inf, 0.0]), spec)


class TestPerCoordinateSpikeSlab:
    def test_scalar_mixture_value(self):
        spec = PriorSpec(kind="ss", var_spike=0.01, var_slab=1.0, inclusion_prob=0.5)
        value = priors.log_prior_ss(np.zeros(1), spec)
        expected = math.log(0.5 * norm.pdf(0.0) + 0.5 * norm.pdf(0.0, scale=0.1))
        assert np.isclose(value, expected, atol=1e-12)
        assert np.isclose(value, 0.7858, atol=1e-3)

    def test_gradient_zero_at_origin(self):
        spec = PriorSpec(kind="ss", inclusion_prob=0.2)
        assert np.allclose(priors.grad_log_prior_ss(np.zeros(5), spec), 0.0)

    def test_gradient_matches_finite_differences(self, rng):
        spec = PriorSpec(kind="ss", inclusion_prob=0.3)
        beta = rng.normal(0.0, 1.0, 8)
        grad = priors.grad_log_prior_ss(beta, spec)
        fd = central_diff(lambda b: priors.log_prior_ss(b, spec), beta)
        assert rel_error(grad, fd) < 1e-5

    @pytest.mark.parametrize("pi", [0.0, 1.0, -0.2, 1.4])
    def test_inclusion_prob_bounds(self, pi):
        with pytest.raises(ConfigError):
            PriorSpec(kind="ss", inclusion_prob=pi)


class TestStudent:
    def test_standard_cauchy_at_origin(self):
        spec = PriorSpec(kind="student", student_dof=1.0, student_scale=1.0)
        value = priors.log_prior_student(np.zeros(1), spec)
        assert np.isclose(value, math.log(1.0 / math.pi), atol=1e-12)
        assert np.isclose(value, cauchy.logpdf(0.0), atol=1e-12)

    def test_gradient_zero_at_origin(self):
        spec = PriorSpec(kind="student")
        assert np.allclose(priors.grad_log_prior_student(np.zeros(6), spec), 0.0)

    def test_gradient_matches_finite_differences(self, rng):
        spec = PriorSpec(kind="student", student_dof=4.0)
        beta = rng.normal(0.0, 1.0, 8)
        grad = priors.grad_log_prior_student(beta, spec)
        fd = central_diff(lambda b: priors.log_prior_student(b, spec), beta)
        assert rel_error(grad, fd) < 1e-5

    def test_positive_parameters_required(self):
        with pytest.raises(ConfigError):
            PriorSpec(kind="student", student_dof=0.0)
        with pytest.raises(ConfigError):
            PriorSpec(kind="student", student_scale=-1.0)


def all_specs():
    return [
        sss_spec(2, "dp_exact"),
        sss_spec(2, "enumerate"),
        PriorSpec(kind="ss", inclusion_prob=0.1),
        PriorSpec(kind="student"),
    ]


@pytest.mark.parametrize("spec", all_specs(), ids=lambda s: f"{s.kind}-{s.support_mode}")
def test_density_and_gradient_finite_for_finite_beta(spec, rng):
    for scale in (0.01, 1.0, 50.0):
        beta = rng.normal(0.0, scale, 6)
        value = priors.log_prior(beta, spec)
        grad = priors.grad_log_prior(beta, spec)
        assert np.isfinite(value)
        assert np.all(np.isfinite(grad))


@pytest.mark.parametrize("spec", all_specs(), ids=lambda s: f"{s.kind}-{s.support_mode}")
def test_gradients_match_finite_differences_many_draws(spec, rng):
    for _ in range(20):
        beta = rng.normal(0.0, 1.0, 6)
        grad = priors.grad_log_prior(beta, spec)
        fd = central_diff(lambda b: priors.log_prior(b, spec), beta)
        assert rel_error(grad, fd) < 1e-5


def test_dp_equals_enumeration_across_sizes(rng):
    # exactness of the recurrence wherever enumeration is feasible
    for p, d in ((5, 1), (6, 3), (9, 2), (10, 4), (12, 2)):
        beta = rng.normal(0.0, 1.0, p)
        v_enum = priors.log_prior_sss(beta, sss_spec(d, "enumerate"))
        v_dp = priors.log_prior_sss(beta, sss_spec(d, "dp_exact"))
        assert abs(v_enum - v_dp) < 1e-9


def test_variance_ordering_enforced():
    with pytest.raises(ConfigError):
        PriorSpec(kind="sss", var_spike=2.0, var_slab=1.0, sparsity=1)
    PriorSpec(kind="sss", var_spike=1.0, var_slab=1.0, sparsity=1)  # equality allowed


def test_auto_mode_resolution():
    assert priors.auto_support_mode(10, 2) == "enumerate"
    assert priors.auto_support_mode(500, 5) == "dp_exact"
    assert priors.auto_support_mode(10**6, 5) == "sampled"


def test_resolve_draws_supports_once(rng):
    spec = sss_spec(2, "auto")
    resolved = priors.resolve(spec, 10, rng)
    assert resolved.support_mode == "enumerate"
    resolved_big = priors.resolve(replace(spec, support_mode="sampled"), 10, rng)
    assert resolved_big.sampled_supports is not None
