"""Solution extraction: thresholds, top-D ranking, outlier profiles."""

import numpy as np
import pytest

from sparsemix.errors import ConfigError
from sparsemix.extract import (
    ExtractionSpec,
    extract,
    extract_full,
    extract_outlier,
    extract_top,
    solution_union,
)
from sparsemix.posterior import VariationalState, softplus_inv


def state_from_mu(mu, weights=None):
    mu = np.atleast_2d(np.asarray(mu, dtype=np.float64))
    m = mu.shape[0]
    logits = np.zeros(m) if weights is None else np.log(weights)
    return VariationalState(
        mu=mu, rho=np.full(mu.shape, float(softplus_inv(0.1))), weight_logits=logits
    )


class TestFull:
    def test_zero_threshold_returns_everything(self):
        state = state_from_mu([[0.5, -0.2, 0.7]])
        sols = extract_full(state, 0.0)
        assert sols[0].indices() == [2, 0, 1]

    def test_direct_threshold(self):
        state = state_from_mu([[0.5, 0.0, -0.7]])
        sols = extract_full(state, 0.1)
        assert sols[0].indices() == [2, 0]

    def test_threshold_above_everything(self):
        state = state_from_mu([[0.5, 0.0, -0.7]])
        assert extract_full(state, 0.9)[0].features == []

    def test_negative_threshold_rejected(self):
        with pytest.raises(ConfigError):
            extract_full(state_from_mu([[1.0]]), -0.1)


class TestTop:
    def test_top_two_by_magnitude(self):
        state = state_from_mu([[0.1, -3.0, 0.05, 2.0, 0.0]])
        sols = extract_top(state, 2)
        assert sols[0].indices() == [1, 3]

    def test_top_p_equals_full_with_zero_threshold(self):
        rng = np.random.default_rng(0)
        state = state_from_mu(rng.normal(0, 1, (2, 6)))
        top = extract_top(state, 6)
        full = extract_full(state, 0.0)
        for a, b in zip(top, full):
            assert set(a.indices()) == set(b.indices())

    def test_tie_broken_by_lower_index(self):
        state = state_from_mu([[2.0, -2.0, 0.0]])
        assert extract_top(state, 1)[0].indices() == [0]

    def test_threshold_filters_below_top_d(self):
        state = state_from_mu([[0.5, 0.01, 0.02, 0.9]])
        sols = extract_top(state, 3, mu_threshold=0.1)
        assert sols[0].indices() == [3, 0]

    def test_exactly_min_top_d_p_without_threshold(self):
        rng = np.random.default_rng(1)
        state = state_from_mu(rng.normal(0, 1, (3, 5)))
        for d in (1, 3, 5):
            for sol in extract_top(state, d):
                assert len(sol.features) == d

    def test_out_of_range_top_d_rejected(self):
        state = state_from_mu([[1.0, 2.0]])
        with pytest.raises(ConfigError):
            extract_top(state, 0)
        with pytest.raises(ConfigError):
            extract_top(state, 3)


class TestOutlier:
    def test_single_spike_in_flat_profile(self):
        mu = np.full(100, 0.1)
        mu[17] = 5.0
        sols = extract_outlier(state_from_mu([mu]), multiplier=3.0, center="mean")
        assert sols[0].indices() == [17]

    def test_constant_profile_flagged_empty(self):
        sols = extract_outlier(state_from_mu([[0.3, 0.3, 0.3]]), multiplier=3.0)
        assert sols[0].features == []
        assert sols[0].zero_spread

    def test_tiny_multiplier_selects_above_center(self):
        mu = np.array([0.1, 0.2, 0.9, 0.15, 0.85])
        sols = extract_outlier(state_from_mu([mu]), multiplier=1e-9, center="mean")
        expected = {j for j in range(5) if abs(mu[j]) > np.abs(mu).mean()}
        assert set(sols[0].indices()) == expected

    def test_median_mode_uses_scaled_mad(self):
        rng = np.random.default_rng(2)
        mu = rng.normal(0.0, 0.1, 50)
        mu[7] = 4.0
        sols = extract_outlier(state_from_mu([mu]), multiplier=3.0, center="median")
        mags = np.abs(mu)
        med = np.median(mags)
        cutoff = med + 3.0 * 1.4826 * np.median(np.abs(mags - med))
        assert set(sols[0].indices()) == set(np.flatnonzero(mags > cutoff).tolist())

    def test_zscore_oracle_on_random_profiles(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            mu = rng.normal(0.0, 1.0, (2, 30))
            sols = extract_outlier(state_from_mu(mu), multiplier=2.0, center="mean")
            for k in range(2):
                mags = np.abs(mu[k])
                cutoff = mags.mean() + 2.0 * mags.std()
                assert set(sols[k].indices()) == set(np.flatnonzero(mags > cutoff).tolist())

    def test_bad_parameters_rejected(self):
        state = state_from_mu([[1.0, 2.0]])
        with pytest.raises(ConfigError):
            extract_outlier(state, multiplier=0.0)
        with pytest.raises(ConfigError):
            extract_outlier(state, center="mode")


class TestInvariants:
    def test_indices_valid_and_unique(self):
        rng = np.random.default_rng(4)
        state = state_from_mu(rng.normal(0, 1, (4, 12)))
        for spec in (
            ExtractionSpec(mode="full", mu_threshold=0.2),
            ExtractionSpec(mode="top", top_d=4),
            ExtractionSpec(mode="outlier", outlier_multiplier=1.5),
        ):
            for sol in extract(state, spec):
                idx = sol.indices()
                assert len(idx) == len(set(idx))
                assert all(0 <= j < 12 for j in idx)
                mags = [abs(v) for _, v in sol.features]
                assert mags == sorted(mags, reverse=True)

    def test_component_permutation_permutes_solutions(self):
        rng = np.random.default_rng(5)
        mu = rng.normal(0, 1, (3, 8))
        base = extract_top(state_from_mu(mu), 3)
        perm = [2, 0, 1]
        shuffled = extract_top(state_from_mu(mu[perm]), 3)
        for new_k, old_k in enumerate(perm):
            assert shuffled[new_k].indices() == base[old_k].indices()

    def test_low_weight_components_flagged_but_extracted(self):
        state = state_from_mu(
            [[1.0, 0.0], [0.5, 0.2]], weights=np.array([1.0 - 1e-4, 1e-4])
        )
        sols = extract_top(state, 1)
        assert not sols[0].low_weight
        assert sols[1].low_weight
        assert sols[1].features


class TestUnion:
    def test_overlapping_union(self):
        state = state_from_mu([[1.0, 2.0, 0.0, 0.0], [0.0, 2.0, 3.0, 0.0]])
        assert solution_union(extract_top(state, 2)) == {0, 1, 2}

    def test_empty_inputs(self):
        assert solution_union([]) == set()

    def test_single_solution_is_itself(self):
        state = state_from_mu([[1.0, 0.5, 0.0]])
        sols = extract_top(state, 2)
        assert solution_union(sols) == set(sols[0].indices())


def test_extraction_spec_validation():
    with pytest.raises(ConfigError):
        ExtractionSpec(mode="best")
    with pytest.raises(ConfigError):
        ExtractionSpec(mode="full")          # needs a threshold
    with pytest.raises(ConfigError):
        ExtractionSpec(mode="top", top_d=0)
    with pytest.raises(ConfigError):
        ExtractionSpec(mode="outlier", outlier_center="trimmed")
