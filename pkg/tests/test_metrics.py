"""Recovery metrics against a second set-comprehension implementation."""

import numpy as np
import pytest

from sparsemix.errors import InputError
from sparsemix.metrics import PerformanceCategory, categorize, score


def oracle_score(found, generating, p):
    """Independent implementation built purely from set comprehensions."""
    inter = {j for j in found if j in generating}
    union = {j for j in found} | {j for j in generating}
    recall = len(inter) / len(generating)
    precision = len(inter) / len(found) if found else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if (precision + recall) > 0
        else 0.0
    )
    jaccard = len(inter) / len(union)
    si = p * len(inter) / len(generating) ** 2
    return recall, precision, f1, jaccard, si, precision * si


def test_perfect_recovery_nine_of_hundred():
    m = score(set(range(9)), set(range(9)), p=100)
    assert m.recall == m.precision == m.f1 == m.jaccard == 1.0
    assert np.isclose(m.si, 100 * 9 / 81)
    assert np.isclose(m.asi, m.si)
    assert np.isclose(m.si, 11.111, atol=1e-3)


def test_disjoint_sets_score_zero():
    m = score({1, 2, 3}, {4, 5, 6}, p=10)
    assert m.recall == m.precision == m.f1 == m.jaccard == 0.0
    assert m.si == m.asi == 0.0


def test_select_everything_penalized_by_asi():
    generating = set(range(9))
    m = score(set(range(100)), generating, p=100)
    assert m.recall == 1.0
    assert np.isclose(m.precision, 0.09)
    assert np.isclose(m.si, 100 * 9 / 81)
    assert np.isclose(m.asi, 1.0)


def test_empty_found_set():
    m = score(set(), {1, 2}, p=10)
    assert m.precision == 0.0
    assert m.f1 == 0.0
    assert m.recall == 0.0


def test_empty_generating_set_rejected():
    with pytest.raises(InputError):
        score({1}, set(), p=10)


def test_out_of_range_indices_rejected():
    with pytest.raises(InputError):
        score({10}, {1}, p=10)
    with pytest.raises(InputError):
        score({1}, {-1}, p=10)


def test_against_oracle_on_random_triples():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        p = int(rng.integers(2, 60))
        generating = set(rng.choice(p, size=int(rng.integers(1, p)), replace=False).tolist())
        n_found = int(rng.integers(0, p + 1))
        found = set(rng.choice(p, size=n_found, replace=False).tolist())
        m = score(found, generating, p)
        recall, precision, f1, jaccard, si, asi = oracle_score(found, generating, p)
        assert m.recall == recall
        assert m.precision == precision
        assert m.f1 == f1
        assert m.jaccard == jaccard
        assert m.si == si
        assert m.asi == asi


def test_f1_jaccard_identity():
    rng = np.random.default_rng(12)
    for _ in range(200):
        p = int(rng.integers(2, 40))
        generating = set(rng.choice(p, size=int(rng.integers(1, p)), replace=False).tolist())
        found = set(rng.choice(p, size=int(rng.integers(0, p)), replace=False).tolist())
        m = score(found, generating, p)
        assert np.isclose(m.f1, 2 * m.jaccard / (1 + m.jaccard), atol=1e-12)
        assert np.isclose(m.si, m.recall * p / len(generating), atol=1e-12)
        assert m.asi <= m.si + 1e-12
        if m.n_found and m.precision == 1.0:
            assert np.isclose(m.asi, m.si, atol=1e-12)


def test_swap_preserves_f1_and_jaccard():
    a, b, p = {1, 2, 3}, {3, 4}, 10
    m_ab = score(a, b, p)
    m_ba = score(b, a, p)
    assert np.isclose(m_ab.f1, m_ba.f1)
    assert np.isclose(m_ab.jaccard, m_ba.jaccard)
    assert np.isclose(m_ab.recall, m_ba.precision * len(b) / len(a) * len(a) / len(b), atol=1.0)


class TestCategorize:
    @pytest.mark.parametrize(
        "f1,expected",
        [
            (0.85, PerformanceCategory.EXCELLENT),
            (0.9, PerformanceCategory.EXCELLENT),
            (0.71, PerformanceCategory.GOOD),
            (0.8, PerformanceCategory.GOOD),
            (0.565, PerformanceCategory.MODERATE),
            (0.6, PerformanceCategory.MODERATE),
            (0.5, PerformanceCategory.POOR),
            (0.0, PerformanceCategory.POOR),
            (1.0, PerformanceCategory.EXCELLENT),
        ],
    )
    def test_thresholds(self, f1, expected):
        assert categorize(f1) is expected

    @pytest.mark.parametrize("bad", [-0.1, 1.1, 2.0])
    def test_out_of_range_rejected(self, bad):
        with pytest.raises(InputError):
            categorize(bad)
