"""Bonferroni and Benjamini-Hochberg corrections."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from refwhy.errors import DomainError
from refwhy.stats import benjamini_hochberg, bonferroni


class TestBonferroni:
    def test_golden_574_threshold(self):
        threshold, _ = bonferroni([0.5] * 574, 0.05)
        assert threshold == pytest.approx(8.7108e-5, abs=1e-9)

    def test_single_test_threshold_is_alpha(self):
        threshold, rejections = bonferroni([0.01], 0.05)
        assert threshold == 0.05
        assert rejections == {0}

    def test_all_ones_reject_nothing(self):
        _, rejections = bonferroni([1.0] * 20, 0.05)
        assert rejections == set()

    def test_strict_inequality(self):
        threshold, rejections = bonferroni([0.05, 0.049999], 0.1)
        assert threshold == pytest.approx(0.05)
        assert rejections == {1}

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bonferroni([], 0.05)
        with pytest.raises(DomainError):
            bonferroni([0.5], 1.5)
        with pytest.raises(DomainError):
            bonferroni([1.5], 0.05)


class TestBenjaminiHochberg:
    def test_hand_applied_step_up(self):
        # ranks: 0.01 <= 1*0.0125, 0.02 <= 2*0.0125, 0.03 <= 3*0.0125, 0.5 > 0.05
        rejections, adjusted = benjamini_hochberg([0.01, 0.02, 0.03, 0.5], 0.05)
        assert rejections == {0, 1, 2}
        assert adjusted[0] == pytest.approx(0.04)
        assert adjusted[3] == pytest.approx(0.5)

    def test_all_zero_rejected(self):
        rejections, adjusted = benjamini_hochberg([0.0] * 7, 0.05)
        assert rejections == set(range(7))
        assert adjusted == [0.0] * 7

    def test_adjusted_monotone_and_capped(self):
        rng = random.Random(5)
        p = [rng.random() for _ in range(50)]
        _, adjusted = benjamini_hochberg(p, 0.05)
        paired = sorted(zip(p, adjusted))
        for (_, a1), (_, a2) in zip(paired, paired[1:]):
            assert a1 <= a2 + 1e-12
        assert all(0.0 <= a <= 1.0 for a in adjusted)

    def test_step_up_rejects_above_threshold_members(self):
        # 0.04 alone would fail 1*alpha/2 = 0.025 but the step-up pulls it in
        rejections, _ = benjamini_hochberg([0.001, 0.04], 0.05)
        assert rejections == {0, 1}

    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=1, max_size=200),
        st.floats(min_value=0.005, max_value=0.2),
    )
    @settings(max_examples=200)
    def test_bh_dominates_bonferroni(self, p, alpha):
        _, bonf = bonferroni(p, alpha)
        bh, _ = benjamini_hochberg(p, alpha)
        assert bh >= bonf

    def test_dominance_on_seeded_vectors(self):
        rng = random.Random(1234)
        for _ in range(1000):
            m = rng.randint(1, 1000)
            p = [rng.random() ** rng.choice([1, 2, 4]) for _ in range(m)]
            _, bonf = bonferroni(p, 0.05)
            bh, _ = benjamini_hochberg(p, 0.05)
            assert bh >= bonf
