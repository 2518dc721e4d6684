"""Cohen's kappa and Bowker's symmetry test."""

from __future__ import annotations

import time

import pytest
from hypothesis import given, strategies as st

from refwhy.errors import DegenerateTable
from refwhy.stats import ContingencyTable, bowker_test, cohen_kappa, label_shares, raw_agreement

GOLDEN = ContingencyTable.from_lists(["No", "Yes"], [[59, 8], [34, 97]])


class TestCohenKappa:
    def test_golden_table(self):
        result = cohen_kappa(GOLDEN)
        assert result.statistic == pytest.approx(0.567, abs=1e-3)
        assert result.extra["std_err"] == pytest.approx(0.057, abs=5e-3)
        assert result.extra["ci_low"] == pytest.approx(0.455, abs=1e-2)
        assert result.extra["ci_high"] == pytest.approx(0.679, abs=1e-2)
        assert result.p_value < 1e-4

    def test_golden_runtime_under_one_ms(self):
        cohen_kappa(GOLDEN)  # warm up
        start = time.perf_counter()
        cohen_kappa(GOLDEN)
        assert time.perf_counter() - start < 1e-3

    def test_perfect_diagonal(self):
        table = ContingencyTable.from_lists(["a", "b"], [[50, 0], [0, 50]])
        assert cohen_kappa(table).statistic == pytest.approx(1.0)

    def test_independent_raters(self):
        table = ContingencyTable.from_lists(["a", "b"], [[25, 25], [25, 25]])
        assert cohen_kappa(table).statistic == pytest.approx(0.0)

    def test_degenerate_table_raises(self):
        table = ContingencyTable.from_lists(["a", "b"], [[10, 0], [0, 0]])
        with pytest.raises(DegenerateTable):
            cohen_kappa(table)

    @given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
    def test_permutation_invariance(self, a, b, c, d):
        # kappa is invariant under simultaneously permuting both raters' labels
        if a + d == 0 or b + c + a + d == 0:
            return
        counts = [[a, b], [c, d]]
        swapped = [[d, c], [b, a]]
        try:
            k1 = cohen_kappa(ContingencyTable.from_lists(["x", "y"], counts)).statistic
            k2 = cohen_kappa(ContingencyTable.from_lists(["y", "x"], swapped)).statistic
        except DegenerateTable:
            return
        assert k1 == pytest.approx(k2, abs=1e-12)

    def test_three_by_three(self):
        table = ContingencyTable.from_lists(
            ["a", "b", "c"], [[20, 2, 1], [3, 15, 2], [1, 2, 18]]
        )
        result = cohen_kappa(table)
        assert 0.0 < result.statistic < 1.0
        assert result.extra["std_err"] > 0


class TestBowker:
    def test_golden_table(self):
        result = bowker_test(GOLDEN)
        assert result.statistic == pytest.approx(16.095, abs=1e-3)
        assert result.df == 1
        assert result.p_value < 1e-4

    def test_two_by_two_equals_mcnemar(self):
        # McNemar: (b - c)^2 / (b + c) over the off-diagonal cells
        result = bowker_test(GOLDEN)
        assert result.statistic == pytest.approx((8 - 34) ** 2 / (8 + 34), abs=1e-12)

    def test_symmetric_table(self):
        table = ContingencyTable.from_lists(["a", "b"], [[10, 5], [5, 10]])
        result = bowker_test(table)
        assert result.statistic == 0.0
        assert result.p_value == pytest.approx(1.0)

    def test_three_by_three_pair_formula(self):
        # pairs (12,4), (3,3), (0,8): (12-4)^2/16 + 0 + 64/8 = 4 + 0 + 8 = 12
        table = ContingencyTable.from_lists(
            ["a", "b", "c"], [[5, 12, 3], [4, 5, 0], [3, 8, 5]]
        )
        result = bowker_test(table)
        assert result.statistic == pytest.approx(12.0)
        assert result.df == 3

    def test_zero_mass_pairs_excluded_from_df(self):
        table = ContingencyTable.from_lists(
            ["a", "b", "c"], [[5, 1, 0], [2, 5, 0], [0, 0, 5]]
        )
        assert bowker_test(table).df == 1

    def test_no_off_diagonal_mass(self):
        table = ContingencyTable.from_lists(["a", "b"], [[7, 0], [0, 3]])
        result = bowker_test(table)
        assert (result.statistic, result.df, result.p_value) == (0.0, 0, 1.0)

    def test_statistic_zero_iff_symmetric(self):
        sym = ContingencyTable.from_lists(["a", "b", "c"], [[1, 2, 3], [2, 1, 4], [3, 4, 1]])
        asym = ContingencyTable.from_lists(["a", "b", "c"], [[1, 2, 3], [2, 1, 4], [3, 5, 1]])
        assert bowker_test(sym).statistic == 0.0
        assert bowker_test(asym).statistic > 0.0


class TestAgreementHelpers:
    def test_raw_agreement_golden(self):
        assert 100 * raw_agreement(GOLDEN) == pytest.approx(78.79, abs=1e-2)

    def test_label_shares_golden(self):
        shares = label_shares({"yes": 105, "no": 49, "extends": 44})
        assert shares["yes"] == pytest.approx(53.03, abs=1e-2)
        assert shares["no"] == pytest.approx(24.74, abs=1e-2)
        assert shares["extends"] == pytest.approx(22.22, abs=1e-2)
