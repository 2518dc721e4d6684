"""Two-rater agreement statistics over square contingency tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2, norm

from ..errors import DegenerateTable


@dataclass(frozen=True)
class ContingencyTable:
    """Square rater-agreement table: rows = rater A, columns = rater B."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.labels)
        if k < 2:
            raise ValueError("contingency table needs at least 2 categories")
        if len(self.counts) != k or any(len(row) != k for row in self.counts):
            raise ValueError("counts must be a square k x k matrix")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")
        if self.total == 0:
            raise ValueError("contingency table must have positive total")

    @classmethod
    def from_lists(cls, labels, counts) -> "ContingencyTable":
        return cls(tuple(labels), tuple(tuple(int(c) for c in row) for row in counts))

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)


@dataclass(frozen=True)
class TestResult:
    """Outcome of a statistical test."""

    statistic: float
    p_value: float
    df: int | None = None
    extra: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")


def cohen_kappa(table: ContingencyTable) -> TestResult:
    """Cohen's kappa with its large-sample standard error and 95% CI.

    kappa = (p_o - p_e) / (1 - p_e), where p_o is the diagonal share and
    p_e the chance agreement from the marginal products.  The standard
    error uses the Fleiss-Cohen-Everitt asymptotic variance; `extra`
    carries std_err, ci_low, ci_high, and a one-sided z-test p-value for
    kappa > 0 computed with the null-hypothesis variance.

    Raises DegenerateTable when p_e = 1 (kappa undefined).
    """
    m = table.as_array()
    n = m.sum()
    p = m / n
    row = p.sum(axis=1)
    col = p.sum(axis=0)

    p_o = np.trace(p)
    p_e = float(row @ col)
    if 1.0 - p_e <= 1e-15:
        raise DegenerateTable("chance agreement is 1, kappa undefined")

    kappa = (p_o - p_e) / (1.0 - p_e)

    # Asymptotic variance under the alternative (for the CI).
    one_minus_k = 1.0 - kappa
    diag = np.diag(p)
    a = float(np.sum(diag * (1.0 - (row + col) * one_minus_k) ** 2))
    off = p.copy()
    np.fill_diagonal(off, 0.0)
    # For cell (i, j), i != j, the weight is (col_i + row_j)^2.
    weights = (col[:, None] + row[None, :]) ** 2
    b = one_minus_k**2 * float(np.sum(off * weights))
    c = (kappa - p_e * one_minus_k) ** 2
    var = (a + b - c) / (n * (1.0 - p_e) ** 2)
    se = float(np.sqrt(max(var, 0.0)))

    # Variance under H0: kappa = 0, for the significance test.
    var0 = (p_e + p_e**2 - float(np.sum(row * col * (row + col)))) / (n * (1.0 - p_e) ** 2)
    se0 = float(np.sqrt(max(var0, 0.0)))
    if se0 > 0:
        z = kappa / se0
        p_value = float(norm.sf(z))
    else:
        z = float("inf") if kappa > 0 else 0.0
        p_value = 0.0 if kappa > 0 else 1.0

    half = 1.959963984540054 * se
    return TestResult(
        statistic=float(kappa),
        p_value=p_value,
        df=None,
        extra={
            "std_err": se,
            "ci_low": float(kappa - half),
            "ci_high": float(kappa + half),
            "z": float(z),
            "p_o": float(p_o),
            "p_e": float(p_e),
        },
    )


def bowker_test(table: ContingencyTable) -> TestResult:
    """Bowker's test of symmetry of disagreement.

    chi2 = sum over unordered pairs i < j with n_ij + n_ji > 0 of
    (n_ij - n_ji)^2 / (n_ij + n_ji); df = number of included pairs.
    Pairs with no off-diagonal mass are excluded from df.  For k = 2 this
    is exactly McNemar's test.  A table with no off-diagonal mass at all
    is symmetric by vacuity: statistic 0, df 0, p = 1 by convention.
    """
    m = table.as_array()
    k = m.shape[0]
    stat = 0.0
    df = 0
    for i in range(k):
        for j in range(i + 1, k):
            s = m[i, j] + m[j, i]
            if s > 0:
                stat += (m[i, j] - m[j, i]) ** 2 / s
                df += 1
    if df == 0:
        return TestResult(statistic=0.0, p_value=1.0, df=0)
    p_value = float(chi2.sf(stat, df))
    return TestResult(statistic=float(stat), p_value=p_value, df=df)


def raw_agreement(table: ContingencyTable) -> float:
    """Share of observations on the diagonal (plain percent agreement)."""
    m = table.as_array()
    return float(np.trace(m) / m.sum())


def label_shares(counts: dict[str, int]) -> dict[str, float]:
    """Percentage share per label, over the total of all counts."""
    total = sum(counts.values())
    if total == 0:
        return {k: 0.0 for k in counts}
    return {k: 100.0 * v / total for k, v in counts.items()}
