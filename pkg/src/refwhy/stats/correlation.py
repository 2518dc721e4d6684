"""Rank correlations: Spearman's rho (mid-ranks) and Kendall's tau-b."""

from __future__ import annotations

import numpy as np
from scipy.stats import norm, t as t_dist

from ..errors import LengthMismatch, TooFewSamples, ZeroVariance
from .agreement import TestResult


def midranks(values) -> np.ndarray:
    """Ranks 1..n with ties receiving the average of their positions."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman_rho(x, y) -> TestResult:
    """Spearman's rho as the Pearson correlation of mid-ranks.

    Significance via t = rho * sqrt((n - 2) / (1 - rho^2)), two-sided.
    """
    x, y, n = _paired(x, y)
    rx, ry = midranks(x), midranks(y)
    sx = rx - rx.mean()
    sy = ry - ry.mean()
    denom = np.sqrt(np.sum(sx**2) * np.sum(sy**2))
    if denom == 0:
        raise ZeroVariance("a sample is constant under ranking")
    rho = float(np.sum(sx * sy) / denom)
    rho = max(-1.0, min(1.0, rho))

    if abs(rho) >= 1.0:
        p = 0.0
    else:
        t = rho * np.sqrt((n - 2) / (1.0 - rho**2))
        p = float(2.0 * t_dist.sf(abs(t), n - 2))
    return TestResult(statistic=rho, p_value=min(p, 1.0), df=n - 2)


def kendall_tau(x, y) -> TestResult:
    """Kendall's tau-b with tie correction.

    tau_b = (C - D) / sqrt((n0 - n1)(n0 - n2)) over concordant and
    discordant pairs; the p-value uses the normal approximation with the
    tie-adjusted variance of S = C - D.
    """
    x, y, n = _paired(x, y)

    s = 0
    for i in range(n):
        dx = x[i + 1 :] - x[i]
        dy = y[i + 1 :] - y[i]
        prod = np.sign(dx) * np.sign(dy)
        s += int(np.sum(prod))

    n0 = n * (n - 1) // 2
    tie_x = _tie_groups(x)
    tie_y = _tie_groups(y)
    n1 = sum(ti * (ti - 1) // 2 for ti in tie_x)
    n2 = sum(ui * (ui - 1) // 2 for ui in tie_y)
    if n0 - n1 == 0 or n0 - n2 == 0:
        raise ZeroVariance("a sample is constant")
    tau = s / np.sqrt(float(n0 - n1) * float(n0 - n2))
    tau = float(max(-1.0, min(1.0, tau)))

    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(ti * (ti - 1) * (2 * ti + 5) for ti in tie_x)
    vu = sum(ui * (ui - 1) * (2 * ui + 5) for ui in tie_y)
    v1 = sum(ti * (ti - 1) for ti in tie_x) * sum(ui * (ui - 1) for ui in tie_y)
    v2 = sum(ti * (ti - 1) * (ti - 2) for ti in tie_x) * sum(
        ui * (ui - 1) * (ui - 2) for ui in tie_y
    )
    var_s = (v0 - vt - vu) / 18.0 + v1 / (2.0 * n * (n - 1)) + v2 / (
        9.0 * n * (n - 1) * (n - 2)
    )
    if var_s <= 0:
        p = 1.0 if s == 0 else 0.0
    else:
        z = s / np.sqrt(var_s)
        p = float(2.0 * norm.sf(abs(z)))
    return TestResult(statistic=tau, p_value=min(p, 1.0), df=None)


def _paired(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise LengthMismatch(f"paired samples differ in length: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise TooFewSamples("rank correlation needs n >= 3")
    return x, y, len(x)


def _tie_groups(values) -> list[int]:
    _, counts = np.unique(values, return_counts=True)
    return [int(c) for c in counts if c > 1]
