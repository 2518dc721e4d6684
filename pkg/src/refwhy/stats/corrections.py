"""Multiple-testing corrections: Bonferroni and Benjamini-Hochberg."""

from __future__ import annotations

from ..errors import DomainError


def bonferroni(p_values: list[float], alpha: float) -> tuple[float, set[int]]:
    """Family-wise correction by a global threshold of alpha / m.

    Returns (threshold, rejected index set); an index is rejected when
    its p-value is strictly below the threshold.
    """
    _check(p_values, alpha)
    m = len(p_values)
    threshold = alpha / m
    rejections = {i for i, p in enumerate(p_values) if p < threshold}
    return threshold, rejections


def benjamini_hochberg(p_values: list[float], alpha: float) -> tuple[set[int], list[float]]:
    """Step-up false-discovery-rate control.

    Sorts p ascending and finds the largest rank k with
    p_(k) <= k * alpha / m; all ranks up to k are rejected.  Also returns
    BH-adjusted p-values, min(m * p_(i) / i, 1) with monotonicity
    enforced from the largest rank down, mapped back to input order.
    """
    _check(p_values, alpha)
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])

    k_max = 0
    for rank, idx in enumerate(order, start=1):
        if p_values[idx] <= rank * alpha / m:
            k_max = rank
    rejections = set(order[:k_max])

    adjusted_sorted = [min(m * p_values[idx] / rank, 1.0) for rank, idx in enumerate(order, start=1)]
    for i in range(m - 2, -1, -1):
        adjusted_sorted[i] = min(adjusted_sorted[i], adjusted_sorted[i + 1])
    adjusted = [0.0] * m
    for rank_idx, idx in enumerate(order):
        adjusted[idx] = adjusted_sorted[rank_idx]
    return rejections, adjusted


def _check(p_values, alpha):
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if len(p_values) < 1:
        raise DomainError("need at least one p-value")
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"p-value {p} outside [0, 1]")
