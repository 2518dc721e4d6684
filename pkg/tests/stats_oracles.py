"""Brute-force oracles for the rank-correlation statistics.

Kept deliberately naive and independent of the implementations they
check: explicit rank construction plus a textbook Pearson for rho, and
full O(n^2) pair enumeration for tau-b.
"""

from __future__ import annotations

import math


def brute_force_ranks(values) -> list[float]:
    """Average ranks built by explicit position lookup, one value at a time."""
    ranks = []
    for v in values:
        positions = [i + 1 for i, w in enumerate(sorted(values)) if w == v]
        ranks.append(sum(positions) / len(positions))
    return ranks


def brute_force_spearman(x, y) -> float:
    rx = brute_force_ranks(list(x))
    ry = brute_force_ranks(list(y))
    n = len(rx)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    return cov / math.sqrt(vx * vy)


def brute_force_kendall_tau_b(x, y) -> float:
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                ties_x += 1
                ties_y += 1
            elif dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) / 2
    denom = math.sqrt((n0 - ties_x) * (n0 - ties_y))
    return (concordant - discordant) / denom
