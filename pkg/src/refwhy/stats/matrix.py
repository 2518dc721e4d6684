"""Category-vs-metric rank-correlation matrix with multiple-testing control."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlation import kendall_tau, spearman_rho
from .corrections import benjamini_hochberg, bonferroni


@dataclass(frozen=True)
class MatrixCell:
    rho: float
    rho_p_raw: float
    rho_p_bonferroni: float
    rho_bonf_reject: bool
    rho_p_bh: float
    tau: float
    tau_p_raw: float
    tau_p_bonferroni: float
    tau_bonf_reject: bool
    tau_p_bh: float


@dataclass(frozen=True)
class CorrelationMatrix:
    rows: tuple[str, ...]  # category names
    cols: tuple[str, ...]  # metric names
    cells: dict[tuple[str, str], MatrixCell]
    alpha: float

    @property
    def n_tests(self) -> int:
        return len(self.rows) * len(self.cols)


def build_correlation_matrix(
    metric_values: dict[str, list[float]],
    labels: list[str],
    categories: list[str],
    metrics: list[str],
    alpha: float = 0.05,
) -> CorrelationMatrix:
    """Correlate each category indicator with each metric column.

    Every category is one-hot encoded against the row labels; Spearman's
    rho and Kendall's tau are computed per (category, metric) cell.  Both
    corrections run across all m = len(categories) * len(metrics) cells,
    separately per coefficient family: Bonferroni as the alpha/m
    threshold (plus the equivalent adjusted p), Benjamini-Hochberg as
    adjusted p-values.  Degenerate columns raise from the component tests.
    """
    m = len(categories) * len(metrics)
    if m == 0:
        raise ValueError("need at least one category and one metric")

    rho_stats: list[tuple[float, float]] = []
    tau_stats: list[tuple[float, float]] = []
    keys: list[tuple[str, str]] = []
    for cat in categories:
        indicator = [1.0 if lab == cat else 0.0 for lab in labels]
        for metric in metrics:
            column = metric_values[metric]
            r = spearman_rho(column, indicator)
            t = kendall_tau(column, indicator)
            rho_stats.append((r.statistic, r.p_value))
            tau_stats.append((t.statistic, t.p_value))
            keys.append((cat, metric))

    rho_p = [p for _, p in rho_stats]
    tau_p = [p for _, p in tau_stats]
    threshold, rho_rej = bonferroni(rho_p, alpha)
    _, tau_rej = bonferroni(tau_p, alpha)
    _, rho_bh = benjamini_hochberg(rho_p, alpha)
    _, tau_bh = benjamini_hochberg(tau_p, alpha)

    cells = {}
    for i, key in enumerate(keys):
        cells[key] = MatrixCell(
            rho=rho_stats[i][0],
            rho_p_raw=rho_p[i],
            rho_p_bonferroni=min(rho_p[i] * m, 1.0),
            rho_bonf_reject=i in rho_rej,
            rho_p_bh=rho_bh[i],
            tau=tau_stats[i][0],
            tau_p_raw=tau_p[i],
            tau_p_bonferroni=min(tau_p[i] * m, 1.0),
            tau_bonf_reject=i in tau_rej,
            tau_p_bh=tau_bh[i],
        )
    return CorrelationMatrix(tuple(categories), tuple(metrics), cells, alpha)


def one_hot_columns(name: str, values: list, levels: list | None = None) -> dict[str, list[float]]:
    """Expand a categorical column into "NAME (level)" indicator columns."""
    lv = levels if levels is not None else sorted({str(v) for v in values})
    return {f"{name} ({level})": [1.0 if str(v) == str(level) else 0.0 for v in values] for level in lv}


def write_matrix_csv(matrix: CorrelationMatrix, path: str | Path) -> None:
    """One row per cell: rmc, metric, rho, tau, p_raw, p_bonf_reject, p_bh.

    The p columns describe the Spearman family; the Kendall p-values stay
    available on the matrix object.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rmc", "metric", "rho", "tau", "p_raw", "p_bonf_reject", "p_bh"])
        for cat in matrix.rows:
            for metric in matrix.cols:
                cell = matrix.cells[(cat, metric)]
                writer.writerow(
                    [
                        cat,
                        metric,
                        f"{cell.rho:.6f}",
                        f"{cell.tau:.6f}",
                        f"{cell.rho_p_raw:.6g}",
                        int(cell.rho_bonf_reject),
                        f"{cell.rho_p_bh:.6g}",
                    ]
                )


def write_importance_csv(features: list[str], mda, mdg, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "mda", "mdg"])
        for name, a, g in zip(features, mda, mdg):
            writer.writerow([name, f"{a:.6f}", f"{g:.6f}"])


def write_heatmap_svg(matrix: CorrelationMatrix, path: str | Path, which: str = "rho") -> None:
    """Cell-shaded heat map; BH-significant cells get a bold outline."""
    cw, ch = 26, 18
    left, top = 150, 120
    width = left + cw * len(matrix.cols) + 10
    height = top + ch * len(matrix.rows) + 10

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="9">'
    ]
    for j, metric in enumerate(matrix.cols):
        x = left + j * cw + cw // 2
        parts.append(
            f'<text x="{x}" y="{top - 6}" text-anchor="start" '
            f'transform="rotate(-60 {x} {top - 6})">{_esc(metric)}</text>'
        )
    for i, cat in enumerate(matrix.rows):
        y = top + i * ch + ch - 5
        parts.append(f'<text x="4" y="{y}">{_esc(cat)}</text>')
        for j, metric in enumerate(matrix.cols):
            cell = matrix.cells[(cat, metric)]
            value = cell.rho if which == "rho" else cell.tau
            p_bh = cell.rho_p_bh if which == "rho" else cell.tau_p_bh
            x = left + j * cw
            yy = top + i * ch
            parts.append(
                f'<rect x="{x}" y="{yy}" width="{cw - 1}" height="{ch - 1}" '
                f'fill="{_shade(value)}"/>'
            )
            if p_bh < matrix.alpha:
                parts.append(
                    f'<rect x="{x}" y="{yy}" width="{cw - 1}" height="{ch - 1}" '
                    f'fill="none" stroke="black" stroke-width="1.5"/>'
                )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts), encoding="utf-8")


def _shade(value: float) -> str:
    v = max(-1.0, min(1.0, 0.0 if np.isnan(value) else value))
    if v >= 0:
        r, g, b = 255, int(255 * (1 - v)), int(255 * (1 - v))
    else:
        r, g, b = int(255 * (1 + v)), int(255 * (1 + v)), 255
    return f"rgb({r},{g},{b})"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
