"""Statistical battery: agreement, normality, rank correlation, corrections, RF importance."""

from .agreement import ContingencyTable, TestResult, bowker_test, cohen_kappa, label_shares, raw_agreement
from .correlation import kendall_tau, midranks, spearman_rho
from .corrections import benjamini_hochberg, bonferroni
from .distribution import anderson_darling_normal
from .forest import ForestConfig, ForestResult, rf_train_and_importance
from .matrix import (
    CorrelationMatrix,
    MatrixCell,
    build_correlation_matrix,
    one_hot_columns,
    write_heatmap_svg,
    write_importance_csv,
    write_matrix_csv,
)

__all__ = [
    "ContingencyTable",
    "TestResult",
    "cohen_kappa",
    "bowker_test",
    "raw_agreement",
    "label_shares",
    "spearman_rho",
    "kendall_tau",
    "midranks",
    "bonferroni",
    "benjamini_hochberg",
    "anderson_darling_normal",
    "ForestConfig",
    "ForestResult",
    "rf_train_and_importance",
    "CorrelationMatrix",
    "MatrixCell",
    "build_correlation_matrix",
    "one_hot_columns",
    "write_matrix_csv",
    "write_importance_csv",
    "write_heatmap_svg",
]
