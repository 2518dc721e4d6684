"""Random-forest classifier with permutation (MDA) and Gini (MDG) importances.

CART trees with the Gini split criterion, bootstrap rows, and a random
feature subset per split.  Importances follow the classic definitions:
MDG is the cumulative count-weighted impurity decrease attributed to each
feature, averaged over trees; MDA is the mean out-of-bag accuracy drop,
in percentage points, when a feature's out-of-bag column is permuted.
Every random draw derives from per-tree sub-seeds of the master seed, so
results are deterministic regardless of tree scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset, SingleClass


@dataclass
class ForestConfig:
    n_trees: int = 500
    mtry: int | None = None  # defaults to floor(sqrt(#features))
    min_leaf: int = 1
    seed: int = 0


@dataclass
class _Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_class: np.ndarray
    gini_decrease: np.ndarray  # per-feature accumulated decrease


@dataclass
class ForestResult:
    features: list[str]
    mda: np.ndarray
    mdg: np.ndarray
    oob_accuracy: float
    config: ForestConfig = field(repr=False, default_factory=ForestConfig)

    def ranking(self, measure: str) -> list[int]:
        """Feature indices sorted by the given measure, best first."""
        values = self.mda if measure == "mda" else self.mdg
        return list(np.argsort(-values, kind="stable"))


def rf_train_and_importance(
    x,
    y,
    config: ForestConfig | None = None,
    feature_names: list[str] | None = None,
) -> ForestResult:
    """Train the forest and return per-feature MDA and MDG.

    `x` is an (n, m) numeric matrix with no missing values; `y` holds the
    class labels.  Raises EmptyDataset on zero rows and SingleClass when
    fewer than two classes are present.
    """
    x = np.ascontiguousarray(np.asarray(x, dtype=float))
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyDataset("feature matrix must be non-empty and 2-D")
    classes, y_enc = np.unique(np.asarray(y), return_inverse=True)
    if len(classes) < 2:
        raise SingleClass("need at least two classes")
    n, m = x.shape
    if len(y_enc) != n:
        raise ValueError("x and y row counts differ")

    cfg = config or ForestConfig()
    mtry = cfg.mtry if cfg.mtry is not None else max(1, int(np.sqrt(m)))
    mtry = min(mtry, m)
    names = feature_names if feature_names is not None else [f"f{i}" for i in range(m)]

    master = np.random.default_rng(cfg.seed)
    tree_seeds = master.integers(0, 2**63 - 1, size=cfg.n_trees)

    mdg_sum = np.zeros(m)
    mda_sum = np.zeros(m)
    mda_trees = 0
    oob_votes = np.zeros((n, len(classes)))

    for t in range(cfg.n_trees):
        rng = np.random.default_rng(tree_seeds[t])
        boot = rng.integers(0, n, size=n)
        in_bag = np.zeros(n, dtype=bool)
        in_bag[boot] = True
        oob = np.nonzero(~in_bag)[0]

        tree = _grow_tree(x[boot], y_enc[boot], len(classes), mtry, cfg.min_leaf, rng)
        mdg_sum += tree.gini_decrease

        if len(oob) == 0:
            continue
        x_oob = x[oob]
        y_oob = y_enc[oob]
        base_pred = _predict(tree, x_oob)
        base_acc = float(np.mean(base_pred == y_oob))
        oob_votes[oob, base_pred] += 1.0

        for j in range(m):
            x_perm = x_oob.copy()
            x_perm[:, j] = x_oob[rng.permutation(len(oob)), j]
            perm_acc = float(np.mean(_predict(tree, x_perm) == y_oob))
            mda_sum[j] += base_acc - perm_acc
        mda_trees += 1

    mdg = mdg_sum / cfg.n_trees
    mda = (mda_sum / mda_trees) * 100.0 if mda_trees else np.zeros(m)
    # Ensemble out-of-bag accuracy: majority vote over the trees for which
    # each row was out of bag (rows never out of bag are skipped).
    voted = oob_votes.sum(axis=1) > 0
    if voted.any():
        ensemble_pred = np.argmax(oob_votes[voted], axis=1)
        oob_accuracy = float(np.mean(ensemble_pred == y_enc[voted]))
    else:
        oob_accuracy = 0.0
    return ForestResult(features=list(names), mda=mda, mdg=mdg, oob_accuracy=oob_accuracy, config=cfg)


def _grow_tree(x, y, n_classes, mtry, min_leaf, rng) -> _Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    leaf_class: list[int] = []
    decrease = np.zeros(x.shape[1])

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf_class.append(-1)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(len(y)))]
    while stack:
        node, idx = stack.pop()
        labels = y[idx]
        counts = np.bincount(labels, minlength=n_classes)
        majority = int(np.argmax(counts))
        n_node = len(idx)
        gini_parent = 1.0 - float(np.sum((counts / n_node) ** 2))

        if n_node < 2 * min_leaf or gini_parent == 0.0:
            leaf_class[node] = majority
            continue

        candidates = rng.choice(x.shape[1], size=mtry, replace=False)
        best = _best_split(x, idx, labels, candidates, n_classes, min_leaf, gini_parent)
        if best is None:
            leaf_class[node] = majority
            continue

        feat, thr, delta, left_idx, right_idx = best
        feature[node] = feat
        threshold[node] = thr
        decrease[feat] += delta
        l_id, r_id = new_node(), new_node()
        left[node] = l_id
        right[node] = r_id
        stack.append((l_id, left_idx))
        stack.append((r_id, right_idx))

    return _Tree(
        feature=np.asarray(feature),
        threshold=np.asarray(threshold),
        left=np.asarray(left),
        right=np.asarray(right),
        leaf_class=np.asarray(leaf_class),
        gini_decrease=decrease,
    )


def _best_split(x, idx, labels, candidates, n_classes, min_leaf, gini_parent):
    n_node = len(idx)
    best = None
    best_delta = 1e-12  # require a strictly positive decrease
    onehot = np.eye(n_classes)[labels]

    for feat in candidates:
        values = x[idx, feat]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        # prefix[i] = class counts among the first i sorted rows
        prefix = np.cumsum(onehot[order], axis=0)

        cut = np.nonzero(sv[1:] > sv[:-1])[0] + 1  # left sizes at value boundaries
        if len(cut) == 0:
            continue
        cut = cut[(cut >= min_leaf) & (n_node - cut >= min_leaf)]
        if len(cut) == 0:
            continue

        n_left = cut.astype(float)
        n_right = n_node - n_left
        left_counts = prefix[cut - 1]
        right_counts = prefix[-1] - left_counts
        gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
        delta = n_node * gini_parent - n_left * gini_left - n_right * gini_right

        k = int(np.argmax(delta))
        if delta[k] > best_delta:
            pos = cut[k]
            thr = (sv[pos - 1] + sv[pos]) / 2.0
            best_delta = float(delta[k])
            best = (int(feat), thr, float(delta[k]), idx[order[:pos]], idx[order[pos:]])
    return best


def _predict(tree: _Tree, x) -> np.ndarray:
    idx = np.zeros(len(x), dtype=int)
    rows = np.arange(len(x))
    while True:
        feat = tree.feature[idx]
        active = feat >= 0
        if not active.any():
            break
        a_rows = rows[active]
        a_idx = idx[active]
        go_left = x[a_rows, feat[active]] <= tree.threshold[a_idx]
        idx[a_rows] = np.where(go_left, tree.left[a_idx], tree.right[a_idx])
    return tree.leaf_class[idx]
