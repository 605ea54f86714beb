"""Random forest of gini-split decision trees grown on bootstrap samples."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int = 100
    max_features: int | None = None     # None: round(sqrt(n_features))
    min_samples_split: int = 2
    seed: int = 0


@dataclass
class Tree:
    feature: np.ndarray      # int32, -1 for leaves
    threshold: np.ndarray    # float64
    left: np.ndarray         # int32
    right: np.ndarray        # int32
    counts: np.ndarray       # (n_nodes, n_classes) float64 class counts


@dataclass
class ForestModel:
    trees: list[Tree]
    n_classes: int
    n_features: int
    params: ForestParams = field(default_factory=ForestParams)
    oob_score: float | None = None


def gini(counts: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


@numba.njit(cache=True)
def _gini_from(counts, n):
    s = 0.0
    for c in range(counts.shape[0]):
        p = counts[c] / n
        s += p * p
    return 1.0 - s


@numba.njit(cache=True)
def _grow(X, y, samples, n_classes, max_depth, mtry, min_split, seed):
    np.random.seed(seed)
    n_feat = X.shape[1]
    cap = 2 * samples.shape[0] + 1
    feature = -np.ones(cap, dtype=np.int32)
    threshold = np.zeros(cap)
    left = -np.ones(cap, dtype=np.int32)
    right = -np.ones(cap, dtype=np.int32)
    counts = np.zeros((cap, n_classes))

    idx = samples.copy()
    # Explicit stack of (node, start, stop, depth) over the shared index array.
    stack_node = np.empty(cap, dtype=np.int64)
    stack_lo = np.empty(cap, dtype=np.int64)
    stack_hi = np.empty(cap, dtype=np.int64)
    stack_d = np.empty(cap, dtype=np.int64)
    sp = 0
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = idx.shape[0]
    stack_d[0] = 0
    sp = 1
    n_nodes = 1
    perm = np.arange(n_feat)
    vals = np.empty(idx.shape[0])
    lc = np.zeros(n_classes)
    tot = np.zeros(n_classes)

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        depth = stack_d[sp]
        n = hi - lo
        tot[:] = 0.0
        for k in range(lo, hi):
            tot[y[idx[k]]] += 1.0
        counts[node] = tot
        parent = _gini_from(tot, n)
        if parent <= 0.0 or depth >= max_depth or n < min_split:
            continue

        best_gain = 0.0
        best_f = -1
        best_t = 0.0
        # Partial Fisher-Yates draw of mtry candidate features.
        for a in range(mtry):
            b = a + np.random.randint(n_feat - a)
            tmp = perm[a]
            perm[a] = perm[b]
            perm[b] = tmp
        for a in range(mtry):
            f = perm[a]
            for k in range(n):
                vals[k] = X[idx[lo + k], f]
            order = np.argsort(vals[:n], kind="mergesort")
            lc[:] = 0.0
            for r in range(n - 1):
                k = order[r]
                lc[y[idx[lo + k]]] += 1.0
                v0 = vals[k]
                v1 = vals[order[r + 1]]
                if v1 <= v0:
                    continue
                nl = r + 1.0
                nr = n - nl
                gl = 1.0
                gr = 1.0
                for c in range(n_classes):
                    pl = lc[c] / nl
                    pr = (tot[c] - lc[c]) / nr
                    gl -= pl * pl
                    gr -= pr * pr
                gain = parent - (nl * gl + nr * gr) / n
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_f = f
                    best_t = 0.5 * (v0 + v1)
                    if best_t >= v1:
                        best_t = v0
        if best_f < 0:
            continue

        # Partition idx[lo:hi] in place around the threshold.
        i = lo
        j = hi - 1
        while i <= j:
            if X[idx[i], best_f] <= best_t:
                i += 1
            else:
                tmp2 = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp2
                j -= 1
        feature[node] = best_f
        threshold[node] = best_t
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack_node[sp] = n_nodes
        stack_lo[sp] = lo
        stack_hi[sp] = i
        stack_d[sp] = depth + 1
        sp += 1
        stack_node[sp] = n_nodes + 1
        stack_lo[sp] = i
        stack_hi[sp] = hi
        stack_d[sp] = depth + 1
        sp += 1
        n_nodes += 2

    return feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes], counts[:n_nodes]


@numba.njit(cache=True)
def _apply_tree(X, feature, threshold, left, right):
    out = np.empty(X.shape[0], dtype=np.int64)
    for r in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = node
    return out


def tree_predict(tree: Tree, X: np.ndarray) -> np.ndarray:
    leaves = _apply_tree(np.ascontiguousarray(X, dtype=np.float64), tree.feature, tree.threshold,
                         tree.left, tree.right)
    return np.argmax(tree.counts[leaves], axis=1)


def forest_train(X: np.ndarray, y: np.ndarray, n_classes: int, params: ForestParams = ForestParams(),
                 oob: bool = False) -> ForestModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n == 0:
        raise ValueError("empty training set")
    mtry = params.max_features or max(1, int(round(np.sqrt(X.shape[1]))))
    mtry = min(mtry, X.shape[1])
    rng = np.random.default_rng(params.seed)
    trees = []
    oob_votes = np.zeros((n, n_classes)) if oob else None
    for _ in range(params.n_trees):
        boot = rng.integers(0, n, n)
        tree_seed = int(rng.integers(2**31 - 1))
        parts = _grow(X, y, boot, n_classes, params.max_depth, mtry, params.min_samples_split, tree_seed)
        tree = Tree(*parts)
        trees.append(tree)
        if oob:
            out = np.setdiff1d(np.arange(n), boot)
            if out.size:
                oob_votes[out, tree_predict(tree, X[out])] += 1
    score = None
    if oob:
        seen = oob_votes.sum(axis=1) > 0
        score = float(np.mean(np.argmax(oob_votes[seen], axis=1) == y[seen]))
    return ForestModel(trees, n_classes, X.shape[1], params, score)


def forest_votes(model: ForestModel, X: np.ndarray) -> np.ndarray:
    """Per-tree predictions, shape (n_trees, n)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise ValueError("feature length mismatch")
    return np.stack([tree_predict(t, X) for t in model.trees])


def plurality(votes: np.ndarray, n_classes: int) -> np.ndarray:
    """Most frequent class per column of ``votes`` (n_voters, n); ties to the lowest."""
    votes = np.asarray(votes, dtype=np.int64)
    tally = np.zeros((votes.shape[1], n_classes), dtype=np.int64)
    cols = np.arange(votes.shape[1])
    for row in votes:
        np.add.at(tally, (cols, row), 1)
    return np.argmax(tally, axis=1)


def forest_predict(model: ForestModel, X: np.ndarray) -> np.ndarray:
    return plurality(forest_votes(model, X), model.n_classes)
