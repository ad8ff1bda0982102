"""Depth-limited regression trees grown by greedy variance reduction.

Trees are stored as flat parallel arrays (node id, feature, threshold,
left, right, leaf value) so they serialize directly and can be walked by
the attribution code.  Split thresholds sit at midpoints of consecutive
sorted unique values; ties in gain break toward the lowest feature index,
then the lowest threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF = -1


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray    # int, LEAF for leaves
    threshold: np.ndarray  # float, nan for leaves
    left: np.ndarray       # int, LEAF for leaves
    right: np.ndarray      # int, LEAF for leaves
    value: np.ndarray      # float, nan for internal nodes

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def split_count(self) -> int:
        return int(np.sum(self.feature != LEAF))

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] == LEAF

    def internal_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.feature != LEAF)

    def predict_one(self, x: np.ndarray) -> float:
        node = 0
        while self.feature[node] != LEAF:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return float(self.value[node])

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        cur = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feats = self.feature[cur]
            active = feats != LEAF
            if not active.any():
                break
            rows = np.flatnonzero(active)
            nodes = cur[rows]
            go_left = X[rows, self.feature[nodes]] <= self.threshold[nodes]
            cur[rows] = np.where(go_left, self.left[nodes], self.right[nodes])
        return self.value[cur]

    def leaf_assignments(self, X: np.ndarray) -> np.ndarray:
        cur = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feats = self.feature[cur]
            active = feats != LEAF
            if not active.any():
                return cur
            rows = np.flatnonzero(active)
            nodes = cur[rows]
            go_left = X[rows, self.feature[nodes]] <= self.threshold[nodes]
            cur[rows] = np.where(go_left, self.left[nodes], self.right[nodes])

    def to_rows(self) -> list[list]:
        rows = []
        for i in range(self.n_nodes):
            leaf = self.feature[i] == LEAF
            rows.append([
                i,
                int(self.feature[i]),
                None if leaf else float(self.threshold[i]),
                int(self.left[i]),
                int(self.right[i]),
                float(self.value[i]) if leaf else None,
            ])
        return rows

    @staticmethod
    def from_rows(rows: list[list]) -> "Tree":
        n = len(rows)
        feature = np.empty(n, dtype=np.int64)
        threshold = np.full(n, np.nan)
        left = np.empty(n, dtype=np.int64)
        right = np.empty(n, dtype=np.int64)
        value = np.full(n, np.nan)
        for row in rows:
            i, feat, thr, lc, rc, val = row
            feature[i] = feat
            left[i], right[i] = lc, rc
            if thr is not None:
                threshold[i] = thr
            if val is not None:
                value[i] = val
        return Tree(feature, threshold, left, right, value)


def _best_split(X: np.ndarray, r: np.ndarray, idx: np.ndarray, min_leaf: int):
    """Best (gain, feature, threshold) over one node's rows, or None.

    Gain is the sum-of-squares reduction of splitting; all features and cut
    positions are scored in one vectorized pass.
    """
    sub = X[idx]
    rs = r[idx]
    n = idx.size
    if n < 2 * min_leaf:
        return None
    order = np.argsort(sub, axis=0, kind="stable")
    sv = np.take_along_axis(sub, order, axis=0)
    sr = rs[order]
    csum = np.cumsum(sr, axis=0)
    total = csum[-1]
    cnt_left = np.arange(1, n, dtype=float)[:, None]
    cnt_right = n - cnt_left
    left_sum = csum[:-1]
    right_sum = total[None, :] - left_sum
    gain = (left_sum ** 2 / cnt_left + right_sum ** 2 / cnt_right
            - (total ** 2 / n)[None, :])
    valid = ((cnt_left >= min_leaf) & (cnt_right >= min_leaf)
             & (sv[:-1] < sv[1:]))
    gain = np.where(valid, gain, -np.inf)
    # transpose so argmax tie-breaks by lowest feature, then lowest threshold
    flat = np.argmax(gain.T)
    feat, cut = divmod(flat, n - 1)
    best = gain[cut, feat]
    tol = 1e-12 * (float(np.sum(rs ** 2)) + 1e-30)
    if not np.isfinite(best) or best <= tol:
        return None
    thr = 0.5 * (sv[cut, feat] + sv[cut + 1, feat])
    return float(best), int(feat), float(thr)


def build_tree(X: np.ndarray, r: np.ndarray, max_splits: int, min_leaf: int) -> Tree:
    """Grow a tree on residuals r: best-first, at most max_splits internal
    nodes, every leaf holding at least min_leaf rows."""
    feature = [LEAF]
    threshold = [np.nan]
    left = [LEAF]
    right = [LEAF]
    value = [float(np.mean(r))]
    members = {0: np.arange(X.shape[0], dtype=np.int64)}
    candidates = {}
    if max_splits > 0:
        candidates[0] = _best_split(X, r, members[0], min_leaf)

    splits = 0
    while splits < max_splits:
        live = [(nid, c) for nid, c in candidates.items() if c is not None]
        if not live:
            break
        # largest gain wins; ties break toward the lowest node id
        nid, (gain, feat, thr) = max(live, key=lambda item: (item[1][0], -item[0]))
        idx = members.pop(nid)
        del candidates[nid]
        go_left = X[idx, feat] <= thr
        left_idx, right_idx = idx[go_left], idx[~go_left]

        feature[nid] = feat
        threshold[nid] = thr
        value[nid] = np.nan
        for child_idx in (left_idx, right_idx):
            cid = len(feature)
            feature.append(LEAF)
            threshold.append(np.nan)
            left.append(LEAF)
            right.append(LEAF)
            value.append(float(np.mean(r[child_idx])))
            members[cid] = child_idx
            candidates[cid] = _best_split(X, r, child_idx, min_leaf)
            if child_idx is left_idx:
                left[nid] = cid
            else:
                right[nid] = cid
        splits += 1

    return Tree(np.array(feature, dtype=np.int64), np.array(threshold),
                np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                np.array(value))
