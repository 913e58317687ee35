"""Exact tree construction from a multiset snapshot.

``build`` handles any schema through the generic sweeps; ``build_categorical``
produces the same tree for all-categorical schemas from per-value counters,
moving only the smaller side of each split so repartitioning stays cheap.
Both stop at the same rules: size floor k, Gini at most alpha/2, or the
depth cap; a chosen split that fails to separate the node also stops it.
"""

from __future__ import annotations

import numpy as np

from .core import (
    ActiveMultiset,
    FeasibilityParams,
    FeatureKind,
    LabeledExample,
    Schema,
    SchemaError,
    Split,
    TreeNode,
)
from .gini import TIE_TOL, _gain_from_counts, _gini_from_counts, _sweep_numeric


def _leaf(entries, idx, schema, eta: int, total: int, ones: int) -> TreeNode:
    sub = ActiveMultiset._from_sorted_items(
        [entries[i] for i in idx.tolist()], schema, total=total
    )
    return TreeNode(
        depth=eta,
        size=total,
        leaf_label=1 if ones > total - ones else 0,
        leaf_examples=sub,
        label_hist=[total - ones, ones],
        height=0,
    )


def _separating_split(idx, kinds, numcol, catcol, X):
    """Lowest (feature, value) split with both sides nonempty, or None."""
    for j, kind in enumerate(kinds):
        if kind is FeatureKind.REAL:
            col = X[idx, numcol[j]]
            lo = col.min()
            if col.max() > lo:
                return j, float(lo)
        else:
            col = catcol[j]
            values = {col[i] for i in idx.tolist()}
            if len(values) > 1:
                return j, min(values)
    return None


def build(s: ActiveMultiset, eta: int, params: FeasibilityParams) -> TreeNode:
    """Build an exact tree for s with the node built at depth eta.

    Every split maximizes Gini gain over all features and observed
    thresholds, ties to the lowest feature then the lowest threshold.
    Fresh nodes carry size = subtree size and a zeroed pending counter.
    """
    return _build_entries(s.items_list(), s.schema, eta, params)


def _build_entries(
    entries: list, schema, eta: int, params: FeasibilityParams
) -> TreeNode:
    # Internal: entries is a sorted (example, count) list, as stored in
    # leaf dictionaries, so sub-multisets can be formed without resorting.
    n = len(entries)
    if n == 0:
        empty = ActiveMultiset(schema)
        return TreeNode(depth=eta, size=0, leaf_label=0, leaf_examples=empty,
                        label_hist=[0, 0], height=0)

    d = schema.arity if schema is not None else len(entries[0][0].features)
    kinds = schema.kinds if schema is not None else (FeatureKind.REAL,) * d
    w = np.fromiter((c for _, c in entries), dtype=np.int64, count=n)
    y = np.fromiter((e.label for e, _ in entries), dtype=np.int64, count=n)
    wy = w * y
    num = [j for j in range(d) if kinds[j] is FeatureKind.REAL]
    X = None
    if len(num) == d:
        X = np.array([e.features for e, _ in entries], dtype=np.float64)
    elif num:
        X = np.empty((n, len(num)), dtype=np.float64)
        for jj, j in enumerate(num):
            X[:, jj] = [e.features[j] for e, _ in entries]
    numcol = {j: jj for jj, j in enumerate(num)}
    catcol = {
        j: [e.features[j] for e, _ in entries]
        for j in range(d)
        if kinds[j] is FeatureKind.CATEGORICAL
    }

    def recurse(idx: np.ndarray, eta: int) -> TreeNode:
        wi = w[idx]
        total = int(wi.sum())
        ones = int(wy[idx].sum())
        g = _gini_from_counts(total, ones)
        if total <= params.k or g <= params.alpha / 2.0 or params.depth_capped(eta):
            return _leaf(entries, idx, schema, eta, total, ones)

        wyi = wy[idx]
        idx_list = None
        best = None  # (feature, threshold, left, left_ones, gain)
        best_gain = -1.0
        for j in range(d):
            if kinds[j] is FeatureKind.REAL:
                thr, left, left_ones = _sweep_numeric(
                    X[idx, numcol[j]], wi, wyi, total, ones
                )
            else:
                if idx_list is None:
                    idx_list = idx.tolist()
                col = catcol[j]
                acc: dict = {}
                for i, cnt, lab in zip(idx_list, wi.tolist(), y[idx].tolist()):
                    cell = acc.get(col[i])
                    if cell is None:
                        acc[col[i]] = [cnt, cnt * lab]
                    else:
                        cell[0] += cnt
                        cell[1] += cnt * lab
                thr, left, left_ones, vgain = None, 0, 0, -1.0
                for v in sorted(acc):
                    lw, lw1 = acc[v]
                    cand = _gain_from_counts(total, ones, lw, lw1)
                    if cand > vgain + TIE_TOL:
                        thr, left, left_ones, vgain = v, lw, lw1, cand
            gain = _gain_from_counts(total, ones, left, left_ones)
            if gain > best_gain + TIE_TOL:
                best = (j, thr, left, left_ones, gain)
                best_gain = gain

        j, thr, left, left_ones, gain = best
        if kinds[j] is FeatureKind.REAL:
            mask = X[idx, numcol[j]] <= thr
        else:
            col = catcol[j]
            if idx_list is None:
                idx_list = idx.tolist()
            mask = np.fromiter((col[i] == thr for i in idx_list), dtype=bool,
                               count=len(idx_list))
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if len(left_idx) == 0 or len(right_idx) == 0:
            # the argmax split fails to separate, which only happens when
            # every gain is 0; fall back to the first split that makes
            # progress so children keep shrinking, else stop here
            sep = _separating_split(idx, kinds, numcol, catcol, X)
            if sep is None:
                return _leaf(entries, idx, schema, eta, total, ones)
            j, thr, gain = sep[0], sep[1], 0.0
            if kinds[j] is FeatureKind.REAL:
                mask = X[idx, numcol[j]] <= thr
            else:
                col = catcol[j]
                if idx_list is None:
                    idx_list = idx.tolist()
                mask = np.fromiter((col[i] == thr for i in idx_list),
                                   dtype=bool, count=len(idx_list))
            left_idx = idx[mask]
            right_idx = idx[~mask]

        lnode = recurse(left_idx, eta + 1)
        rnode = recurse(right_idx, eta + 1)
        return TreeNode(
            depth=eta,
            size=total,
            split=Split(j, thr, categorical=kinds[j] is FeatureKind.CATEGORICAL),
            split_gain=gain,
            left=lnode,
            right=rnode,
            height=1 + max(lnode.height, rnode.height),
        )

    return recurse(np.arange(n), eta)


class _CatCounters:
    """Per-feature value counters plus id buckets for one node's examples."""

    __slots__ = ("ids", "counts", "buckets", "n0", "n1")

    def __init__(self, d: int):
        self.ids: set[int] = set()
        self.counts = [dict() for _ in range(d)]   # value -> [w0, w1]
        self.buckets = [dict() for _ in range(d)]  # value -> set of ids
        self.n0 = 0
        self.n1 = 0

    def add(self, i: int, features: tuple, cnt: int, label: int) -> None:
        self.ids.add(i)
        if label:
            self.n1 += cnt
        else:
            self.n0 += cnt
        for j, v in enumerate(features):
            cell = self.counts[j].get(v)
            if cell is None:
                self.counts[j][v] = [0, 0]
                self.buckets[j][v] = set()
                cell = self.counts[j][v]
            cell[label] += cnt
            self.buckets[j][v].add(i)

    def remove(self, i: int, features: tuple, cnt: int, label: int) -> None:
        self.ids.discard(i)
        if label:
            self.n1 -= cnt
        else:
            self.n0 -= cnt
        for j, v in enumerate(features):
            cell = self.counts[j][v]
            cell[label] -= cnt
            bucket = self.buckets[j][v]
            bucket.discard(i)
            if not bucket:
                del self.buckets[j][v]
                del self.counts[j][v]


def build_categorical(
    s: ActiveMultiset, eta: int, params: FeasibilityParams
) -> TreeNode:
    """Counter-based build for all-categorical schemas.

    Chooses the same splits as ``build`` (gain-maximal equality tests with
    the same tie-breaks) but scores them straight from value counters and
    peels the smaller side of each split out of the parent's counters, so
    one side's structures are reused instead of rebuilt.
    """
    schema = s.schema
    if schema is not None and not schema.all_categorical:
        raise SchemaError("build_categorical needs an all-categorical schema")
    return _build_cat_entries(s.items_list(), schema, eta, params)


def _build_cat_entries(
    entries: list, schema, eta: int, params: FeasibilityParams
) -> TreeNode:
    n = len(entries)
    if n == 0:
        empty = ActiveMultiset(schema)
        return TreeNode(depth=eta, size=0, leaf_label=0, leaf_examples=empty,
                        label_hist=[0, 0], height=0)

    d = schema.arity if schema is not None else len(entries[0][0].features)
    feats = [e.features for e, _ in entries]
    cnts = [c for _, c in entries]
    labs = [e.label for e, _ in entries]

    root = _CatCounters(d)
    for i in range(n):
        root.add(i, feats[i], cnts[i], labs[i])

    def close(state: _CatCounters, eta: int) -> TreeNode:
        total = state.n0 + state.n1
        items = sorted((entries[i] for i in state.ids), key=lambda it: it[0])
        sub = ActiveMultiset._from_sorted_items(items, schema, total=total)
        return TreeNode(
            depth=eta,
            size=total,
            leaf_label=1 if state.n1 > state.n0 else 0,
            leaf_examples=sub,
            label_hist=[state.n0, state.n1],
            height=0,
        )

    def recurse(state: _CatCounters, eta: int) -> TreeNode:
        total = state.n0 + state.n1
        ones = state.n1
        g = _gini_from_counts(total, ones)
        if total <= params.k or g <= params.alpha / 2.0 or params.depth_capped(eta):
            return close(state, eta)

        best_j, best_v, best_gain = 0, None, -1.0
        for j in range(d):
            for v in sorted(state.counts[j]):
                w0, w1 = state.counts[j][v]
                gain = _gain_from_counts(total, ones, w0 + w1, w1)
                if gain > best_gain + TIE_TOL:
                    best_j, best_v, best_gain = j, v, gain

        cell = state.counts[best_j][best_v]
        left_w = cell[0] + cell[1]
        if left_w == total:
            # argmax split puts everything left (all gains are 0); fall
            # back to the first value that separates, else stop here
            fallback = None
            for j in range(d):
                for v in sorted(state.counts[j]):
                    w0, w1 = state.counts[j][v]
                    if w0 + w1 < total:
                        fallback = (j, v, w0 + w1)
                        break
                if fallback is not None:
                    break
            if fallback is None:
                return close(state, eta)
            best_j, best_v, left_w = fallback
            best_gain = 0.0

        left_ids = set(state.buckets[best_j][best_v])
        if 2 * left_w <= total:
            moved_ids, peel_is_left = left_ids, True
        else:
            moved_ids, peel_is_left = state.ids - left_ids, False
        peeled = _CatCounters(d)
        for i in moved_ids:
            state.remove(i, feats[i], cnts[i], labs[i])
            peeled.add(i, feats[i], cnts[i], labs[i])
        left_state, right_state = (
            (peeled, state) if peel_is_left else (state, peeled)
        )

        lnode = recurse(left_state, eta + 1)
        rnode = recurse(right_state, eta + 1)
        return TreeNode(
            depth=eta,
            size=total,
            split=Split(best_j, best_v, categorical=True),
            split_gain=best_gain,
            left=lnode,
            right=rnode,
            height=1 + max(lnode.height, rnode.height),
        )

    return recurse(root, eta)


def builder_for(schema) -> "callable":
    """Pick the counter-based path when every feature is categorical."""
    if schema is not None and schema.all_categorical:
        return build_categorical
    return build
