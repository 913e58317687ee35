"""Gini impurity, split gain, exact split search, and multiset distance.

All engine-side scoring funnels through two scalar kernels so that a gain
reported by the sweep equals what ``gini_gain`` computes for the same
split, bit for bit.  Gains within ``TIE_TOL`` of each other count as tied
and ties resolve to the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ActiveMultiset, FeatureKind, Schema, SchemaError, Split

TIE_TOL = 1e-12


def _gini_from_counts(total: int, ones: int) -> float:
    if total == 0:
        return 0.0
    return 2.0 * (ones / total) * ((total - ones) / total)


def _gain_from_counts(total: int, ones: int, left: int, left_ones: int) -> float:
    # Gain of a two-way split with `left`/`left_ones` mass on the left side.
    # A split with an empty side carries no information: gain 0 by definition.
    if total == 0:
        return 0.0
    right = total - left
    if left == 0 or right == 0:
        return 0.0
    right_ones = ones - left_ones
    g = 2.0 * (ones / total) * ((total - ones) / total)
    gl = 2.0 * (left_ones / left) * ((left - left_ones) / left)
    gr = 2.0 * (right_ones / right) * ((right - right_ones) / right)
    return max(0.0, g - (left * gl + right * gr) / total)


def gini_index(s: ActiveMultiset) -> float:
    """2 p (1 - p) for p the fraction of 1-labels; empty multiset gives 0."""
    n0, n1 = s.label_counts()
    return _gini_from_counts(n0 + n1, n1)


def gini_gain(s: ActiveMultiset, split: Split) -> float:
    """Impurity decrease of routing s through one split."""
    total = ones = left = left_ones = 0
    for e, c in s.items():
        total += c
        ones += c * e.label
        if split.routes_left(e.features):
            left += c
            left_ones += c * e.label
    return _gain_from_counts(total, ones, left, left_ones)


class _Columns:
    """Per-feature views over a multiset snapshot, shared by the sweeps."""

    __slots__ = ("entries", "w", "y", "wy", "total", "ones", "kinds", "_cols")

    def __init__(self, entries, schema: Optional[Schema], d: int):
        self.entries = entries
        n = len(entries)
        self.w = np.fromiter((c for _, c in entries), dtype=np.int64, count=n)
        self.y = np.fromiter((e.label for e, _ in entries), dtype=np.int64, count=n)
        self.wy = self.w * self.y
        self.total = int(self.w.sum())
        self.ones = int(self.wy.sum())
        if schema is not None:
            self.kinds = schema.kinds
        else:
            self.kinds = (FeatureKind.REAL,) * d
        self._cols: dict = {}

    def column(self, j: int):
        col = self._cols.get(j)
        if col is None:
            if self.kinds[j] is FeatureKind.REAL:
                col = np.fromiter(
                    (e.features[j] for e, _ in self.entries),
                    dtype=np.float64,
                    count=len(self.entries),
                )
            else:
                col = [e.features[j] for e, _ in self.entries]
            self._cols[j] = col
        return col


def _sweep_numeric(vals: np.ndarray, w, wy, total: int, ones: int):
    """Best threshold for one real feature: sort once, sweep boundaries.

    Candidate thresholds are the observed distinct values; the last one
    routes everything left and scores 0.  Returns (threshold, left, left_ones)
    of the winner so the caller can finalize the gain through the scalar
    kernel.
    """
    n = len(vals)
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    cw = np.cumsum(w[order])
    cwy = np.cumsum(wy[order])
    boundary = np.empty(n, dtype=bool)
    if n > 1:
        boundary[:-1] = sv[:-1] != sv[1:]
    boundary[-1] = True
    bidx = np.nonzero(boundary)[0]

    wl = cw[bidx].astype(np.float64)
    wyl = cwy[bidx].astype(np.float64)
    wr = total - wl
    wyr = ones - wyl
    g = 2.0 * (ones / total) * ((total - ones) / total)
    dl = np.maximum(wl, 1.0)
    dr = np.maximum(wr, 1.0)
    gl = 2.0 * (wyl / dl) * ((wl - wyl) / dl)
    gr = 2.0 * (wyr / dr) * ((wr - wyr) / dr)
    gains = np.maximum(0.0, g - (wl * gl + wr * gr) / total)
    gains = np.where((wl == 0) | (wr == 0), 0.0, gains)

    best = float(gains.max())
    sel = int(np.nonzero(gains >= best - TIE_TOL)[0][0])
    pos = bidx[sel]
    return float(sv[pos]), int(cw[pos]), int(cwy[pos])


def _sweep_categorical(col: list, w, wy, total: int, ones: int):
    """Best equality split for one categorical feature.

    Scores every observed value a as the split {x_j == a} versus the rest;
    ties resolve to the smallest value.
    """
    acc: dict = {}
    for v, cnt, cnt1 in zip(col, w.tolist(), wy.tolist()):
        cell = acc.get(v)
        if cell is None:
            acc[v] = [cnt, cnt1]
        else:
            cell[0] += cnt
            cell[1] += cnt1
    best_v, best_gain, best_l, best_l1 = None, -1.0, 0, 0
    for v in sorted(acc):
        left, left_ones = acc[v]
        gain = _gain_from_counts(total, ones, left, left_ones)
        if gain > best_gain + TIE_TOL:
            best_v, best_gain, best_l, best_l1 = v, gain, left, left_ones
    return best_v, best_l, best_l1


def best_split_numeric(s: ActiveMultiset, j: int) -> tuple[float, float]:
    """Exact best threshold and gain for real-valued feature j."""
    if len(s) == 0:
        raise ValueError("best_split_numeric needs a nonempty multiset")
    if s.schema is not None and s.schema.kinds[j] is not FeatureKind.REAL:
        raise SchemaError(f"feature {j} is not real-valued")
    cols = _Columns(list(s.items()), s.schema, j + 1)
    thr, left, left_ones = _sweep_numeric(
        cols.column(j), cols.w, cols.wy, cols.total, cols.ones
    )
    return thr, _gain_from_counts(cols.total, cols.ones, left, left_ones)


def best_split_categorical(s: ActiveMultiset, j: int):
    """Exact best equality value and gain for categorical feature j."""
    if len(s) == 0:
        raise ValueError("best_split_categorical needs a nonempty multiset")
    if s.schema is None or s.schema.kinds[j] is not FeatureKind.CATEGORICAL:
        raise SchemaError(f"feature {j} is not categorical")
    cols = _Columns(list(s.items()), s.schema, j + 1)
    v, left, left_ones = _sweep_categorical(
        cols.column(j), cols.w, cols.wy, cols.total, cols.ones
    )
    return v, _gain_from_counts(cols.total, cols.ones, left, left_ones)


@dataclass(frozen=True)
class GainResult:
    """Outcome of an exhaustive split search over all features."""

    best_split: Split
    best_gain: float
    per_feature: tuple


def _search_columns(cols: _Columns, d: int) -> GainResult:
    per_feature = []
    best_j, best_gain = 0, -1.0
    for j in range(d):
        if cols.kinds[j] is FeatureKind.REAL:
            thr, left, left_ones = _sweep_numeric(
                cols.column(j), cols.w, cols.wy, cols.total, cols.ones
            )
        else:
            thr, left, left_ones = _sweep_categorical(
                cols.column(j), cols.w, cols.wy, cols.total, cols.ones
            )
        gain = _gain_from_counts(cols.total, cols.ones, left, left_ones)
        per_feature.append((thr, gain))
        if gain > best_gain + TIE_TOL:
            best_j, best_gain = j, gain
    thr, gain = per_feature[best_j]
    split = Split(best_j, thr, categorical=cols.kinds[best_j] is FeatureKind.CATEGORICAL)
    return GainResult(split, gain, tuple(per_feature))


def best_split(s: ActiveMultiset) -> GainResult:
    """Exact best split over every feature, observed thresholds only."""
    if len(s) == 0:
        raise ValueError("best_split needs a nonempty multiset")
    d = len(next(iter(s)).features)
    cols = _Columns(list(s.items()), s.schema, d)
    return _search_columns(cols, d)


def relative_edit_distance(s1: ActiveMultiset, s2: ActiveMultiset) -> float:
    """Edits to turn s1 into s2, relative to the larger size.

    Delta = |s1| + |s2| - 2 |s1 cap s2| with key-wise minimum multiplicities;
    the ratio can exceed 1 when the sets are near-disjoint.
    """
    n1, n2 = len(s1), len(s2)
    if n1 == 0 and n2 == 0:
        raise ValueError("relative edit distance of two empty multisets")
    small, large = (s1, s2) if s1.distinct_size <= s2.distinct_size else (s2, s1)
    inter = sum(min(c, large.count(e)) for e, c in small.items())
    return (n1 + n2 - 2 * inter) / max(n1, n2)
