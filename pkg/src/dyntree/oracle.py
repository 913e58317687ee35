"""Brute-force verification of the tree engine's guarantees.

Everything here recomputes from scratch: node populations come from
routing the ground-truth multiset through the tree, gains from exhaustive
enumeration over every feature and observed threshold, and the exact
variants run in rational arithmetic.  No code is shared with the engine's
incremental machinery beyond the basic multiset type.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import (
    ActiveMultiset,
    FeasibilityParams,
    FeatureKind,
    LabeledExample,
    Schema,
    Split,
    TreeNode,
    make_example,
)
from . import gini as _gini_mod

_SLACK = 1e-12  # float guard on >=/<= comparisons of recomputed quantities


@dataclass
class Violation:
    condition: int
    node_path: str
    detail: str

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "node": self.node_path,
            "detail": self.detail,
        }


@dataclass
class FeasibilityReport:
    ok: bool
    violation: Optional[Violation] = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violation": self.violation.to_dict() if self.violation else None,
        }

    def __str__(self) -> str:
        if self.ok:
            return "feasible"
        v = self.violation
        return f"violated condition ({v.condition}) at {v.node_path}: {v.detail}"


class _Columns:
    """Raw arrays for one ground-truth snapshot."""

    def __init__(self, s: ActiveMultiset):
        entries = list(s.items())
        n = len(entries)
        self.n = n
        self.w = np.fromiter((c for _, c in entries), dtype=np.int64, count=n)
        self.y = np.fromiter((e.label for e, _ in entries), dtype=np.int64, count=n)
        self.wy = self.w * self.y
        if s.schema is not None:
            self.kinds = s.schema.kinds
        elif n:
            self.kinds = Schema.infer(entries[0][0].features).kinds
        else:
            self.kinds = ()
        self.cols = []
        for j, kind in enumerate(self.kinds):
            vals = [e.features[j] for e, _ in entries]
            if kind is FeatureKind.REAL:
                self.cols.append(np.asarray(vals, dtype=np.float64))
            else:
                self.cols.append(np.asarray(vals, dtype=object))


def _counts_for_mask(cols: _Columns, idx: np.ndarray, mask: np.ndarray):
    sel = idx[mask]
    return int(cols.w[sel].sum()), int(cols.wy[sel].sum())


def _split_mask(cols: _Columns, idx: np.ndarray, split: Split) -> np.ndarray:
    col = cols.cols[split.feature]
    sub = col[idx]
    if split.categorical:
        return sub == split.threshold
    return sub <= split.threshold


def _float_gain(total: int, ones: int, left: int, left_ones: int) -> float:
    if left == 0 or left == total or total == 0:
        return 0.0
    right = total - left
    right_ones = ones - left_ones
    p = ones / total
    pl = left_ones / left
    pr = right_ones / right
    g = 2.0 * p * (1.0 - p)
    gl = 2.0 * pl * (1.0 - pl)
    gr = 2.0 * pr * (1.0 - pr)
    return g - (left * gl + right * gr) / total


def _best_gain_for_feature(cols: _Columns, idx: np.ndarray, j: int):
    """(gain, threshold) maximal for feature j over observed values in S_v."""
    total = int(cols.w[idx].sum())
    ones = int(cols.wy[idx].sum())
    sub = cols.cols[j][idx]
    best_gain, best_thr = -1.0, None
    if cols.kinds[j] is FeatureKind.REAL:
        thr = np.unique(sub)
        for t in thr.tolist():
            left, left_ones = _counts_for_mask(cols, idx, sub <= t)
            gain = _float_gain(total, ones, left, left_ones)
            if gain > best_gain + _SLACK:
                best_gain, best_thr = gain, t
    else:
        for t in sorted(set(sub.tolist())):
            left, left_ones = _counts_for_mask(cols, idx, sub == t)
            gain = _float_gain(total, ones, left, left_ones)
            if gain > best_gain + _SLACK:
                best_gain, best_thr = gain, t
    return best_gain, best_thr


def exhaustive_split_search(s: ActiveMultiset):
    """Brute-force best split: (split, gain, per-feature (threshold, gain))."""
    if len(s) == 0:
        raise ValueError("exhaustive_split_search needs a nonempty multiset")
    cols = _Columns(s)
    idx = np.arange(cols.n)
    per_feature = []
    best_j, best_gain = 0, -1.0
    for j in range(len(cols.kinds)):
        gain, thr = _best_gain_for_feature(cols, idx, j)
        per_feature.append((thr, gain))
        if gain > best_gain + _SLACK:
            best_j, best_gain = j, gain
    thr, gain = per_feature[best_j]
    split = Split(best_j, thr, categorical=cols.kinds[best_j] is FeatureKind.CATEGORICAL)
    return split, gain, tuple(per_feature)


def _separable(cols: _Columns, idx: np.ndarray) -> bool:
    """Whether some split puts at least one example on each side, which
    holds exactly when some feature takes two distinct values on S_v."""
    for j in range(len(cols.kinds)):
        sub = cols.cols[j][idx]
        if len(sub) and not (sub == sub[0]).all():
            return True
    return False


def check_feasibility(
    tree, s: ActiveMultiset, params: FeasibilityParams
) -> FeasibilityReport:
    """Verify the three feasibility conditions on every node.

    Node populations are recomputed by routing s from the root; split
    quality is judged against exhaustive search over every feature and
    every threshold observed in that node's population.  Returns the first
    violation in preorder, if any.

    A node whose examples all share one feature vector is exempt from the
    internal-force clause of condition (1): no split separates it, so a
    leaf is the only way such a node can terminate.
    """
    root = tree.root if hasattr(tree, "root") else tree
    cols = _Columns(s)
    stack = [(root, np.arange(cols.n), 0, "root")]
    while stack:
        node, idx, depth, name = stack.pop()
        total = int(cols.w[idx].sum())
        ones = int(cols.wy[idx].sum())
        pure = ones == 0 or ones == total
        g = 0.0 if total == 0 else 2.0 * (ones / total) * (1.0 - ones / total)

        must_leaf = (
            total <= params.k
            or pure
            or (params.h is not None and depth == params.h)
        )
        if must_leaf and not node.is_leaf:
            return FeasibilityReport(False, Violation(
                1, name,
                f"must be a leaf: |S_v|={total}, gini={g:.6g}, depth={depth}",
            ))
        if (
            not must_leaf
            and g >= params.alpha
            and node.is_leaf
            and _separable(cols, idx)
        ):
            return FeasibilityReport(False, Violation(
                1, name,
                f"must be internal: gini={g:.6g} >= alpha={params.alpha}",
            ))

        if node.is_leaf:
            kept = ones if node.leaf_label == 1 else total - ones
            other = total - kept
            if kept < other:
                return FeasibilityReport(False, Violation(
                    3, name,
                    f"label {node.leaf_label} is a minority: {kept} vs {other}",
                ))
            continue

        best_gain = -1.0
        for j in range(len(cols.kinds)):
            gain, _ = _best_gain_for_feature(cols, idx, j)
            if gain > best_gain:
                best_gain = gain
        mask = _split_mask(cols, idx, node.split)
        left, left_ones = _counts_for_mask(cols, idx, mask)
        own = _float_gain(total, ones, left, left_ones)
        if own + _SLACK < best_gain - params.beta:
            return FeasibilityReport(False, Violation(
                2, name,
                f"split gain {own:.6g} below best {best_gain:.6g} - beta={params.beta}",
            ))
        stack.append((node.right, idx[~mask], depth + 1, name + ".R"))
        stack.append((node.left, idx[mask], depth + 1, name + ".L"))
    return FeasibilityReport(True)


@dataclass
class CounterReport:
    ok: bool
    detail: Optional[str] = None


def check_counters(tree, s: ActiveMultiset, epsilon: float) -> CounterReport:
    """Verify the rebuild counters against the ground-truth populations.

    At rest every node must satisfy (1-eps) size <= |S_v| <= (1+eps) size,
    pending <= eps * size, and a child's pending never exceeds its
    parent's.  Small float guards absorb rounding of the products.
    """
    root = tree.root if hasattr(tree, "root") else tree
    cols = _Columns(s)
    stack = [(root, np.arange(cols.n), None, "root")]
    while stack:
        node, idx, parent_pending, name = stack.pop()
        total = int(cols.w[idx].sum())
        lo = (1.0 - epsilon) * node.size - 1e-9
        hi = (1.0 + epsilon) * node.size + 1e-9
        if not (lo <= total <= hi):
            return CounterReport(
                False,
                f"{name}: |S_v|={total} outside [{lo:.6g}, {hi:.6g}] for size={node.size}",
            )
        if node.pending > epsilon * node.size + 1e-9:
            return CounterReport(
                False,
                f"{name}: pending={node.pending} exceeds eps*size={epsilon * node.size:.6g}",
            )
        if parent_pending is not None and node.pending > parent_pending:
            return CounterReport(
                False,
                f"{name}: pending={node.pending} exceeds parent's {parent_pending}",
            )
        if not node.is_leaf:
            mask = _split_mask(cols, idx, node.split)
            stack.append((node.right, idx[~mask], node.pending, name + ".R"))
            stack.append((node.left, idx[mask], node.pending, name + ".L"))
    return CounterReport(True)


def exact_gini(s: ActiveMultiset) -> Fraction:
    n0, n1 = s.label_counts()
    n = n0 + n1
    if n == 0:
        return Fraction(0)
    return 2 * Fraction(n1, n) * Fraction(n0, n)


def exact_gain(s: ActiveMultiset, split: Split) -> Fraction:
    """Gini gain of one split in exact rational arithmetic."""
    total = ones = left = left_ones = 0
    for e, c in s.items():
        total += c
        ones += c * e.label
        if split.routes_left(e.features):
            left += c
            left_ones += c * e.label
    if total == 0 or left == 0 or left == total:
        return Fraction(0)
    right = total - left
    right_ones = ones - left_ones

    def gini(n, n1):
        return 2 * Fraction(n1, n) * Fraction(n - n1, n)

    g = gini(total, ones)
    return g - (left * gini(left, left_ones) + right * gini(right, right_ones)) / total


def exact_feature_gains(s: ActiveMultiset) -> list[Fraction]:
    """Per feature, the exact maximal gain over observed thresholds."""
    if len(s) == 0:
        raise ValueError("exact_feature_gains needs a nonempty multiset")
    first = next(iter(s))
    d = len(first.features)
    kinds = (
        s.schema.kinds if s.schema is not None else Schema.infer(first.features).kinds
    )
    out = []
    for j in range(d):
        values = sorted({e.features[j] for e in s})
        cat = kinds[j] is FeatureKind.CATEGORICAL
        best = Fraction(0)
        for t in values:
            gain = exact_gain(s, Split(j, t, categorical=cat))
            if gain > best:
                best = gain
        out.append(best)
    return out


def generate_index_instance(
    N: int,
    D: int,
    k: int,
    A: Sequence[Sequence[int]],
    kappa: int,
    ell: int,
) -> tuple[ActiveMultiset, ActiveMultiset]:
    """Hard-instance fixture with closed-form gains.

    Encodes an N x D bit matrix A into a stream over {0,1}^(D + Dbar)
    where Dbar suffix bits name the originating row group.  The full set
    holds 2k examples per group; the reduced set keeps only the groups of
    row kappa and of probe column ell (both in full), on which the best
    split is feature ell with gain exactly 1/6, every other probe feature
    gains exactly 1/8, and the suffix features gain 0.
    """
    if N < 1 or D < 1:
        raise ValueError("N and D must be positive")
    if k < 2 or k % 2 != 0:
        raise ValueError(f"k must be a positive even integer >= 2, got {k}")
    if not 1 <= kappa <= N or not 1 <= ell <= D:
        raise ValueError("kappa must be in [1, N] and ell in [1, D]")
    if len(A) != N or any(len(row) != D for row in A):
        raise ValueError("A must be an N x D 0/1 matrix")

    dbar = math.ceil(math.log2(N + D) + 1)
    schema = Schema.numeric(D + dbar)

    def suffix(i: int) -> tuple[int, ...]:
        return tuple((i >> (dbar - 1 - b)) & 1 for b in range(dbar))

    def group(i: int) -> list[LabeledExample]:
        out = []
        suf = suffix(i)
        for h in range(1, 2 * k + 1):
            label = 1 if h > k else 0
            if i <= N:
                row = A[i - 1]
                head = tuple(
                    (1 - row[j]) if h <= k else row[j] for j in range(D)
                )
            else:
                col = i - N
                on = 1 if h % 2 == 0 else 0
                head = tuple(on if (j + 1) != col else 0 for j in range(D))
            out.append(make_example(head + suf, label))
        return out

    full = ActiveMultiset(schema)
    reduced = ActiveMultiset(schema)
    for i in range(1, N + D + 1):
        for e in group(i):
            full.insert(e)
            if i == kappa or i == N + ell:
                reduced.insert(e)
    return full, reduced


@dataclass
class SmoothnessReport:
    trials: int
    checks: int
    violations: list = field(default_factory=list)
    worst_ratio: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


def _edit_distance_ratio(s1: ActiveMultiset, s2: ActiveMultiset) -> float:
    inter = sum(min(c, s2.count(e)) for e, c in s1.items())
    return (len(s1) + len(s2) - 2 * inter) / max(len(s1), len(s2))


def audit_smoothness(trials: int = 1000, seed: int = 0) -> SmoothnessReport:
    """Randomized audit of the edit-distance smoothness bounds.

    For seeded random multiset pairs related by a batch of edits, checks
    |gini(S) - gini(S')| <= 2.5 ED* and, over a grid of splits,
    |gain(S) - gain(S')| <= 12.5 ED*; every trial also applies a lone edit
    and checks the strict single-edit bound 2 / max(|S|, |S'|).
    """
    rng = random.Random(seed)
    report = SmoothnessReport(trials=trials, checks=0)

    def note(diff, bound, what):
        if bound > 0:
            report.worst_ratio = max(report.worst_ratio, diff / bound)
        if diff > bound:
            report.violations.append({"what": what, "diff": diff, "bound": bound})

    for _ in range(trials):
        d = rng.randint(1, 5)
        n = rng.randint(1, 200)
        grid = rng.randint(2, 8)
        schema = Schema.numeric(d)
        p1 = rng.uniform(0.2, 0.8)

        def draw():
            feats = tuple(float(rng.randrange(grid)) for _ in range(d))
            return make_example(feats, 1 if rng.random() < p1 else 0)

        base = [draw() for _ in range(n)]
        s = ActiveMultiset.from_examples(base, schema)

        s2 = s.copy()
        pool = list(base)
        for _ in range(rng.randrange(41)):
            if pool and rng.random() < 0.5:
                victim = pool.pop(rng.randrange(len(pool)))
                s2.delete(victim)
            else:
                e = draw()
                s2.insert(e)
                pool.append(e)
        ed = _edit_distance_ratio(s, s2)
        note(abs(_gini_mod.gini_index(s) - _gini_mod.gini_index(s2)),
             2.5 * ed, "gini pair")
        report.checks += 1
        for j in range(d):
            seen = sorted(
                {e.features[j] for e in s} | {e.features[j] for e in s2}
            )
            step = max(1, len(seen) // 4)
            for t in seen[::step]:
                split = Split(j, t)
                note(abs(_gini_mod.gini_gain(s, split) - _gini_mod.gini_gain(s2, split)),
                     12.5 * ed, "gain pair")
                report.checks += 1

        s3 = s.copy()
        if len(base) and rng.random() < 0.5:
            s3.delete(rng.choice(base))
        else:
            s3.insert(draw())
        strict = 2.0 / max(len(s), len(s3))
        diff = abs(_gini_mod.gini_index(s) - _gini_mod.gini_index(s3))
        report.worst_ratio = max(report.worst_ratio, diff / strict)
        if not diff < strict:
            report.violations.append(
                {"what": "single edit", "diff": diff, "bound": strict}
            )
        report.checks += 1
    return report
