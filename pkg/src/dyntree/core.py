"""Core types shared by the tree engine, the oracle, and the harness.

Examples are immutable (features, label) pairs with binary labels.  The
active set is a multiset over examples backed by an ordered map keyed
lexicographically by features then label, so enumeration order is
deterministic regardless of the order updates arrived in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Union

from sortedcontainers import SortedDict


class SchemaError(ValueError):
    """Example shape or feature kind disagrees with the declared schema."""


class ExampleNotFound(KeyError):
    """Deletion of an example that is not in the active set."""


class FeatureKind(enum.Enum):
    REAL = "real"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Schema:
    """Per-position feature kinds for a stream.

    Every feature position is consistently real-valued or consistently
    categorical across a stream; real features split by thresholds
    (x_j <= t goes left), categorical ones by equality (x_j == a goes left).
    """

    kinds: tuple[FeatureKind, ...]

    def __post_init__(self):
        if len(self.kinds) < 1:
            raise SchemaError("schema needs at least one feature")

    @property
    def arity(self) -> int:
        return len(self.kinds)

    @property
    def all_categorical(self) -> bool:
        return all(k is FeatureKind.CATEGORICAL for k in self.kinds)

    @classmethod
    def numeric(cls, d: int) -> "Schema":
        return cls((FeatureKind.REAL,) * d)

    @classmethod
    def categorical(cls, d: int) -> "Schema":
        return cls((FeatureKind.CATEGORICAL,) * d)

    @classmethod
    def infer(cls, features: Sequence) -> "Schema":
        """Derive kinds from one example: numbers are real, all else categorical."""
        kinds = []
        for v in features:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                kinds.append(FeatureKind.CATEGORICAL)
            else:
                kinds.append(FeatureKind.REAL)
        return cls(tuple(kinds))

    def validate(self, features: Sequence) -> None:
        if len(features) != self.arity:
            raise SchemaError(
                f"expected {self.arity} features, got {len(features)}"
            )
        for j, (v, kind) in enumerate(zip(features, self.kinds)):
            numeric = isinstance(v, (int, float)) and not isinstance(v, bool)
            if kind is FeatureKind.REAL and not numeric:
                raise SchemaError(f"feature {j} must be real-valued, got {v!r}")
            if kind is FeatureKind.CATEGORICAL and numeric and isinstance(v, float):
                # int/bool symbols are fine as category codes, bare floats are not
                raise SchemaError(f"feature {j} must be categorical, got {v!r}")


class LabeledExample(NamedTuple):
    """An example with a binary label.

    A NamedTuple so keys compare and hash at tuple speed; ordering is
    lexicographic over features then label.
    """

    features: tuple
    label: int


def make_example(features: Iterable, label: int) -> LabeledExample:
    label = int(label)
    if label not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {label}")
    return LabeledExample(tuple(features), label)


def majority_label(
    source: Union["ActiveMultiset", Mapping[int, int], Sequence[int]]
) -> int:
    """Label with the strictly greater count; ties and empty input give 0."""
    if isinstance(source, ActiveMultiset):
        n0, n1 = source.label_counts()
    elif isinstance(source, Mapping):
        n0, n1 = source.get(0, 0), source.get(1, 0)
    else:
        n0, n1 = source
    return 1 if n1 > n0 else 0


class ActiveMultiset:
    """Multiset of labeled examples keyed by (features, label) with counts.

    Backed by an ordered map, so point updates touch O(log N) keys and a
    full scan enumerates keys once in lexicographic order.  The schema is
    pinned on construction or by the first inserted example.
    """

    __slots__ = ("_entries", "_schema", "_total")

    def __init__(self, schema: Optional[Schema] = None):
        self._entries: SortedDict = SortedDict()
        self._schema = schema
        self._total = 0

    @classmethod
    def from_examples(
        cls, examples: Iterable[LabeledExample], schema: Optional[Schema] = None
    ) -> "ActiveMultiset":
        s = cls(schema)
        for e in examples:
            s.insert(e)
        return s

    @classmethod
    def _from_sorted_items(
        cls,
        items: Iterable[tuple[LabeledExample, int]],
        schema: Optional[Schema],
        total: Optional[int] = None,
    ) -> "ActiveMultiset":
        # Internal: trusted pre-validated (example, count) pairs.
        s = cls(schema)
        s._entries = SortedDict(items)
        s._total = (
            total if total is not None else sum(s._entries.values())
        )
        return s

    def items_list(self) -> list:
        """Sorted (example, count) pairs as a plain list."""
        entries = self._entries
        return [(key, entries[key]) for key in entries]

    @property
    def schema(self) -> Optional[Schema]:
        return self._schema

    @property
    def total_size(self) -> int:
        return self._total

    @property
    def distinct_size(self) -> int:
        return len(self._entries)

    def __len__(self) -> int:
        return self._total

    def __bool__(self) -> bool:
        return self._total > 0

    def __contains__(self, example: LabeledExample) -> bool:
        return example in self._entries

    def __iter__(self) -> Iterator[LabeledExample]:
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActiveMultiset):
            return NotImplemented
        return dict(self._entries) == dict(other._entries)

    def _check(self, example: LabeledExample) -> None:
        if example.label not in (0, 1):
            raise SchemaError(f"label must be 0 or 1, got {example.label!r}")
        if self._schema is None:
            self._schema = Schema.infer(example.features)
        self._schema.validate(example.features)

    def insert(self, example: LabeledExample) -> None:
        self._check(example)
        self._entries[example] = self._entries.get(example, 0) + 1
        self._total += 1

    def delete(self, example: LabeledExample) -> None:
        cnt = self._entries.get(example, 0)
        if cnt == 0:
            raise ExampleNotFound(f"example not in active set: {example}")
        if cnt == 1:
            del self._entries[example]
        else:
            self._entries[example] = cnt - 1
        self._total -= 1

    def count(self, example: LabeledExample) -> int:
        return self._entries.get(example, 0)

    def items(self) -> Iterator[tuple[LabeledExample, int]]:
        return iter(self._entries.items())

    def expanded(self) -> Iterator[LabeledExample]:
        for e, c in self._entries.items():
            for _ in range(c):
                yield e

    def label_counts(self) -> tuple[int, int]:
        n1 = sum(c for e, c in self._entries.items() if e.label == 1)
        return self._total - n1, n1

    def copy(self) -> "ActiveMultiset":
        return ActiveMultiset._from_sorted_items(self._entries.items(), self._schema)


@dataclass(frozen=True)
class Split:
    """One split test.  Real features send x_j <= threshold left,
    categorical ones send x_j == threshold left."""

    feature: int
    threshold: object
    categorical: bool = False

    def routes_left(self, features: Sequence) -> bool:
        v = features[self.feature]
        if self.categorical:
            return v == self.threshold
        return v <= self.threshold


@dataclass(slots=True)
class TreeNode:
    """Node of the dynamic tree.

    Leaves own a multiset of the examples routed to them plus a label
    histogram; every node carries the rebuild counters: ``size`` is the
    subtree size at the time the node was built and ``pending`` counts
    updates routed through it since.
    """

    depth: int
    size: int = 0
    pending: int = 0
    split: Optional[Split] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    split_gain: float = 0.0
    leaf_label: int = 0
    leaf_examples: Optional[ActiveMultiset] = None
    label_hist: Optional[list[int]] = None
    height: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.split is None

    def route_child(self, features: Sequence) -> "TreeNode":
        return self.left if self.split.routes_left(features) else self.right


@dataclass(frozen=True)
class FeasibilityParams:
    """Knobs of the approximation contract.

    ``alpha`` forces splits on nodes whose Gini is at least alpha, ``beta``
    is the allowed slack of a kept split against the current best, ``k``
    is the leaf size floor, ``h`` the depth cap (None = unbounded) and
    ``epsilon`` the drift fraction a subtree tolerates before rebuild.
    """

    epsilon: float
    alpha: float = 0.0
    beta: float = 0.0
    k: int = 1
    h: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.h is not None and self.h < 1:
            raise ValueError(f"h must be a positive integer or None, got {self.h}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")

    @property
    def guaranteed(self) -> bool:
        """True when epsilon is small enough for the maintenance guarantee."""
        if self.epsilon <= 0.0:
            return False
        bound = min(1.0 / (self.k + 1), self.alpha / 5.0, self.beta / 12.5)
        return self.epsilon < bound

    def depth_capped(self, eta: int) -> bool:
        return self.h is not None and eta >= self.h
