from typing import Any, Hashable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from metapart.core.errors import InvariantViolationError


def _first_occurrence_codes(labels: np.ndarray) -> np.ndarray:
    # 첫 등장 순서대로 0..s-1 재부여
    _, first_idx, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse.reshape(-1)]


class Partition(BaseModel):
    """
    n개의 점을 s개의 비어있지 않은 클러스터로 나눈 분할 (flat assignment vector)

    Equality and hashing go through the canonical form, so two partitions that
    differ only by cluster names compare equal.
    """
    model_config = ConfigDict(frozen=True)

    labels: Tuple[int, ...] = Field(..., min_length=1)
    s: int = Field(..., ge=1)

    _canonical: Tuple[int, ...] = PrivateAttr(default=())

    @model_validator(mode='after')
    def check_clusters(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.min() < 0 or arr.max() >= self.s:
            raise InvariantViolationError(
                f"labels must lie in 0..{self.s - 1}, got range {arr.min()}..{arr.max()}"
            )
        used = np.bincount(arr, minlength=self.s)
        if np.any(used == 0):
            empty = np.flatnonzero(used == 0).tolist()
            raise InvariantViolationError(f"clusters {empty} are empty (s={self.s})")
        return self

    def model_post_init(self, __context: Any) -> None:
        self._canonical = tuple(_first_occurrence_codes(np.asarray(self.labels)).tolist())

    @classmethod
    def of(cls, labels: Sequence[int], s: Optional[int] = None) -> "Partition":
        labels = tuple(int(v) for v in labels)
        if s is None:
            s = max(labels) + 1 if labels else 1
        return cls(labels=labels, s=s)

    @classmethod
    def from_labels(cls, raw: Sequence[Hashable]) -> "Partition":
        """Arbitrary hashable labels, coded 0..s-1 by first occurrence."""
        codes, uniques = pd.factorize(pd.Series(list(raw)), sort=False)
        return cls(labels=tuple(int(c) for c in codes), s=len(uniques))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    @property
    def canonical(self) -> Tuple[int, ...]:
        return self._canonical

    def sizes(self) -> np.ndarray:
        return np.bincount(self.array, minlength=self.s)

    def onehot(self) -> np.ndarray:
        """n x s indicator matrix."""
        return np.eye(self.s)[self.array]

    def to_line(self) -> str:
        return " ".join(str(v) for v in self.labels)

    @classmethod
    def from_line(cls, line: str, s: Optional[int] = None) -> "Partition":
        return cls.of([int(tok) for tok in line.split()], s=s)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._canonical == other._canonical

    def __hash__(self) -> int:
        return hash(self._canonical)

    def __repr__(self) -> str:
        return f"Partition(s={self.s}, labels={list(self.labels)})"


class ConfusionMatrix(BaseModel):
    """Co-membership counts n_ab between two partitions of the same points."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    counts: np.ndarray

    @model_validator(mode='after')
    def check_counts(self):
        if self.counts.ndim != 2 or np.any(self.counts < 0):
            raise InvariantViolationError("confusion counts must be a nonnegative matrix")
        return self

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def transpose(self) -> "ConfusionMatrix":
        return ConfusionMatrix(counts=self.counts.T.copy())
