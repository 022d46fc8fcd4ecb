"""
Incremental quality state for the Gibbs sweep

한 점을 다른 클러스터로 옮겼을 때의 품질을 전체 재계산 없이 구한다.

- KernelQualityCache: S[x, j] = sum_{y in X_j} K(x, y) and kappa_j = kappa(X_j, X_j).
  Moving x from a to b changes kappa_a by -(2 S[x,a] - K(x,x)) and kappa_b by
  +(2 S[x,b] + K(x,x)); S is updated with one column of K.
- KMeansQualityCache: per-cluster centroid, size and SSQ with the usual
  n/(n -/+ 1) |x - c|^2 corrections. Singleton clusters keep SSQ exactly 0.

Each cache is single-owner mutable state. A CRC32 checksum of the label vector is
refreshed on every accepted move; quality_delta refuses to run on a cache whose
labels were changed behind its back, or that no longer matches the partition the
caller passes in.
"""
import logging
import zlib
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from metapart.core.errors import ConsistencyError, EmptyClusterError, IndexOutOfRangeError, ParameterError
from metapart.dataset.schemas import PointSet
from metapart.partition.schemas import Partition
from metapart.quality.core.functionals import KMEANS_EPS
from metapart.quality.core.kernel import gram
from metapart.quality.schemas import KernelSpec, QualityKind

logger = logging.getLogger(__name__)


class QualityCache(ABC):
    """Partition under edit plus the running totals its quality needs."""

    def __init__(self, partition: Partition):
        self.s = partition.s
        self.n = partition.n
        self._labels = partition.array.copy()
        self._sizes = np.bincount(self._labels, minlength=self.s)
        self._checksum = self._crc()

    # ----- bookkeeping -----
    def _crc(self) -> int:
        return zlib.crc32(self._labels.tobytes())

    def verify(self, partition: Optional[Partition] = None) -> None:
        """
        Raise ConsistencyError if the labels were edited outside apply_move, or if
        `partition` (the caller's copy of the state) is not the label vector the cache holds.
        """
        if self._crc() != self._checksum:
            raise ConsistencyError("cache labels changed outside apply_move; rebuild the cache")
        if partition is not None and zlib.crc32(partition.array.tobytes()) != self._checksum:
            raise ConsistencyError("cache is stale for the given partition; rebuild it from that partition")

    def _check_move(self, point: int, target: int) -> None:
        if not 0 <= point < self.n:
            raise IndexOutOfRangeError(f"point {point} outside 0..{self.n - 1}")
        if not 0 <= target < self.s:
            raise ParameterError(f"target cluster {target} outside 0..{self.s - 1}")

    @property
    def labels(self) -> np.ndarray:
        view = self._labels.view()
        view.setflags(write=False)
        return view

    @property
    def sizes(self) -> np.ndarray:
        view = self._sizes.view()
        view.setflags(write=False)
        return view

    def partition(self) -> Partition:
        return Partition(labels=tuple(self._labels.tolist()), s=self.s)

    # ----- quality -----
    @property
    @abstractmethod
    def quality(self) -> float:
        ...

    @abstractmethod
    def candidate_qualities(self, point: int) -> np.ndarray:
        """Quality after moving `point` to each cluster; own cluster gives `quality` exactly."""

    @abstractmethod
    def _move(self, point: int, source: int, target: int) -> None:
        ...

    @abstractmethod
    def recompute(self) -> float:
        """From-scratch quality of the current labels (does not touch the totals)."""

    def quality_delta(self, point: int, target: int, partition: Optional[Partition] = None) -> float:
        self._check_move(point, target)
        self.verify(partition)
        return float(self.candidate_qualities(point)[target])

    def apply_move(self, point: int, target: int) -> "QualityCache":
        self._check_move(point, target)
        source = int(self._labels[point])
        if source == target:
            return self
        if self._sizes[source] == 1:
            raise EmptyClusterError(f"moving point {point} would empty cluster {source}")
        self._move(point, source, target)
        self._labels[point] = target
        self._sizes[source] -= 1
        self._sizes[target] += 1
        self._checksum = self._crc()
        return self


class KernelQualityCache(QualityCache):

    def __init__(self, partition: Partition, points: PointSet, kernel: KernelSpec, K: Optional[np.ndarray] = None):
        super().__init__(partition)
        self.K = gram(points, kernel) if K is None else K
        self._diag = np.diag(self.K).copy()
        onehot = np.eye(self.s)[self._labels]
        self._S = self.K @ onehot
        self._kappa = np.einsum('ij,ij->j', self._S, onehot)

    @property
    def quality(self) -> float:
        return float(self._kappa.sum())

    def candidate_qualities(self, point: int) -> np.ndarray:
        a = self._labels[point]
        row = self._S[point]
        base = self.quality
        removal = 2.0 * row[a] - self._diag[point]
        q = base - removal + 2.0 * row + self._diag[point]
        q[a] = base
        return q

    def _move(self, point: int, source: int, target: int) -> None:
        row = self._S[point]
        kxx = self._diag[point]
        self._kappa[source] -= 2.0 * row[source] - kxx
        self._kappa[target] += 2.0 * row[target] + kxx
        column = self.K[:, point]
        self._S[:, source] -= column
        self._S[:, target] += column

    def recompute(self) -> float:
        onehot = np.eye(self.s)[self._labels]
        return float(np.sum((self.K @ onehot) * onehot))


class KMeansQualityCache(QualityCache):

    def __init__(self, partition: Partition, points: PointSet):
        super().__init__(partition)
        self.X = points.points
        self._centroids = np.zeros((self.s, self.X.shape[1]))
        self._ssq = np.zeros(self.s)
        for j in range(self.s):
            members = self.X[self._labels == j]
            self._centroids[j] = members.mean(axis=0)
            if len(members) > 1:
                self._ssq[j] = np.sum((members - self._centroids[j]) ** 2)

    @property
    def ssq(self) -> float:
        return float(self._ssq.sum())

    @property
    def quality(self) -> float:
        return 1.0 / (KMEANS_EPS + self.ssq)

    def _removal(self, point: int, a: int) -> float:
        na = self._sizes[a]
        if na == 1:
            return 0.0
        if na == 2:
            return float(self._ssq[a])
        x = self.X[point]
        return na / (na - 1.0) * float(np.sum((x - self._centroids[a]) ** 2))

    def candidate_qualities(self, point: int) -> np.ndarray:
        a = self._labels[point]
        x = self.X[point]
        total = self.ssq
        d2 = np.sum((self._centroids - x) ** 2, axis=1)
        addition = self._sizes / (self._sizes + 1.0) * d2
        new_ssq = np.maximum(total - self._removal(point, a) + addition, 0.0)
        q = 1.0 / (KMEANS_EPS + new_ssq)
        q[a] = self.quality
        return q

    def _move(self, point: int, source: int, target: int) -> None:
        x = self.X[point]
        na = self._sizes[source]
        nb = self._sizes[target]

        # source loses x
        if na == 2:
            remaining = np.flatnonzero(self._labels == source)
            remaining = remaining[remaining != point][0]
            self._centroids[source] = self.X[remaining]
            self._ssq[source] = 0.0
        else:
            self._ssq[source] = max(self._ssq[source] - self._removal(point, source), 0.0)
            self._centroids[source] = (na * self._centroids[source] - x) / (na - 1.0)

        # target gains x
        d2 = float(np.sum((x - self._centroids[target]) ** 2))
        self._ssq[target] += nb / (nb + 1.0) * d2
        self._centroids[target] = (nb * self._centroids[target] + x) / (nb + 1.0)

    def recompute(self) -> float:
        total = 0.0
        for j in range(self.s):
            members = self.X[self._labels == j]
            if len(members) > 1:
                total += float(np.sum((members - members.mean(axis=0)) ** 2))
        return 1.0 / (KMEANS_EPS + total)


def build_cache(
    partition: Partition,
    points: PointSet,
    kind: QualityKind = "kernel",
    kernel: Optional[KernelSpec] = None,
    K: Optional[np.ndarray] = None,
) -> QualityCache:
    if partition.n != points.n:
        raise ParameterError(f"partition covers {partition.n} points, dataset has {points.n}")
    if kind == "kernel":
        if kernel is None and K is None:
            raise ParameterError("kernel quality needs a KernelSpec")
        return KernelQualityCache(partition, points, kernel, K=K)
    return KMeansQualityCache(partition, points)


def quality_delta(cache: QualityCache, point: int, target_cluster: int, partition: Optional[Partition] = None) -> float:
    """
    Full-partition quality if `point` moved to `target_cluster`; the cache is untouched.

    Passing the partition the caller believes the cache holds turns a stale cache into
    a ConsistencyError instead of a wrong number.
    """
    return cache.quality_delta(point, target_cluster, partition)


def apply_move(cache: QualityCache, point: int, target_cluster: int) -> QualityCache:
    return cache.apply_move(point, target_cluster)
