"""
Partition quality functionals

- kernel_quality: Q_K(P) = sum_j sum_{x,x' in X_j} K(x,x'); larger K means more similar.
- kmeans_quality: 1 / (eps + total within-cluster sum of squares around the means).
"""
from typing import Optional

import numpy as np

from metapart.dataset.schemas import PointSet
from metapart.partition.schemas import Partition
from metapart.quality.core.kernel import gram
from metapart.quality.schemas import KernelSpec, QualityKind

KMEANS_EPS = 1e-12


def kernel_quality_from_gram(labels: np.ndarray, K: np.ndarray, s: int) -> float:
    P = np.eye(s)[labels]
    return float(np.sum((K @ P) * P))


def kernel_quality(p: Partition, points: PointSet, k: KernelSpec, K: Optional[np.ndarray] = None) -> float:
    """Sum of within-cluster kernel similarities, self-pairs included."""
    if K is None:
        K = gram(points, k)
    return kernel_quality_from_gram(p.array, K, p.s)


def within_ssq(labels: np.ndarray, X: np.ndarray, s: int) -> float:
    total = 0.0
    for j in range(s):
        members = X[labels == j]
        if len(members) > 1:
            total += float(np.sum((members - members.mean(axis=0)) ** 2))
    return total


def kmeans_quality(p: Partition, points: PointSet) -> float:
    return 1.0 / (KMEANS_EPS + within_ssq(p.array, points.points, p.s))


def quality(p: Partition, points: PointSet, kind: QualityKind, k: KernelSpec) -> float:
    if kind == "kernel":
        return kernel_quality(p, points, k)
    return kmeans_quality(p, points)
