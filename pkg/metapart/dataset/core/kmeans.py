"""
k-means seed partition (greedy k-means++ + Lloyd) for the sampler
"""
import logging

import numpy as np
from scipy.spatial.distance import cdist

from metapart.core.errors import ParameterError
from metapart.dataset.schemas import PointSet
from metapart.partition.core.ops import canonicalize
from metapart.partition.schemas import Partition

logger = logging.getLogger(__name__)

MAX_ITER = 100


def kmeans_plusplus_init(X: np.ndarray, s: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: each new center is the best of 2 + ln(s) D^2-weighted candidates."""
    n = X.shape[0]
    n_trials = 2 + int(np.log(s))
    centers = np.empty((s, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = cdist(X, centers[:1], metric="sqeuclidean").ravel()

    for c in range(1, s):
        total = closest.sum()
        if total <= 0.0:
            # every point already sits on a center
            candidates = rng.integers(n, size=n_trials)
        else:
            candidates = rng.choice(n, size=n_trials, p=closest / total)
        cand_d2 = cdist(X[candidates], X, metric="sqeuclidean")
        pot = np.minimum(closest, cand_d2)
        best = int(np.argmin(pot.sum(axis=1)))
        centers[c] = X[candidates[best]]
        closest = pot[best]
    return centers


def _repair_empty(X: np.ndarray, labels: np.ndarray, centers: np.ndarray, s: int) -> int:
    """Move the farthest-from-center point into each empty cluster; returns repairs made."""
    repairs = 0
    for j in range(s):
        sizes = np.bincount(labels, minlength=s)
        if sizes[j] > 0:
            continue
        own = np.linalg.norm(X - centers[labels], axis=1)
        own[sizes[labels] < 2] = -np.inf
        donor = int(np.argmax(own))
        labels[donor] = j
        centers[j] = X[donor]
        repairs += 1
    return repairs


def kmeans_seed(points: PointSet, s: int, seed: int) -> Partition:
    """
    Lloyd's algorithm to convergence (no assignment change) or MAX_ITER iterations.

    Returns a canonical partition with exactly s nonempty clusters.
    """
    if s < 2 or s > points.n:
        raise ParameterError(f"k-means needs 2 <= s <= n, got s={s}, n={points.n}")

    X = points.points
    rng = np.random.default_rng(seed)
    centers = kmeans_plusplus_init(X, s, rng)
    labels = np.full(points.n, -1, dtype=np.int64)

    for iteration in range(MAX_ITER):
        new_labels = np.argmin(cdist(X, centers, metric="sqeuclidean"), axis=1)
        repaired = _repair_empty(X, new_labels, centers, s)
        if repaired == 0 and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(s):
            centers[j] = X[labels == j].mean(axis=0)
    else:
        logger.warning(f"k-means stopped at {MAX_ITER} iterations without converging")

    logger.info(f"k-means seed: s={s}, iterations={iteration + 1}, sizes={np.bincount(labels, minlength=s).tolist()}")
    return canonicalize(labels.tolist(), s=s)
