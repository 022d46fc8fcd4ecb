"""
Kernel matrix and bandwidth selection
"""
import logging

import numpy as np
from scipy.spatial.distance import cdist, pdist

from metapart.config.settings import settings
from metapart.core.errors import ParameterError
from metapart.dataset.schemas import PointSet
from metapart.quality.schemas import KernelSpec

logger = logging.getLogger(__name__)


def gram(points: PointSet, kernel: KernelSpec) -> np.ndarray:
    """n x n Gaussian kernel matrix with an exact unit diagonal."""
    sq = cdist(points.points, points.points, metric="sqeuclidean")
    K = np.exp(-sq / (2.0 * kernel.bandwidth ** 2))
    np.fill_diagonal(K, 1.0)
    return K


def median_bandwidth(points: PointSet, seed: int, pairs: int = None, scale: float = 1.0) -> KernelSpec:
    """
    Median heuristic: sigma = scale * median distance over a random subsample of point pairs.

    Small datasets (no more than `pairs` pairs) use every pair, so the result does
    not depend on the seed there.
    """
    pairs = pairs or settings.BANDWIDTH_PAIRS
    X = points.points
    n = points.n
    total = n * (n - 1) // 2

    if total <= pairs:
        dists = pdist(X)
    else:
        rng = np.random.default_rng(seed)
        i = rng.integers(0, n, size=pairs)
        # j != i without rejection: shift by 1..n-1
        j = (i + rng.integers(1, n, size=pairs)) % n
        dists = np.linalg.norm(X[i] - X[j], axis=1)

    sigma = float(np.median(dists))
    if sigma <= 0.0:
        sigma = float(pdist(X).max())
        logger.warning(f"Median pairwise distance is 0 (duplicate points); using max distance {sigma}")
    if sigma <= 0.0:
        sigma = 1.0
        logger.warning("All points coincide; using bandwidth 1.0")

    if scale <= 0.0:
        raise ParameterError(f"bandwidth scale must be positive, got {scale}")
    logger.info(f"Median-heuristic bandwidth: median={sigma:.6g} from {dists.size} pairs, scale={scale:g}")
    return KernelSpec(bandwidth=scale * sigma)


def kernel_features(K: np.ndarray) -> np.ndarray:
    """
    Explicit feature map of a Gram matrix: rows Phi with Phi @ Phi.T == K up to rounding.

    Kernel mean embeddings of point sets become plain means of rows of Phi, so
    distances between them are ordinary euclidean distances. Rounding-level negative
    eigenvalues are dropped.
    """
    eigvals, eigvecs = np.linalg.eigh(K)
    keep = eigvals > 0.0
    return eigvecs[:, keep] * np.sqrt(eigvals[keep])
