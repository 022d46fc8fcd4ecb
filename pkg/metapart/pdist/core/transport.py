"""
Spatially-sensitive partition distance: LiftEMD

각 클러스터를 커널 평균 임베딩으로 올리고 (lift), 클러스터 질량 |X_j|/n 을 가중치로
두 분할의 클러스터 집합 사이 EMD 를 계산한다. The transportation problem is solved
exactly with POT's network simplex.

Clusters are lifted once per partition through an explicit feature map of the Gram
matrix, so a whole row of ground costs is one `ot.dist` call.
"""
import hashlib
import logging
from typing import Optional

import numpy as np
import ot

from metapart.core.errors import BalanceError, ContractError, DimensionError
from metapart.dataset.schemas import PointSet
from metapart.partition.schemas import Partition
from metapart.pdist.schemas import ClusterEmbedding, LiftedClusters
from metapart.quality.core.kernel import gram, kernel_features
from metapart.quality.schemas import KernelSpec

logger = logging.getLogger(__name__)

BALANCE_TOL = 1e-9


def solve_transport(a: np.ndarray, b: np.ndarray, M: np.ndarray) -> float:
    """transport_emd without the input checks, for callers that build valid inputs."""
    # single source or sink: the flow is forced
    if a.size == 1:
        return float(np.dot(b, M[0]))
    if b.size == 1:
        return float(np.dot(a, M[:, 0]))
    # POT wants exactly equal masses
    b = b * (a.sum() / b.sum())
    M = np.ascontiguousarray(M)
    flow = ot.emd(a, b, M)
    return float(np.sum(flow * M))


def transport_emd(weights_a, weights_b, ground) -> float:
    """
    Exact optimum of min sum f_ab * ground[a][b] subject to row sums = weights_a,
    column sums = weights_b, f >= 0.
    """
    a = np.ascontiguousarray(weights_a, dtype=np.float64).ravel()
    b = np.ascontiguousarray(weights_b, dtype=np.float64).ravel()
    M = np.ascontiguousarray(ground, dtype=np.float64)

    if M.shape != (a.size, b.size):
        raise DimensionError(f"ground matrix {M.shape} does not match weights ({a.size}, {b.size})")
    if np.any(a < 0) or np.any(b < 0):
        raise ContractError("transport weights must be nonnegative")
    if not np.all(np.isfinite(M)) or np.any(M < 0):
        raise ContractError("ground costs must be finite and nonnegative")
    sa, sb = a.sum(), b.sum()
    if abs(sa - sb) > BALANCE_TOL or abs(sa - 1.0) > BALANCE_TOL or abs(sb - 1.0) > BALANCE_TOL:
        raise BalanceError(f"weights must each sum to 1 (got {sa!r} and {sb!r})")

    return solve_transport(a, b, M)


def cluster_keys(labels: np.ndarray, s: int) -> np.ndarray:
    """64-bit digest of each cluster's sorted member indices."""
    order = np.argsort(labels, kind="stable")
    bounds = np.cumsum(np.bincount(labels, minlength=s))[:-1]
    keys = np.empty(s, dtype=np.int64)
    for j, members in enumerate(np.split(order.astype(np.int64), bounds)):
        digest = hashlib.blake2b(members.tobytes(), digest_size=8).digest()
        keys[j] = int.from_bytes(digest, "little", signed=True)
    return keys


def lift_partition(p: Partition, features: np.ndarray) -> LiftedClusters:
    """Cluster weights, mean feature vectors and point-set keys of p."""
    onehot = p.onehot()
    sizes = onehot.sum(axis=0)
    return LiftedClusters(
        weights=sizes / float(p.n),
        centroids=(onehot.T @ features) / sizes[:, None],
        keys=cluster_keys(p.array, p.s),
    )


def ground_costs(a: LiftedClusters, centroids: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """
    D(A,B) from every cluster of a to every row of centroids.

    Clusters that are the same point set get exactly 0.
    """
    sq = ot.dist(a.centroids, centroids, metric="sqeuclidean")
    D = np.sqrt(np.maximum(sq, 0.0))
    D[a.keys[:, None] == keys[None, :]] = 0.0
    return D


def lift_emd(p: Partition, q: Partition, points: PointSet, k: KernelSpec, K: Optional[np.ndarray] = None) -> float:
    """EMD between the kernel mean embeddings of the clusters of p and q."""
    if p.n != q.n or p.n != points.n:
        raise DimensionError(f"partitions ({p.n}, {q.n}) and dataset ({points.n}) disagree on n")
    if K is None:
        K = gram(points, k)
    features = kernel_features(K)
    emb = ClusterEmbedding.between(lift_partition(p, features), lift_partition(q, features))
    return solve_transport(emb.weights_a, emb.weights_b, emb.ground())
