"""
Pairwise distance matrices over sample sets, density-based distance, matrix IO
"""
import logging
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from metapart.core.errors import ContractError, IndexOutOfRangeError, ParameterError, ParseError, ReportIOError
from metapart.dataset.schemas import PointSet
from metapart.partition.schemas import Partition
from metapart.pdist.core.membership import nmi_distance, rand_distance, variation_of_information
from metapart.pdist.core.transport import ground_costs, lift_emd, lift_partition, solve_transport
from metapart.pdist.schemas import DistanceMatrix, LiftedClusters, parse_kind
from metapart.quality.core.kernel import gram, kernel_features
from metapart.quality.schemas import KernelSpec
from metapart.sampler.schemas import SampleSet

logger = logging.getLogger(__name__)

MEMBERSHIP = {
    "rand": rand_distance,
    "vi": variation_of_information,
    "nmi": nmi_distance,
}


def _membership_block(rows: Sequence[int], items: List[Partition], metric: Callable) -> List[np.ndarray]:
    m = len(items)
    out = []
    for i in rows:
        row = np.zeros(m)
        for j in range(i + 1, m):
            row[j] = metric(items[i], items[j])
        out.append(row)
    return out


def _lifted_block(
    rows: Sequence[int],
    items: List[LiftedClusters],
    centroids: np.ndarray,
    keys: np.ndarray,
    offsets: np.ndarray,
) -> List[np.ndarray]:
    m = len(items)
    out = []
    for i in rows:
        row = np.zeros(m)
        if i + 1 < m:
            start = offsets[i + 1]
            # ground costs from every cluster of i to every cluster after it, in one call
            M = ground_costs(items[i], centroids[start:], keys[start:])
            for j in range(i + 1, m):
                cols = slice(offsets[j] - start, offsets[j + 1] - start)
                row[j] = solve_transport(items[i].weights, items[j].weights, M[:, cols])
        out.append(row)
    return out


def _base_matrix(m: int, block: Callable, args: tuple, n_jobs: int) -> np.ndarray:
    D = np.zeros((m, m))
    if m < 2:
        return D
    if n_jobs == 1:
        blocks = [list(range(m))]
    else:
        # interleaved rows balance the shrinking upper triangle
        blocks = [list(range(start, m, n_jobs)) for start in range(n_jobs)]
    results = Parallel(n_jobs=n_jobs)(delayed(block)(rows, *args) for rows in blocks)
    for rows, rows_out in zip(blocks, results):
        for i, row in zip(rows, rows_out):
            D[i] = row
    upper = np.triu(D, k=1)
    return upper + upper.T


def _lifted_args(partitions: List[Partition], points: PointSet, kernel: KernelSpec) -> tuple:
    features = kernel_features(gram(points, kernel))
    items = [lift_partition(p, features) for p in partitions]
    offsets = np.concatenate([[0], np.cumsum([it.s for it in items])])
    centroids = np.vstack([it.centroids for it in items])
    keys = np.concatenate([it.keys for it in items])
    return items, centroids, keys, offsets


def pairwise_matrix(
    Z: Union[SampleSet, Sequence[Partition]],
    kind: str,
    points: Optional[PointSet] = None,
    kernel: Optional[KernelSpec] = None,
    n_jobs: int = 1,
) -> DistanceMatrix:
    """
    Symmetric matrix of the chosen distance over Z.

    Repeated partitions (equal up to cluster names) are computed once and their
    rows copied, so a duplicate pair always gets exactly 0.

    Args:
        Z: sample set or list of partitions over the same points
        kind: rand | vi | nmi | liftemd | density(<one of those>)
        points, kernel: required for liftemd (kernel defaults to the sample set's sigma)
        n_jobs: joblib workers; the result does not depend on it
    """
    base, density = parse_kind(kind)
    if isinstance(Z, SampleSet):
        if kernel is None:
            kernel = Z.kernel
        partitions = Z.partitions
    else:
        partitions = list(Z)
    if not partitions:
        raise ParameterError("cannot build a distance matrix over zero partitions")
    n = partitions[0].n
    if any(p.n != n for p in partitions):
        raise ParameterError("all partitions must cover the same points")

    index = {}
    inverse = np.array([index.setdefault(p, len(index)) for p in partitions], dtype=np.int64)
    unique = list(index)
    logger.info(
        f"Computing {kind} distances over {len(partitions)} partitions "
        f"({len(unique)} distinct, n_jobs={n_jobs})"
    )

    if base == "liftemd":
        if points is None or kernel is None:
            raise ParameterError("liftemd needs the point set and a kernel")
        if points.n != n:
            raise ParameterError(f"partitions cover {n} points, dataset has {points.n}")
        values = _base_matrix(len(unique), _lifted_block, _lifted_args(unique, points, kernel), n_jobs)
    else:
        values = _base_matrix(len(unique), _membership_block, (unique, MEMBERSHIP[base]), n_jobs)

    D = DistanceMatrix(values=values[np.ix_(inverse, inverse)], kind=base)
    return density_matrix(D) if density else D

def partition_distance(
    p: Partition,
    q: Partition,
    kind: str,
    points: Optional[PointSet] = None,
    kernel: Optional[KernelSpec] = None,
) -> float:
    """One base distance between two partitions (density kinds need a whole sample set)."""
    base, density = parse_kind(kind)
    if density:
        raise ParameterError(f"{kind} is defined relative to a sample set, not for a single pair")
    if base == "liftemd":
        if points is None or kernel is None:
            raise ParameterError("liftemd needs the point set and a kernel")
        return lift_emd(p, q, points, kernel)
    return MEMBERSHIP[base](p, q)


def density_distance(base: DistanceMatrix, i: int, j: int) -> int:
    """
    Number of samples l != i strictly closer to i than j is.

    Asymmetric: density_distance(base, i, j) and (base, j, i) generally differ.
    """
    m = base.m
    if not (0 <= i < m and 0 <= j < m):
        raise IndexOutOfRangeError(f"indices ({i}, {j}) outside 0..{m - 1}")
    row = base.values[i]
    closer = row < row[j]
    closer[i] = False
    return int(np.count_nonzero(closer))


def density_ranks(base: DistanceMatrix) -> np.ndarray:
    """All density_distance(i, j) at once, m x m, row i = anchor i."""
    D = base.values
    ordered = np.sort(D, axis=1)
    ranks = np.empty(D.shape, dtype=np.int64)
    for i in range(base.m):
        below = np.searchsorted(ordered[i], D[i], side="left")
        # drop l = i itself (distance 0) wherever it was counted
        ranks[i] = below - (D[i] > D[i, i])
    return ranks


def density_matrix(base: DistanceMatrix) -> DistanceMatrix:
    """Symmetrized density distance max(d_Z(i,j), d_Z(j,i))."""
    ranks = density_ranks(base)
    values = np.maximum(ranks, ranks.T).astype(np.float64)
    return DistanceMatrix(values=values, kind=f"density({base.kind})")


# ===== IO =====

def write_distance_matrix(path, D: DistanceMatrix) -> Path:
    path = Path(path)
    try:
        np.savetxt(
            path, D.values, fmt="%.17g", delimiter=",",
            header=f"kind={D.kind} m={D.m}", comments="# ",
        )
    except OSError as e:
        raise ReportIOError(f"cannot write {path}: {e}")
    return path


def read_distance_matrix(path) -> DistanceMatrix:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            header = fh.readline()
    except OSError as e:
        raise ReportIOError(f"cannot read {path}: {e}")
    if not header.startswith("#"):
        raise ParseError(1, "missing '# kind=... m=...' header line")
    fields = dict(tok.split("=", 1) for tok in header.lstrip("#").split() if "=" in tok)
    if "kind" not in fields or "m" not in fields:
        raise ParseError(1, f"bad header {header.strip()!r}")
    try:
        values = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError as e:
        raise ParseError(2, str(e))
    m = int(fields["m"])
    if values.shape != (m, m):
        raise ContractError(f"header announces m={m}, matrix is {values.shape}")
    return DistanceMatrix(values=values, kind=fields["kind"])
