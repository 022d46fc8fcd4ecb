"""
Partition operations: canonical form, confusion matrix, exhaustive enumeration
"""
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from metapart.core.errors import DimensionError, ParameterError, ScaleError
from metapart.partition.schemas import ConfusionMatrix, Partition, _first_occurrence_codes

# enumerate_partitions is a test oracle; S(12, 6) is already ~1.3M
MAX_ENUMERATION_N = 12


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Vectorized first-occurrence relabeling of a raw label vector."""
    return _first_occurrence_codes(np.asarray(labels))


def canonicalize(p: Union[Partition, Sequence[int]], s: Optional[int] = None) -> Partition:
    """
    Relabel so that cluster j is the j-th distinct label met scanning points in order.

    Raw label sequences are validated as partitions first (labels in 0..s-1, no empty
    cluster), so [2, 2, 2] with s=3 raises InvariantViolationError.
    """
    if not isinstance(p, Partition):
        p = Partition.of(p, s=s)
    return Partition(labels=p.canonical, s=p.s)


def confusion(p: Partition, q: Partition) -> ConfusionMatrix:
    if p.n != q.n:
        raise DimensionError(f"partitions cover different point counts ({p.n} vs {q.n})")
    counts = np.zeros((p.s, q.s), dtype=np.int64)
    np.add.at(counts, (p.array, q.array), 1)
    return ConfusionMatrix(counts=counts)


@lru_cache(maxsize=None)
def stirling2(n: int, s: int) -> int:
    """Stirling number of the second kind, S(n,s) = s*S(n-1,s) + S(n-1,s-1)."""
    if n == s:
        return 1
    if n == 0 or s == 0 or s > n:
        return 0
    return s * stirling2(n - 1, s) + stirling2(n - 1, s - 1)


def _restricted_growth(n: int, s: int) -> Iterator[Partition]:
    labels = [0] * n

    def grow(i: int, used: int) -> Iterator[Partition]:
        remaining = n - i
        if remaining == 0:
            if used == s:
                yield Partition(labels=tuple(labels), s=s)
            return
        # not enough points left to open the missing clusters
        if used + remaining < s:
            return
        for c in range(min(used + 1, s)):
            labels[i] = c
            yield from grow(i + 1, max(used, c + 1))

    yield from grow(1, 1)


def enumerate_partitions(n: int, s: int) -> Iterator[Partition]:
    """
    Every partition of n labeled points into exactly s nonempty clusters, canonical.

    Restricted growth strings: a[0] = 0 and a[i] <= max(a[:i]) + 1. Arguments are
    checked at call time, before the first partition is requested.
    """
    if n > MAX_ENUMERATION_N:
        raise ScaleError(f"enumeration is limited to n <= {MAX_ENUMERATION_N}, got n={n}")
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got n={n}, s={s}")
    return _restricted_growth(n, s)


def matched_agreement(p: Partition, q: Partition) -> float:
    """
    Fraction of points whose clusters agree under the best one-to-one cluster matching.

    Args:
        p, q: partitions over the same points (cluster counts may differ)

    Returns:
        value in (0, 1]; 1.0 iff p and q are the same partition
    """
    counts = confusion(p, q).counts
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return float(counts[rows, cols].sum()) / p.n
