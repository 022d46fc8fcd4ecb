"""
Membership-based partition distances: Rand, VI, NMI
"""
from scipy.stats import entropy
from sklearn import metrics

from metapart.core.errors import DimensionError, UndefinedNormalizationError
from metapart.partition.core.ops import confusion
from metapart.partition.schemas import Partition


def _same_points(p: Partition, q: Partition) -> None:
    if p.n != q.n:
        raise DimensionError(f"partitions cover different point counts ({p.n} vs {q.n})")


def rand_distance(p: Partition, q: Partition) -> float:
    """Fraction of unordered point pairs co-clustered in exactly one of p, q."""
    _same_points(p, q)
    return float(1.0 - metrics.rand_score(p.array, q.array))


def variation_of_information(p: Partition, q: Partition) -> float:
    """VI = H(p) + H(q) - 2 I(p,q) in nats."""
    if p == q:
        return 0.0
    cm = confusion(p, q)
    mi = metrics.mutual_info_score(None, None, contingency=cm.counts)
    vi = entropy(cm.row_marginals) + entropy(cm.col_marginals) - 2.0 * mi
    return float(max(vi, 0.0))


def nmi_distance(p: Partition, q: Partition) -> float:
    """1 - I(p,q) / sqrt(H(p) H(q)); undefined when either partition has one cluster."""
    _same_points(p, q)
    if p.s == 1 or q.s == 1:
        raise UndefinedNormalizationError("NMI is undefined for a single-cluster partition")
    if p == q:
        return 0.0
    nmi = metrics.normalized_mutual_info_score(p.array, q.array, average_method="geometric")
    return float(min(max(1.0 - nmi, 0.0), 1.0))
