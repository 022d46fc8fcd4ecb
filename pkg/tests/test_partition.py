import numpy as np
import pytest

from metapart.core.errors import DimensionError, InvariantViolationError, ParameterError, ScaleError
from metapart.partition.core.ops import canonicalize, confusion, enumerate_partitions, matched_agreement, stirling2
from metapart.partition.schemas import Partition


def test_canonicalize_relabels_by_first_occurrence():
    p = canonicalize([2, 2, 0, 1, 0], s=3)
    assert p.labels == (0, 0, 1, 2, 1)


def test_canonicalize_is_idempotent():
    p = canonicalize([1, 0, 1, 2], s=3)
    assert canonicalize(p).labels == p.labels


def test_canonicalize_rejects_empty_cluster():
    with pytest.raises(InvariantViolationError):
        canonicalize([2, 2, 2], s=3)


def test_partition_equality_ignores_cluster_names():
    a = Partition.of([1, 1, 0, 0])
    b = Partition.of([0, 0, 1, 1])
    assert a == b
    assert hash(a) == hash(b)
    assert len({a, b}) == 1


def test_from_labels_accepts_strings():
    p = Partition.from_labels(["setosa", "virginica", "setosa", "versicolor"])
    assert p.s == 3
    assert p.labels == (0, 1, 0, 2)


def test_out_of_range_label_rejected():
    with pytest.raises(InvariantViolationError):
        Partition(labels=(0, 1, 2), s=2)


def test_confusion_counts_and_marginals():
    p = Partition.of([0, 0, 1, 1])
    q = Partition.of([0, 1, 0, 1])
    cm = confusion(p, q)
    assert cm.counts.tolist() == [[1, 1], [1, 1]]
    assert cm.n == 4
    assert cm.row_marginals.tolist() == p.sizes().tolist()
    assert cm.col_marginals.tolist() == q.sizes().tolist()


def test_confusion_of_merged_pair():
    cm = confusion(Partition.of([0, 0, 1]), Partition.of([0, 1, 1]))
    assert cm.counts.tolist() == [[1, 1], [0, 1]]


def test_confusion_transposes_when_swapped():
    p = Partition.of([0, 0, 1, 2, 2])
    q = Partition.of([0, 1, 1, 1, 0])
    assert np.array_equal(confusion(q, p).counts, confusion(p, q).transpose().counts)


def test_confusion_dimension_mismatch():
    with pytest.raises(DimensionError):
        confusion(Partition.of([0, 1]), Partition.of([0, 1, 1]))


def test_enumerate_small_space():
    parts = list(enumerate_partitions(3, 2))
    assert [p.labels for p in parts] == [(0, 0, 1), (0, 1, 0), (0, 1, 1)]


@pytest.mark.parametrize("n,s", [(4, 2), (5, 3), (6, 3), (8, 2), (7, 4)])
def test_enumeration_matches_stirling(n, s):
    parts = list(enumerate_partitions(n, s))
    assert len(parts) == stirling2(n, s)
    assert len(set(parts)) == len(parts)
    assert all(p.labels == p.canonical for p in parts)


def test_stirling_known_values():
    assert stirling2(8, 2) == 127
    assert stirling2(5, 3) == 25
    assert stirling2(10, 5) == 42525
    assert stirling2(4, 4) == 1


def test_enumeration_limits_are_checked_at_call_time():
    with pytest.raises(ScaleError):
        enumerate_partitions(13, 2)
    with pytest.raises(ParameterError):
        enumerate_partitions(3, 4)
    with pytest.raises(ParameterError):
        enumerate_partitions(3, 0)


def test_line_format():
    p = Partition.of([0, 1, 1, 0])
    assert Partition.from_line(p.to_line()) == p


def test_matched_agreement():
    p = Partition.of([0, 0, 1, 1, 2, 2])
    assert matched_agreement(p, Partition.of([2, 2, 0, 0, 1, 1])) == 1.0
    assert matched_agreement(p, Partition.of([0, 0, 1, 1, 2, 1])) == pytest.approx(5 / 6)
    # unequal cluster counts: only min(s_p, s_q) clusters can be matched
    assert matched_agreement(p, Partition.of([0, 0, 0, 0, 1, 1])) == pytest.approx(4 / 6)
