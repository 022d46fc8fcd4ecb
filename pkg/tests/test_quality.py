import numpy as np
import pytest

from metapart.core.errors import ConsistencyError, EmptyClusterError, ParameterError
from metapart.core.seeding import STREAM_BANDWIDTH, STREAM_DATA, derive_seed
from metapart.dataset.core.synthetic import generate_2d5c
from metapart.dataset.schemas import PointSet
from metapart.partition.schemas import Partition
from metapart.pipeline.schemas import RunConfig
from metapart.quality.core.cache import (
    KernelQualityCache, KMeansQualityCache, apply_move, build_cache, quality_delta,
)
from metapart.quality.core.functionals import KMEANS_EPS, kernel_quality, kmeans_quality
from metapart.quality.core.kernel import gram, median_bandwidth
from metapart.quality.schemas import KernelSpec
from tests.conftest import random_partition


def test_gram_has_unit_diagonal_and_is_symmetric(random_points, unit_kernel):
    K = gram(random_points, unit_kernel)
    assert np.all(np.diag(K) == 1.0)
    assert np.array_equal(K, K.T)


def test_kernel_quality_singletons_equals_n(unit_kernel):
    points = PointSet(points=[[0.0], [1.0], [5.0]])
    p = Partition.of([0, 1, 2])
    assert kernel_quality(p, points, unit_kernel) == pytest.approx(3.0)


def test_kernel_quality_pair_closed_form(unit_kernel):
    points = PointSet(points=[[0.0], [1.0], [5.0]])
    p = Partition.of([0, 0, 1])
    expected = 3.0 + 2.0 * np.exp(-0.5)
    assert kernel_quality(p, points, unit_kernel) == pytest.approx(expected, rel=1e-12)


def test_kmeans_quality_closed_form():
    points = PointSet(points=[[0.0], [2.0], [10.0]])
    p = Partition.of([0, 0, 1])
    assert kmeans_quality(p, points) == pytest.approx(1.0 / (KMEANS_EPS + 2.0))


def test_kernel_quality_matches_naive_double_sum(unit_kernel):
    points = PointSet(points=[[0.0], [1.0], [10.0]])
    p = Partition.of([0, 0, 1])
    x = points.points[:, 0]
    naive = sum(
        np.exp(-((x[i] - x[j]) ** 2) / 2.0)
        for i in range(3) for j in range(3) if p.labels[i] == p.labels[j]
    )
    assert kernel_quality(p, points, unit_kernel) == pytest.approx(naive, rel=1e-12)
    assert naive == pytest.approx(3.0 + 2.0 * np.exp(-0.5), rel=1e-12)


def test_kmeans_quality_examples():
    assert kmeans_quality(Partition.of([0, 0]), PointSet(points=[[-1.0], [1.0]])) == pytest.approx(1.0 / (2.0 + KMEANS_EPS))
    four = PointSet(points=[[0.0], [2.0], [10.0], [12.0]])
    assert kmeans_quality(Partition.of([0, 0, 1, 1]), four) == pytest.approx(0.25)
    assert kmeans_quality(Partition.of([0, 1, 2]), PointSet(points=[[0.0], [1.0], [2.0]])) == pytest.approx(1.0 / KMEANS_EPS)


def test_reference_beats_mixed_partition(two_blobs, blob_reference, unit_kernel):
    mixed = Partition.of([0, 1, 0, 1, 0, 1, 0, 1])
    assert kernel_quality(blob_reference, two_blobs, unit_kernel) > kernel_quality(mixed, two_blobs, unit_kernel)
    assert kmeans_quality(blob_reference, two_blobs) > kmeans_quality(mixed, two_blobs)


@pytest.mark.parametrize("kind", ["kernel", "kmeans"])
def test_quality_delta_matches_recompute(kind, random_points, unit_kernel):
    rng = np.random.default_rng(0)
    p = random_partition(rng, random_points.n, 4)
    cache = build_cache(p, random_points, kind, unit_kernel)
    for point in range(0, random_points.n, 7):
        for target in range(4):
            predicted = quality_delta(cache, point, target)
            labels = p.array.copy()
            labels[point] = target
            if np.bincount(labels, minlength=4).min() == 0:
                continue
            moved = Partition(labels=tuple(labels.tolist()), s=4)
            if kind == "kernel":
                truth = kernel_quality(moved, random_points, unit_kernel)
            else:
                truth = kmeans_quality(moved, random_points)
            assert predicted == pytest.approx(truth, rel=1e-9)


def test_own_cluster_delta_is_current_quality(random_points, unit_kernel):
    p = random_partition(np.random.default_rng(1), random_points.n, 3)
    cache = KernelQualityCache(p, random_points, unit_kernel)
    assert quality_delta(cache, 5, p.labels[5]) == cache.quality


@pytest.mark.parametrize("kind", ["kernel", "kmeans"])
def test_incremental_quality_does_not_drift(kind, random_points, unit_kernel):
    rng = np.random.default_rng(42)
    s = 4
    cache = build_cache(random_partition(rng, random_points.n, s), random_points, kind, unit_kernel)
    moves = 0
    while moves < 10_000:
        point = int(rng.integers(random_points.n))
        target = int(rng.integers(s))
        if cache.sizes[cache.labels[point]] == 1 and cache.labels[point] != target:
            continue
        apply_move(cache, point, target)
        moves += 1
    assert cache.quality == pytest.approx(cache.recompute(), rel=1e-9)
    if kind == "kernel":
        assert cache.quality == pytest.approx(kernel_quality(cache.partition(), random_points, unit_kernel), rel=1e-9)
    else:
        assert cache.quality == pytest.approx(kmeans_quality(cache.partition(), random_points), rel=1e-9)


def test_move_that_empties_cluster_is_rejected(unit_kernel):
    points = PointSet(points=[[0.0], [1.0], [2.0]])
    cache = KernelQualityCache(Partition.of([0, 0, 1]), points, unit_kernel)
    with pytest.raises(EmptyClusterError):
        cache.apply_move(2, 0)


def test_move_to_own_cluster_is_noop(unit_kernel):
    points = PointSet(points=[[0.0], [1.0], [2.0]])
    cache = KernelQualityCache(Partition.of([0, 0, 1]), points, unit_kernel)
    before = cache.quality
    cache.apply_move(2, 1)
    assert cache.quality == before


def test_kmeans_cache_singleton_ssq_is_exact_zero():
    points = PointSet(points=[[0.0], [1.0], [2.0], [7.0]])
    cache = KMeansQualityCache(Partition.of([0, 0, 1, 1]), points)
    cache.apply_move(2, 0)
    assert cache._ssq[1] == 0.0
    assert cache.quality == pytest.approx(kmeans_quality(cache.partition(), points))


def test_stale_cache_detected(random_points, unit_kernel):
    p = random_partition(np.random.default_rng(2), random_points.n, 3)
    cache = KernelQualityCache(p, random_points, unit_kernel)
    cache._labels[0] = (cache._labels[0] + 1) % 3
    with pytest.raises(ConsistencyError):
        quality_delta(cache, 1, 0)


def test_stale_cache_detected_against_callers_partition(random_points, unit_kernel):
    p = random_partition(np.random.default_rng(2), random_points.n, 3)
    cache = KernelQualityCache(p, random_points, unit_kernel)
    assert quality_delta(cache, 1, 0, partition=p) == pytest.approx(cache.candidate_qualities(1)[0])
    moved = 10
    target = (p.labels[moved] + 1) % 3
    cache.apply_move(moved, target)
    with pytest.raises(ConsistencyError):
        quality_delta(cache, 1, 0, partition=p)
    labels = list(p.labels)
    labels[moved] = target
    assert quality_delta(cache, 1, 0, partition=Partition.of(labels, s=3)) == pytest.approx(
        cache.candidate_qualities(1)[0]
    )


def test_median_bandwidth_uses_all_pairs_on_small_data():
    points = PointSet(points=[[0.0], [1.0], [3.0]])
    assert median_bandwidth(points, seed=0).bandwidth == pytest.approx(2.0)
    assert median_bandwidth(points, seed=99).bandwidth == median_bandwidth(points, seed=0).bandwidth


def test_median_bandwidth_subsample_is_seeded(random_points):
    a = median_bandwidth(random_points, seed=5, pairs=100)
    b = median_bandwidth(random_points, seed=5, pairs=100)
    assert a == b
    assert a.bandwidth > 0


def test_median_bandwidth_duplicates_fall_back():
    points = PointSet(points=[[0.0], [0.0], [0.0], [0.0], [4.0]])
    assert median_bandwidth(points, seed=0).bandwidth == pytest.approx(4.0)


def test_median_bandwidth_scale_multiplies_the_median():
    points = PointSet(points=[[0.0], [1.0], [3.0]])
    assert median_bandwidth(points, seed=0, scale=1.6).bandwidth == pytest.approx(3.2)
    with pytest.raises(ParameterError):
        median_bandwidth(points, seed=0, scale=0.0)


@pytest.mark.parametrize("seed", [0, 7, 11])
def test_default_bandwidth_puts_random_labellings_in_the_ratio_band(seed):
    # expected Q of an iid uniform labelling: diagonal plus 1/s of the off-diagonal mass
    points, reference = generate_2d5c(derive_seed(seed, STREAM_DATA))
    kernel = median_bandwidth(points, derive_seed(seed, STREAM_BANDWIDTH), scale=RunConfig().sigma_scale)
    K = gram(points, kernel)
    off = K.sum() - np.trace(K)
    expected_random = np.trace(K) + off / reference.s
    ratio = expected_random / kernel_quality(reference, points, kernel)
    assert 0.70 <= ratio <= 0.88


def test_kernel_spec_rejects_non_positive():
    with pytest.raises(ValueError):
        KernelSpec(bandwidth=0.0)
