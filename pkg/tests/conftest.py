import numpy as np
import pytest

from metapart.dataset.core.synthetic import generate_2d5c
from metapart.dataset.schemas import PointSet
from metapart.partition.schemas import Partition
from metapart.quality.schemas import KernelSpec


@pytest.fixture
def two_blobs():
    """n=8, two well separated Gaussian blobs of 4 points each."""
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(0.0, 0.5, (4, 2)), rng.normal(4.0, 0.5, (4, 2))])
    return PointSet(points=X)


@pytest.fixture
def blob_reference():
    return Partition.of([0, 0, 0, 0, 1, 1, 1, 1])


@pytest.fixture
def unit_kernel():
    return KernelSpec(bandwidth=1.0)


@pytest.fixture
def random_points():
    rng = np.random.default_rng(11)
    return PointSet(points=rng.normal(size=(50, 3)))


@pytest.fixture(scope="session")
def dataset_2d5c():
    return generate_2d5c(7)


def random_partition(rng: np.random.Generator, n: int, s: int) -> Partition:
    """Uniform labels with the first s points forced into distinct clusters."""
    labels = rng.integers(0, s, size=n)
    labels[:s] = rng.permutation(s)
    return Partition.of(labels.tolist(), s=s)
