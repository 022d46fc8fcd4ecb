"""
2D5C synthetic benchmark: 100 points in 2D drawn from 5 separated Gaussians
"""
from typing import Tuple

import numpy as np

from metapart.dataset.schemas import PointSet, ReferencePartition
from metapart.partition.schemas import Partition

N_COMPONENTS = 5
POINTS_PER_COMPONENT = 20
# pentagon circumradius; side = 2 R sin(pi/5) ~ 14.1, above the required 10
MEAN_RADIUS = 12.0


def component_means() -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(N_COMPONENTS) / N_COMPONENTS
    return MEAN_RADIUS * np.column_stack([np.cos(angles), np.sin(angles)])


def generate_2d5c(seed: int) -> Tuple[PointSet, ReferencePartition]:
    """Unit-variance isotropic components, 20 points each, listed component by component."""
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(N_COMPONENTS), POINTS_PER_COMPONENT)
    X = component_means()[labels] + rng.standard_normal((labels.size, 2))
    return PointSet(points=X), Partition(labels=tuple(labels.tolist()), s=N_COMPONENTS)
