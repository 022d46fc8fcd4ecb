from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from metapart.core.errors import InputError
from metapart.partition.schemas import Partition

# ground-truth labeling used for quality ratios; same invariants as any partition
ReferencePartition = Partition


class PointSet(BaseModel):
    """Input dataset X: n points in d dimensions. Row order defines point identity."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray

    @model_validator(mode='before')
    @classmethod
    def coerce_points(cls, values: Any) -> Any:
        if isinstance(values, dict) and 'points' in values:
            arr = np.array(values['points'], dtype=np.float64)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            arr.setflags(write=False)
            values = {**values, 'points': arr}
        return values

    @model_validator(mode='after')
    def check_points(self):
        arr = self.points
        if arr.ndim != 2:
            raise InputError(f"points must be an n x d matrix, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise InputError(f"need at least 2 points, got {arr.shape[0]}")
        if arr.shape[1] < 1:
            raise InputError("points need at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise InputError("all coordinates must be finite")
        return self

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])
