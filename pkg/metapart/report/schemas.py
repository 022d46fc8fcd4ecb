from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from metapart.core.errors import ContractError

CENTER_TOL = 1e-9


class Embedding2D(BaseModel):
    """Classical MDS coordinates of the representatives (and the reference, when present)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coordinates: np.ndarray = Field(..., description="k x dim, centered at the origin")
    radii: np.ndarray = Field(..., description="spread circle radius per point")
    eigenvalues: np.ndarray = Field(..., description="top dim eigenvalues, descending, clamped at 0")
    negative_mass: float = Field(0.0, ge=0, description="sum |lambda| over negative eigenvalues")
    stress: float = Field(0.0, ge=0, description="Kruskal stress-1 of the embedding")
    labels: List[str] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_shapes(self):
        X = self.coordinates
        if X.ndim != 2:
            raise ContractError(f"coordinates must be k x dim, got shape {X.shape}")
        if self.radii.shape != (X.shape[0],):
            raise ContractError("one radius per embedded point is required")
        if X.size and np.max(np.abs(X.mean(axis=0))) > CENTER_TOL:
            raise ContractError("embedding is not centered")
        if self.labels and len(self.labels) != X.shape[0]:
            raise ContractError("one label per embedded point is required")
        return self

    @property
    def k(self) -> int:
        return int(self.coordinates.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coordinates.shape[1])


class Histogram(BaseModel):
    edges: List[float]
    counts: List[int]

    @property
    def total(self) -> int:
        return int(sum(self.counts))
