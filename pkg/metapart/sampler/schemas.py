from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from metapart.core.errors import InvariantViolationError
from metapart.partition.schemas import Partition
from metapart.quality.schemas import KernelSpec, QualityKind


class ChainConfig(BaseModel):
    """Parameters of one Metropolis-Hastings-Gibbs chain."""
    model_config = ConfigDict(frozen=True)

    s: int = Field(..., ge=2, description="cluster count")
    burn_in: int = Field(1000, ge=0, description="t0, discarded sweeps")
    samples: int = Field(4000, ge=1, description="m, kept partitions")
    thinning: int = Field(1, ge=1, description="sweeps between kept samples")
    seed: int = Field(0, ge=0)
    quality: QualityKind = "kernel"
    kernel: KernelSpec


class SampleSet(BaseModel):
    """
    The collection Z of sampled partitions (canonical labels, one row per sample)
    with the quality of each.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    labels: np.ndarray = Field(..., description="m x n canonical label matrix")
    qualities: np.ndarray = Field(..., description="m qualities")
    s: int = Field(..., ge=1)
    sigma: float = Field(..., gt=0)
    quality_kind: QualityKind
    seed: int = Field(..., ge=0)
    config: Optional[ChainConfig] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_shapes(self):
        if self.labels.ndim != 2 or self.qualities.ndim != 1:
            raise InvariantViolationError("labels must be m x n and qualities length m")
        if self.labels.shape[0] != self.qualities.shape[0]:
            raise InvariantViolationError(
                f"{self.labels.shape[0]} label rows but {self.qualities.shape[0]} qualities"
            )
        return self

    @property
    def m(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n(self) -> int:
        return int(self.labels.shape[1])

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(bandwidth=self.sigma)

    def partition(self, i: int) -> Partition:
        return Partition(labels=tuple(self.labels[i].tolist()), s=self.s)

    @property
    def partitions(self) -> List[Partition]:
        return [self.partition(i) for i in range(self.m)]
