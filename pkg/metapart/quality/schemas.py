from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

QualityKind = Literal["kernel", "kmeans"]


class KernelSpec(BaseModel):
    """Gaussian kernel K(x,x') = exp(-|x-x'|^2 / (2 sigma^2)); sigma in coordinate units."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian"] = "gaussian"
    bandwidth: float = Field(..., gt=0, allow_inf_nan=False, description="sigma")
