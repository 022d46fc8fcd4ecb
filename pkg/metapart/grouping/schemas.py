from typing import List, Optional

from pydantic import BaseModel, Field


class GroupingResult(BaseModel):
    """k representative partitions chosen from Z and the map phi: sample -> representative."""
    representatives: List[int] = Field(..., min_length=1, description="sample indices, selection order")
    assignment: List[int] = Field(..., description="phi as an m-vector of representative sample indices")
    member_counts: List[int]
    spreads: List[float] = Field(..., description="variance of member distances to the representative")
    nearest_other: List[Optional[float]] = Field(..., description="distance to the closest other representative")
    radius: float = Field(..., ge=0, description="max distance from a sample to its representative")

    @property
    def k(self) -> int:
        return len(self.representatives)

    @property
    def m(self) -> int:
        return len(self.assignment)


class RepresentativeSummary(BaseModel):
    representative: int
    member_count: int
    member_distances: List[float]
    spread: float
    nearest_other: Optional[float] = None


class GroupingSummary(BaseModel):
    representatives: List[RepresentativeSummary]
