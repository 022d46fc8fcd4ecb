import re
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from metapart.core.errors import ContractError, ParameterError

BaseDistanceKind = Literal["rand", "vi", "nmi", "liftemd"]
BASE_KINDS = ("rand", "vi", "nmi", "liftemd")

SYMMETRY_TOL = 1e-12

_DENSITY_RE = re.compile(r"^density\((\w+)\)$")


def parse_kind(kind: str) -> Tuple[str, bool]:
    """'liftemd' -> ('liftemd', False); 'density(liftemd)' -> ('liftemd', True)."""
    kind = kind.strip().lower()
    match = _DENSITY_RE.match(kind)
    base = match.group(1) if match else kind
    if base not in BASE_KINDS:
        raise ParameterError(f"unknown distance kind {kind!r}; use one of {BASE_KINDS} or density(<kind>)")
    return base, match is not None


class DistanceMatrix(BaseModel):
    """Symmetric pairwise distances over a list of partitions, zero diagonal."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    kind: str

    @model_validator(mode='after')
    def check_matrix(self):
        D = self.values
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ContractError(f"distance matrix must be square, got shape {D.shape}")
        if not np.all(np.isfinite(D)):
            raise ContractError("distance matrix has non-finite entries")
        if np.any(np.diag(D) != 0.0):
            raise ContractError("distance matrix diagonal must be exactly 0")
        if D.size and np.max(np.abs(D - D.T)) > SYMMETRY_TOL:
            raise ContractError("distance matrix is not symmetric")
        parse_kind(self.kind)
        return self

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    def submatrix(self, indices) -> "DistanceMatrix":
        idx = np.asarray(indices, dtype=np.int64)
        return DistanceMatrix(values=self.values[np.ix_(idx, idx)], kind=self.kind)


class LiftedClusters(BaseModel):
    """
    One partition with its clusters lifted to kernel mean embeddings.

    centroids[j] is the mean feature vector of cluster j, so
    centroids[a] @ centroids[b] == kappa(A,B)/(|A||B|). keys[j] identifies cluster j
    as a point set (a 64-bit digest of its sorted member indices).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray = Field(..., description="|X_j|/n per cluster")
    centroids: np.ndarray = Field(..., description="s x r mean feature vectors")
    keys: np.ndarray = Field(..., description="int64 point-set digest per cluster")

    @model_validator(mode='after')
    def check_shapes(self):
        s = self.weights.size
        if self.centroids.ndim != 2 or self.centroids.shape[0] != s or self.keys.shape != (s,):
            raise ContractError(
                f"lifted clusters disagree on s: weights {s}, centroids {self.centroids.shape}, keys {self.keys.shape}"
            )
        return self

    @property
    def s(self) -> int:
        return int(self.weights.size)


class ClusterEmbedding(BaseModel):
    """
    Kernel mean embeddings of the clusters of two partitions, reduced to what the
    transport problem needs: cluster weights |X_j|/n and normalized similarities
    kappa(A,B)/(|A||B|).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights_a: np.ndarray
    weights_b: np.ndarray
    self_a: np.ndarray = Field(..., description="kappa_hat(A,A) per cluster of the first partition")
    self_b: np.ndarray = Field(..., description="kappa_hat(B,B) per cluster of the second partition")
    cross: np.ndarray = Field(..., description="kappa_hat(A,B), s_a x s_b")
    identical: Optional[np.ndarray] = Field(None, description="True where cluster A == cluster B as point sets")

    @classmethod
    def between(cls, a: LiftedClusters, b: LiftedClusters) -> "ClusterEmbedding":
        return cls(
            weights_a=a.weights,
            weights_b=b.weights,
            self_a=np.einsum('ij,ij->i', a.centroids, a.centroids),
            self_b=np.einsum('ij,ij->i', b.centroids, b.centroids),
            cross=a.centroids @ b.centroids.T,
            identical=a.keys[:, None] == b.keys[None, :],
        )

    def ground(self) -> np.ndarray:
        """D(A,B) = sqrt(max(0, k(A,A) + k(B,B) - 2 k(A,B))); identical clusters get exactly 0."""
        sq = self.self_a[:, None] + self.self_b[None, :] - 2.0 * self.cross
        D = np.sqrt(np.maximum(sq, 0.0))
        if self.identical is not None:
            D[self.identical] = 0.0
        return D
