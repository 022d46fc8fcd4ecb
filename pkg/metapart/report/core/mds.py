"""
Classical (Torgerson) multidimensional scaling of a small distance matrix
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist, squareform

from metapart.core.errors import ContractError, ParameterError, ParseError, ReportIOError
from metapart.pdist.schemas import SYMMETRY_TOL, DistanceMatrix
from metapart.report.schemas import Embedding2D

logger = logging.getLogger(__name__)

# eigenvalues below this fraction of the largest are treated as 0
RANK_TOL = 1e-12


def double_center(D: np.ndarray) -> np.ndarray:
    """B = -1/2 J D^2 J with J = I - 11^T/k."""
    k = D.shape[0]
    J = np.eye(k) - np.full((k, k), 1.0 / k)
    return -0.5 * J @ (D ** 2) @ J


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Largest-magnitude component of every eigenvector is made positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def kruskal_stress(D: np.ndarray, X: np.ndarray) -> float:
    if D.shape[0] < 2:
        return 0.0
    original = squareform(D, checks=False)
    embedded = pdist(X)
    total = float(np.sum(original ** 2))
    if total == 0.0:
        return 0.0
    return float(np.sqrt(np.sum((embedded - original) ** 2) / total))


def classical_mds(
    D: Union[DistanceMatrix, np.ndarray],
    dim: int = 2,
    radii: Optional[Sequence[float]] = None,
    labels: Optional[Sequence[str]] = None,
) -> Embedding2D:
    """
    Embed a distance matrix in `dim` dimensions.

    Args:
        D: symmetric, zero-diagonal distances between k items
        dim: 1, 2 or 3
        radii: optional spread circle radius per item (defaults to 0)
        labels: optional names per item

    Returns:
        Embedding2D with centered coordinates. With fewer than dim+1 items the trailing
        coordinates are 0.
    """
    if dim not in (1, 2, 3):
        raise ParameterError(f"dim must be 1, 2 or 3, got {dim}")
    values = np.asarray(D.values if isinstance(D, DistanceMatrix) else D, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ContractError(f"MDS needs a square matrix, got shape {values.shape}")
    if np.max(np.abs(values - values.T), initial=0.0) > SYMMETRY_TOL:
        raise ContractError("MDS needs a symmetric distance matrix")
    values = 0.5 * (values + values.T)
    k = values.shape[0]

    B = double_center(values)
    B = 0.5 * (B + B.T)
    eigvals, eigvecs = np.linalg.eigh(B)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], _fix_signs(eigvecs[:, order])

    negative_mass = float(-eigvals[eigvals < 0].sum())
    scale = max(float(np.abs(eigvals).max(initial=0.0)), 1.0)
    top = eigvals[:dim].copy()
    if np.any(top < -RANK_TOL * scale):
        logger.warning(f"MDS: clamping negative eigenvalues {top[top < 0].tolist()} to 0 (D is not Euclidean)")
    top[top < RANK_TOL * scale] = 0.0

    coords = np.zeros((k, dim))
    used = min(dim, k)
    coords[:, :used] = eigvecs[:, :used] * np.sqrt(top[:used])
    coords -= coords.mean(axis=0)
    eigenvalues = np.zeros(dim)
    eigenvalues[:used] = top[:used]

    stress = kruskal_stress(values, coords)
    logger.info(f"MDS: k={k}, dim={dim}, eigenvalues={eigenvalues.round(6).tolist()}, stress={stress:.3g}")
    return Embedding2D(
        coordinates=coords,
        radii=np.zeros(k) if radii is None else np.asarray(radii, dtype=np.float64),
        eigenvalues=eigenvalues,
        negative_mass=negative_mass,
        stress=stress,
        labels=list(labels) if labels is not None else [],
    )


# ===== IO =====

def write_embedding(path, embedding: Embedding2D) -> Path:
    """First line `# eigenvalues=a;b stress=.. negative_mass=..`, then label,x,y,radius rows."""
    path = Path(path)
    axes = list("xyz"[:embedding.dim])
    table = pd.DataFrame(embedding.coordinates, columns=axes)
    table.insert(0, "label", embedding.labels or [str(i) for i in range(embedding.k)])
    table["radius"] = embedding.radii
    header = (
        f"# eigenvalues={';'.join(repr(float(v)) for v in embedding.eigenvalues)}"
        f" stress={embedding.stress!r} negative_mass={embedding.negative_mass!r}\n"
    )
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(header)
            table.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise ReportIOError(f"cannot write {path}: {e}")
    return path


def read_embedding(path) -> Embedding2D:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            header = fh.readline()
            table = pd.read_csv(fh, dtype={"label": str}, keep_default_na=False, float_precision="round_trip")
    except OSError as e:
        raise ReportIOError(f"cannot read {path}: {e}")
    if not header.startswith("#"):
        raise ParseError(1, f"{path} lacks the embedding header line")
    fields = dict(token.split("=", 1) for token in header[1:].split())
    try:
        eigenvalues = np.array([float(v) for v in fields["eigenvalues"].split(";") if v])
        stress = float(fields["stress"])
        negative_mass = float(fields["negative_mass"])
    except (KeyError, ValueError) as e:
        raise ParseError(1, f"bad embedding header in {path}: {e}")
    axes = [c for c in ("x", "y", "z") if c in table.columns]
    return Embedding2D(
        coordinates=table[axes].to_numpy(dtype=np.float64),
        radii=table["radius"].to_numpy(dtype=np.float64),
        eigenvalues=eigenvalues,
        negative_mass=negative_mass,
        stress=stress,
        labels=table["label"].tolist(),
    )
