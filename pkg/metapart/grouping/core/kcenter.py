"""
Gonzalez farthest-point k-center over a partition distance matrix
"""
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from metapart.core.errors import ContractError, ParameterError, ParseError, ReportIOError
from metapart.grouping.schemas import GroupingResult, GroupingSummary, RepresentativeSummary
from metapart.pdist.schemas import DistanceMatrix

logger = logging.getLogger(__name__)


def best_quality_index(qualities: Sequence[float]) -> int:
    """Default first center: highest-quality sample, lowest index on ties."""
    return int(np.argmax(np.asarray(qualities)))


def assign_to_representatives(D: DistanceMatrix, representatives: Sequence[int]) -> np.ndarray:
    """
    phi: nearest representative; representatives map to themselves.

    A tie goes to the representative with the lowest sample index, whatever order
    the representatives were selected in.
    """
    reps = np.asarray(representatives, dtype=np.int64)
    ordered = np.sort(reps)
    to_reps = D.values[:, ordered]
    phi = ordered[np.argmin(to_reps, axis=1)]
    phi[reps] = reps
    return phi


def gonzalez_kcenter(D: DistanceMatrix, k: int, first: int = 0) -> GroupingResult:
    """
    Farthest-point traversal: start from `first`, repeatedly add the sample farthest
    from its nearest current center (ties -> lowest index) until k centers.
    Radius is within a factor 2 of the optimal k-center radius.
    """
    m = D.m
    if not 1 <= k <= m:
        raise ParameterError(f"need 1 <= k <= m, got k={k}, m={m}")
    if not 0 <= first < m:
        raise ParameterError(f"first center {first} outside 0..{m - 1}")

    values = D.values
    centers = [first]
    nearest = values[first].copy()
    while len(centers) < k:
        candidates = nearest.copy()
        # all-zero rows (duplicate samples) must not re-select a center
        candidates[centers] = -1.0
        nxt = int(np.argmax(candidates))
        centers.append(nxt)
        nearest = np.minimum(nearest, values[nxt])

    phi = assign_to_representatives(D, centers)
    member_dist = values[np.arange(m), phi]

    counts, spreads, nearest_other = [], [], []
    for c in centers:
        members = member_dist[phi == c]
        counts.append(int(members.size))
        spreads.append(float(np.var(members)))
        others = [values[c, o] for o in centers if o != c]
        nearest_other.append(float(min(others)) if others else None)

    radius = float(member_dist.max())
    logger.info(f"Gonzalez k-center: k={k}, m={m}, first={first}, radius={radius:.6g}")
    return GroupingResult(
        representatives=centers,
        assignment=phi.tolist(),
        member_counts=counts,
        spreads=spreads,
        nearest_other=nearest_other,
        radius=radius,
    )


def summarize_grouping(D: DistanceMatrix, g: GroupingResult) -> GroupingSummary:
    """Per representative: members' distances (histogram input), spread, nearest other representative."""
    if g.m != D.m:
        raise ContractError(f"grouping covers {g.m} samples, matrix has {D.m}")
    phi = np.asarray(g.assignment)
    rows = []
    for c in g.representatives:
        members = np.flatnonzero(phi == c)
        distances = D.values[c, members]
        others = [D.values[c, o] for o in g.representatives if o != c]
        rows.append(RepresentativeSummary(
            representative=c,
            member_count=int(members.size),
            member_distances=distances.tolist(),
            spread=float(np.var(distances)),
            nearest_other=float(min(others)) if others else None,
        ))
    return GroupingSummary(representatives=rows)


# ===== IO =====

def write_grouping(
    out_dir,
    g: GroupingResult,
    summary: GroupingSummary,
    extra_columns: Optional[Dict[str, Sequence[Optional[float]]]] = None,
) -> Path:
    """grouping.json (representatives, phi, radius) and grouping_summary.csv (one row per representative)."""
    out_dir = Path(out_dir)
    table = pd.DataFrame({
        "representative": [r.representative for r in summary.representatives],
        "member_count": [r.member_count for r in summary.representatives],
        "spread": [r.spread for r in summary.representatives],
        "nearest_other": [r.nearest_other for r in summary.representatives],
    })
    for name, column in (extra_columns or {}).items():
        table[name] = list(column)
    try:
        (out_dir / "grouping.json").write_text(
            json.dumps(g.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        table.to_csv(out_dir / "grouping_summary.csv", index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise ReportIOError(f"cannot write grouping files under {out_dir}: {e}")
    return out_dir / "grouping.json"


def read_grouping(path) -> GroupingResult:
    path = Path(path)
    try:
        return GroupingResult.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ReportIOError(f"cannot read {path}: {e}")
    except ValueError as e:
        raise ParseError(1, f"bad grouping record {path}: {e}")
