"""
Evaluation artifacts: member-distance distributions, quality-ratio distribution,
MDS landscape. Every figure is written twice, as a CSV of its data series and as an SVG.
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from metapart.config.settings import settings  # noqa: E402
from metapart.core.errors import EmptyInputError, ParameterError, ReportIOError  # noqa: E402
from metapart.dataset.schemas import PointSet, ReferencePartition  # noqa: E402
from metapart.grouping.core.kcenter import summarize_grouping  # noqa: E402
from metapart.grouping.schemas import GroupingResult  # noqa: E402
from metapart.pdist.schemas import DistanceMatrix  # noqa: E402
from metapart.quality.core.functionals import kernel_quality_from_gram  # noqa: E402
from metapart.quality.core.kernel import gram  # noqa: E402
from metapart.quality.schemas import KernelSpec  # noqa: E402
from metapart.report.schemas import Embedding2D, Histogram  # noqa: E402
from metapart.sampler.schemas import SampleSet  # noqa: E402

logger = logging.getLogger(__name__)

DEFAULT_BINS = 40
FIGSIZE = (8.0, 6.0)
MEMBER_DISTANCES = "member_distances"
QUALITY_RATIOS = "quality_ratios"
MDS_LANDSCAPE = "mds_landscape"


def histogram(values: Sequence[float], bins: int = DEFAULT_BINS) -> Histogram:
    """Equal-width bins over [min, max], last bin closed on the right."""
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise EmptyInputError("histogram of an empty series")
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    counts, edges = np.histogram(data, bins=bins)
    return Histogram(edges=edges.tolist(), counts=counts.astype(int).tolist())


def quality_ratio_series(
    Z: SampleSet,
    reference: ReferencePartition,
    points: PointSet,
    kernel: Optional[KernelSpec] = None,
) -> np.ndarray:
    """Q_K(z_i) / Q_K(reference) for every sample."""
    kernel = kernel or Z.kernel
    K = gram(points, kernel)
    q_ref = kernel_quality_from_gram(reference.array, K, reference.s)
    ratios = np.array([kernel_quality_from_gram(Z.labels[i], K, Z.s) for i in range(Z.m)]) / q_ref
    logger.info(f"Quality ratios: mean={ratios.mean():.4f}, max={ratios.max():.4f} over {Z.m} samples")
    return ratios


# ===== figure data =====

def member_distance_table(D: DistanceMatrix, g: GroupingResult) -> pd.DataFrame:
    """Long form: one `member` row per sample, one `nearest_other` marker row per representative."""
    summary = summarize_grouping(D, g)
    phi = np.asarray(g.assignment)
    rows = []
    for rep in summary.representatives:
        members = np.flatnonzero(phi == rep.representative)
        rows.extend(
            {"representative": rep.representative, "series": "member", "sample": int(i), "value": float(v)}
            for i, v in zip(members, rep.member_distances)
        )
        if rep.nearest_other is not None:
            rows.append({
                "representative": rep.representative, "series": "nearest_other",
                "sample": rep.representative, "value": rep.nearest_other,
            })
    return pd.DataFrame(rows, columns=["representative", "series", "sample", "value"])


def quality_ratio_table(g: GroupingResult, ratios: Sequence[float], baseline: Optional[float] = None) -> pd.DataFrame:
    ratios = np.asarray(ratios, dtype=np.float64)
    rows = [{"series": "sample", "sample": i, "value": float(v)} for i, v in enumerate(ratios)]
    rows += [{"series": "representative", "sample": c, "value": float(ratios[c])} for c in g.representatives]
    if baseline is not None:
        rows.append({"series": "baseline", "sample": -1, "value": float(baseline)})
    return pd.DataFrame(rows, columns=["series", "sample", "value"])


def landscape_table(embedding: Embedding2D) -> pd.DataFrame:
    X = embedding.coordinates
    labels = embedding.labels or [str(i) for i in range(embedding.k)]
    table = pd.DataFrame({"label": labels})
    for axis, name in enumerate("xyz"[:embedding.dim]):
        table[name] = X[:, axis]
    table["radius"] = embedding.radii
    return table


# ===== rendering =====

def _save(fig, path: Path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": settings.SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _plot_member_distances(table: pd.DataFrame, g: GroupingResult, bins: int):
    cols = min(g.k, 5)
    rows = (g.k + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=FIGSIZE, squeeze=False)
    for ax, rep in zip(axes.flat, g.representatives):
        part = table[table["representative"] == rep]
        members = part[part["series"] == "member"]["value"].to_numpy()
        h = histogram(members, bins)
        ax.stairs(h.counts, h.edges, fill=True, color="0.6")
        markers = part[part["series"] == "nearest_other"]["value"].to_numpy()
        if markers.size:
            ax.plot(markers, np.zeros_like(markers), "rs", clip_on=False)
        ax.set_title(f"rep {rep}", fontsize=8)
        ax.tick_params(labelsize=6)
    for ax in list(axes.flat)[g.k:]:
        ax.set_axis_off()
    fig.suptitle("Distance between partition and its representative")
    fig.tight_layout()
    return fig


def _plot_quality_ratios(table: pd.DataFrame, bins: int):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    h = histogram(table[table["series"] == "sample"]["value"].to_numpy(), bins)
    ax.stairs(h.counts, h.edges, fill=True, color="0.6")
    reps = table[table["series"] == "representative"]["value"].to_numpy()
    ax.plot(reps, np.zeros_like(reps), "rs", clip_on=False, label="representatives")
    base = table[table["series"] == "baseline"]["value"].to_numpy()
    if base.size:
        ax.plot(base, np.zeros_like(base), "bo", clip_on=False, label="baseline")
    ax.set_xlabel("quality ratio to reference")
    ax.set_ylabel("count")
    ax.legend(loc="upper left")
    fig.tight_layout()
    return fig


def _plot_landscape(table: pd.DataFrame):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    x = table["x"].to_numpy()
    y = table["y"].to_numpy() if "y" in table else np.zeros_like(x)
    for xi, yi, r, label in zip(x, y, table["radius"], table["label"]):
        colour = "b" if label == "reference" else "r"
        ax.plot(xi, yi, "o" if label == "reference" else "s", color=colour)
        if r > 0:
            ax.add_patch(Circle((xi, yi), r, fill=False, color=colour, alpha=0.6))
        ax.annotate(label, (xi, yi), textcoords="offset points", xytext=(4, 4), fontsize=7)
    ax.set_aspect("equal", adjustable="datalim")
    ax.autoscale_view()
    ax.set_title("MDS landscape of representative partitions")
    fig.tight_layout()
    return fig


def emit_report(
    g: GroupingResult,
    ratios: Optional[Sequence[float]],
    D: DistanceMatrix,
    embedding: Embedding2D,
    out_dir,
    baseline: Optional[float] = None,
    bins: int = DEFAULT_BINS,
) -> List[Path]:
    """
    Write figure data (CSV) and figures (SVG) for the three report views.

    Args:
        g: grouping over the samples of D
        ratios: quality ratio per sample, None when there is no reference partition
        D: the matrix the grouping was computed on
        embedding: MDS of the representatives (plus the reference, if any)
        out_dir: existing writable directory
        baseline: external baseline ratio drawn as a blue circle

    Returns:
        written paths, sorted by name
    """
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise ReportIOError(f"output directory {out_dir} does not exist")

    views = [(MEMBER_DISTANCES, member_distance_table(D, g), lambda t: _plot_member_distances(t, g, bins))]
    if ratios is None:
        logger.warning("No reference partition: skipping the quality ratio figure")
    else:
        views.append((QUALITY_RATIOS, quality_ratio_table(g, ratios, baseline), lambda t: _plot_quality_ratios(t, bins)))
    views.append((MDS_LANDSCAPE, landscape_table(embedding), _plot_landscape))

    written = []
    try:
        for stem, table, plot in views:
            csv_path = out_dir / f"{stem}.csv"
            table.to_csv(csv_path, index=False, float_format="%.17g", lineterminator="\n")
            svg_path = out_dir / f"{stem}.svg"
            _save(plot(table), svg_path)
            written += [csv_path, svg_path]
    except OSError as e:
        raise ReportIOError(f"cannot write report under {out_dir}: {e}")
    logger.info(f"Report written: {[p.name for p in written]}")
    return sorted(written)
