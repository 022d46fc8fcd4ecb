import numpy as np
import pandas as pd
import pytest
from scipy.spatial.distance import pdist, squareform

from metapart.core.errors import ContractError, EmptyInputError, ParameterError, ReportIOError
from metapart.grouping.core.kcenter import gonzalez_kcenter, summarize_grouping
from metapart.partition.schemas import Partition
from metapart.pdist.schemas import DistanceMatrix
from metapart.quality.core.functionals import kernel_quality
from metapart.report.core.figures import emit_report, histogram, quality_ratio_series
from metapart.report.core.mds import classical_mds, read_embedding, write_embedding
from metapart.sampler.schemas import SampleSet


# ----- MDS -----

def test_equilateral_triangle():
    D = np.ones((3, 3)) - np.eye(3)
    emb = classical_mds(D, 2)
    assert squareform(pdist(emb.coordinates)) == pytest.approx(D, abs=1e-9)
    assert np.abs(emb.coordinates.mean(axis=0)).max() < 1e-9


@pytest.mark.parametrize("k", [3, 5, 10])
def test_reconstructs_euclidean_configurations(k):
    rng = np.random.default_rng(k)
    X = rng.normal(size=(k, 2)) * 3.0
    D = squareform(pdist(X))
    emb = classical_mds(DistanceMatrix(values=D, kind="liftemd"), 2)
    assert squareform(pdist(emb.coordinates)) == pytest.approx(D, abs=1e-9)
    assert emb.stress < 1e-9
    assert emb.eigenvalues[0] >= emb.eigenvalues[1] >= 0.0


def test_two_points_lie_on_a_line():
    emb = classical_mds(np.array([[0.0, 2.0], [2.0, 0.0]]), 2)
    assert emb.eigenvalues[1] == 0.0
    assert np.all(emb.coordinates[:, 1] == 0.0)
    assert abs(emb.coordinates[0, 0] - emb.coordinates[1, 0]) == pytest.approx(2.0)


def test_single_point_pads_zeros():
    emb = classical_mds(np.zeros((1, 1)), 2)
    assert emb.coordinates.tolist() == [[0.0, 0.0]]


def test_mds_is_deterministic():
    rng = np.random.default_rng(1)
    D = squareform(pdist(rng.normal(size=(6, 3))))
    a, b = classical_mds(D, 3), classical_mds(D, 3)
    assert np.array_equal(a.coordinates, b.coordinates)


def test_non_euclidean_input_reports_negative_mass():
    # violates the triangle inequality
    D = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
    emb = classical_mds(D, 2)
    assert emb.negative_mass > 0.0
    assert np.all(emb.eigenvalues >= 0.0)


def test_mds_rejects_bad_input():
    with pytest.raises(ContractError):
        classical_mds(np.array([[0.0, 1.0], [2.0, 0.0]]), 2)
    with pytest.raises(ParameterError):
        classical_mds(np.zeros((2, 2)), 4)


def test_embedding_file_is_exact(tmp_path):
    rng = np.random.default_rng(3)
    D = squareform(pdist(rng.normal(size=(4, 2))))
    emb = classical_mds(D, 2, radii=[0.1, 0.2, 0.3, 0.0], labels=["rep0", "rep5", "rep9", "reference"])
    loaded = read_embedding(write_embedding(tmp_path / "embedding.csv", emb))
    assert np.array_equal(loaded.coordinates, emb.coordinates)
    assert np.array_equal(loaded.radii, emb.radii)
    assert np.array_equal(loaded.eigenvalues, emb.eigenvalues)
    assert loaded.labels == emb.labels
    assert loaded.stress == emb.stress


# ----- histogram and ratios -----

def test_histogram_hand_binning():
    h = histogram([0.0, 0.5, 1.0], bins=2)
    assert h.edges == [0.0, 0.5, 1.0]
    assert h.counts == [1, 2]


def test_histogram_constant_values():
    h = histogram([0.3] * 7, bins=5)
    assert sum(1 for c in h.counts if c) == 1
    assert h.total == 7


def test_histogram_conservation():
    values = np.random.default_rng(0).random(4000)
    assert histogram(values, 40).total == 4000


def test_histogram_empty():
    with pytest.raises(EmptyInputError):
        histogram([], 10)


def _sample_set(partitions, sigma=1.0):
    labels = np.array([p.canonical for p in partitions])
    return SampleSet(
        labels=labels, qualities=np.ones(len(partitions)), s=partitions[0].s,
        sigma=sigma, quality_kind="kernel", seed=0,
    )


def test_ratio_of_reference_is_one(two_blobs, blob_reference, unit_kernel):
    mixed = Partition.of([0, 1, 0, 1, 0, 1, 0, 1])
    Z = _sample_set([blob_reference, mixed])
    ratios = quality_ratio_series(Z, blob_reference, two_blobs, unit_kernel)
    assert ratios[0] == 1.0
    expected = kernel_quality(mixed, two_blobs, unit_kernel) / kernel_quality(blob_reference, two_blobs, unit_kernel)
    assert ratios[1] == pytest.approx(expected)


def test_all_singletons_ratio(dataset_2d5c, unit_kernel):
    points, reference = dataset_2d5c
    singletons = Partition.of(list(range(points.n)))
    Z = _sample_set([singletons])
    ratio = quality_ratio_series(Z, reference, points, unit_kernel)[0]
    assert ratio == pytest.approx(points.n / kernel_quality(reference, points, unit_kernel))
    assert ratio < 1.0


# ----- emitted files -----

def _grouped(m=12, k=3):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(m, 2))
    D = DistanceMatrix(values=squareform(pdist(X)), kind="liftemd")
    g = gonzalez_kcenter(D, k, first=0)
    summary = summarize_grouping(D, g)
    radii = [float(np.sqrt(r.spread)) for r in summary.representatives]
    emb = classical_mds(D.submatrix(g.representatives), 2, radii=radii,
                        labels=[f"rep{c}" for c in g.representatives])
    return D, g, emb


def test_emit_report_file_set(tmp_path):
    D, g, emb = _grouped()
    ratios = np.linspace(0.5, 1.0, D.m)
    written = emit_report(g, ratios, D, emb, tmp_path, baseline=0.8)
    assert sorted(p.name for p in written) == [
        "mds_landscape.csv", "mds_landscape.svg",
        "member_distances.csv", "member_distances.svg",
        "quality_ratios.csv", "quality_ratios.svg",
    ]


def test_marker_series_equal_grouping_summary(tmp_path):
    D, g, emb = _grouped()
    emit_report(g, np.linspace(0.5, 1.0, D.m), D, emb, tmp_path, baseline=0.8)
    table = pd.read_csv(tmp_path / "member_distances.csv", float_precision="round_trip")
    markers = table[table["series"] == "nearest_other"]
    summary = summarize_grouping(D, g)
    assert markers["representative"].tolist() == g.representatives
    assert markers["value"].tolist() == [r.nearest_other for r in summary.representatives]
    assert (table["series"] == "member").sum() == D.m

    ratios = pd.read_csv(tmp_path / "quality_ratios.csv", float_precision="round_trip")
    assert ratios[ratios["series"] == "baseline"]["value"].tolist() == [0.8]
    assert ratios[ratios["series"] == "representative"]["sample"].tolist() == g.representatives


def test_degenerate_single_sample(tmp_path):
    D = DistanceMatrix(values=np.zeros((1, 1)), kind="vi")
    g = gonzalez_kcenter(D, 1, first=0)
    emb = classical_mds(D, 2, radii=[0.0], labels=["rep0"])
    emit_report(g, [1.0], D, emb, tmp_path)
    table = pd.read_csv(tmp_path / "member_distances.csv", float_precision="round_trip")
    assert table["series"].tolist() == ["member"]
    ratios = pd.read_csv(tmp_path / "quality_ratios.csv", float_precision="round_trip")
    assert "baseline" not in ratios["series"].tolist()


def test_no_reference_skips_ratio_figure(tmp_path):
    D, g, emb = _grouped()
    written = emit_report(g, None, D, emb, tmp_path)
    assert len(written) == 4
    assert not (tmp_path / "quality_ratios.csv").exists()


def test_svg_output_is_byte_stable(tmp_path):
    D, g, emb = _grouped()
    first, second = tmp_path / "a", tmp_path / "b"
    first.mkdir()
    second.mkdir()
    emit_report(g, np.linspace(0.5, 1.0, D.m), D, emb, first)
    emit_report(g, np.linspace(0.5, 1.0, D.m), D, emb, second)
    for name in ("member_distances.svg", "quality_ratios.svg", "mds_landscape.svg"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_missing_output_directory(tmp_path):
    D, g, emb = _grouped()
    with pytest.raises(ReportIOError):
        emit_report(g, None, D, emb, tmp_path / "missing")
