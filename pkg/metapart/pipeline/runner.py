"""
Experiment pipeline
synth -> sample -> dist -> group -> mds -> report, with file handoff between stages
"""
import csv
import hashlib
import logging
from importlib import metadata
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np

import metapart
from metapart.config.settings import settings
from metapart.core.errors import InputError, MetapartError, ParameterError, ReportIOError
from metapart.core.seeding import STREAM_BANDWIDTH, STREAM_CHAINS, STREAM_DATA, STREAM_KMEANS, derive_seed
from metapart.dataset.core.kmeans import kmeans_seed
from metapart.dataset.core.loader import load_csv, write_csv
from metapart.dataset.core.synthetic import generate_2d5c
from metapart.dataset.schemas import PointSet, ReferencePartition
from metapart.grouping.core.kcenter import (
    best_quality_index, gonzalez_kcenter, read_grouping, summarize_grouping, write_grouping,
)
from metapart.partition.core.ops import matched_agreement
from metapart.pdist.core.matrix import (
    pairwise_matrix, partition_distance, read_distance_matrix, write_distance_matrix,
)
from metapart.pdist.schemas import parse_kind
from metapart.pipeline.schemas import STAGES, Manifest, ManifestFile, RunConfig
from metapart.quality.core.kernel import median_bandwidth
from metapart.quality.schemas import KernelSpec
from metapart.report.core.figures import emit_report, quality_ratio_series
from metapart.report.core.mds import classical_mds, read_embedding, write_embedding
from metapart.sampler.core.gibbs import run_chains
from metapart.sampler.core.io import read_sample_set, write_sample_set
from metapart.sampler.schemas import ChainConfig

logger = logging.getLogger(__name__)

POINTS_FILE = "points.csv"
SAMPLES_FILE = "samples.txt"
DISTANCES_FILE = "distances.csv"
GROUPING_FILE = "grouping.json"
EMBEDDING_FILE = "embedding.csv"
MANIFEST_FILE = "manifest.json"

VERSIONED_PACKAGES = ("numpy", "scipy", "scikit-learn", "pandas", "pydantic", "POT", "joblib", "matplotlib")
MDS_DIM = 2


def _load_points(run_dir: Path) -> Tuple[PointSet, Optional[ReferencePartition]]:
    """points.csv carries a trailing `label` column when the dataset has a reference."""
    path = run_dir / POINTS_FILE
    if not path.is_file():
        raise InputError(f"{path} missing; run the synth stage first")
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    label_column = len(header) - 1 if header and header[-1] == "label" else None
    return load_csv(path, label_column=label_column)


def _require(run_dir: Path, name: str, stage: str) -> Path:
    path = run_dir / name
    if not path.is_file():
        raise InputError(f"{path} missing; run the {stage} stage first")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def package_versions() -> Dict[str, str]:
    versions = {"metapart": metapart.__version__}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class PipelineRunner:
    """
    Runs the experiment stages inside `<out_dir>/run-<hash12>`.

    Every stage reads its inputs from the files of the previous stages, so the
    pipeline and the six stage subcommands run in order produce the same bytes.
    """

    @staticmethod
    def synth(cfg: RunConfig, run_dir: Path) -> Path:
        if cfg.synthetic:
            points, reference = generate_2d5c(derive_seed(cfg.seed, STREAM_DATA))
        else:
            points, reference = load_csv(cfg.dataset, label_column=cfg.label_column)
        return write_csv(run_dir / POINTS_FILE, points, reference)

    @staticmethod
    def sample(cfg: RunConfig, run_dir: Path) -> Path:
        points, reference = _load_points(run_dir)
        s = cfg.s or (reference.s if reference is not None else None)
        if s is None:
            raise ParameterError("s is required when the dataset has no reference labels")

        if cfg.sigma == "median":
            kernel = median_bandwidth(points, derive_seed(cfg.seed, STREAM_BANDWIDTH), scale=cfg.sigma_scale)
        else:
            kernel = KernelSpec(bandwidth=float(cfg.sigma))

        seed_partition = kmeans_seed(points, s, derive_seed(cfg.seed, STREAM_KMEANS))
        if reference is not None:
            agreement = matched_agreement(seed_partition, reference)
            logger.info(f"k-means seed agrees with the reference on {agreement:.1%} of points")
        chain_cfg = ChainConfig(
            s=s, burn_in=cfg.t0, samples=cfg.m, thinning=cfg.thinning,
            seed=cfg.seed, quality=cfg.quality, kernel=kernel,
        )
        chain_seeds = [derive_seed(cfg.seed, STREAM_CHAINS, c) for c in range(cfg.chains)]
        Z = run_chains(points, seed_partition, chain_cfg, chain_seeds, n_jobs=settings.N_JOBS)
        logger.info(f"Sampling finished: m={Z.m}, diagnostics={Z.diagnostics}")
        return write_sample_set(run_dir / SAMPLES_FILE, Z)

    @staticmethod
    def dist(cfg: RunConfig, run_dir: Path) -> Path:
        points, _ = _load_points(run_dir)
        Z = read_sample_set(_require(run_dir, SAMPLES_FILE, "sample"))
        D = pairwise_matrix(Z, cfg.distance, points=points, kernel=Z.kernel, n_jobs=settings.N_JOBS)
        return write_distance_matrix(run_dir / DISTANCES_FILE, D)

    @staticmethod
    def group(cfg: RunConfig, run_dir: Path) -> Path:
        points, reference = _load_points(run_dir)
        Z = read_sample_set(_require(run_dir, SAMPLES_FILE, "sample"))
        D = read_distance_matrix(_require(run_dir, DISTANCES_FILE, "dist"))
        if D.m != Z.m:
            raise InputError(f"{DISTANCES_FILE} covers {D.m} samples, {SAMPLES_FILE} has {Z.m}")

        first = best_quality_index(Z.qualities) if cfg.first == "best" else int(cfg.first)
        g = gonzalez_kcenter(D, cfg.k, first)
        summary = summarize_grouping(D, g)

        extra = {"quality": [float(Z.qualities[c]) for c in g.representatives]}
        if reference is not None:
            ratios = quality_ratio_series(Z, reference, points)
            extra["quality_ratio"] = [float(ratios[c]) for c in g.representatives]
            extra["liftemd_to_reference"] = [
                partition_distance(Z.partition(c), reference, "liftemd", points, Z.kernel)
                for c in g.representatives
            ]
        return write_grouping(run_dir, g, summary, extra)

    @staticmethod
    def mds(cfg: RunConfig, run_dir: Path) -> Path:
        points, reference = _load_points(run_dir)
        Z = read_sample_set(_require(run_dir, SAMPLES_FILE, "sample"))
        D = read_distance_matrix(_require(run_dir, DISTANCES_FILE, "dist"))
        g = read_grouping(_require(run_dir, GROUPING_FILE, "group"))

        reps = list(g.representatives)
        values = D.submatrix(reps).values
        summary = summarize_grouping(D, g)
        radii = [float(np.sqrt(r.spread)) for r in summary.representatives]
        labels = [f"rep{c}" for c in reps]

        _, density = parse_kind(D.kind)
        if reference is not None and not density:
            # reference sits in the landscape at its base distance to every representative
            to_ref = [partition_distance(Z.partition(c), reference, D.kind, points, Z.kernel) for c in reps]
            values = np.block([
                [values, np.asarray(to_ref)[:, None]],
                [np.asarray(to_ref)[None, :], np.zeros((1, 1))],
            ])
            radii.append(0.0)
            labels.append("reference")
        elif reference is not None:
            logger.warning(f"{D.kind} is rank-based; the reference is left out of the MDS landscape")

        embedding = classical_mds(values, MDS_DIM, radii=radii, labels=labels)
        return write_embedding(run_dir / EMBEDDING_FILE, embedding)

    @staticmethod
    def report(cfg: RunConfig, run_dir: Path) -> Path:
        points, reference = _load_points(run_dir)
        Z = read_sample_set(_require(run_dir, SAMPLES_FILE, "sample"))
        D = read_distance_matrix(_require(run_dir, DISTANCES_FILE, "dist"))
        g = read_grouping(_require(run_dir, GROUPING_FILE, "group"))
        embedding = read_embedding(_require(run_dir, EMBEDDING_FILE, "mds"))
        ratios = quality_ratio_series(Z, reference, points) if reference is not None else None
        emit_report(g, ratios, D, embedding, run_dir, baseline=cfg.baseline)
        return run_dir

    @staticmethod
    def write_manifest(
        cfg: RunConfig,
        run_dir: Path,
        completed: Tuple[str, ...],
        failed_stage: Optional[str] = None,
        error: Optional[str] = None,
    ) -> Path:
        files = [
            ManifestFile(name=p.name, sha256=_sha256(p))
            for p in sorted(run_dir.iterdir())
            if p.is_file() and p.name != MANIFEST_FILE
        ]
        manifest = Manifest(
            config=cfg.experiment(),
            config_hash=cfg.config_hash,
            versions=package_versions(),
            files=files,
            completed_stages=list(completed),
            failed_stage=failed_stage,
            error=error,
        )
        path = run_dir / MANIFEST_FILE
        try:
            path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise ReportIOError(f"cannot write {path}: {e}")
        return path

    def stage_functions(self) -> Dict[str, Callable[[RunConfig, Path], Path]]:
        return {name: getattr(self, name) for name in STAGES}

    def run_stage(self, cfg: RunConfig, stage: str) -> Path:
        """
        Run one stage in the config's run directory and refresh the manifest.

        Args:
            cfg: experiment configuration
            stage: one of synth, sample, dist, group, mds, report

        Returns:
            the run directory
        """
        if stage not in STAGES:
            raise ParameterError(f"unknown stage {stage!r}; use one of {STAGES}")
        run_dir = cfg.run_dir
        try:
            run_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ReportIOError(f"cannot create run directory {run_dir}: {e}")

        done = STAGES[:STAGES.index(stage)]
        logger.info(f"Stage {stage} started in {run_dir}")
        try:
            self.stage_functions()[stage](cfg, run_dir)
        except Exception as e:
            message = str(e) if isinstance(e, MetapartError) else f"{type(e).__name__}: {e}"
            logger.error(f"Stage {stage} failed: {message}")
            self.write_manifest(cfg, run_dir, done, failed_stage=stage, error=message)
            raise
        self.write_manifest(cfg, run_dir, done + (stage,))
        logger.info(f"Stage {stage} completed")
        return run_dir

    def run_pipeline(self, cfg: RunConfig) -> Path:
        """All stages in order; aborts at the first failing stage."""
        logger.info(f"Pipeline started: config_hash={cfg.config_hash[:12]}, seed={cfg.seed}")
        for stage in STAGES:
            self.run_stage(cfg, stage)
        logger.info(f"Pipeline completed: {cfg.run_dir}")
        return cfg.run_dir


def cmd_pipeline(cfg: RunConfig) -> Path:
    return pipeline_runner.run_pipeline(cfg)


# Global instance
pipeline_runner = PipelineRunner()
