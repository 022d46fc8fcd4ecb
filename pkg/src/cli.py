"""
metapart command line

    python -m src.cli pipeline --synthetic 2d5c --s 5 --k 10 --t0 1000 --m 4000 --seed 7
    python -m src.cli pipeline --csv iris.csv --label-col 4 --s 3 --k 10

Every subcommand takes the same options. `--config` names a flat KEY=value file
(keys: dataset, label_column, s, sigma, sigma_scale, quality, t0, m, thinning, chains, distance,
k, first, out_dir, seed, baseline); flags given on the command line win over it.
"""
import logging
from pathlib import Path
from typing import Optional

import typer

from metapart.config.settings import settings
from metapart.core.errors import ConfigError, MetapartError
from metapart.pipeline.runner import pipeline_runner
from metapart.pipeline.schemas import STAGES, RunConfig, load_run_config

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="metapart",
    help="Sample partitions proportional to quality and pick k diverse representatives",
    add_completion=False,
)

STAGE_HELP = {
    "synth": "Write points.csv from the synthetic 2D5C generator or a CSV dataset",
    "sample": "Run the Gibbs chain(s) and write samples.txt",
    "dist": "Compute the pairwise partition distance matrix (distances.csv)",
    "group": "Pick k representatives with Gonzalez k-center (grouping.json, grouping_summary.csv)",
    "mds": "Embed the representatives with classical MDS (embedding.csv)",
    "report": "Write figure data (CSV) and figures (SVG)",
}


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _build_config(
    config: Optional[Path],
    synthetic: Optional[str],
    csv_path: Optional[Path],
    **overrides,
) -> RunConfig:
    if synthetic is not None and csv_path is not None:
        raise ConfigError("give either --synthetic or --csv, not both")
    dataset = str(csv_path) if csv_path is not None else synthetic
    return load_run_config(config, dataset=dataset, **overrides)


def _command(stage: Optional[str]):
    """Build a subcommand running one stage, or the whole pipeline when stage is None."""

    def command(
        config: Optional[Path] = typer.Option(None, "--config", "-c", help="KEY=value run configuration file"),
        synthetic: Optional[str] = typer.Option(None, "--synthetic", help="synthetic dataset name (2d5c)"),
        csv_path: Optional[Path] = typer.Option(None, "--csv", help="CSV dataset path"),
        label_column: Optional[int] = typer.Option(None, "--label-col", help="reference label column of the CSV"),
        s: Optional[int] = typer.Option(None, "--s", help="cluster count (default: reference's)"),
        sigma: Optional[str] = typer.Option(None, "--sigma", help="kernel bandwidth or 'median'"),
        sigma_scale: Optional[float] = typer.Option(None, "--sigma-scale", help="multiplier on the median bandwidth (1.6)"),
        quality: Optional[str] = typer.Option(None, "--quality", help="kernel | kmeans"),
        t0: Optional[int] = typer.Option(None, "--t0", help="burn-in sweeps (1000)"),
        m: Optional[int] = typer.Option(None, "--m", help="kept samples (4000)"),
        thinning: Optional[int] = typer.Option(None, "--thinning", help="sweeps between kept samples (1)"),
        chains: Optional[int] = typer.Option(None, "--chains", help="independent chains (1)"),
        distance: Optional[str] = typer.Option(None, "--distance", help="rand | vi | nmi | liftemd | density(<kind>)"),
        k: Optional[int] = typer.Option(None, "--k", help="representatives (10)"),
        first: Optional[str] = typer.Option(None, "--first", help="'best' or a sample index"),
        out_dir: Optional[Path] = typer.Option(None, "--out-dir", "-o", help="parent of the run directory (runs)"),
        seed: Optional[int] = typer.Option(None, "--seed", help="master seed (0)"),
        baseline: Optional[float] = typer.Option(None, "--baseline", help="external baseline quality ratio"),
        verbose: bool = typer.Option(False, "--verbose", "-v", help="debug logging"),
    ):
        _setup_logging(verbose)
        try:
            cfg = _build_config(
                config, synthetic, csv_path,
                label_column=label_column, s=s, sigma=sigma, sigma_scale=sigma_scale, quality=quality, t0=t0, m=m,
                thinning=thinning, chains=chains, distance=distance, k=k, first=first,
                out_dir=out_dir, seed=seed, baseline=baseline,
            )
            if stage is None:
                run_dir = pipeline_runner.run_pipeline(cfg)
            else:
                run_dir = pipeline_runner.run_stage(cfg, stage)
        except MetapartError as e:
            logger.error(f"{stage or 'pipeline'} failed: {e}")
            typer.echo(f"Error: {e}", err=True)
            raise typer.Exit(e.exit_code)
        typer.echo(f"{stage or 'pipeline'} completed: {run_dir}")

    return command


for _stage in STAGES:
    app.command(name=_stage, help=STAGE_HELP[_stage])(_command(_stage))
app.command(name="pipeline", help="Run synth, sample, dist, group, mds and report in one go")(_command(None))


if __name__ == "__main__":
    app()
