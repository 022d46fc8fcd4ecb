"""
Metropolis-Hastings-Gibbs 샘플러 (분할 공간)

한 sweep: 점들의 무작위 순서를 뽑고, 각 점을 s개 클러스터 각각에 넣었을 때의 품질
q_j 를 계산해 q_j / sum(q) 확률로 재배정한다. 원래 클러스터를 비우게 되는 이동은
후보에서 제외한다 (상태 공간 = 비어있지 않은 s개 클러스터 분할).

The stationary distribution of the chain is pi(P) proportional to Q(P) over the
nonempty-s partition space: every step draws from the exact full conditional.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from metapart.config.settings import settings
from metapart.core.errors import BudgetExceededError, NumericUnderflowError, ParameterError
from metapart.core.seeding import make_rng
from metapart.dataset.schemas import PointSet
from metapart.partition.core.ops import canonical_labels
from metapart.partition.schemas import Partition
from metapart.quality.core.cache import QualityCache, build_cache
from metapart.sampler.schemas import ChainConfig, SampleSet

logger = logging.getLogger(__name__)


def conditional_probabilities(weights: np.ndarray) -> np.ndarray:
    """Normalize candidate qualities to move probabilities."""
    weights = np.asarray(weights, dtype=np.float64)
    total = weights.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise NumericUnderflowError(f"all candidate qualities underflowed (sum={total})")
    return weights / total


def _draw(probs: np.ndarray, u: float) -> int:
    cumulative = np.cumsum(probs)
    j = int(np.searchsorted(cumulative, u * cumulative[-1], side="right"))
    # u * total can round up onto the last edge
    return min(j, probs.size - 1)


def gibbs_step(cache: QualityCache, point: int, u: float) -> int:
    """
    Redraw the cluster of one point from its full conditional and apply the move.

    A point alone in its cluster stays put: leaving would empty it.

    Returns:
        the point's cluster after the step
    """
    source = int(cache.labels[point])
    if cache.sizes[source] == 1:
        return source
    probs = conditional_probabilities(cache.candidate_qualities(point))
    target = _draw(probs, u)
    if target != source:
        cache.apply_move(point, target)
    return target


def gibbs_sweep(cache: QualityCache, rng: np.random.Generator) -> QualityCache:
    """
    One pass over all n points in uniformly random order.

    Args:
        cache: quality cache holding the current partition (mutated in place)
        rng: chain random generator

    Returns:
        the same cache, now holding the next partition of the chain
    """
    cache.verify()
    order = rng.permutation(cache.n)
    uniforms = rng.random(cache.n)
    for point, u in zip(order, uniforms):
        gibbs_step(cache, int(point), u)
    return cache


def _check_budget(n: int, cfg: ChainConfig) -> None:
    steps = n * cfg.s * (cfg.burn_in + cfg.samples * cfg.thinning)
    if steps > settings.MAX_CHAIN_STEPS:
        raise BudgetExceededError(
            f"chain needs {steps:,} candidate evaluations, budget is {settings.MAX_CHAIN_STEPS:,} "
            f"(raise METAPART_MAX_CHAIN_STEPS or lower t0/m)"
        )


def run_chain(points: PointSet, seed_partition: Partition, cfg: ChainConfig) -> SampleSet:
    """
    Burn in for t0 sweeps, then keep the partition after every thinning-th sweep
    until m samples are collected.
    """
    if seed_partition.n != points.n:
        raise ParameterError(f"seed partition covers {seed_partition.n} points, dataset has {points.n}")
    if seed_partition.s != cfg.s:
        raise ParameterError(f"seed partition has s={seed_partition.s}, chain expects s={cfg.s}")
    if cfg.s > points.n:
        raise ParameterError(f"s={cfg.s} exceeds n={points.n}")
    _check_budget(points.n, cfg)

    rng = make_rng(cfg.seed)
    cache = build_cache(seed_partition, points, cfg.quality, cfg.kernel)
    total_sweeps = cfg.burn_in + cfg.samples * cfg.thinning

    logger.info(
        f"Running chain: n={points.n}, s={cfg.s}, quality={cfg.quality}, "
        f"t0={cfg.burn_in}, m={cfg.samples}, thinning={cfg.thinning}, seed={cfg.seed}"
    )

    labels = np.empty((cfg.samples, points.n), dtype=np.int64)
    qualities = np.empty(cfg.samples)
    moved = 0
    kept = 0
    previous = cache.labels.copy()

    for sweep in range(total_sweeps):
        gibbs_sweep(cache, rng)
        current = cache.labels
        moved += int(np.count_nonzero(current != previous))
        previous = current.copy()

        after_burn_in = sweep + 1 - cfg.burn_in
        if after_burn_in > 0 and after_burn_in % cfg.thinning == 0:
            labels[kept] = canonical_labels(current)
            qualities[kept] = cache.quality
            kept += 1

        if (sweep + 1) % settings.PROGRESS_EVERY == 0:
            phase = "burn-in" if sweep < cfg.burn_in else "sampling"
            logger.info(f"Sweep {sweep + 1}/{total_sweeps} ({phase}), Q={cache.quality:.6g}, kept={kept}")

    distinct = len({row.tobytes() for row in labels})
    diagnostics = {
        "move_rate": moved / float(max(1, total_sweeps * points.n)),
        "distinct_partitions": distinct,
        "mean_quality": float(qualities.mean()),
        "chains": 1,
    }
    logger.info(f"Chain completed: {kept} samples, {distinct} distinct, move_rate={diagnostics['move_rate']:.3f}")

    return SampleSet(
        labels=labels,
        qualities=qualities,
        s=cfg.s,
        sigma=cfg.kernel.bandwidth,
        quality_kind=cfg.quality,
        seed=cfg.seed,
        config=cfg,
        diagnostics=diagnostics,
    )


def merge_sample_sets(sets: Sequence[SampleSet], seed: Optional[int] = None) -> SampleSet:
    """Concatenate chains in order. All sets must share n, s, sigma and quality kind."""
    if not sets:
        raise ParameterError("nothing to merge")
    head = sets[0]
    for other in sets[1:]:
        if (other.n, other.s, other.sigma, other.quality_kind) != (head.n, head.s, head.sigma, head.quality_kind):
            raise ParameterError("sample sets disagree on n, s, sigma or quality kind")
    if len(sets) == 1 and seed is None:
        return head

    labels = np.concatenate([z.labels for z in sets], axis=0)
    qualities = np.concatenate([z.qualities for z in sets])
    diagnostics = {
        "move_rate": float(np.mean([z.diagnostics.get("move_rate", 0.0) for z in sets])),
        "distinct_partitions": len({row.tobytes() for row in labels}),
        "mean_quality": float(qualities.mean()),
        "chains": int(sum(z.diagnostics.get("chains", 1) for z in sets)),
    }
    return SampleSet(
        labels=labels,
        qualities=qualities,
        s=head.s,
        sigma=head.sigma,
        quality_kind=head.quality_kind,
        seed=head.seed if seed is None else seed,
        config=head.config,
        diagnostics=diagnostics,
    )


def split_samples(m: int, chains: int) -> List[int]:
    """m/c per chain, remainder spread over the first chains."""
    base, extra = divmod(m, chains)
    return [base + (1 if c < extra else 0) for c in range(chains)]


def run_chains(
    points: PointSet,
    seed_partition: Partition,
    cfg: ChainConfig,
    chain_seeds: Sequence[int],
    n_jobs: int = 1,
) -> SampleSet:
    """Independent chains with their own seeds, concatenated in chain order."""
    chains = len(chain_seeds)
    if chains < 1 or chains > cfg.samples:
        raise ParameterError(f"need 1 <= chains <= m, got chains={chains}, m={cfg.samples}")
    if chains == 1:
        single = run_chain(points, seed_partition, cfg.model_copy(update={"seed": int(chain_seeds[0])}))
        return merge_sample_sets([single], seed=cfg.seed)

    counts = split_samples(cfg.samples, chains)
    configs = [
        cfg.model_copy(update={"seed": int(seed), "samples": count})
        for seed, count in zip(chain_seeds, counts)
    ]
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_chain)(points, seed_partition, chain_cfg) for chain_cfg in configs
    )
    return merge_sample_sets(results, seed=cfg.seed)
