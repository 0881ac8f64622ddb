"""Control intervals for performance statistics.

Three routes to the same object: trim the order statistics of a list of
scores, trim bootstrap replicates of a statistic, or use the normal
approximation of the sample mean.
"""
import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from config import DEFAULT_REPLICATES, DEFAULT_TRIM
from empirical import (
    RANK_EPSILON, SeedLike, bootstrap_replicates, ecdf_build, map_seeded, prob_below, spawn_generators
)
from models import (
    ControlCheck, ControlInterval, LabeledSample, ModelComparison, RequirementCheck, Sample, StatisticSpec
)
from pvalues import normal_ppf

logger = logging.getLogger(__name__)

MIN_REPLICATES = 100
CLT_MIN_N = 30
SMALL_SOURCE_N = 30

Source = Union[Sample, LabeledSample]


def statistic_values(source: Source) -> np.ndarray:
    """Values a statistic is computed over: raw values or correctness indicators."""
    if isinstance(source, LabeledSample):
        return source.correct
    return source.array


# region Trimming

def trim_count(k: int, trim: float) -> int:
    """Order statistics removed from each side of k scores."""
    return math.floor(trim * k + RANK_EPSILON)


def trimmed_interval(scores: Union[Sample, Sequence[float], np.ndarray],
                     trim: float = DEFAULT_TRIM) -> ControlInterval:
    """[score at rank floor(trim*k)+1, score at rank k-floor(trim*k)], confidence 1-2*trim."""
    values = scores.array if isinstance(scores, Sample) else Sample(values=scores).array
    return interval_from_values(values, trim, method='trimmed')


def interval_from_values(values: np.ndarray, trim: float, method: str, keep_replicates: bool = False) -> ControlInterval:
    if not 0.0 < trim < 0.5:
        raise ValueError(f'trim ({trim}) must be in (0, 0.5)')
    k = len(values)
    needed = math.ceil(1.0 / trim - RANK_EPSILON)
    if k < needed:
        raise ValueError(f'{k} scores are too few to trim {trim} per side; need at least {needed}')
    cut = trim_count(k, trim)
    ordered = np.sort(values)
    return ControlInterval(
        lower=float(ordered[cut]),
        upper=float(ordered[k - cut - 1]),
        confidence=1.0 - 2.0 * trim,
        method=method,
        replicate_count=k,
        replicates=tuple(values.tolist()) if keep_replicates else None,
    )

# endregion

# region Resampling intervals

def bootstrap_interval(source: Source, stat: Optional[StatisticSpec] = None,
                       replicates: int = DEFAULT_REPLICATES, trim: float = DEFAULT_TRIM,
                       seed: SeedLike = 0, workers: int = 1) -> ControlInterval:
    """Trim the statistic over `replicates` resamples of the source."""
    stat = stat or StatisticSpec()
    values = bootstrap_statistics(source, stat, replicates, seed, workers)
    return interval_from_values(values, trim, method='bootstrap', keep_replicates=True)


def bootstrap_statistics(source: Source, stat: StatisticSpec, replicates: int,
                         seed: SeedLike, workers: int = 1) -> np.ndarray:
    if replicates < MIN_REPLICATES:
        raise ValueError(f'replicates ({replicates}) must be >= {MIN_REPLICATES}')
    values = statistic_values(source)
    if len(values) < SMALL_SOURCE_N:
        logger.warning('bootstrapping a source of only %d items', len(values))
    logger.debug('bootstrap: %d replicates of size %d', replicates, len(values))
    return bootstrap_replicates(values, stat.compute, replicates, seed, workers)


def fresh_sample_interval(draw: Callable[[np.random.Generator], Source],
                          stat: Optional[StatisticSpec] = None,
                          replicates: int = DEFAULT_REPLICATES, trim: float = DEFAULT_TRIM,
                          seed: SeedLike = 0, workers: int = 1) -> ControlInterval:
    """Trim the statistic over fresh samples produced by `draw`.

    For when new samples are cheap to get, e.g. a simulator or a large
    labeled pool.
    """
    stat = stat or StatisticSpec()
    if replicates < MIN_REPLICATES:
        raise ValueError(f'replicates ({replicates}) must be >= {MIN_REPLICATES}')

    def replicate(rng: np.random.Generator) -> float:
        return stat.compute(statistic_values(draw(rng)))

    values = np.asarray(map_seeded(replicate, seed, replicates, workers), dtype=float)
    return interval_from_values(values, trim, method='fresh', keep_replicates=True)


def clt_interval(sample: Union[Sample, Sequence[float], np.ndarray], confidence: float = 0.95) -> ControlInterval:
    """mean +/- z * s / sqrt(n) with s using divisor n-1."""
    values = sample.array if isinstance(sample, Sample) else Sample(values=sample).array
    n = len(values)
    if n < 2:
        raise ValueError(f'CLT interval needs n >= 2, got {n}')
    if not 0.0 < confidence < 1.0:
        raise ValueError(f'confidence ({confidence}) must be in (0, 1)')
    if n < CLT_MIN_N:
        logger.warning('CLT interval on n=%d < %d observations', n, CLT_MIN_N)
    mean = float(np.mean(values))
    s = float(np.std(values, ddof=1))
    z = normal_ppf(0.5 + confidence / 2.0)
    half = z * s / math.sqrt(n)
    return ControlInterval(lower=mean - half, upper=mean + half, confidence=confidence, method='clt')

# endregion

# region Judging

def compare_models(scores_a: Source, scores_b: Source, stat: Optional[StatisticSpec] = None,
                   replicates: int = DEFAULT_REPLICATES, trim: float = DEFAULT_TRIM,
                   seed: SeedLike = 0, workers: int = 1) -> ModelComparison:
    """Bootstrap both models; disjoint intervals mean distinguishable."""
    seed_a, seed_b = spawn_generators(seed, 2)
    interval_a = bootstrap_interval(scores_a, stat, replicates, trim, seed_a, workers)
    interval_b = bootstrap_interval(scores_b, stat, replicates, trim, seed_b, workers)
    return ModelComparison(interval_a=interval_a, interval_b=interval_b,
                           distinguishable=not interval_a.overlaps(interval_b))


def check_in_control(interval: ControlInterval, observed: float) -> ControlCheck:
    if observed < interval.lower:
        side = 'below'
    elif observed > interval.upper:
        side = 'above'
    else:
        side = 'inside'
    if side != 'inside':
        logger.info('observed %g is %s the control interval [%g, %g]',
                    observed, side, interval.lower, interval.upper)
    return ControlCheck(observed=observed, side=side)


def requirement_check(source: Source, stat: Optional[StatisticSpec] = None, floor: float = 0.0,
                      max_risk: float = 0.05, replicates: int = DEFAULT_REPLICATES,
                      seed: SeedLike = 0, workers: int = 1) -> RequirementCheck:
    """Empirical risk that the statistic falls under `floor`, from bootstrap replicates."""
    stat = stat or StatisticSpec()
    if not 0.0 < max_risk < 1.0:
        raise ValueError(f'max_risk ({max_risk}) must be in (0, 1)')
    values = bootstrap_statistics(source, stat, replicates, seed, workers)
    risk = prob_below(ecdf_build(values), floor)
    return RequirementCheck(floor=floor, max_risk=max_risk, risk=risk, met=risk < max_risk,
                            replicate_count=replicates)

# endregion
