"""Empirical distribution functions, resampling and accuracy statistics."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Hashable, Optional, Sequence, TypeVar, Union

import numpy as np

from models import EmpiricalCdf, LabeledSample, Sample

logger = logging.getLogger(__name__)

T = TypeVar('T')
SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

# Guards ceil/floor against q*n landing a hair above an integer
RANK_EPSILON = 1e-9


# region Seeding

def make_rng(seed: SeedLike) -> np.random.Generator:
    """Generator for an int seed, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_generators(seed: SeedLike, count: int) -> list[np.random.Generator]:
    """One independent generator per unit, derived from the master seed."""
    if isinstance(seed, np.random.Generator):
        # Draw a child entropy value so a Generator can seed a family too
        seed = int(seed.integers(0, 2**63))
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in seed.spawn(count)]


def map_seeded(fn: Callable[[np.random.Generator], T], seed: SeedLike, count: int,
               workers: int = 1) -> list[T]:
    """Apply `fn` to `count` derived generators, in unit order.

    Unit i always gets the same generator, so the result does not depend
    on `workers`.
    """
    if count < 0:
        raise ValueError(f'count ({count}) must be >= 0')
    rngs = spawn_generators(seed, count)
    logger.debug('fan-out of %d seeded units over %d worker(s)', count, workers)
    if workers <= 1 or count <= 1:
        return [fn(rng) for rng in rngs]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, rngs))

# endregion

# region Empirical CDF

def ecdf_build(sample: Union[Sample, Sequence[float], np.ndarray]) -> EmpiricalCdf:
    """Empirical distribution function of a sample."""
    values = sample.array if isinstance(sample, Sample) else Sample(values=sample).array
    return EmpiricalCdf(sorted_values=np.sort(values))


def ecdf_evaluate(cdf: EmpiricalCdf, x):
    """F_e(x) = #{values <= x} / n for a scalar or array x."""
    return cdf(x)


def ecdf_quantile(cdf: EmpiricalCdf, q: float) -> float:
    """The ceil(q*n)-th smallest value; q=0 gives the minimum."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f'quantile level q ({q}) must be in [0, 1]')
    rank = max(1, math.ceil(q * cdf.n - RANK_EPSILON))
    return cdf.sorted_values[rank - 1]


def prob_below(cdf: EmpiricalCdf, threshold: float, inclusive: bool = False) -> float:
    """Empirical P(X < threshold), or P(X <= threshold) when inclusive."""
    side = 'right' if inclusive else 'left'
    return int(np.searchsorted(cdf.array, threshold, side=side)) / cdf.n

# endregion

# region Accuracy

def sample_accuracy(s: LabeledSample) -> float:
    """Fraction of items whose prediction equals the label."""
    return float(np.mean(s.correct))


def conditional_error_rates(s: LabeledSample,
                            labels: Optional[Sequence[Hashable]] = None) -> dict[Hashable, Optional[float]]:
    """Mistake fraction among items with each true label.

    `labels` defaults to the predicted alphabet; labels never seen as a
    true label map to None.
    """
    correct = s.correct
    true_labels = s.labels
    totals: dict[Hashable, int] = {}
    mistakes: dict[Hashable, int] = {}
    for y, ok in zip(true_labels, correct):
        totals[y] = totals.get(y, 0) + 1
        if not ok:
            mistakes[y] = mistakes.get(y, 0) + 1

    rates: dict[Hashable, Optional[float]] = {
        y: mistakes.get(y, 0) / total for y, total in totals.items()
    }
    if labels is None:
        labels = list(dict.fromkeys(s.predictions))
    for y in labels:
        if y not in rates:
            logger.warning('label %r absent from sample; error rate undefined', y)
            rates[y] = None
    return rates

# endregion

# region Resampling

def resample_with_replacement(source, m: int, seed: SeedLike):
    """Draw m items i.i.d. uniformly from `source`.

    Returns the same kind of object as the source: Sample, LabeledSample,
    numpy array or list.
    """
    if m < 1:
        raise ValueError(f'resample size m ({m}) must be >= 1')
    n = _source_size(source)
    if n == 0:
        raise ValueError('cannot resample an empty source')
    idx = make_rng(seed).integers(0, n, size=m)
    return _take(source, idx)


def balanced_resample(groups: dict[Hashable, Sequence], m: int, seed: SeedLike) -> list[tuple[Hashable, object]]:
    """Draw m (group, item) pairs: a group uniformly, then an item within it."""
    if m < 1:
        raise ValueError(f'resample size m ({m}) must be >= 1')
    if not groups:
        raise ValueError('balanced resampling needs at least one group')
    for name, members in groups.items():
        if len(members) == 0:
            raise ValueError(f"group '{name}' is empty")

    rng = make_rng(seed)
    names = list(groups)
    picks = rng.integers(0, len(names), size=m)
    out: list[tuple[Hashable, object]] = []
    # Items are drawn per position so the stream is fixed for a given seed
    for g in picks:
        members = groups[names[g]]
        out.append((names[g], members[int(rng.integers(0, len(members)))]))
    return out


def bootstrap_replicates(values: np.ndarray, statistic: Callable[[np.ndarray], float], k: int,
                         seed: SeedLike, workers: int = 1) -> np.ndarray:
    """`statistic` on k resamples of `values` drawn at the source size."""
    values = np.asarray(values)
    n = len(values)
    if n == 0:
        raise ValueError('cannot bootstrap an empty source')

    def replicate(rng: np.random.Generator) -> float:
        return float(statistic(values[rng.integers(0, n, size=n)]))

    return np.asarray(map_seeded(replicate, seed, k, workers), dtype=float)


def _source_size(source) -> int:
    if isinstance(source, (Sample, LabeledSample)):
        return source.n
    return len(source)


def _take(source, idx: np.ndarray):
    if isinstance(source, Sample):
        return Sample(values=source.array[idx])
    if isinstance(source, LabeledSample):
        return LabeledSample(items=tuple(source.items[i] for i in idx))
    if isinstance(source, np.ndarray):
        return source[idx]
    return [source[i] for i in idx]

# endregion
