"""Data slices: membership, error-slice mining, slice drift and density typing."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np

from config import DEFAULT_ALPHA
from drift import dissimilarity_index, yates_diff_proportions
from empirical import ecdf_build, ecdf_quantile
from errors import DataError, MissingFeatureError
from models import (
    CategoricalCounts, Dataset, DensitySliceSet, PValue, Predicate, ProportionPair, Slice, SliceStats, TestResult
)
from pvalues import holm_adjust

logger = logging.getLogger(__name__)

DENSITY_TYPES = ('A', 'B', 'C', 'D')
TRUE_TOKENS = {'1', '1.0', 'true', 'yes', 't', 'y'}
FALSE_TOKENS = {'0', '0.0', 'false', 'no', 'f', 'n'}

__all__ = [
    'slice_membership', 'slice_mask', 'slice_stats', 'mine_error_slices', 'slice_drift_test',
    'holm_adjust', 'density_slice_map', 'density_drift_test', 'correctness_indicators',
    'RankedSlice', 'SliceDriftResult', 'DensityDriftResult', 'DENSITY_TYPES',
]


class RankedSlice(NamedTuple):
    slice: Slice
    stats: SliceStats


@dataclass
class SliceDriftResult:
    """Per-slice raw tests, their Holm-adjusted p-values and the family verdict."""

    per_slice: list[TestResult]
    adjusted: list[float]
    family: TestResult


@dataclass
class DensityDriftResult:
    reference_counts: CategoricalCounts
    current_counts: CategoricalCounts
    per_type: list[TestResult]
    adjusted: list[float]
    family: TestResult
    dissimilarity: TestResult
    most_changed_type: str
    gap_rows: int = 0
    metadata: dict = field(default_factory=dict)


# region Membership

def slice_membership(slice: Slice, row: Mapping) -> bool:
    """True when the row satisfies every predicate; interval ends inclusive."""
    for predicate in slice.predicates:
        if predicate.feature not in row:
            raise MissingFeatureError(predicate.feature)
        if not predicate.matches(row[predicate.feature]):
            return False
    return True


def slice_mask(slice: Slice, dataset: Dataset) -> np.ndarray:
    """Vectorized membership over every row of the dataset."""
    mask = np.ones(dataset.n, dtype=bool)
    for predicate in slice.predicates:
        mask &= predicate_mask(predicate, dataset)
    return mask


def predicate_mask(predicate: Predicate, dataset: Dataset) -> np.ndarray:
    if not dataset.has(predicate.feature):
        raise MissingFeatureError(predicate.feature)
    kind = dataset.kinds[predicate.feature]
    if predicate.kind == 'interval':
        if kind != 'numeric':
            raise DataError(DataError.TYPE_CONFLICT,
                            f"interval predicate on categorical column '{predicate.feature}'")
        x = dataset.numeric(predicate.feature)
        return (x >= predicate.min) & (x <= predicate.max)
    if kind != 'categorical':
        raise DataError(DataError.TYPE_CONFLICT,
                        f"value-set predicate on numeric column '{predicate.feature}'")
    return np.isin(dataset.values(predicate.feature).astype(str), list(predicate.values))


def correctness_indicators(dataset: Dataset, column: str) -> np.ndarray:
    """1.0 where the model was right, 0.0 where it erred."""
    if not dataset.has(column):
        raise MissingFeatureError(column)
    if dataset.kinds[column] == 'numeric':
        x = dataset.numeric(column)
        if not np.all((x == 0) | (x == 1)):
            raise DataError(DataError.SCHEMA, f"correctness column '{column}' must hold 0/1")
        return x.astype(float)
    tokens = [str(v).strip().lower() for v in dataset.values(column)]
    bad = sorted({t for t in tokens if t not in TRUE_TOKENS | FALSE_TOKENS})
    if bad:
        raise DataError(DataError.SCHEMA, f"correctness column '{column}' has non-boolean values {bad[:5]}")
    return np.asarray([1.0 if t in TRUE_TOKENS else 0.0 for t in tokens])


def slice_stats(slice: Slice, dataset: Dataset, correctness: Optional[str] = None) -> SliceStats:
    """Support, fractional support and, given a correctness column, the error rate."""
    mask = slice_mask(slice, dataset)
    return _stats_from_mask(mask, correctness_indicators(dataset, correctness) if correctness else None)


def _stats_from_mask(mask: np.ndarray, correct: Optional[np.ndarray]) -> SliceStats:
    support = int(mask.sum())
    error_rate = None
    if correct is not None and support > 0:
        error_rate = float(1.0 - correct[mask].mean())
    return SliceStats(support=support, fractional_support=support / len(mask), error_rate=error_rate)

# endregion

# region Error-slice mining

def candidate_predicates(dataset: Dataset, exclude: Sequence[str] = ()) -> list[Predicate]:
    """Single values of categorical columns, quartile intervals of numeric ones."""
    candidates: list[Predicate] = []
    for name in dataset.columns:
        if name in exclude:
            continue
        if dataset.kinds[name] == 'categorical':
            for value in sorted(set(str(v) for v in dataset.values(name))):
                candidates.append(Predicate(feature=name, kind='set', values=(value,)))
        else:
            cdf = ecdf_build(dataset.numeric(name))
            bounds = [cdf.minimum] + [ecdf_quantile(cdf, q) for q in (0.25, 0.5, 0.75)] + [cdf.maximum]
            seen = set()
            for lo, hi in zip(bounds, bounds[1:]):
                if (lo, hi) not in seen:
                    seen.add((lo, hi))
                    candidates.append(Predicate(feature=name, kind='interval', min=lo, max=hi))
    return candidates


def mine_error_slices(dataset: Dataset, correctness: str, max_predicates: int = 1,
                      min_support: float = 0.01, lift: float = 1.5,
                      exclude: Sequence[str] = ()) -> list[RankedSlice]:
    """Slices whose error rate is at least `lift` times the overall rate.

    Candidates are single predicates and, for max_predicates=2, pairs on
    different features. Ranked by error rate, then support.
    """
    if max_predicates not in (1, 2):
        raise ValueError(f'max_predicates ({max_predicates}) must be 1 or 2')
    if not 0.0 <= min_support <= 1.0:
        raise ValueError(f'min_support ({min_support}) must be in [0, 1]')
    correct = correctness_indicators(dataset, correctness)
    overall = float(1.0 - correct.mean())
    if overall == 0.0:
        logger.info('no mistakes in the dataset; nothing to mine')
        return []

    candidates = candidate_predicates(dataset, exclude=(correctness, *exclude))
    masks = [predicate_mask(p, dataset) for p in candidates]
    combos: list[tuple[int, ...]] = [(i,) for i in range(len(candidates))]
    if max_predicates == 2:
        combos += [(i, j) for i, j in itertools.combinations(range(len(candidates)), 2)
                   if candidates[i].feature != candidates[j].feature]
    logger.debug('mining %d candidate slices', len(combos))

    found: list[RankedSlice] = []
    for combo in combos:
        mask = masks[combo[0]] if len(combo) == 1 else masks[combo[0]] & masks[combo[1]]
        stats = _stats_from_mask(mask, correct)
        if stats.fractional_support < min_support or stats.error_rate is None:
            continue
        if stats.error_rate >= lift * overall:
            found.append(RankedSlice(Slice(predicates=tuple(candidates[i] for i in combo)), stats))

    found.sort(key=lambda r: (-r.stats.error_rate, -r.stats.support))
    return found

# endregion

# region Slice drift

def _holm_family(results: list[TestResult], alpha: float) -> tuple[list[TestResult], list[float], float]:
    """Holm across the family; each member carries its adjusted p-value, the raw one in metadata.

    Not-applicable members enter with p = 1 and keep their decision.
    """
    raw = [r.p_value.value if r.p_value is not None else 1.0 for r in results]
    adjusted, family_p = holm_adjust(raw)
    rewritten = []
    for result, p, p_adj in zip(results, raw, adjusted):
        if result.decision != 'not-applicable':
            result = result.model_copy(update={
                'p_value': PValue(value=p_adj),
                'decision': 'drift' if p_adj < alpha else 'no-drift',
                'metadata': {**result.metadata, 'raw_p_value': p},
            })
        rewritten.append(result)
    return rewritten, adjusted, family_p


def slice_drift_test(slices: Sequence[Slice], ref: Dataset, cur: Dataset,
                     alpha: float = DEFAULT_ALPHA) -> SliceDriftResult:
    """Yates test per slice on its fractional support, Holm across slices.

    Each side uses its own N. A slice whose 2x2 table is degenerate
    enters the family with p = 1.
    """
    if len(slices) == 0:
        raise ValueError('slice drift needs at least one slice')
    per_slice = []
    for i, s in enumerate(slices):
        pair = ProportionPair(successes_a=int(slice_mask(s, ref).sum()), trials_a=ref.n,
                              successes_b=int(slice_mask(s, cur).sum()), trials_b=cur.n)
        result = yates_diff_proportions(pair, alpha)
        per_slice.append(result.model_copy(update={
            'test_name': f'yates[slice {i}]',
            'metadata': {**result.metadata, 'slice': s.describe(),
                         'support_ref': pair.successes_a, 'support_cur': pair.successes_b},
        }))
    per_slice, adjusted, family_p = _holm_family(per_slice, alpha)
    top = int(np.argmin(adjusted))
    family = TestResult(test_name='slice_drift_holm', statistic=family_p, p_value=PValue(value=family_p),
                        decision='drift' if family_p < alpha else 'no-drift', alpha_or_threshold=alpha,
                        metadata={'K': len(slices), 'most_shifted_slice': slices[top].describe()})
    return SliceDriftResult(per_slice=per_slice, adjusted=adjusted, family=family)

# endregion

# region Density slices

def density_types(slice_set: DensitySliceSet, dataset: Dataset) -> tuple[np.ndarray, int]:
    """Type letter for every row, and how many rows fell into partition gaps."""
    n = dataset.n
    outside = np.zeros(n, dtype=bool)
    for feature, fr in slice_set.ranges().items():
        if not dataset.has(feature):
            raise MissingFeatureError(feature)
        if fr.values is not None:
            outside |= ~np.isin(dataset.values(feature).astype(str), list(fr.values))
        else:
            x = dataset.numeric(feature)
            outside |= (x < fr.min) | (x > fr.max)

    types = np.full(n, '', dtype=object)
    types[outside] = 'D'
    for cell in slice_set.slices:
        open_rows = types == ''
        if not open_rows.any():
            break
        hit = open_rows & slice_mask(cell.slice, dataset)
        types[hit] = cell.type
    gaps = types == ''
    gap_rows = int(gaps.sum())
    if gap_rows:
        logger.warning('%d row(s) inside the reference ranges hit no slice; typed C', gap_rows)
    types[gaps] = 'C'
    return types, gap_rows


def density_slice_map(slice_set: DensitySliceSet, dataset: Dataset) -> CategoricalCounts:
    """Counts of rows of each density type A, B, C and D."""
    types, _ = density_types(slice_set, dataset)
    return CategoricalCounts(labels=DENSITY_TYPES, counts=tuple(int(np.sum(types == t)) for t in DENSITY_TYPES))


def density_drift_test(slice_set: DensitySliceSet, ref: Dataset, cur: Dataset,
                       alpha: float = DEFAULT_ALPHA) -> DensityDriftResult:
    """Per-type difference in proportions with Holm, plus the dissimilarity of type mixes."""
    ref_counts = density_slice_map(slice_set, ref)
    cur_types, gap_rows = density_types(slice_set, cur)
    cur_counts = CategoricalCounts(labels=DENSITY_TYPES,
                                   counts=tuple(int(np.sum(cur_types == t)) for t in DENSITY_TYPES))

    per_type = []
    for t, n_ref, n_cur in zip(DENSITY_TYPES, ref_counts.counts, cur_counts.counts):
        pair = ProportionPair(successes_a=n_ref, trials_a=ref_counts.N, successes_b=n_cur, trials_b=cur_counts.N)
        result = yates_diff_proportions(pair, alpha)
        per_type.append(result.model_copy(update={'test_name': f'yates[type {t}]'}))
    per_type, adjusted, family_p = _holm_family(per_type, alpha)

    shifts = np.abs(cur_counts.proportions - ref_counts.proportions)
    most_changed = DENSITY_TYPES[int(np.argmax(shifts))]
    family = TestResult(test_name='density_drift_holm', statistic=family_p, p_value=PValue(value=family_p),
                        decision='drift' if family_p < alpha else 'no-drift', alpha_or_threshold=alpha,
                        metadata={'most_changed_type': most_changed, 'gap_rows': gap_rows})
    return DensityDriftResult(reference_counts=ref_counts, current_counts=cur_counts, per_type=per_type,
                              adjusted=adjusted, family=family,
                              dissimilarity=dissimilarity_index(ref_counts, cur_counts),
                              most_changed_type=most_changed, gap_rows=gap_rows)

# endregion
