"""Windowed drift sequencing against a fixed reference."""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import DEFAULT_ALPHA
from drift import PVALUE_TESTS, run_numeric_test
from models import PValue, TestResult
from pvalues import holm_adjust

logger = logging.getLogger(__name__)


@dataclass
class WindowResult:
    index: int
    start: int
    stop: int
    raw_p_value: float
    adjusted_p_value: float
    result: TestResult


@dataclass
class DriftSequence:
    """Per-window tests and the first window flagged after Holm adjustment."""

    windows: list[WindowResult]
    first_drift_index: Optional[int]
    family: TestResult


def window_bounds(n: int, window: int, step: int) -> list[tuple[int, int]]:
    """[start, stop) of every full window of `window` rows, advancing by `step`."""
    if window < 1:
        raise ValueError(f'window ({window}) must be >= 1')
    if step < 1:
        raise ValueError(f'step ({step}) must be >= 1')
    if window > n:
        raise ValueError(f'window ({window}) is longer than the current data ({n} rows)')
    return [(start, start + window) for start in range(0, n - window + 1, step)]


def drift_sequence(reference: np.ndarray, current: np.ndarray, window: int, step: int,
                   test: str = 'ks', alpha: float = DEFAULT_ALPHA) -> DriftSequence:
    """Test every sliding window of `current` against the whole reference.

    Raw p-values are Holm-adjusted across windows; the first window whose
    adjusted p-value is below alpha marks the drift point. With a single
    window this is the plain two-sample test.
    """
    if test not in PVALUE_TESTS:
        raise ValueError(f"sequencing needs a p-value test ({', '.join(PVALUE_TESTS)}), got '{test}'")
    reference = np.asarray(reference, dtype=float)
    current = np.asarray(current, dtype=float)
    bounds = window_bounds(len(current), window, step)

    raw_results = [run_numeric_test(test, reference, current[start:stop], alpha) for start, stop in bounds]
    raw = [r.p_value.value if r.p_value is not None else 1.0 for r in raw_results]
    adjusted, family_p = holm_adjust(raw)
    logger.debug('sequenced %d windows of %d rows (step %d)', len(bounds), window, step)

    windows = []
    first = None
    for i, ((start, stop), result, p, p_adj) in enumerate(zip(bounds, raw_results, raw, adjusted)):
        if result.decision != 'not-applicable':
            result = result.model_copy(update={
                'test_name': f'{result.test_name}[window {i}]',
                'p_value': PValue(value=p_adj),
                'decision': 'drift' if p_adj < alpha else 'no-drift',
                'metadata': {**result.metadata, 'raw_p_value': p, 'start': start, 'stop': stop},
            })
        if first is None and p_adj < alpha:
            first = i
        windows.append(WindowResult(index=i, start=start, stop=stop, raw_p_value=p,
                                    adjusted_p_value=p_adj, result=result))

    if first is not None:
        logger.info('drift first detected in window %d (rows %d-%d)', first, *bounds[first])
    family = TestResult(test_name=f'{test}_sequence_holm', statistic=family_p, p_value=PValue(value=family_p),
                        decision='drift' if family_p < alpha else 'no-drift', alpha_or_threshold=alpha,
                        metadata={'windows': len(bounds), 'window': window, 'step': step,
                                  'first_drift_index': first})
    return DriftSequence(windows=windows, first_drift_index=first, family=family)
