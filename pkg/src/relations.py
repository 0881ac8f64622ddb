"""Polynomial relations between features and their drift.

A relation regresses one numeric column on products of at most two other
columns (total degree <= 2). Fitted on the reference data and frozen, it
acts as a sensor: on drifted data its out-of-sample R^2 degrades.
"""
import itertools
import logging
from typing import NamedTuple, Sequence

import numpy as np

from config import DEFAULT_RELATION_THRESHOLD, DEFAULT_REPLICATES, DEFAULT_TRIM
from control import MIN_REPLICATES, interval_from_values
from empirical import SeedLike, map_seeded
from errors import DegenerateSampleError, MissingFeatureError, NotApplicableError
from models import ALL_TERMS, ControlInterval, Dataset, PolyRelation, TestResult, reaches

logger = logging.getLogger(__name__)


class RelationDrift(NamedTuple):
    r_squared_cur: float
    degradation: float
    result: TestResult


def design_matrix(dataset: Dataset, regressors: tuple[str, str], terms: Sequence[str]) -> np.ndarray:
    """Term columns of the relation, without the intercept."""
    for name in regressors:
        if not dataset.has(name):
            raise MissingFeatureError(name)
    xa = dataset.numeric(regressors[0])
    xb = dataset.numeric(regressors[1])
    columns = {'a': xa, 'b': xb, 'ab': xa * xb, 'aa': xa * xa, 'bb': xb * xb}
    return np.column_stack([columns[t] for t in terms])


def r_squared(y: np.ndarray, predicted: np.ndarray) -> float:
    """1 - SS_res / SS_tot."""
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        raise NotApplicableError('R^2 undefined: the target has zero variance')
    return 1.0 - float(np.sum((y - predicted) ** 2)) / ss_tot


def fit_relation(dataset: Dataset, target: str, regressors: tuple[str, str],
                 terms: Sequence[str] = ALL_TERMS) -> PolyRelation:
    """Least-squares fit of target on the chosen terms of the regressor pair."""
    if not dataset.has(target):
        raise MissingFeatureError(target)
    terms = tuple(terms)
    x = design_matrix(dataset, tuple(regressors), terms)
    design = np.column_stack([np.ones(dataset.n), x])
    if dataset.n < design.shape[1] + 2:
        raise DegenerateSampleError(
            f'{dataset.n} rows are too few to fit {design.shape[1]} coefficients')
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise DegenerateSampleError(
            f"design matrix for {target} ~ {regressors} is rank deficient")
    y = dataset.numeric(target)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    r2 = r_squared(y, design @ coef)
    return PolyRelation(target=target, regressors=tuple(regressors), terms=terms,
                        coefficients=tuple(float(c) for c in coef[1:]), intercept=float(coef[0]),
                        r_squared=r2, n_rows=dataset.n)


def predict(rel: PolyRelation, dataset: Dataset) -> np.ndarray:
    return rel.intercept + design_matrix(dataset, rel.regressors, rel.terms) @ np.asarray(rel.coefficients)


def relation_drift_score(rel: PolyRelation, cur: Dataset,
                         threshold: float = DEFAULT_RELATION_THRESHOLD) -> RelationDrift:
    """Out-of-sample R^2 of the frozen relation and its drop from the reference fit."""
    if not cur.has(rel.target):
        raise MissingFeatureError(rel.target)
    r2_cur = r_squared(cur.numeric(rel.target), predict(rel, cur))
    degradation = rel.r_squared - r2_cur
    # Improvement on current data is not drift
    effect = max(0.0, degradation)
    result = TestResult(
        test_name=f'relation[{rel.target}]', statistic=degradation, effect_size=effect,
        decision='drift' if reaches(effect, threshold) else 'no-drift', alpha_or_threshold=threshold,
        metadata={'relation': rel.describe(), 'r_squared_ref': rel.r_squared, 'r_squared_cur': r2_cur},
    )
    return RelationDrift(r_squared_cur=r2_cur, degradation=degradation, result=result)


def relation_band(rel: PolyRelation, cur: Dataset, replicates: int = DEFAULT_REPLICATES,
                  trim: float = DEFAULT_TRIM, seed: SeedLike = 0, workers: int = 1) -> ControlInterval:
    """Bootstrap control interval of the relation's R^2 on resampled rows of `cur`."""
    if replicates < MIN_REPLICATES:
        raise ValueError(f'replicates ({replicates}) must be >= {MIN_REPLICATES}')
    if not cur.has(rel.target):
        raise MissingFeatureError(rel.target)
    y = cur.numeric(rel.target)
    predicted = predict(rel, cur)
    n = len(y)

    def replicate(rng: np.random.Generator) -> float:
        idx = rng.integers(0, n, size=n)
        return r_squared(y[idx], predicted[idx])

    values = np.asarray(map_seeded(replicate, seed, replicates, workers), dtype=float)
    return interval_from_values(values, trim, method='bootstrap', keep_replicates=True)


def mine_relations(dataset: Dataset, min_r2: float = 0.9, terms: Sequence[str] = ALL_TERMS) -> list[PolyRelation]:
    """Every numeric target against every pair of other numeric columns, kept when R^2 >= min_r2."""
    numeric = dataset.numeric_columns()
    found: list[PolyRelation] = []
    for target in numeric:
        others = [c for c in numeric if c != target]
        for pair in itertools.combinations(others, 2):
            try:
                rel = fit_relation(dataset, target, pair, terms)
            except (DegenerateSampleError, NotApplicableError) as exc:
                logger.debug('skipping %s ~ %s: %s', target, pair, exc)
                continue
            if rel.r_squared >= min_r2:
                found.append(rel)
    found.sort(key=lambda r: -r.r_squared)
    logger.info('mined %d relation(s) with R^2 >= %g', len(found), min_r2)
    return found
