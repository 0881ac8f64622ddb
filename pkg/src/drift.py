"""Two-sample drift measures on numeric features and categorical distributions.

Every measure returns a TestResult. Tests backed by a p-value decide
against alpha; effect sizes and distances decide against a threshold.
"""
import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from config import DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD, DELTA_CLOSE_THRESHOLD
from errors import DegenerateSampleError, NotApplicableError
from models import CategoricalCounts, Dataset, PValue, ProportionPair, Sample, TestResult, reaches
from pvalues import chi2_sf, holm_adjust, kolmogorov_sf, normal_sf, permutation_pvalue, student_t_two_sided

logger = logging.getLogger(__name__)

SampleLike = Union[Sample, Sequence[float], np.ndarray]

# Cohen's thresholds, inclusive upward
D_THRESHOLDS = ((0.2, 'small'), (0.5, 'medium'), (0.8, 'large'))
H_THRESHOLDS = D_THRESHOLDS
W_THRESHOLDS = ((0.01, 'very small'), (0.2, 'small'), (0.5, 'medium'),
                (0.8, 'large'), (1.2, 'very large'), (2.0, 'huge'))


def effect_label(value: float, table=D_THRESHOLDS) -> Optional[str]:
    """Largest label whose threshold |value| reaches; None below the first."""
    label = None
    for threshold, name in table:
        if reaches(value, threshold):
            label = name
    return label


def _as_array(sample: SampleLike) -> np.ndarray:
    if isinstance(sample, Sample):
        return sample.array
    return Sample(values=sample).array


def _pvalue_result(test_name: str, statistic: float, p: float, alpha: float, **metadata) -> TestResult:
    p = min(1.0, max(0.0, p))
    return TestResult(test_name=test_name, statistic=statistic, p_value=PValue(value=p),
                      decision='drift' if p < alpha else 'no-drift',
                      alpha_or_threshold=alpha, metadata=metadata)


def _effect_result(test_name: str, effect: float, threshold: float, table=None, **metadata) -> TestResult:
    return TestResult(test_name=test_name, statistic=effect, effect_size=effect,
                      effect_label=effect_label(effect, table) if table else None,
                      decision='drift' if reaches(effect, threshold) else 'no-drift',
                      alpha_or_threshold=threshold, metadata=metadata)


def _distance_result(test_name: str, distance: float, threshold: Optional[float], **metadata) -> TestResult:
    if threshold is None:
        return TestResult(test_name=test_name, statistic=distance, effect_size=distance,
                          decision='not-applicable', alpha_or_threshold=0.0, metadata=metadata)
    return _effect_result(test_name, distance, threshold, **metadata)


def _not_applicable(test_name: str, alpha: float, reason: str, statistic: float = 0.0, **metadata) -> TestResult:
    logger.info('%s not applicable: %s', test_name, reason)
    return TestResult(test_name=test_name, statistic=statistic, decision='not-applicable',
                      alpha_or_threshold=alpha, metadata={'reason': reason, **metadata})


# region Numeric statistics

def ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """sup |F_a - F_b| over the pooled points."""
    a = np.sort(a)
    b = np.sort(b)
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side='right') / len(a)
    fb = np.searchsorted(b, pooled, side='right') / len(b)
    return float(np.max(np.abs(fa - fb)))


def welch_statistic(a: np.ndarray, b: np.ndarray) -> float:
    se2 = np.var(a, ddof=1) / len(a) + np.var(b, ddof=1) / len(b)
    if se2 == 0:
        return 0.0 if np.mean(a) == np.mean(b) else math.copysign(math.inf, np.mean(a) - np.mean(b))
    return float((np.mean(a) - np.mean(b)) / math.sqrt(se2))


def midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their mean rank."""
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    mean_rank = ends - (counts - 1) / 2.0
    return mean_rank[inverse]


def mann_whitney_u(a: np.ndarray, b: np.ndarray) -> float:
    """U of the first sample: pairs (a_i, b_j) with a_i > b_j, ties counting one half."""
    ranks = midranks(np.concatenate([a, b]))
    return float(np.sum(ranks[:len(a)]) - len(a) * (len(a) + 1) / 2.0)


def mann_whitney_centered(a: np.ndarray, b: np.ndarray) -> float:
    return mann_whitney_u(a, b) - len(a) * len(b) / 2.0


def wasserstein_1d(a: SampleLike, b: SampleLike) -> float:
    """Integral of |F_a - F_b| over the merged sorted samples."""
    a = np.sort(_as_array(a))
    b = np.sort(_as_array(b))
    merged = np.sort(np.concatenate([a, b]))
    widths = np.diff(merged)
    fa = np.searchsorted(a, merged[:-1], side='right') / len(a)
    fb = np.searchsorted(b, merged[:-1], side='right') / len(b)
    return float(np.sum(np.abs(fa - fb) * widths))


def mean_difference(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean(a) - np.mean(b))

# endregion

# region Numeric tests

def ks_two_sample(a: SampleLike, b: SampleLike, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Kolmogorov-Smirnov with the asymptotic p-value."""
    a, b = _as_array(a), _as_array(b)
    d = ks_statistic(a, b)
    n_a, n_b = len(a), len(b)
    lam = math.sqrt(n_a * n_b / (n_a + n_b)) * d
    return _pvalue_result('ks', d, kolmogorov_sf(lam), alpha, n_a=n_a, n_b=n_b)


def welch_t(a: SampleLike, b: SampleLike, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Welch's unequal-variance t test, Welch-Satterthwaite df."""
    a, b = _as_array(a), _as_array(b)
    n_a, n_b = len(a), len(b)
    if n_a < 2 or n_b < 2:
        raise DegenerateSampleError(f'Welch test needs n >= 2 per side, got {n_a} and {n_b}')
    va = float(np.var(a, ddof=1)) / n_a
    vb = float(np.var(b, ddof=1)) / n_b
    if va == 0 and vb == 0:
        raise DegenerateSampleError('Welch test undefined: both samples have zero variance')
    t = (float(np.mean(a)) - float(np.mean(b))) / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (n_a - 1) + vb ** 2 / (n_b - 1))
    return _pvalue_result('welch_t', t, student_t_two_sided(t, df), alpha, df=df, n_a=n_a, n_b=n_b)


def mann_whitney(a: SampleLike, b: SampleLike, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Mann-Whitney U, normal approximation with tie and continuity corrections."""
    a, b = _as_array(a), _as_array(b)
    n_a, n_b = len(a), len(b)
    pooled = np.concatenate([a, b])
    u = mann_whitney_u(a, b)
    n = n_a + n_b
    _, counts = np.unique(pooled, return_counts=True)
    tie_factor = 1.0 - float(np.sum(counts ** 3 - counts)) / (n ** 3 - n) if n > 1 else 0.0
    variance = tie_factor * n_a * n_b * (n + 1) / 12.0
    if variance <= 0:
        return _not_applicable('mann_whitney', alpha, 'all pooled values are identical',
                               statistic=u, n_a=n_a, n_b=n_b)
    z = max(0.0, abs(u - n_a * n_b / 2.0) - 0.5) / math.sqrt(variance)
    return _pvalue_result('mann_whitney', u, 2.0 * normal_sf(z), alpha, z=z, n_a=n_a, n_b=n_b)


def wasserstein_test(a: SampleLike, b: SampleLike, threshold: Optional[float] = None) -> TestResult:
    a, b = _as_array(a), _as_array(b)
    return _distance_result('wasserstein', wasserstein_1d(a, b), threshold, n_a=len(a), n_b=len(b))


def cohens_d(a: SampleLike, b: SampleLike, threshold: float = DEFAULT_EFFECT_THRESHOLD) -> TestResult:
    """(mean_a - mean_b) / pooled sd, pooled with divisor n_a + n_b - 2."""
    a, b = _as_array(a), _as_array(b)
    n_a, n_b = len(a), len(b)
    if n_a < 2 or n_b < 2:
        raise DegenerateSampleError(f"Cohen's d needs n >= 2 per side, got {n_a} and {n_b}")
    pooled_var = ((n_a - 1) * np.var(a, ddof=1) + (n_b - 1) * np.var(b, ddof=1)) / (n_a + n_b - 2)
    if pooled_var == 0:
        raise DegenerateSampleError("Cohen's d undefined: pooled standard deviation is zero")
    d = float((np.mean(a) - np.mean(b)) / math.sqrt(pooled_var))
    return _effect_result('cohens_d', d, threshold, D_THRESHOLDS, n_a=n_a, n_b=n_b)

# endregion

# region Categorical measures

def counts_from_values(values) -> CategoricalCounts:
    """Count each distinct value; labels in sorted order."""
    tally: dict[str, int] = {}
    for v in values:
        tally[str(v)] = tally.get(str(v), 0) + 1
    if not tally:
        raise ValueError('cannot count an empty column')
    return CategoricalCounts.from_mapping(dict(sorted(tally.items())))


def proportion_pair(values_a, values_b, success) -> ProportionPair:
    """Successes (value == success) and trials on each side."""
    success = str(success)
    values_a = [str(v) for v in values_a]
    values_b = [str(v) for v in values_b]
    return ProportionPair(successes_a=sum(v == success for v in values_a), trials_a=len(values_a),
                          successes_b=sum(v == success for v in values_b), trials_b=len(values_b))


def unified_labels(a: CategoricalCounts, b: CategoricalCounts) -> list[str]:
    """Labels of `a` in order, then labels only `b` has."""
    seen = dict.fromkeys(a.labels)
    for label in b.labels:
        seen.setdefault(label, None)
    return list(seen)


def _aligned_proportions(a: CategoricalCounts, b: CategoricalCounts):
    labels = unified_labels(a, b)
    return labels, a.aligned(labels) / a.N, b.aligned(labels) / b.N


def chi_square_gof(expected: CategoricalCounts, observed: CategoricalCounts,
                   alpha: float = DEFAULT_ALPHA) -> TestResult:
    """One-way chi-square of observed counts against expected counts."""
    if expected.N != observed.N:
        return _not_applicable('chi_square', alpha,
                               f'totals differ (expected N={expected.N}, observed N={observed.N})')
    labels = unified_labels(expected, observed)
    exp = expected.aligned(labels)
    obs = observed.aligned(labels)
    if np.any(exp == 0):
        zero = [label for label, e in zip(labels, exp) if e == 0]
        raise NotApplicableError(f'chi-square undefined: zero expected count for {zero}')
    stat = float(np.sum((obs - exp) ** 2 / exp))
    df = len(labels) - 1
    if df < 1:
        return _not_applicable('chi_square', alpha, 'a single category leaves no degrees of freedom')
    return _pvalue_result('chi_square', stat, chi2_sf(stat, df), alpha, df=df, N=expected.N)


def cohens_w(expected: CategoricalCounts, observed: CategoricalCounts,
             threshold: float = DEFAULT_EFFECT_THRESHOLD) -> TestResult:
    """sqrt(sum (p'_i - p_i)^2 / p_i) over the expected proportions p_i."""
    labels, p, p_obs = _aligned_proportions(expected, observed)
    if np.any(p == 0):
        zero = [label for label, v in zip(labels, p) if v == 0]
        raise NotApplicableError(f"Cohen's w undefined: zero expected proportion for {zero}")
    w = math.sqrt(float(np.sum((p_obs - p) ** 2 / p)))
    return _effect_result('cohens_w', w, threshold, W_THRESHOLDS, N_expected=expected.N, N_observed=observed.N)


def cohens_h(pair: ProportionPair, threshold: float = DEFAULT_EFFECT_THRESHOLD) -> TestResult:
    """arcsin(sqrt(pi_1)) - arcsin(sqrt(pi_2)), without the customary factor 2."""
    h = math.asin(math.sqrt(pair.pi_a)) - math.asin(math.sqrt(pair.pi_b))
    return _effect_result('cohens_h', h, threshold, H_THRESHOLDS, pi_a=pair.pi_a, pi_b=pair.pi_b)


def dissimilarity_value(a: CategoricalCounts, b: CategoricalCounts) -> float:
    _, p, q = _aligned_proportions(a, b)
    return 0.5 * float(np.sum(np.abs(p - q)))


def dissimilarity_index(a: CategoricalCounts, b: CategoricalCounts,
                        threshold: float = DELTA_CLOSE_THRESHOLD) -> TestResult:
    """Half the L1 distance between proportions; under 0.03 the two are very close."""
    return _effect_result('dissimilarity', dissimilarity_value(a, b), threshold, N_a=a.N, N_b=b.N)


def hellinger(a: CategoricalCounts, b: CategoricalCounts) -> float:
    """sqrt(1 - Bhattacharyya coefficient)."""
    _, p, q = _aligned_proportions(a, b)
    return math.sqrt(max(0.0, 1.0 - float(np.sum(np.sqrt(p * q)))))


def hellinger_test(a: CategoricalCounts, b: CategoricalCounts, threshold: Optional[float] = None) -> TestResult:
    return _distance_result('hellinger', hellinger(a, b), threshold, N_a=a.N, N_b=b.N)


def kl_divergence(p, q, base: float = math.e) -> float:
    """sum p_i log(p_i / q_i) over indices where both are non-zero.

    Inputs are normalized to sum to 1. Two CategoricalCounts are aligned on their label union.
    """
    if isinstance(p, CategoricalCounts) and isinstance(q, CategoricalCounts):
        _, p, q = _aligned_proportions(p, q)
    else:
        p = _probability_vector(p)
        q = _probability_vector(q)
    if len(p) != len(q):
        raise ValueError(f'probability vectors differ in length ({len(p)} vs {len(q)})')
    common = (p > 0) & (q > 0)
    if not np.any(common):
        raise NotApplicableError('KL divergence undefined: the vectors share no support')
    value = float(np.sum(p[common] * np.log(p[common] / q[common])))
    return value / math.log(base)


def _probability_vector(v) -> np.ndarray:
    if isinstance(v, CategoricalCounts):
        return v.proportions
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or len(arr) == 0:
        raise ValueError('probability vector must be a non-empty 1-D sequence')
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError('probability vector entries must be finite and non-negative')
    total = arr.sum()
    if total <= 0:
        raise ValueError('probability vector must have positive mass')
    return arr / total


def js_distance(a: CategoricalCounts, b: CategoricalCounts, base: float = 2.0) -> tuple[float, str]:
    """Square root of the Jensen-Shannon divergence and the label contributing most."""
    labels, p, q = _aligned_proportions(a, b)
    m = (p + q) / 2.0
    contrib = np.zeros(len(labels))
    for side in (p, q):
        nz = side > 0
        contrib[nz] += side[nz] * np.log(side[nz] / m[nz])
    divergence = float(np.sum(contrib)) / (2.0 * math.log(base))
    top = labels[int(np.argmax(contrib))]
    return math.sqrt(max(0.0, divergence)), top


def js_test(a: CategoricalCounts, b: CategoricalCounts, threshold: Optional[float] = None,
            base: float = 2.0) -> TestResult:
    distance, top = js_distance(a, b, base)
    return _distance_result('js_distance', distance, threshold, base=base, most_divergent_label=top,
                            N_a=a.N, N_b=b.N)


def yates_diff_proportions(pair: ProportionPair, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Continuity-corrected chi-square on the 2x2 success/failure table."""
    n11, n12 = pair.successes_a, pair.trials_a - pair.successes_a
    n21, n22 = pair.successes_b, pair.trials_b - pair.successes_b
    rows = (n11 + n12, n21 + n22)
    cols = (n11 + n21, n12 + n22)
    n = rows[0] + rows[1]
    if 0 in rows or 0 in cols:
        return _not_applicable('yates', alpha, 'a margin of the 2x2 table is zero',
                               pi_a=pair.pi_a, pi_b=pair.pi_b)
    corrected = max(0.0, abs(n11 * n22 - n12 * n21) - n / 2.0)
    stat = n * corrected ** 2 / (rows[0] * rows[1] * cols[0] * cols[1])
    return _pvalue_result('yates', stat, chi2_sf(stat, 1), alpha, df=1, pi_a=pair.pi_a, pi_b=pair.pi_b)

# endregion

# region Registries

def _numeric_ks(a, b, alpha, threshold):
    return ks_two_sample(a, b, alpha)


def _numeric_t(a, b, alpha, threshold):
    return welch_t(a, b, alpha)


def _numeric_mw(a, b, alpha, threshold):
    return mann_whitney(a, b, alpha)


def _numeric_wass(a, b, alpha, threshold):
    return wasserstein_test(a, b, threshold)


def _numeric_d(a, b, alpha, threshold):
    return cohens_d(a, b, DEFAULT_EFFECT_THRESHOLD if threshold is None else threshold)


NumericTest = Callable[[SampleLike, SampleLike, float, Optional[float]], TestResult]

# CLI name -> test(a, b, alpha, threshold)
NUMERIC_TESTS: dict[str, NumericTest] = {
    'ks': _numeric_ks,
    't': _numeric_t,
    'mw': _numeric_mw,
    'wass': _numeric_wass,
    'd': _numeric_d,
}

# Tests whose decision comes from a p-value
PVALUE_TESTS = ('ks', 't', 'mw')

# Statistic each p-value test hands to the permutation engine
PERMUTATION_STATISTICS = {
    'ks': ks_statistic,
    't': welch_statistic,
    'mw': mann_whitney_centered,
}


def with_permutation_pvalue(result: TestResult, name: str, a: SampleLike, b: SampleLike,
                            permutations: int, seed, workers: int = 1) -> TestResult:
    """Replace the analytic p-value of a p-value test by a permutation p-value."""
    if name not in PERMUTATION_STATISTICS:
        raise ValueError(f"permutation p-values apply to {', '.join(PVALUE_TESTS)}, not '{name}'")
    if result.decision == 'not-applicable':
        return result
    p = permutation_pvalue(_as_array(a), _as_array(b), PERMUTATION_STATISTICS[name],
                           permutations=permutations, seed=seed, workers=workers)
    return result.model_copy(update={
        'p_value': p,
        'decision': 'drift' if p.value < result.alpha_or_threshold else 'no-drift',
        'metadata': {**result.metadata, 'analytic_p_value': result.p_value.value},
    })


def run_numeric_test(name: str, a: SampleLike, b: SampleLike, alpha: float = DEFAULT_ALPHA,
                     threshold: Optional[float] = None) -> TestResult:
    if name not in NUMERIC_TESTS:
        raise ValueError(f"unknown numeric test '{name}'; choose from {sorted(NUMERIC_TESTS)}")
    return NUMERIC_TESTS[name](a, b, alpha, threshold)


def _metric_chi2(a, b, alpha, threshold, success):
    return chi_square_gof(a, b, alpha)


def _metric_w(a, b, alpha, threshold, success):
    return cohens_w(a, b, DEFAULT_EFFECT_THRESHOLD if threshold is None else threshold)


def _metric_h(a, b, alpha, threshold, success):
    return cohens_h(_pair_from_counts(a, b, success),
                    DEFAULT_EFFECT_THRESHOLD if threshold is None else threshold)


def _metric_delta(a, b, alpha, threshold, success):
    return dissimilarity_index(a, b, DELTA_CLOSE_THRESHOLD if threshold is None else threshold)


def _metric_hellinger(a, b, alpha, threshold, success):
    return hellinger_test(a, b, threshold)


def _metric_jsd(a, b, alpha, threshold, success):
    return js_test(a, b, threshold)


def _metric_yates(a, b, alpha, threshold, success):
    return yates_diff_proportions(_pair_from_counts(a, b, success), alpha)


def _pair_from_counts(a: CategoricalCounts, b: CategoricalCounts, success) -> ProportionPair:
    if success is None:
        raise ValueError('this metric needs a success label')
    success = str(success)
    return ProportionPair(successes_a=a.as_dict().get(success, 0), trials_a=a.N,
                          successes_b=b.as_dict().get(success, 0), trials_b=b.N)


# CLI name -> metric(reference counts, current counts, alpha, threshold, success label)
CATEGORICAL_METRICS = {
    'chi2': _metric_chi2,
    'w': _metric_w,
    'h': _metric_h,
    'delta': _metric_delta,
    'hellinger': _metric_hellinger,
    'jsd': _metric_jsd,
    'yates': _metric_yates,
}


def run_categorical_metric(name: str, a: CategoricalCounts, b: CategoricalCounts,
                           alpha: float = DEFAULT_ALPHA, threshold: Optional[float] = None,
                           success=None) -> TestResult:
    if name not in CATEGORICAL_METRICS:
        raise ValueError(f"unknown categorical metric '{name}'; choose from {sorted(CATEGORICAL_METRICS)}")
    return CATEGORICAL_METRICS[name](a, b, alpha, threshold, success)

# endregion

# region Class-conditional drift

def class_conditional_drift(ref: Dataset, cur: Dataset, feature: str, label_column: str,
                            test: str = 'ks', alpha: float = DEFAULT_ALPHA,
                            threshold: Optional[float] = None) -> list[TestResult]:
    """Drift of p(feature | label) for every label present on both sides.

    p-value tests are Holm-adjusted across labels; each result carries
    the adjusted p-value and keeps the raw one in metadata.
    """
    ref_labels = [str(v) for v in ref.values(label_column)]
    cur_labels = [str(v) for v in cur.values(label_column)]
    shared = sorted(set(ref_labels) & set(cur_labels))
    if not shared:
        raise NotApplicableError(f"no value of '{label_column}' occurs in both datasets")
    missing = sorted(set(ref_labels) ^ set(cur_labels))
    if missing:
        logger.warning("labels %s occur on one side only and are skipped", missing)

    ref_x, cur_x = ref.numeric(feature), cur.numeric(feature)
    ref_y, cur_y = np.asarray(ref_labels), np.asarray(cur_labels)
    raw = [run_numeric_test(test, ref_x[ref_y == y], cur_x[cur_y == y], alpha, threshold) for y in shared]

    tested = [i for i, r in enumerate(raw) if r.p_value is not None]
    adjusted = holm_adjust([raw[i].p_value.value for i in tested])[0] if tested else []
    adjusted_by_index = dict(zip(tested, adjusted))

    results = []
    for i, (label, result) in enumerate(zip(shared, raw)):
        name = f'{result.test_name}[{label_column}={label}]'
        metadata = {**result.metadata, 'feature': feature, 'label': label}
        if i in adjusted_by_index:
            p = adjusted_by_index[i]
            metadata['raw_p_value'] = result.p_value.value
            results.append(result.model_copy(update={
                'test_name': name,
                'p_value': PValue(value=p),
                'decision': 'drift' if p < alpha else 'no-drift',
                'metadata': metadata,
            }))
        else:
            results.append(result.model_copy(update={'test_name': name, 'metadata': metadata}))
    return results

# endregion
