"""Special functions and the permutation engine behind every p-value.

Incomplete gamma and beta follow the series / continued-fraction split
with modified Lentz evaluation; the normal quantile is a rational
approximation polished by one Halley step.
"""
import itertools
import logging
import math
from typing import Callable

import numpy as np

from empirical import SeedLike, map_seeded
from models import PValue

logger = logging.getLogger(__name__)

_FPMIN = 1e-300
_MAX_ITER = 1000
_EPS = 1e-15
KOLMOGOROV_TERM_TOL = 1e-12
MIN_PERMUTATIONS = 199
MAX_EXHAUSTIVE_SPLITS = 100_000
# Permuted statistics within this relative distance of the observed one count as ties
TIE_RTOL = 1e-10

TwoSampleStatistic = Callable[[np.ndarray, np.ndarray], float]


# region Incomplete gamma

def reg_inc_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    _check_gamma_domain(a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _gamma_series(a, x))
    return max(0.0, 1.0 - _gamma_continued_fraction(a, x))


def reg_inc_gamma_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_gamma_domain(a, x)
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return min(1.0, _gamma_continued_fraction(a, x))


def _check_gamma_domain(a: float, x: float) -> None:
    if not a > 0:
        raise ValueError(f'incomplete gamma needs a > 0, got {a}')
    if not x >= 0:
        raise ValueError(f'incomplete gamma needs x >= 0, got {x}')


def _gamma_series(a: float, x: float) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        logger.warning('incomplete gamma series did not converge for a=%g, x=%g', a, x)
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_continued_fraction(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        logger.warning('incomplete gamma fraction did not converge for a=%g, x=%g', a, x)
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h

# endregion

# region Incomplete beta

def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError(f'incomplete beta needs a, b > 0, got a={a}, b={b}')
    if not 0.0 <= x <= 1.0:
        raise ValueError(f'incomplete beta needs x in [0, 1], got {x}')
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - ln_beta)
    if x < (a + 1.0) / (a + b + 2.0):
        value = front * _beta_continued_fraction(a, b, x) / a
    else:
        value = 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, value))


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        logger.warning('incomplete beta fraction did not converge for a=%g, b=%g, x=%g', a, b, x)
    return h

# endregion

# region Distributions

_PPF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_PPF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_PPF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_PPF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)
_PPF_LOW = 0.02425


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_sf(z: float) -> float:
    """Upper tail P(Z > z) of the standard normal."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_ppf(q: float) -> float:
    """Standard-normal quantile for q in (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f'normal quantile needs q in (0, 1), got {q}')
    if q > 0.5:
        # Lower-tail refinement keeps full precision near 1
        return -normal_ppf(1.0 - q)
    a, b, c, d = _PPF_A, _PPF_B, _PPF_C, _PPF_D
    if q < _PPF_LOW:
        r = math.sqrt(-2.0 * math.log(q))
        x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) / \
            ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0)
    else:
        s = q - 0.5
        r = s * s
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * s / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)

    # Halley step on the exact CDF
    err = normal_cdf(x) - q
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def chi2_cdf(x: float, df: float) -> float:
    if x <= 0:
        return 0.0
    return reg_inc_gamma(df / 2.0, x / 2.0)


def chi2_sf(x: float, df: float) -> float:
    """Upper tail of the chi-square distribution."""
    if df <= 0:
        raise ValueError(f'chi-square needs df > 0, got {df}')
    if x <= 0:
        return 1.0
    return reg_inc_gamma_upper(df / 2.0, x / 2.0)


def student_t_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if not df > 0:
        raise ValueError(f'Student t needs df > 0, got {df}')
    if t == 0:
        return 1.0
    if math.isinf(t):
        return 0.0
    return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).

    Below lambda = 1.18 the alternating series converges slowly and the
    equivalent theta-function form is summed instead; Q(0) = 1.
    """
    if lam < 0:
        raise ValueError(f'lambda ({lam}) must be >= 0')
    if lam == 0:
        return 1.0
    if lam < 1.18:
        factor = math.sqrt(2.0 * math.pi) / lam
        w = math.pi ** 2 / (8.0 * lam * lam)
        total = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * w)
            total += term
            if term < KOLMOGOROV_TERM_TOL:
                break
            k += 1
        value = 1.0 - factor * total
    else:
        value = 0.0
        k = 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            value += term if k % 2 == 1 else -term
            if term < KOLMOGOROV_TERM_TOL:
                break
            k += 1
        value *= 2.0
    return min(1.0, max(0.0, value))

# endregion

# region Permutation engine

def permutation_pvalue(sample_a, sample_b, statistic: TwoSampleStatistic,
                       permutations: int = 999, seed: SeedLike = 0,
                       exhaustive: bool = False, workers: int = 1) -> PValue:
    """Two-sided permutation p-value of `statistic` on the pooled samples.

    Monte Carlo mode: p = (1 + #{|permuted| >= |observed|}) / (m + 1).
    Exhaustive mode enumerates every split; the observed split is among
    them, so the count already includes it.
    """
    a = np.asarray(getattr(sample_a, 'array', sample_a), dtype=float)
    b = np.asarray(getattr(sample_b, 'array', sample_b), dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise ValueError('permutation test needs two non-empty samples')
    pooled = np.concatenate([a, b])
    n_a = len(a)
    observed = abs(float(statistic(a, b)))
    cutoff = observed - TIE_RTOL * max(1.0, observed)

    if exhaustive:
        splits = math.comb(len(pooled), n_a)
        if splits > MAX_EXHAUSTIVE_SPLITS:
            raise ValueError(
                f'exhaustive enumeration of {splits} splits exceeds the limit of {MAX_EXHAUSTIVE_SPLITS}')
        all_idx = np.arange(len(pooled))
        count = 0
        for chosen in itertools.combinations(range(len(pooled)), n_a):
            mask = np.zeros(len(pooled), dtype=bool)
            mask[list(chosen)] = True
            if abs(float(statistic(pooled[all_idx[mask]], pooled[all_idx[~mask]]))) >= cutoff:
                count += 1
        logger.debug('exhaustive permutation: %d of %d splits at least as extreme', count, splits)
        return PValue(value=count / splits, source='permutation', permutation_count=splits)

    if permutations < MIN_PERMUTATIONS:
        raise ValueError(f'permutations ({permutations}) must be >= {MIN_PERMUTATIONS}')

    def extreme(rng: np.random.Generator) -> bool:
        shuffled = rng.permutation(pooled)
        return abs(float(statistic(shuffled[:n_a], shuffled[n_a:]))) >= cutoff

    count = sum(map_seeded(extreme, seed, permutations, workers))
    return PValue(value=(1 + count) / (permutations + 1), source='permutation',
                  permutation_count=permutations)

# endregion

# region Multiple testing

def holm_adjust(pvalues) -> tuple[list[float], float]:
    """Holm step-down adjusted p-values and the family p (their minimum).

    Sorted ascending, the j-th p is scaled by (K - j + 1), capped at 1,
    then made non-decreasing before mapping back to input order.
    """
    p = [float(v) for v in pvalues]
    if not p:
        raise ValueError('Holm adjustment needs at least one p-value')
    for v in p:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f'p-value ({v}) must be in [0, 1]')
    k = len(p)
    order = sorted(range(k), key=lambda i: p[i])
    adjusted = [0.0] * k
    running = 0.0
    for rank, idx in enumerate(order, start=1):
        running = max(running, min(1.0, (k - rank + 1) * p[idx]))
        adjusted[idx] = running
    return adjusted, min(adjusted)

# endregion
