"""Production-line control limits, elimination policies and decision rules."""
import logging
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from models import Component, ControlInterval, EliminationPolicy, LossMatrix
from pvalues import normal_ppf

logger = logging.getLogger(__name__)

# Losses closer than this are ties
TIE_TOLERANCE = 1e-12


class BudgetPlan(NamedTuple):
    policy: EliminationPolicy
    accuracy: float
    cost: float
    # Budget left once every component worth reviewing is fully reviewed
    leftover: float


class EliminationRow(NamedTuple):
    component: str
    accuracy: float
    cost: float


class ActionChoice(NamedTuple):
    action: str
    values: dict[str, float]
    tied: tuple[str, ...]

    @property
    def is_tie(self) -> bool:
        return len(self.tied) > 1


# region Control limits

def find_control_k(n: int, p: float, alpha: float) -> int:
    """Smallest k with P(T >= k) <= alpha for T ~ Binomial(n, p).

    Terms are evaluated in log space and summed from the upper tail down.
    """
    if n < 1:
        raise ValueError(f'batch size n ({n}) must be >= 1')
    if not 0.0 <= p <= 1.0:
        raise ValueError(f'defect probability p ({p}) must be in [0, 1]')
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f'alpha ({alpha}) must be in (0, 1]')

    t = np.arange(n + 1)
    if p == 0.0:
        pmf = (t == 0).astype(float)
    elif p == 1.0:
        pmf = (t == n).astype(float)
    else:
        log_choose = np.asarray([math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) for k in t])
        pmf = np.exp(log_choose + t * math.log(p) + (n - t) * math.log1p(-p))
    # tail[k] = P(T >= k); tail[n + 1] = 0
    tail = np.append(np.cumsum(pmf[::-1])[::-1], 0.0)
    tail[0] = 1.0
    k = int(np.argmax(tail <= alpha))
    logger.debug('control limit for n=%d, p=%g, alpha=%g: k=%d (tail %.3g)', n, p, alpha, k, tail[k])
    return k


def is_out_of_control(defects: int, n: int, p: float, alpha: float) -> bool:
    """True when the observed defect count reaches the control limit."""
    if not 0 <= defects <= n:
        raise ValueError(f'defects ({defects}) must be in [0, {n}]')
    return defects >= find_control_k(n, p, alpha)

# endregion

# region Elimination policies

def expected_accuracy(policy: EliminationPolicy) -> float:
    """sum q_i (p_i + (1 - p_i) P(correct | c_i))."""
    return float(sum(c.q * (p + (1.0 - p) * c.accuracy)
                     for c, p in zip(policy.components, policy.review_probs)))


def expected_cost(policy: EliminationPolicy) -> float:
    """N * unit_cost * sum q_i p_i."""
    return float(policy.volume * policy.unit_cost *
                 sum(c.q * p for c, p in zip(policy.components, policy.review_probs)))


def optimize_budget(components: Sequence[Component], budget: float, volume: int = 1000,
                    unit_cost: float = 1.0) -> BudgetPlan:
    """Spend the review budget where the model is weakest.

    Accuracy gain per unit of cost on component i is (1 - P_i) / (N c), so
    filling components in ascending accuracy order (the last one
    fractionally) solves this linear program exactly.
    """
    if budget < 0:
        raise ValueError(f'budget ({budget}) must be >= 0')
    components = tuple(components)
    reviews = [0.0] * len(components)
    remaining = float(budget)
    order = sorted(range(len(components)), key=lambda i: components[i].accuracy)
    for i in order:
        c = components[i]
        if c.accuracy >= 1.0 or c.q == 0.0:
            continue
        full_cost = volume * unit_cost * c.q
        if full_cost <= remaining:
            reviews[i] = 1.0
            remaining -= full_cost
        else:
            reviews[i] = remaining / full_cost
            remaining = 0.0
            break
    policy = EliminationPolicy(components=components, review_probs=tuple(reviews),
                               unit_cost=unit_cost, volume=volume)
    cost = expected_cost(policy)
    if remaining > 0:
        logger.info('budget exceeds full review of every useful component; %g left over', remaining)
    return BudgetPlan(policy=policy, accuracy=expected_accuracy(policy), cost=cost, leftover=remaining)


def policy_std_error(policy: EliminationPolicy) -> float:
    """Delta-method standard error: sqrt(sum (q_i (1 - p_i))^2 SE_i^2).

    Assumes the component accuracy estimates are independent.
    """
    missing = [c.name for c in policy.components if c.se is None]
    if missing:
        raise ValueError(f'standard errors missing for components {missing}')
    return math.sqrt(sum((c.q * (1.0 - p)) ** 2 * c.se ** 2
                         for c, p in zip(policy.components, policy.review_probs)))


def accuracy_interval(policy: EliminationPolicy, confidence: float = 0.95) -> ControlInterval:
    """expected accuracy +/- z * policy standard error."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f'confidence ({confidence}) must be in (0, 1)')
    center = expected_accuracy(policy)
    half = normal_ppf(0.5 + confidence / 2.0) * policy_std_error(policy)
    return ControlInterval(lower=center - half, upper=center + half, confidence=confidence, method='clt')


def single_elimination_table(components: Sequence[Component], volume: int = 1000,
                             unit_cost: float = 1.0) -> list[EliminationRow]:
    """Accuracy and cost of fully reviewing one component at a time."""
    components = tuple(components)
    rows = []
    for i, c in enumerate(components):
        reviews = tuple(1.0 if j == i else 0.0 for j in range(len(components)))
        policy = EliminationPolicy(components=components, review_probs=reviews, unit_cost=unit_cost, volume=volume)
        rows.append(EliminationRow(component=c.name, accuracy=expected_accuracy(policy), cost=expected_cost(policy)))
    return rows


def reweight_arrivals(policy: EliminationPolicy, q: Sequence[float]) -> EliminationPolicy:
    """Same accuracies and reviews under a new arrival distribution."""
    q = list(q)
    if len(q) != len(policy.components):
        raise ValueError(f'{len(q)} arrival probabilities for {len(policy.components)} components')
    components = tuple(Component(**{**c.model_dump(), 'q': float(qi)}) for c, qi in zip(policy.components, q))
    return EliminationPolicy(components=components,
                             review_probs=policy.review_probs, unit_cost=policy.unit_cost, volume=policy.volume)


def reviews_for_time_budget(total_time: float, time_per_review: float) -> int:
    """Whole reviews that fit in the time budget."""
    if time_per_review <= 0:
        raise ValueError(f'time_per_review ({time_per_review}) must be > 0')
    if total_time < 0:
        raise ValueError(f'total_time ({total_time}) must be >= 0')
    return int(math.floor(total_time / time_per_review + 1e-9))


def expected_confusion_loss(error_rates: dict, costs: dict, label_counts: dict) -> float:
    """sum over labels of count * error rate * mistake cost."""
    total = 0.0
    for label, count in label_counts.items():
        if label not in error_rates or label not in costs:
            raise ValueError(f"label {label!r} needs both an error rate and a cost")
        total += count * error_rates[label] * costs[label]
    return total

# endregion

# region Decision rules

def _choose(actions: Sequence[str], values: Sequence[float]) -> ActionChoice:
    best = min(values)
    tied = tuple(a for a, v in zip(actions, values) if v - best <= TIE_TOLERANCE)
    return ActionChoice(action=tied[0], values=dict(zip(actions, (float(v) for v in values))), tied=tied)


def minmax_action(loss: LossMatrix) -> ActionChoice:
    """Action with the smallest worst-case loss; first declared on ties."""
    return _choose(loss.actions, [max(row) for row in loss.losses])


def bayes_action(loss: LossMatrix, dist: Optional[Sequence[float]] = None) -> ActionChoice:
    """Action with the smallest expected loss under the state distribution."""
    weights = dist if dist is not None else loss.dist
    if weights is None:
        raise ValueError('Bayes rule needs a distribution over states')
    if len(weights) != len(loss.states):
        raise ValueError(f'distribution has {len(weights)} entries for {len(loss.states)} states')
    w = np.asarray(weights, dtype=float)
    expected = [float(np.dot(row, w)) for row in loss.losses]
    choice = _choose(loss.actions, expected)
    if choice.is_tie:
        logger.info('Bayes rule is indifferent between %s', list(choice.tied))
    return choice

# endregion
