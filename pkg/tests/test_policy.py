import itertools
import logging
import math
import time

import numpy as np
import pytest

from models import Component, EliminationPolicy, LossMatrix
from policy import (
    accuracy_interval, bayes_action, expected_accuracy, expected_confusion_loss, expected_cost, find_control_k,
    is_out_of_control, minmax_action, optimize_budget, policy_std_error, reviews_for_time_budget, reweight_arrivals,
    single_elimination_table
)


@pytest.fixture
def components():
    return tuple(Component(name=f'c{i + 1}', q=0.25, accuracy=acc) for i, acc in enumerate((0.6, 0.7, 0.8, 0.9)))


@pytest.fixture
def choice_under_uncertainty():
    # l(a, s) = 2s and l(b, s) = 1 on a midpoint grid over (0, 1)
    states = [(j + 0.5) / 100 for j in range(100)]
    return LossMatrix(actions=('a', 'b'), states=tuple(f'{s:.3f}' for s in states),
                      losses=(tuple(2 * s for s in states), tuple(1.0 for _ in states)),
                      dist=tuple(0.01 for _ in states))


def policy(components, reviews):
    return EliminationPolicy(components=components, review_probs=reviews)


# region Control limits
def test_control_limit_worked_example():
    """Test k for a 1000-item batch at 1% defects and alpha 1%."""
    assert find_control_k(1000, 0.01, 0.01) == 19
    assert is_out_of_control(19, 1000, 0.01, 0.01)
    assert not is_out_of_control(18, 1000, 0.01, 0.01)


def test_control_limit_large_batch_is_fast():
    """Test that n = 10000 is computed quickly in log space."""
    started = time.perf_counter()
    k = find_control_k(10_000, 0.01, 0.01)
    assert time.perf_counter() - started < 1.0
    assert 100 < k < 130


def test_control_limit_edges():
    """Test alpha = 1 and processes that never or always fail."""
    assert find_control_k(50, 0.2, 1.0) == 0
    assert find_control_k(50, 0.0, 0.05) == 1
    assert find_control_k(50, 1.0, 0.05) == 51


def test_control_limit_monotone():
    """Test that k falls with alpha and rises with p."""
    ks = [find_control_k(500, 0.02, alpha) for alpha in (0.001, 0.01, 0.05, 0.2)]
    assert ks == sorted(ks, reverse=True)
    ks = [find_control_k(500, p, 0.01) for p in (0.001, 0.01, 0.05, 0.2)]
    assert ks == sorted(ks)


@pytest.mark.parametrize('args,message', [((0, 0.1, 0.05), 'batch size'), ((10, 1.5, 0.05), 'defect probability'),
                                          ((10, 0.1, 0.0), 'alpha')])
def test_control_limit_arguments(args, message):
    """Test argument ranges."""
    with pytest.raises(ValueError, match=message):
        find_control_k(*args)
# endregion


# region Elimination policies
def test_baseline_and_first_component_eliminated(components):
    """Test 0.75 without reviews and 0.85 at a cost of 250 when c1 is reviewed."""
    assert expected_accuracy(policy(components, (0, 0, 0, 0))) == pytest.approx(0.75, abs=1e-12)
    eliminated = policy(components, (1, 0, 0, 0))
    assert expected_accuracy(eliminated) == pytest.approx(0.85, abs=1e-12)
    assert expected_cost(eliminated) == pytest.approx(250.0, abs=1e-12)
    assert expected_accuracy(policy(components, (1, 1, 1, 1))) == pytest.approx(1.0)
    assert expected_cost(policy(components, (0.4, 0, 0, 0))) == pytest.approx(100.0)


def test_accuracy_is_monotone_in_reviews(components):
    """Test that reviewing more of any component never lowers accuracy."""
    rng = np.random.default_rng(0)
    for _ in range(200):
        reviews = rng.random(4)
        i = int(rng.integers(4))
        more = reviews.copy()
        more[i] = min(1.0, more[i] + rng.random() * 0.5)
        assert expected_accuracy(policy(components, tuple(more))) >= expected_accuracy(policy(components, tuple(reviews)))


@pytest.mark.parametrize('budget,reviews,accuracy', [
    (250, (1, 0, 0, 0), 0.85), (100, (0.4, 0, 0, 0), 0.79), (0, (0, 0, 0, 0), 0.75), (375, (1, 0.5, 0, 0), 0.8875),
])
def test_optimize_budget(components, budget, reviews, accuracy):
    """Test greedy allocation from the weakest component up."""
    plan = optimize_budget(components, budget)
    assert plan.policy.review_probs == pytest.approx(reviews)
    assert plan.accuracy == pytest.approx(accuracy, abs=1e-12)
    assert plan.cost <= budget + 1e-9
    assert plan.leftover == 0.0


def test_optimize_budget_leftover(components, caplog):
    """Test that money beyond a full review is reported as left over."""
    caplog.set_level(logging.INFO)
    plan = optimize_budget(components, 1500)
    assert plan.policy.review_probs == (1.0, 1.0, 1.0, 1.0)
    assert plan.leftover == pytest.approx(500.0)
    assert 'left over' in caplog.text


def test_optimize_budget_skips_perfect_components():
    """Test that a perfect component gets no reviews."""
    parts = (Component(name='sure', q=0.5, accuracy=1.0), Component(name='weak', q=0.5, accuracy=0.5))
    plan = optimize_budget(parts, 1000)
    assert plan.policy.review_probs == (0.0, 1.0)
    assert plan.leftover == pytest.approx(500.0)


@pytest.mark.parametrize('budget', [50, 100, 250, 400, 730])
def test_optimize_budget_beats_grid(components, budget):
    """Test the greedy plan against every policy on a 0.05 grid."""
    plan = optimize_budget(components, budget)
    grid = np.asarray(list(itertools.product(np.linspace(0, 1, 21), repeat=4)))
    q = np.full(4, 0.25)
    acc = np.asarray([c.accuracy for c in components])
    accuracy = (q * (grid + (1 - grid) * acc)).sum(axis=1)
    cost = 1000 * (q * grid).sum(axis=1)
    best = accuracy[cost <= budget + 1e-9].max()
    assert plan.accuracy >= best - 1e-12


def test_optimize_budget_rejects_negative(components):
    """Test that a budget cannot be negative."""
    with pytest.raises(ValueError, match='budget'):
        optimize_budget(components, -1)


def test_policy_std_error():
    """Test the delta-method standard error."""
    parts = (Component(name='a', q=0.5, accuracy=0.8, se=0.1), Component(name='b', q=0.5, accuracy=0.9, se=0.1))
    baseline = EliminationPolicy(components=parts)
    assert policy_std_error(baseline) == pytest.approx(math.sqrt(0.25 * 0.01 * 2))
    assert policy_std_error(baseline.with_reviews((1.0, 0.0))) == pytest.approx(0.05)
    zero = tuple(Component(name=c.name, q=c.q, accuracy=c.accuracy, se=0.0) for c in parts)
    assert policy_std_error(EliminationPolicy(components=zero)) == 0.0


def test_policy_std_error_needs_every_se(components):
    """Test that missing standard errors are reported by component."""
    with pytest.raises(ValueError, match="'c1'"):
        policy_std_error(EliminationPolicy(components=components))


def test_accuracy_interval():
    """Test the normal interval around the expected accuracy."""
    parts = (Component(name='a', q=0.5, accuracy=0.8, se=0.1), Component(name='b', q=0.5, accuracy=0.9, se=0.1))
    interval = accuracy_interval(EliminationPolicy(components=parts), 0.95)
    half = 1.959963984540054 * math.sqrt(0.005)
    assert interval.lower == pytest.approx(0.85 - half)
    assert interval.upper == pytest.approx(0.85 + half)
    assert interval.method == 'clt'


def test_single_elimination_table(components):
    """Test one row per fully reviewed component."""
    rows = single_elimination_table(components)
    assert [r.component for r in rows] == ['c1', 'c2', 'c3', 'c4']
    assert [r.accuracy for r in rows] == pytest.approx([0.85, 0.825, 0.8, 0.775])
    assert all(r.cost == pytest.approx(250.0) for r in rows)


def test_reweight_arrivals(components):
    """Test that a new arrival mix keeps accuracies and reviews."""
    shifted = reweight_arrivals(policy(components, (1, 0, 0, 0)), [0.7, 0.1, 0.1, 0.1])
    assert [c.q for c in shifted.components] == [0.7, 0.1, 0.1, 0.1]
    assert expected_accuracy(shifted) == pytest.approx(0.7 + 0.1 * (0.7 + 0.8 + 0.9))
    with pytest.raises(ValueError, match='arrival probabilities'):
        reweight_arrivals(shifted, [0.5, 0.5])


def test_reviews_for_time_budget():
    """Test whole reviews in a time budget."""
    assert reviews_for_time_budget(100.0, 0.1) == 1000
    assert reviews_for_time_budget(10.0, 3.0) == 3
    with pytest.raises(ValueError, match='time_per_review'):
        reviews_for_time_budget(10.0, 0.0)
# endregion


# region Decision rules
def test_minmax_chooses_safe_action(choice_under_uncertainty):
    """Test that the constant loss wins on worst case."""
    choice = minmax_action(choice_under_uncertainty)
    assert choice.action == 'b'
    assert choice.values['a'] == pytest.approx(1.99)
    assert choice.values['b'] == 1.0


def test_bayes_reports_tie(choice_under_uncertainty, caplog):
    """Test that uniform beliefs make both actions equally good."""
    caplog.set_level(logging.INFO)
    choice = bayes_action(choice_under_uncertainty)
    assert choice.is_tie
    assert choice.tied == ('a', 'b')
    assert choice.action == 'a'
    assert choice.values['a'] == pytest.approx(1.0)
    assert 'indifferent' in caplog.text


def test_bayes_point_mass(choice_under_uncertainty):
    """Test that a point mass picks the best action for that state."""
    low = [0.0] * 100
    low[0] = 1.0
    assert bayes_action(choice_under_uncertainty, low).action == 'a'
    high = [0.0] * 100
    high[-1] = 1.0
    assert bayes_action(choice_under_uncertainty, high).action == 'b'


def test_bayes_needs_distribution():
    """Test that a matrix without beliefs cannot use the Bayes rule."""
    loss = LossMatrix(actions=('a',), states=('s',), losses=((1.0,),))
    assert minmax_action(loss).action == 'a'
    with pytest.raises(ValueError, match='distribution'):
        bayes_action(loss)


def test_rules_match_brute_force_and_shift():
    """Test both rules on random matrices, also after adding a constant."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        table = rng.random((3, 3))
        dist = rng.dirichlet(np.ones(3))
        loss = LossMatrix(actions=('x', 'y', 'z'), states=('s1', 's2', 's3'),
                          losses=tuple(tuple(row) for row in table), dist=tuple(dist / dist.sum()))
        shifted = loss.model_copy(update={'losses': tuple(tuple(row + 5.0) for row in table)})
        assert minmax_action(loss).action == 'xyz'[int(np.argmin(table.max(axis=1)))]
        assert bayes_action(loss).action == 'xyz'[int(np.argmin(table @ loss.dist))]
        assert minmax_action(shifted).action == minmax_action(loss).action
        assert bayes_action(shifted).action == bayes_action(loss).action


def test_confusion_cost():
    """Test the expected cost of mistakes on 500 + 500 decisions."""
    loss = expected_confusion_loss({1: 0.02, -1: 0.08}, {1: 100.0, -1: 50.0}, {1: 500, -1: 500})
    assert loss == pytest.approx(3000.0)
    with pytest.raises(ValueError, match='needs both'):
        expected_confusion_loss({1: 0.02}, {1: 100.0}, {1: 500, -1: 500})
# endregion
