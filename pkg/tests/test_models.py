import math

import numpy as np
import pytest
from pydantic import ValidationError

from models import (
    CategoricalCounts, Component, ControlInterval, DensitySlice, DensitySliceSet, EliminationPolicy,
    EmpiricalCdf, HybridTree, LabeledSample, LossMatrix, PolyRelation, Predicate, ProportionPair, PValue,
    Sample, Slice, SliceFile, StatisticSpec, TestResult, TreeNode, reaches
)


# region Samples
def test_sample_coerces_arrays():
    """Test that numpy arrays and lists become tuples of floats."""
    s = Sample(values=np.array([1, 2, 3]))
    assert s.values == (1.0, 2.0, 3.0)
    assert s.n == 3
    assert isinstance(s.array, np.ndarray)


@pytest.mark.parametrize('bad', [[1.0, float('nan')], [float('inf')], [1.0, -math.inf]])
def test_sample_rejects_non_finite(bad):
    """Test that NaN and infinity are rejected at construction."""
    with pytest.raises(ValidationError, match='values must be finite'):
        Sample(values=bad)


def test_sample_rejects_empty():
    """Test that an empty sample is rejected."""
    with pytest.raises(ValidationError, match='at least one value'):
        Sample(values=[])


def test_sample_is_frozen():
    """Test that samples are immutable."""
    s = Sample(values=[1.0])
    with pytest.raises(ValidationError):
        s.values = (2.0,)


def test_labeled_sample_correctness():
    """Test per-item correctness indicators of a labeled sample."""
    s = LabeledSample.from_columns(['cat', 'dog', 'cat'], ['cat', 'cat', 'cat'])
    assert s.n == 3
    assert s.predictions == ['cat', 'dog', 'cat']
    assert s.labels == ['cat', 'cat', 'cat']
    assert s.correct.tolist() == [1.0, 0.0, 1.0]


def test_labeled_sample_length_mismatch():
    """Test that prediction and label columns must have equal length."""
    with pytest.raises(ValueError, match='differ in length'):
        LabeledSample.from_columns(['a', 'b'], ['a'])


def test_ecdf_requires_sorted_values():
    """Test that an empirical CDF rejects unsorted support."""
    with pytest.raises(ValidationError, match='non-decreasing'):
        EmpiricalCdf(sorted_values=[2.0, 1.0])


def test_ecdf_step_function():
    """Test right-continuous evaluation at and between sample points."""
    cdf = EmpiricalCdf(sorted_values=[1.0, 2.0, 2.0, 3.0])
    assert cdf(0.5) == 0.0
    assert cdf(1.0) == 0.25
    assert cdf(2.0) == 0.75
    assert cdf(10.0) == 1.0
    assert cdf(np.array([1.5, 3.0])).tolist() == [0.25, 1.0]
    assert cdf.minimum == 1.0
    assert cdf.maximum == 3.0
# endregion


# region Intervals and results
def test_control_interval_bounds():
    """Test that lower must not exceed upper."""
    with pytest.raises(ValidationError, match='must be <= upper'):
        ControlInterval(lower=2.0, upper=1.0, confidence=0.95, method='trimmed')


def test_control_interval_overlap():
    """Test contains, width and overlap of two intervals."""
    a = ControlInterval(lower=0.0, upper=1.0, confidence=0.95, method='bootstrap')
    b = ControlInterval(lower=1.0, upper=2.0, confidence=0.95, method='bootstrap')
    c = ControlInterval(lower=1.5, upper=2.0, confidence=0.95, method='bootstrap')
    assert a.width == 1.0
    assert a.contains(0.5)
    assert not a.contains(1.5)
    assert a.overlaps(b)
    assert not a.overlaps(c)


def test_control_interval_replicates_not_serialized():
    """Test that replicate values stay out of the dump."""
    interval = ControlInterval(lower=0.0, upper=1.0, confidence=0.9, method='bootstrap',
                               replicate_count=2, replicates=(0.0, 1.0))
    assert 'replicates' not in interval.model_dump()


def test_custom_statistic_needs_aggregate():
    """Test that a custom statistic without a callable is rejected."""
    with pytest.raises(ValidationError, match='aggregate callable'):
        StatisticSpec(name='custom')


def test_statistic_proportion():
    """Test that the proportion statistic counts the success value."""
    stat = StatisticSpec(name='proportion', success=2.0)
    assert stat.compute(np.array([2.0, 1.0, 2.0, 3.0])) == 0.5


def test_pvalue_range():
    """Test that p-values outside [0, 1] are rejected."""
    with pytest.raises(ValidationError, match='must be in'):
        PValue(value=1.5)


def test_result_decision_from_pvalue():
    """Test that a p-value decision must agree with alpha."""
    ok = TestResult(test_name='ks', statistic=0.3, p_value=PValue(value=0.01), decision='drift',
                    alpha_or_threshold=0.05)
    assert ok.is_drift
    with pytest.raises(ValidationError, match='contradicts'):
        TestResult(test_name='ks', statistic=0.3, p_value=PValue(value=0.01), decision='no-drift',
                   alpha_or_threshold=0.05)


def test_result_pvalue_equal_alpha_is_no_drift():
    """Test that p equal to alpha is not drift."""
    r = TestResult(test_name='ks', statistic=0.1, p_value=PValue(value=0.05), decision='no-drift',
                   alpha_or_threshold=0.05)
    assert not r.is_drift


def test_result_rejects_both_evidences():
    """Test that a result cannot carry both a p-value and an effect size."""
    with pytest.raises(ValidationError, match='not both'):
        TestResult(test_name='x', statistic=0.0, p_value=PValue(value=0.5), effect_size=0.1,
                   decision='no-drift', alpha_or_threshold=0.05)


def test_result_effect_threshold_inclusive():
    """Test that an effect equal to the threshold is drift, within rounding."""
    assert reaches(0.19999999999999996, 0.2)
    assert reaches(-0.2, 0.2)
    assert not reaches(0.1999, 0.2)
    r = TestResult(test_name='w', statistic=0.2, effect_size=0.19999999999999996, decision='drift',
                   alpha_or_threshold=0.2)
    assert r.is_drift


def test_not_applicable_needs_no_evidence():
    """Test that a not-applicable result may omit p-value and effect."""
    r = TestResult(test_name='mw', statistic=0.0, decision='not-applicable', alpha_or_threshold=0.05)
    assert not r.is_drift


def test_categorical_counts():
    """Test totals, proportions and alignment of count records."""
    counts = CategoricalCounts.from_mapping({'a': 3, 1: 1})
    assert counts.labels == ('a', '1')
    assert counts.N == 4
    assert counts.proportions.tolist() == [0.75, 0.25]
    assert counts.aligned(['1', 'b', 'a']).tolist() == [1.0, 0.0, 3.0]


@pytest.mark.parametrize('labels,counts,message', [
    (('a', 'b'), (1,), 'differ in length'),
    (('a', 'a'), (1, 1), 'distinct'),
    (('a',), (-1,), 'non-negative'),
    (('a', 'b'), (0, 0), 'N must be'),
])
def test_categorical_counts_invalid(labels, counts, message):
    """Test validation of count records."""
    with pytest.raises(ValidationError, match=message):
        CategoricalCounts(labels=labels, counts=counts)


def test_proportion_pair():
    """Test proportions and swapping of a proportion pair."""
    pair = ProportionPair(successes_a=1, trials_a=4, successes_b=3, trials_b=4)
    assert pair.pi_a == 0.25
    assert pair.pi_b == 0.75
    assert pair.swapped().pi_a == 0.75
    with pytest.raises(ValidationError, match='successes_b'):
        ProportionPair(successes_a=1, trials_a=4, successes_b=5, trials_b=4)
# endregion


# region Slices
def test_interval_predicate_inclusive():
    """Test that interval predicates include both ends."""
    p = Predicate(feature='age', kind='interval', min=18, max=30)
    assert p.matches(18)
    assert p.matches(30)
    assert not p.matches(30.5)
    assert p.describe() == '18 <= age <= 30'


def test_set_predicate_compares_text():
    """Test that value sets match on text."""
    p = Predicate(feature='zip', kind='set', values=[10001, '10002'])
    assert p.values == ('10001', '10002')
    assert p.matches('10001')
    assert not p.matches('99999')


@pytest.mark.parametrize('kwargs,message', [
    ({'kind': 'interval', 'min': 1.0}, 'needs min and max'),
    ({'kind': 'interval', 'min': 2.0, 'max': 1.0}, 'must be <= max'),
    ({'kind': 'set', 'values': []}, 'must be non-empty'),
])
def test_predicate_invalid(kwargs, message):
    """Test predicate validation."""
    with pytest.raises(ValidationError, match=message):
        Predicate(feature='x', **kwargs)


def test_slice_one_predicate_per_feature():
    """Test that a slice cannot constrain a feature twice."""
    p = Predicate(feature='x', kind='interval', min=0, max=1)
    with pytest.raises(ValidationError, match='at most one predicate per feature'):
        Slice(predicates=[p, p])
    assert Slice().describe() == '<all rows>'


def test_density_slice_accepts_flat_predicates():
    """Test that a density slice may list predicates without a nested slice."""
    cell = DensitySlice.model_validate(
        {'type': 'B', 'predicates': [{'feature': 'x', 'kind': 'interval', 'min': 0, 'max': 1}]})
    assert cell.type == 'B'
    assert cell.slice.features == ('x',)


def test_density_slice_set_ranges_from_predicates():
    """Test that reference ranges default to the union of slice predicates."""
    slices = [
        {'type': 'A', 'predicates': [{'feature': 'x', 'kind': 'interval', 'min': 0, 'max': 5}]},
        {'type': 'C', 'predicates': [{'feature': 'x', 'kind': 'interval', 'min': 5, 'max': 10},
                                     {'feature': 'c', 'kind': 'set', 'values': ['u']}]},
        {'type': 'B', 'predicates': [{'feature': 'c', 'kind': 'set', 'values': ['v']}]},
    ]
    slice_set = DensitySliceSet.model_validate({'slices': slices, 'sparsity': 0.01})
    ranges = slice_set.ranges()
    assert (ranges['x'].min, ranges['x'].max) == (0.0, 10.0)
    assert ranges['c'].values == ('u', 'v')
    assert slice_set.features == ('x', 'c')


def test_slice_file_accepts_predicate_lists():
    """Test that a slice file may hold bare predicate lists."""
    data = {'slices': [[{'feature': 'x', 'kind': 'interval', 'min': 0, 'max': 1}],
                       {'predicates': [{'feature': 'c', 'kind': 'set', 'values': ['a']}]}]}
    slices = SliceFile.model_validate(data).slices
    assert [s.features for s in slices] == [('x',), ('c',)]


def test_poly_relation_validation():
    """Test that relations check term and coefficient counts."""
    rel = PolyRelation(target='y', regressors=('a', 'b'), terms=('a', 'ab'), coefficients=(2.0, -1.0),
                       intercept=0.5, r_squared=0.9)
    assert rel.term_names() == ['a', 'a*b']
    assert rel.describe() == 'y ~ 0.5 +2*a -1*a*b'
    with pytest.raises(ValidationError, match='differ in length'):
        PolyRelation(target='y', regressors=('a', 'b'), terms=('a',), coefficients=(1.0, 2.0),
                     intercept=0.0, r_squared=1.0)
    with pytest.raises(ValidationError, match='own regressors'):
        PolyRelation(target='a', regressors=('a', 'b'), terms=('a',), coefficients=(1.0,),
                     intercept=0.0, r_squared=1.0)
# endregion


# region Trees and policies
def test_deterministic_node_never_errs():
    """Test that a rule node must have zero error probability."""
    with pytest.raises(ValidationError, match='deterministic node must have p = 0'):
        TreeNode(kind='deterministic', p=0.1)
    with pytest.raises(ValidationError, match='must be in'):
        TreeNode(p=1.5)


def test_complete_binary_tree():
    """Test node and leaf counts of a complete binary tree."""
    tree = HybridTree.complete_binary(3, [0.1] * 7)
    assert tree.root.count_nodes() == 7
    assert tree.root.count_leaves() == 4
    assert tree.root.children[1].children[0].name == 'n5'
    with pytest.raises(ValueError, match='needs 7 probabilities'):
        HybridTree.complete_binary(3, [0.1] * 6)


def test_tree_children_not_shared():
    """Test that children lists are not shared between nodes."""
    a = TreeNode(name='a')
    b = TreeNode(name='b')
    assert a.children is not b.children


def test_policy_arrivals_sum_to_one():
    """Test that component arrival probabilities must sum to one."""
    with pytest.raises(ValidationError, match='sum to 1'):
        EliminationPolicy(components=[Component(name='a', q=0.5, accuracy=0.9)])


def test_policy_defaults_to_baseline():
    """Test that a policy without reviews reviews nothing."""
    policy = EliminationPolicy(components=[Component(name='a', q=0.4, accuracy=0.9),
                                           Component(name='b', q=0.6, accuracy=0.8)])
    assert policy.review_probs == (0.0, 0.0)
    assert policy.with_reviews([1.0, 0.5]).review_probs == (1.0, 0.5)


def test_policy_review_range():
    """Test that review probabilities must be probabilities."""
    with pytest.raises(ValidationError, match='review probability'):
        EliminationPolicy(components=[Component(name='a', q=1.0, accuracy=0.9)], review_probs=[1.5])


def test_component_ranges():
    """Test component field validation."""
    with pytest.raises(ValidationError, match="component 'a': accuracy"):
        Component(name='a', q=0.5, accuracy=1.2)


def test_loss_matrix_shape():
    """Test that every action needs one loss per state."""
    with pytest.raises(ValidationError, match="row for action 'b'"):
        LossMatrix(actions=['a', 'b'], states=['s', 't'], losses=[[1, 2], [3]])
    with pytest.raises(ValidationError, match='dist must sum to 1'):
        LossMatrix(actions=['a'], states=['s', 't'], losses=[[1, 2]], dist=[0.5, 0.6])
# endregion
