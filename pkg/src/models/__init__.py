from .sample import Sample, LabeledSample, EmpiricalCdf, finite_floats
from .interval import ControlInterval, StatisticSpec, ModelComparison, ControlCheck, RequirementCheck
from .result import PValue, TestResult, CategoricalCounts, ProportionPair, Decision, EffectLabel, reaches
from .slice import (
    Predicate, Slice, SliceStats, DensitySlice, DensitySliceSet, FeatureRange,
    PolyRelation, RelationSet, SliceFile, ALL_TERMS
)
from .tree import TreeNode, HybridTree
from .policy import Component, EliminationPolicy, ComponentFile, LossMatrix
from .dataset import Dataset, DatasetSchema
from .report import Report, Timestamp

__all__ = [
    'Sample', 'LabeledSample', 'EmpiricalCdf', 'finite_floats',
    'ControlInterval', 'StatisticSpec', 'ModelComparison', 'ControlCheck', 'RequirementCheck',
    'PValue', 'TestResult', 'CategoricalCounts', 'ProportionPair', 'Decision', 'EffectLabel', 'reaches',
    'Predicate', 'Slice', 'SliceStats', 'DensitySlice', 'DensitySliceSet', 'FeatureRange',
    'PolyRelation', 'RelationSet', 'SliceFile', 'ALL_TERMS',
    'TreeNode', 'HybridTree',
    'Component', 'EliminationPolicy', 'ComponentFile', 'LossMatrix',
    'Dataset', 'DatasetSchema',
    'Report', 'Timestamp'
]
