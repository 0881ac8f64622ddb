"""Test results and the count records categorical tests run on."""
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

Decision = Literal['drift', 'no-drift', 'not-applicable']
EffectLabel = Literal['very small', 'small', 'medium', 'large', 'very large', 'huge']

# Effect sizes this close below a threshold count as reaching it
EFFECT_TOLERANCE = 1e-12


def reaches(effect: float, threshold: float) -> bool:
    """|effect| >= threshold, inclusive up to rounding."""
    return abs(effect) >= threshold - EFFECT_TOLERANCE


class PValue(BaseModel):
    """A p-value and where it came from."""

    model_config = {'frozen': True}

    value: float
    source: Literal['analytic', 'permutation'] = 'analytic'
    permutation_count: Optional[int] = None

    @field_validator('value')
    @classmethod
    def in_unit_interval(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f'p-value ({v}) must be in [0, 1]')
        return v


class TestResult(BaseModel):
    """Universal output record of a drift test or measure.

    The decision comes either from the p-value against alpha or from the
    effect size against a threshold, never from both.
    """

    __test__ = False  # not a pytest class

    model_config = {'frozen': True}

    test_name: str
    statistic: float
    p_value: Optional[PValue] = None
    effect_size: Optional[float] = None
    effect_label: Optional[EffectLabel] = None
    decision: Decision
    alpha_or_threshold: float
    metadata: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def validate_decision(self):
        if self.p_value is not None and self.effect_size is not None:
            raise ValueError('decision must rest on a p-value or an effect size, not both')
        if self.decision == 'not-applicable':
            return self
        if self.p_value is not None:
            expected = 'drift' if self.p_value.value < self.alpha_or_threshold else 'no-drift'
        elif self.effect_size is not None:
            expected = 'drift' if reaches(self.effect_size, self.alpha_or_threshold) else 'no-drift'
        else:
            raise ValueError('drift/no-drift decision needs a p-value or an effect size')
        if self.decision != expected:
            raise ValueError(f'decision ({self.decision}) contradicts the evidence ({expected})')
        return self

    @property
    def is_drift(self) -> bool:
        return self.decision == 'drift'


class CategoricalCounts(BaseModel):
    """Label -> count map with total N."""

    model_config = {'frozen': True}

    labels: tuple[str, ...]
    counts: tuple[int, ...]

    @field_validator('labels', mode='before')
    @classmethod
    def labels_as_text(cls, v):
        return tuple(str(label) for label in v)

    @model_validator(mode='after')
    def validate_counts(self):
        if len(self.labels) != len(self.counts):
            raise ValueError(
                f'labels ({len(self.labels)}) and counts ({len(self.counts)}) differ in length')
        if len(set(self.labels)) != len(self.labels):
            raise ValueError('labels must be distinct')
        if any(c < 0 for c in self.counts):
            raise ValueError('counts must be non-negative')
        if sum(self.counts) < 1:
            raise ValueError('total count N must be >= 1')
        return self

    @classmethod
    def from_mapping(cls, mapping: dict) -> 'CategoricalCounts':
        return cls(labels=tuple(mapping.keys()), counts=tuple(int(c) for c in mapping.values()))

    @property
    def N(self) -> int:
        return sum(self.counts)

    @property
    def proportions(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.N

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.labels, self.counts))

    def aligned(self, labels) -> np.ndarray:
        """Counts in the order of `labels`, 0 for labels absent here."""
        lookup = self.as_dict()
        return np.asarray([lookup.get(label, 0) for label in labels], dtype=float)


class ProportionPair(BaseModel):
    """Two independent binomial proportions."""

    model_config = {'frozen': True}

    successes_a: int
    trials_a: int
    successes_b: int
    trials_b: int

    @model_validator(mode='after')
    def validate_trials(self):
        for side in ('a', 'b'):
            successes = getattr(self, f'successes_{side}')
            trials = getattr(self, f'trials_{side}')
            if trials < 1:
                raise ValueError(f'trials_{side} ({trials}) must be >= 1')
            if not 0 <= successes <= trials:
                raise ValueError(f'successes_{side} ({successes}) must be in [0, trials_{side}]')
        return self

    @property
    def pi_a(self) -> float:
        return self.successes_a / self.trials_a

    @property
    def pi_b(self) -> float:
        return self.successes_b / self.trials_b

    def swapped(self) -> 'ProportionPair':
        return ProportionPair(successes_a=self.successes_b, trials_a=self.trials_b,
                              successes_b=self.successes_a, trials_b=self.trials_a)
