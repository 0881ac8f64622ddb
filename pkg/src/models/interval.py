"""Control intervals and the statistics they are built for."""
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class ControlInterval(BaseModel):
    """Range a performance statistic is expected to stay in."""

    model_config = {'frozen': True}

    lower: float
    upper: float
    confidence: float
    method: Literal['trimmed', 'bootstrap', 'clt', 'fresh']
    replicate_count: int = 0
    # Replicate values behind a resampling interval; kept out of reports
    replicates: Optional[tuple[float, ...]] = Field(default=None, exclude=True, repr=False)

    @model_validator(mode='after')
    def validate_bounds(self):
        if self.lower > self.upper:
            raise ValueError(f'lower ({self.lower}) must be <= upper ({self.upper})')
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f'confidence ({self.confidence}) must be in (0, 1)')
        return self

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def overlaps(self, other: 'ControlInterval') -> bool:
        return self.lower <= other.upper and other.lower <= self.upper


class StatisticSpec(BaseModel):
    """Names the aggregate a control interval is computed for.

    `custom` requires an aggregate callable mapping a 1-D float array to a
    real. For labeled samples every aggregate sees the per-item correctness
    indicators, so `mean` and `accuracy` agree there.
    """

    model_config = {'frozen': True, 'arbitrary_types_allowed': True}

    name: Literal['mean', 'accuracy', 'proportion', 'custom'] = 'mean'
    # Value counted as a success by `proportion`
    success: float = 1.0
    aggregate: Optional[Callable[[np.ndarray], float]] = Field(default=None, exclude=True)

    @model_validator(mode='after')
    def validate_aggregate(self):
        if self.name == 'custom' and self.aggregate is None:
            raise ValueError('custom statistic requires an aggregate callable')
        return self

    def compute(self, values: np.ndarray) -> float:
        """Apply the aggregate to a 1-D array."""
        if self.name in ('mean', 'accuracy'):
            return float(np.mean(values))
        if self.name == 'proportion':
            return float(np.mean(values == self.success))
        return float(self.aggregate(values))


class ModelComparison(BaseModel):
    """Two control intervals and whether they separate the models."""

    interval_a: ControlInterval
    interval_b: ControlInterval
    distinguishable: bool

    @property
    def verdict(self) -> str:
        if self.distinguishable:
            return 'distinguishable'
        return 'not distinguishable at this confidence'


class ControlCheck(BaseModel):
    """Where a field observation falls relative to a control interval."""

    observed: float
    side: Literal['below', 'inside', 'above']

    @property
    def inside(self) -> bool:
        return self.side == 'inside'


class RequirementCheck(BaseModel):
    """Empirical risk that a statistic falls under a required floor."""

    floor: float
    max_risk: float
    risk: float
    met: bool
    replicate_count: int
