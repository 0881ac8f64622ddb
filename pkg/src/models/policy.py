"""Elimination policies and loss matrices."""
from typing import Optional

from pydantic import BaseModel, field_validator, model_validator

PROB_TOLERANCE = 1e-9


class Component(BaseModel):
    """Component of the input space with its arrival share and model accuracy."""

    model_config = {'frozen': True}

    name: str
    q: float
    accuracy: float
    se: Optional[float] = None

    @model_validator(mode='after')
    def validate_probs(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"component '{self.name}': q ({self.q}) must be in [0, 1]")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"component '{self.name}': accuracy ({self.accuracy}) must be in [0, 1]")
        if self.se is not None and self.se < 0:
            raise ValueError(f"component '{self.name}': se ({self.se}) must be >= 0")
        return self


class EliminationPolicy(BaseModel):
    """Routes a share p_i of component i's decisions to a perfect reviewer.

    Every review costs `unit_cost`; `volume` decisions arrive per period.
    """

    model_config = {'frozen': True}

    components: tuple[Component, ...]
    review_probs: tuple[float, ...] = ()
    unit_cost: float = 1.0
    volume: int = 1000

    @field_validator('components')
    @classmethod
    def validate_components(cls, v):
        if len(v) == 0:
            raise ValueError('policy needs at least one component')
        total = sum(c.q for c in v)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValueError(f'arrival probabilities must sum to 1, got {total}')
        return v

    @model_validator(mode='before')
    @classmethod
    def baseline_reviews(cls, data):
        # No reviews given means the baseline policy
        if isinstance(data, dict) and len(data.get('review_probs', ())) == 0:
            data = {**data, 'review_probs': tuple(0.0 for _ in data.get('components', ()))}
        return data

    @model_validator(mode='after')
    def validate_reviews(self):
        if len(self.review_probs) != len(self.components):
            raise ValueError(
                f'review_probs ({len(self.review_probs)}) and components ({len(self.components)}) differ in length')
        for p in self.review_probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f'review probability ({p}) must be in [0, 1]')
        if self.unit_cost < 0:
            raise ValueError(f'unit_cost ({self.unit_cost}) must be >= 0')
        if self.volume < 0:
            raise ValueError(f'volume ({self.volume}) must be >= 0')
        return self

    def with_reviews(self, review_probs) -> 'EliminationPolicy':
        return EliminationPolicy(components=self.components, review_probs=tuple(review_probs),
                                 unit_cost=self.unit_cost, volume=self.volume)


class ComponentFile(BaseModel):
    """On-disk components list."""

    components: tuple[Component, ...]


class LossMatrix(BaseModel):
    """Losses l(action, state) with an optional distribution over states."""

    model_config = {'frozen': True}

    actions: tuple[str, ...]
    states: tuple[str, ...]
    losses: tuple[tuple[float, ...], ...]
    dist: Optional[tuple[float, ...]] = None

    @model_validator(mode='after')
    def validate_shape(self):
        if not self.actions or not self.states:
            raise ValueError('loss matrix needs at least one action and one state')
        if len(self.losses) != len(self.actions):
            raise ValueError(f'losses has {len(self.losses)} rows for {len(self.actions)} actions')
        for action, row in zip(self.actions, self.losses):
            if len(row) != len(self.states):
                raise ValueError(f"row for action '{action}' has {len(row)} losses for {len(self.states)} states")
        if self.dist is not None:
            if len(self.dist) != len(self.states):
                raise ValueError(f'dist has {len(self.dist)} entries for {len(self.states)} states')
            if any(w < 0 for w in self.dist):
                raise ValueError('dist entries must be non-negative')
            if abs(sum(self.dist) - 1.0) > PROB_TOLERANCE:
                raise ValueError(f'dist must sum to 1, got {sum(self.dist)}')
        return self
