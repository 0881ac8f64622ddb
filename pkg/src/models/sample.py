"""Samples and the empirical distribution function."""
from typing import Any, Hashable

import numpy as np
from pydantic import BaseModel, field_validator, model_validator


def finite_floats(v: Any) -> tuple[float, ...]:
    """Coerce a sequence or array of numbers into a tuple of finite floats."""
    try:
        arr = np.asarray(v, dtype=float).ravel()
    except (TypeError, ValueError):
        raise ValueError('values must be numeric') from None
    if not np.all(np.isfinite(arr)):
        raise ValueError('values must be finite (no NaN or infinity)')
    return tuple(arr.tolist())


class Sample(BaseModel):
    """Ordered collection of finite real observations."""

    model_config = {'frozen': True}

    values: tuple[float, ...]

    @field_validator('values', mode='before')
    @classmethod
    def coerce_finite(cls, v):
        return finite_floats(v)

    @field_validator('values')
    @classmethod
    def non_empty(cls, v):
        if len(v) == 0:
            raise ValueError('sample must contain at least one value')
        return v

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


class LabeledSample(BaseModel):
    """(prediction, label) pairs over a finite label alphabet."""

    model_config = {'frozen': True}

    items: tuple[tuple[Hashable, Hashable], ...]

    @field_validator('items', mode='before')
    @classmethod
    def as_pairs(cls, v):
        pairs = tuple((p, y) for p, y in v)
        if len(pairs) == 0:
            raise ValueError('labeled sample must contain at least one item')
        return pairs

    @classmethod
    def from_columns(cls, predictions, labels) -> 'LabeledSample':
        predictions = list(predictions)
        labels = list(labels)
        if len(predictions) != len(labels):
            raise ValueError(
                f'predictions ({len(predictions)}) and labels ({len(labels)}) differ in length')
        return cls(items=tuple(zip(predictions, labels)))

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def predictions(self) -> list:
        return [p for p, _ in self.items]

    @property
    def labels(self) -> list:
        return [y for _, y in self.items]

    @property
    def correct(self) -> np.ndarray:
        """Per-item correctness indicators (1.0 when prediction == label)."""
        return np.fromiter((1.0 if p == y else 0.0 for p, y in self.items),
                           dtype=float, count=len(self.items))


class EmpiricalCdf(BaseModel):
    """Right-continuous step function F_e(x) = #{values <= x} / n."""

    model_config = {'frozen': True}

    sorted_values: tuple[float, ...]

    @field_validator('sorted_values', mode='before')
    @classmethod
    def coerce_finite(cls, v):
        return finite_floats(v)

    @model_validator(mode='after')
    def validate_order(self):
        if len(self.sorted_values) == 0:
            raise ValueError('empirical CDF needs at least one value')
        if any(b < a for a, b in zip(self.sorted_values, self.sorted_values[1:])):
            raise ValueError('sorted_values must be non-decreasing')
        return self

    @property
    def n(self) -> int:
        return len(self.sorted_values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.sorted_values, dtype=float)

    def __call__(self, x):
        """Evaluate at a scalar or an array of points."""
        counts = np.searchsorted(self.array, x, side='right')
        if np.ndim(counts) == 0:
            return int(counts) / self.n
        return counts / self.n

    @property
    def minimum(self) -> float:
        return self.sorted_values[0]

    @property
    def maximum(self) -> float:
        return self.sorted_values[-1]
