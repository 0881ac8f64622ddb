"""Slice rules, density-slice partitions and polynomial relations."""
from typing import Literal, Optional

from pydantic import BaseModel, field_validator, model_validator


class Predicate(BaseModel):
    """Condition on one feature: closed interval or value set."""

    model_config = {'frozen': True}

    feature: str
    kind: Literal['interval', 'set']
    min: Optional[float] = None
    max: Optional[float] = None
    values: Optional[tuple[str, ...]] = None

    @field_validator('values', mode='before')
    @classmethod
    def values_as_text(cls, v):
        if v is None:
            return v
        return tuple(str(x) for x in v)

    @model_validator(mode='after')
    def validate_kind(self):
        if self.kind == 'interval':
            if self.min is None or self.max is None:
                raise ValueError(f"interval on '{self.feature}' needs min and max")
            if self.min > self.max:
                raise ValueError(f"interval on '{self.feature}': min ({self.min}) must be <= max ({self.max})")
        else:
            if not self.values:
                raise ValueError(f"value set on '{self.feature}' must be non-empty")
        return self

    def matches(self, value) -> bool:
        if self.kind == 'interval':
            return self.min <= float(value) <= self.max
        return str(value) in self.values

    def describe(self) -> str:
        if self.kind == 'interval':
            return f'{self.min:g} <= {self.feature} <= {self.max:g}'
        return f"{self.feature} in {{{', '.join(self.values)}}}"


class Slice(BaseModel):
    """Conjunction of predicates, at most one per feature."""

    model_config = {'frozen': True}

    predicates: tuple[Predicate, ...] = ()

    @field_validator('predicates')
    @classmethod
    def one_per_feature(cls, v):
        features = [p.feature for p in v]
        if len(set(features)) != len(features):
            raise ValueError('a slice allows at most one predicate per feature')
        return v

    @property
    def features(self) -> tuple[str, ...]:
        return tuple(p.feature for p in self.predicates)

    def describe(self) -> str:
        if not self.predicates:
            return '<all rows>'
        return ' & '.join(p.describe() for p in self.predicates)


class SliceStats(BaseModel):
    support: int
    fractional_support: float
    error_rate: Optional[float] = None


class DensitySlice(BaseModel):
    """One cell of a density partition with its sparsity type."""

    model_config = {'frozen': True}

    slice: Slice
    # A: not very sparse, B: very sparse, C: empty
    type: Literal['A', 'B', 'C']

    @model_validator(mode='before')
    @classmethod
    def accept_flat_predicates(cls, data):
        if isinstance(data, dict) and 'predicates' in data and 'slice' not in data:
            data = {k: v for k, v in data.items() if k != 'predicates'} | {'slice': {'predicates': data['predicates']}}
        return data


class FeatureRange(BaseModel):
    model_config = {'frozen': True}

    min: Optional[float] = None
    max: Optional[float] = None
    values: Optional[tuple[str, ...]] = None

    @field_validator('values', mode='before')
    @classmethod
    def values_as_text(cls, v):
        if v is None:
            return v
        return tuple(str(x) for x in v)


class DensitySliceSet(BaseModel):
    """Partition of the reference feature space typed by density."""

    model_config = {'frozen': True}

    slices: tuple[DensitySlice, ...]
    sparsity: float
    # Observed reference ranges; derived from the slice predicates when absent
    feature_ranges: Optional[dict[str, FeatureRange]] = None

    @field_validator('slices')
    @classmethod
    def non_empty(cls, v):
        if len(v) == 0:
            raise ValueError('density slice set must contain at least one slice')
        return v

    @property
    def features(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for cell in self.slices:
            for feature in cell.slice.features:
                seen.setdefault(feature, None)
        return tuple(seen)

    def ranges(self) -> dict[str, FeatureRange]:
        if self.feature_ranges is not None:
            return dict(self.feature_ranges)
        ranges: dict[str, FeatureRange] = {}
        for cell in self.slices:
            for p in cell.slice.predicates:
                current = ranges.get(p.feature)
                if p.kind == 'interval':
                    lo = p.min if current is None or current.min is None else min(current.min, p.min)
                    hi = p.max if current is None or current.max is None else max(current.max, p.max)
                    ranges[p.feature] = FeatureRange(min=lo, max=hi)
                else:
                    values = set(p.values) | set(current.values or ()) if current else set(p.values)
                    ranges[p.feature] = FeatureRange(values=tuple(sorted(values)))
        return ranges


RelationTerm = Literal['a', 'b', 'ab', 'aa', 'bb']
ALL_TERMS: tuple[RelationTerm, ...] = ('a', 'b', 'ab', 'aa', 'bb')


class PolyRelation(BaseModel):
    """target ~ intercept + sum(coef * term) over products of two regressors."""

    model_config = {'frozen': True}

    target: str
    regressors: tuple[str, str]
    terms: tuple[RelationTerm, ...] = ALL_TERMS
    coefficients: tuple[float, ...]
    intercept: float
    r_squared: float
    n_rows: int = 0

    @model_validator(mode='after')
    def validate_terms(self):
        if len(self.terms) < 1:
            raise ValueError('relation needs at least one term')
        if len(set(self.terms)) != len(self.terms):
            raise ValueError('relation terms must be distinct')
        if len(self.coefficients) != len(self.terms):
            raise ValueError(
                f'coefficients ({len(self.coefficients)}) and terms ({len(self.terms)}) differ in length')
        if self.target in self.regressors:
            raise ValueError('target cannot be one of its own regressors')
        return self

    def term_names(self) -> list[str]:
        a, b = self.regressors
        names = {'a': a, 'b': b, 'ab': f'{a}*{b}', 'aa': f'{a}^2', 'bb': f'{b}^2'}
        return [names[t] for t in self.terms]

    def describe(self) -> str:
        parts = [f'{self.intercept:.6g}']
        parts += [f'{c:+.6g}*{name}' for c, name in zip(self.coefficients, self.term_names())]
        return f"{self.target} ~ {' '.join(parts)}"


class RelationSet(BaseModel):
    relations: tuple[PolyRelation, ...]


class SliceFile(BaseModel):
    """On-disk list of slices; each slice is a list of predicates."""

    slices: tuple[Slice, ...]

    @field_validator('slices', mode='before')
    @classmethod
    def accept_predicate_lists(cls, v):
        return tuple(s if isinstance(s, (dict, Slice)) else {'predicates': s} for s in v)

