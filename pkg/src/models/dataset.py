"""Tabular dataset with typed columns."""
from typing import Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from errors import DataError, MissingFeatureError

ColumnKind = Literal['numeric', 'categorical']


class DatasetSchema(BaseModel):
    """Column type overrides, e.g. {"columns": {"zip": "categorical"}}."""

    columns: dict[str, ColumnKind] = Field(default_factory=dict)


class Dataset(BaseModel):
    """Named columns, each numeric (finite floats) or categorical (strings)."""

    model_config = {'frozen': True, 'arbitrary_types_allowed': True}

    frame: pd.DataFrame
    kinds: dict[str, ColumnKind]
    source: Optional[str] = None

    @model_validator(mode='after')
    def validate_frame(self):
        if len(self.frame) < 1:
            raise ValueError('dataset must contain at least one row')
        if list(self.kinds) != list(self.frame.columns):
            raise ValueError('column kinds must match the frame columns in order')
        for name, kind in self.kinds.items():
            column = self.frame[name]
            if kind == 'numeric':
                if not pd.api.types.is_float_dtype(column):
                    raise ValueError(f"numeric column '{name}' must hold floats")
                if not np.all(np.isfinite(column.to_numpy())):
                    raise ValueError(f"numeric column '{name}' must be finite")
            elif not pd.api.types.is_object_dtype(column) and not pd.api.types.is_string_dtype(column):
                raise ValueError(f"categorical column '{name}' must hold strings")
        return self

    @classmethod
    def from_columns(cls, columns: dict, kinds: Optional[dict[str, ColumnKind]] = None,
                     source: Optional[str] = None) -> 'Dataset':
        """Build from in-memory columns; kinds default to numeric for numeric data."""
        kinds = dict(kinds or {})
        data = {}
        for name, values in columns.items():
            arr = np.asarray(values)
            kind = kinds.get(name) or ('numeric' if np.issubdtype(arr.dtype, np.number) else 'categorical')
            kinds[name] = kind
            data[name] = arr.astype(float) if kind == 'numeric' else [str(v) for v in values]
        frame = pd.DataFrame(data)
        for name in frame.columns:
            if kinds[name] == 'categorical':
                frame[name] = frame[name].astype(object)
        return cls(frame=frame, kinds={name: kinds[name] for name in frame.columns}, source=source)

    @property
    def n(self) -> int:
        return len(self.frame)

    @property
    def columns(self) -> list[str]:
        return list(self.frame.columns)

    def numeric_columns(self) -> list[str]:
        return [name for name, kind in self.kinds.items() if kind == 'numeric']

    def has(self, name: str) -> bool:
        return name in self.kinds

    def values(self, name: str) -> np.ndarray:
        if name not in self.kinds:
            raise MissingFeatureError(name)
        return self.frame[name].to_numpy()

    def numeric(self, name: str) -> np.ndarray:
        if name not in self.kinds:
            raise MissingFeatureError(name)
        if self.kinds[name] != 'numeric':
            raise DataError(DataError.TYPE_CONFLICT, f"column '{name}' is not numeric")
        return self.frame[name].to_numpy(dtype=float)

