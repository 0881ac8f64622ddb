"""CSV datasets and JSON input files."""
import json
import logging
from pathlib import Path
from typing import Optional, Type, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from errors import DataError
from models import Dataset, DatasetSchema

logger = logging.getLogger(__name__)

M = TypeVar('M', bound=BaseModel)
PathLike = Union[str, Path]

NON_FINITE_TOKENS = {'nan', '+nan', '-nan', 'inf', '+inf', '-inf', 'infinity', '+infinity', '-infinity'}


def load_dataset(path: PathLike, schema: Optional[Union[DatasetSchema, PathLike]] = None) -> Dataset:
    """Read a comma-separated file with a header row.

    A column is numeric when every cell parses as a finite real; the schema
    may force a column either way. Empty cells, ragged rows and NaN/inf
    in numeric columns are rejected, each with its own error code.
    """
    path = Path(path)
    if schema is not None and not isinstance(schema, DatasetSchema):
        schema = load_schema(schema)
    overrides = schema.columns if schema is not None else {}

    text = path.read_text(encoding='utf-8')
    if not text.strip():
        raise DataError(DataError.EMPTY_FILE, f'{path} is empty')
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding='utf-8')
    except pd.errors.ParserError as exc:
        raise DataError(DataError.RAGGED_ROW, f'{path}: {exc}') from None
    except pd.errors.EmptyDataError:
        raise DataError(DataError.EMPTY_FILE, f'{path} is empty') from None

    header = [str(h).strip() for h in raw.iloc[0].tolist()]
    body = raw.iloc[1:].reset_index(drop=True)
    if len(body) == 0:
        raise DataError(DataError.EMPTY_FILE, f'{path} has a header but no rows')
    if len(set(header)) != len(header) or '' in header:
        raise DataError(DataError.SCHEMA, f'{path}: column names must be non-empty and distinct')
    unknown = sorted(set(overrides) - set(header))
    if unknown:
        raise DataError(DataError.UNKNOWN_COLUMN, f'{path}: schema names unknown columns {unknown}')

    # Short rows come back padded with NaN
    padded = body.isna()
    if padded.any().any():
        row = int(np.argmax(padded.any(axis=1).to_numpy()))
        raise DataError(DataError.RAGGED_ROW, f'{path}: row {row + 2} has fewer fields than the header')

    body.columns = header
    columns = {}
    kinds = {}
    for name in header:
        cells = body[name].str.strip()
        empty = cells == ''
        if empty.any():
            row = int(np.argmax(empty.to_numpy()))
            raise DataError(DataError.EMPTY_CELL, f"{path}: empty cell in column '{name}', row {row + 2}")
        kind, values = _infer_column(path, name, cells, overrides.get(name))
        columns[name] = values
        kinds[name] = kind

    frame = pd.DataFrame(columns)
    logger.info('loaded %s: %d rows, %d columns', path, len(frame), len(header))
    return Dataset(frame=frame, kinds=kinds, source=str(path))


def _infer_column(path: Path, name: str, cells: pd.Series, forced: Optional[str]):
    if forced == 'categorical':
        return 'categorical', cells.astype(object)
    parsed = pd.to_numeric(cells, errors='coerce')
    non_finite = cells.str.lower().isin(NON_FINITE_TOKENS)
    parses = parsed.notna() | non_finite
    if parses.all():
        if non_finite.any():
            row = int(np.argmax(non_finite.to_numpy()))
            raise DataError(DataError.NON_FINITE,
                            f"{path}: non-finite value {cells.iloc[row]!r} in column '{name}', row {row + 2}")
        return 'numeric', parsed.astype(float)
    if forced == 'numeric':
        row = int(np.argmax((~parses).to_numpy()))
        raise DataError(DataError.TYPE_CONFLICT,
                        f"{path}: column '{name}' is declared numeric but row {row + 2} holds {cells.iloc[row]!r}")
    return 'categorical', cells.astype(object)


def load_schema(path: PathLike) -> DatasetSchema:
    try:
        return DatasetSchema.model_validate(read_json(path))
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(DataError.SCHEMA, f'{path}: {exc}') from None


def read_json(path: PathLike):
    with open(path, encoding='utf-8') as f:
        return json.load(f)


def load_json_model(path: PathLike, model: Type[M], list_key: Optional[str] = None) -> M:
    """Validate a JSON file as `model`; a bare list is wrapped under `list_key`."""
    data = read_json(path)
    if isinstance(data, list) and list_key is not None:
        data = {list_key: data}
    return model.model_validate(data)
