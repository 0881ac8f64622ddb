import json

import pytest

from datasets import load_dataset, load_json_model, load_schema
from errors import DataError, MissingFeatureError
from models import DatasetSchema, SliceFile


@pytest.fixture
def write(tmp_path):
    def _write(text, name='data.csv'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path

    return _write


# region Type inference
def test_numeric_and_categorical_columns(write):
    """Test that fully numeric columns parse as floats and the rest as text."""
    ds = load_dataset(write('x,y\n1,a\n2,b\n'))
    assert ds.kinds == {'x': 'numeric', 'y': 'categorical'}
    assert ds.numeric('x').tolist() == [1.0, 2.0]
    assert ds.values('y').tolist() == ['a', 'b']
    assert ds.n == 2
    assert ds.source.endswith('data.csv')


def test_mixed_column_is_categorical(write):
    """Test that a single non-number makes a column categorical."""
    ds = load_dataset(write('x\n1\nabc\n3.5\n'))
    assert ds.kinds['x'] == 'categorical'
    assert ds.values('x').tolist() == ['1', 'abc', '3.5']


def test_cells_and_header_are_stripped(write):
    """Test surrounding whitespace in names and cells."""
    ds = load_dataset(write(' x , y \n 1 , a \n'))
    assert ds.columns == ['x', 'y']
    assert ds.numeric('x').tolist() == [1.0]
    assert ds.values('y').tolist() == ['a']


def test_schema_keeps_zip_codes_as_text(write):
    """Test that a schema override keeps leading zeros."""
    path = write('zip,v\n02139,1\n10001,2\n')
    assert load_dataset(path).numeric('zip').tolist() == [2139.0, 10001.0]
    ds = load_dataset(path, DatasetSchema(columns={'zip': 'categorical'}))
    assert ds.kinds['zip'] == 'categorical'
    assert ds.values('zip').tolist() == ['02139', '10001']


def test_schema_from_file(write, tmp_path):
    """Test loading overrides from a JSON file."""
    schema = tmp_path / 'schema.json'
    schema.write_text(json.dumps({'columns': {'zip': 'categorical'}}), encoding='utf-8')
    ds = load_dataset(write('zip\n02139\n'), schema)
    assert ds.values('zip').tolist() == ['02139']


def test_missing_column_access(write):
    """Test that asking for an absent column names it."""
    ds = load_dataset(write('x\n1\n'))
    with pytest.raises(MissingFeatureError, match="'y'"):
        ds.values('y')
# endregion


# region Rejected inputs
@pytest.mark.parametrize('text,code', [
    ('', DataError.EMPTY_FILE),
    ('  \n\n', DataError.EMPTY_FILE),
    ('x,y\n', DataError.EMPTY_FILE),
    ('x,y\n1,2,3\n', DataError.RAGGED_ROW),
    ('x,y\n1,2\n3\n', DataError.RAGGED_ROW),
    ('x,y\n1,\n2,b\n', DataError.EMPTY_CELL),
    ('x\n1\nnan\n', DataError.NON_FINITE),
    ('x\n1\n-inf\n', DataError.NON_FINITE),
    ('x,x\n1,2\n', DataError.SCHEMA),
    (',y\n1,2\n', DataError.SCHEMA),
])
def test_rejected_files(write, text, code):
    """Test that each malformed input fails with its own code."""
    with pytest.raises(DataError) as info:
        load_dataset(write(text))
    assert info.value.code == code
    assert code in str(info.value)


def test_row_numbers_in_messages(write):
    """Test that messages point at the file row, header being row 1."""
    with pytest.raises(DataError, match='row 3'):
        load_dataset(write('x,y\n1,a\n2,\n'))


def test_forced_numeric_type_conflict(write):
    """Test that text in a column declared numeric is rejected."""
    with pytest.raises(DataError, match='E_TYPE_CONFLICT'):
        load_dataset(write('x\n1\nabc\n'), DatasetSchema(columns={'x': 'numeric'}))


def test_schema_unknown_column(write):
    """Test that overrides must name existing columns."""
    with pytest.raises(DataError, match='E_UNKNOWN_COLUMN'):
        load_dataset(write('x\n1\n'), DatasetSchema(columns={'zip': 'categorical'}))


@pytest.mark.parametrize('content', ['{"columns": {"x": "text"}}', '{not json'])
def test_bad_schema_file(tmp_path, content):
    """Test that invalid schema files are schema errors."""
    schema = tmp_path / 'schema.json'
    schema.write_text(content, encoding='utf-8')
    with pytest.raises(DataError, match='E_SCHEMA'):
        load_schema(schema)


def test_missing_file(tmp_path):
    """Test that an absent file surfaces as an OS error."""
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / 'nope.csv')
# endregion


# region JSON models
def test_bare_list_is_wrapped(tmp_path):
    """Test that a slice file may be a bare list of predicate lists."""
    path = tmp_path / 'slices.json'
    path.write_text(json.dumps([[{'feature': 'g', 'kind': 'set', 'values': ['a']}]]), encoding='utf-8')
    slices = load_json_model(path, SliceFile, 'slices').slices
    assert len(slices) == 1
    assert slices[0].describe() == 'g in {a}'
# endregion
