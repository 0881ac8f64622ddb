import json

import numpy as np
import pytest

from cli import build_parser, main, run_command
from reporting import EXIT_DATA, EXIT_DRIFT, EXIT_OK, EXIT_USAGE


def write_csv(path, columns):
    names = list(columns)
    rows = zip(*(columns[name] for name in names))
    path.write_text(','.join(names) + '\n' + ''.join(','.join(str(v) for v in row) + '\n' for row in rows),
                    encoding='utf-8')
    return str(path)


def write_json(path, data):
    path.write_text(json.dumps(data), encoding='utf-8')
    return str(path)


def without_timestamp(path):
    data = json.loads(open(path, encoding='utf-8').read())
    data.pop('timestamp')
    return data


@pytest.fixture
def ref_csv(tmp_path):
    rng = np.random.default_rng(0)
    return write_csv(tmp_path / 'ref.csv', {
        'x': np.round(rng.normal(size=400), 6),
        'color': rng.choice(['red', 'green', 'blue'], size=400),
        'pred': ['a'] * 380 + ['b'] * 20,
        'label': ['a'] * 400,
    })


@pytest.fixture
def cur_csv(tmp_path):
    rng = np.random.default_rng(1)
    return write_csv(tmp_path / 'cur.csv', {
        'x': np.round(rng.normal(1.0, 1.0, size=300), 6),
        'color': rng.choice(['red', 'green', 'blue'], size=300),
        'pred': ['a'] * 300,
        'label': ['a'] * 300,
    })


@pytest.fixture
def components_json(tmp_path):
    return write_json(tmp_path / 'components.json', [
        {'name': f'c{i + 1}', 'q': 0.25, 'accuracy': acc} for i, acc in enumerate((0.6, 0.7, 0.8, 0.9))
    ])


# region Control commands
def test_spc_k_worked_example(capsys):
    """Test k = 19 printed to stdout with exit 0."""
    report, code = run_command(['spc-k', '--n', '1000', '--p', '0.01', '--alpha', '0.01'])
    assert code == EXIT_OK
    assert report.results[0]['k'] == 19
    printed = json.loads(capsys.readouterr().out)
    assert printed['command'] == 'spc-k'
    assert printed['results'][0]['kind'] == 'control_limit'


def test_spc_k_out_of_control():
    """Test that reaching the limit is reported as drift."""
    report, code = run_command(['spc-k', '--n', '1000', '--p', '0.01', '--alpha', '0.01', '--observed', '25'])
    assert code == EXIT_DRIFT
    assert report.summary['out_of_control'] is True


def test_spc_k_just_below_limit():
    """Test that one defect short of the limit stays in control."""
    report, code = run_command(['spc-k', '--n', '1000', '--p', '0.01', '--alpha', '0.01', '--observed', '18'])
    assert code == EXIT_OK
    assert report.results[1]['decision'] == 'no-drift'


def test_interval_bootstrap_is_deterministic(tmp_path, ref_csv):
    """Test that reruns differ only in the timestamp, whatever the worker count."""
    outputs = []
    for i, workers in enumerate(('1', '3')):
        out = str(tmp_path / f'report{i}.json')
        _, code = run_command(['interval', 'bootstrap', '--data', ref_csv, '--pred', 'pred', '--label', 'label',
                               '--stat', 'accuracy', '--replicates', '200', '--floor', '0.9', '--seed', '5',
                               '--workers', workers, '--out', out])
        assert code == EXIT_OK
        outputs.append(without_timestamp(out))
    assert outputs[0] == outputs[1]
    kinds = [r['kind'] for r in outputs[0]['results']]
    assert kinds == ['interval', 'requirement']
    assert outputs[0]['summary']['requirement_met'] is True


def test_interval_trimmed_with_observation(tmp_path):
    """Test the trimmed interval of 1..1000 and a field value outside it."""
    data = write_csv(tmp_path / 'scores.csv', {'score': list(range(1, 1001))})
    report, code = run_command(['interval', 'trimmed', '--data', data, '--column', 'score', '--observed', '990',
                                '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_OK
    assert (report.results[0]['lower'], report.results[0]['upper']) == (26.0, 975.0)
    assert report.summary['in_control'] is False


def test_ecdf_command(tmp_path):
    """Test evaluations, quantiles and a tail probability."""
    data = write_csv(tmp_path / 'scores.csv', {'score': list(range(1, 1001))})
    report, _ = run_command(['ecdf', '--data', data, '--column', 'score', '--at', '500', '--quantiles', '0.025',
                             '--below', '26', '--out', str(tmp_path / 'r.json')])
    result = report.results[0]
    assert result['evaluations'] == [{'x': 500.0, 'F': 0.5}]
    assert result['quantiles'] == [{'q': 0.025, 'value': 25.0}]
    assert result['prob_below']['probability'] == 0.025
# endregion


# region Drift commands
def test_drift_numeric_report(tmp_path, ref_csv, cur_csv):
    """Test the fields of a KS drift report and exit 3."""
    out = str(tmp_path / 'r.json')
    report, code = run_command(['drift', 'numeric', '--ref', ref_csv, '--cur', cur_csv, '--column', 'x',
                                '--out', out])
    assert code == EXIT_DRIFT
    result = report.results[0]
    assert result['kind'] == 'test'
    assert result['test_name'] == 'ks'
    assert result['decision'] == 'drift'
    assert result['p_value']['source'] == 'analytic'
    assert set(report.input_digests) == {'ref', 'cur'}
    assert report.summary['decision'] == 'drift'
    saved = json.loads(open(out, encoding='utf-8').read())
    assert saved['tool_version'] == '0.1.0'
    assert set(saved['timestamp']) == {'started_at', 'elapsed_seconds'}


def test_drift_numeric_permutations(tmp_path, ref_csv, cur_csv):
    """Test the permutation p-value option."""
    report, code = run_command(['drift', 'numeric', '--ref', ref_csv, '--cur', cur_csv, '--column', 'x',
                                '--test', 'mw', '--permutations', '199', '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_DRIFT
    assert report.results[0]['p_value']['permutation_count'] == 199


def test_drift_categorical_identical(tmp_path, ref_csv):
    """Test that a dataset compared with itself exits 0."""
    report, code = run_command(['drift', 'categorical', '--ref', ref_csv, '--cur', ref_csv, '--column', 'color',
                                '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_OK
    assert report.results[0]['test_name'] == 'chi_square'
    assert report.summary['reference_counts'] == report.summary['current_counts']


def test_drift_slices_from_mining(tmp_path, ref_csv, cur_csv):
    """Test mining error slices on the reference and testing their drift."""
    data = write_csv(tmp_path / 'mined.csv', {
        'color': ['red'] * 50 + ['blue'] * 50,
        'ok': [1] * 50 + [1, 0] * 25,
    })
    cur = write_csv(tmp_path / 'mined_cur.csv', {'color': ['red'] * 90 + ['blue'] * 10, 'ok': [1] * 100})
    report, code = run_command(['drift', 'slices', '--ref', data, '--cur', cur, '--mine', 'ok',
                                '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_DRIFT
    kinds = [r['kind'] for r in report.results]
    assert kinds == ['error_slice', 'test', 'family']
    assert report.results[0]['slice'] == 'color in {blue}'


def test_drift_slices_exit_follows_the_family(tmp_path):
    """Test exit 0 when one slice is significant only before the Holm adjustment."""
    groups = [f'g{i}' for i in range(10)]
    ref = write_csv(tmp_path / 'ref.csv', {'g': np.repeat(groups, [200] * 10)})
    cur = write_csv(tmp_path / 'cur.csv', {'g': np.repeat(groups, [247] + [195] * 8 + [193])})
    slices = write_json(tmp_path / 'slices.json', [[{'feature': 'g', 'kind': 'set', 'values': [g]}] for g in groups])
    report, code = run_command(['drift', 'slices', '--ref', ref, '--cur', cur, '--slices', slices,
                                '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_OK
    first, family = report.results[0], report.results[-1]
    assert first['metadata']['raw_p_value'] < 0.05
    assert first['decision'] == 'no-drift'
    assert family['kind'] == 'family'
    assert family['p_value']['value'] >= 0.05


def test_drift_sequence_command(tmp_path):
    """Test windowed drift with the first drifting window in the summary."""
    ref = write_csv(tmp_path / 'ref.csv', {'x': np.round(np.linspace(-2, 2, 500), 6)})
    cur = write_csv(tmp_path / 'cur.csv', {'x': np.round(np.concatenate([np.linspace(-2, 2, 100),
                                                                          np.linspace(0, 4, 100)]), 6)})
    report, code = run_command(['drift', 'sequence', '--ref', ref, '--cur', cur, '--column', 'x', '--window', '100',
                                '--step', '100', '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_DRIFT
    assert report.summary['first_drift_index'] == 1
# endregion


# region Policy and tree commands
def test_policy_optimize(tmp_path, components_json):
    """Test that a budget of 250 reviews the weakest component."""
    report, code = run_command(['policy', 'optimize', '--components', components_json, '--budget', '250',
                                '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_OK
    plan = report.results[0]
    assert plan['review_probs'] == [1.0, 0.0, 0.0, 0.0]
    assert plan['accuracy'] == pytest.approx(0.85)
    assert report.summary['baseline_accuracy'] == pytest.approx(0.75)


def test_policy_decide(tmp_path):
    """Test minmax and Bayes choices read from a loss file."""
    loss = write_json(tmp_path / 'loss.json', {'actions': ['a', 'b'], 'states': ['low', 'high'],
                                               'losses': [[0.5, 1.5], [1.0, 1.0]], 'dist': [0.5, 0.5]})
    report, code = run_command(['policy', 'decide', '--loss', loss, '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_OK
    minmax, bayes = report.results
    assert minmax['action'] == 'b'
    assert bayes['is_tie'] is True


def test_tree_analyze(tmp_path):
    """Test the worst path of a bare-node tree file."""
    tree = write_json(tmp_path / 'tree.json', {'name': 'root', 'kind': 'deterministic', 'children': [
        {'name': 'left', 'p': 0.1}, {'name': 'right', 'p': 0.3},
    ]})
    report, code = run_command(['tree', 'analyze', '--tree', tree, '--paths', '--out', str(tmp_path / 'r.json')])
    assert code == EXIT_OK
    worst = report.results[0]
    assert worst['nodes'] == ['root', 'right']
    assert worst['probability'] == pytest.approx(0.7)
    assert report.summary['leaves'] == 2
    assert [r['kind'] for r in report.results[1:]] == ['path', 'path']
# endregion


# region Errors
@pytest.mark.parametrize('argv', [
    [],
    ['frobnicate'],
    ['spc-k', '--n', '10'],
    ['spc-k', '--n', 'ten', '--p', '0.1'],
    ['spc-k', '--n', '10', '--p', '0.1', '--alpha', '2'],
    ['spc-k', '--n', '10', '--p', '0.1', '--observed', '11'],
])
def test_usage_errors_exit_one(argv):
    """Test that bad arguments exit 1 without a report."""
    report, code = run_command(argv)
    assert report is None
    assert code == EXIT_USAGE


def test_conflicting_drift_options(tmp_path, ref_csv, cur_csv):
    """Test option combinations rejected at run time."""
    _, code = run_command(['drift', 'numeric', '--ref', ref_csv, '--cur', cur_csv, '--column', 'x',
                           '--by-label', 'label', '--permutations', '199'])
    assert code == EXIT_USAGE
    _, code = run_command(['drift', 'numeric', '--ref', ref_csv, '--cur', cur_csv, '--column', 'x',
                           '--test', 'wass', '--threshold', '0.1', '--permutations', '199'])
    assert code == EXIT_USAGE
    _, code = run_command(['drift', 'slices', '--ref', ref_csv, '--cur', cur_csv])
    assert code == EXIT_USAGE


def test_data_errors_exit_two(tmp_path, ref_csv):
    """Test missing files, malformed CSV and unknown columns."""
    ragged = tmp_path / 'ragged.csv'
    ragged.write_text('x,y\n1,2\n3\n', encoding='utf-8')
    assert main(['ecdf', '--data', str(tmp_path / 'nope.csv'), '--column', 'x']) == EXIT_DATA
    assert main(['ecdf', '--data', str(ragged), '--column', 'x']) == EXIT_DATA
    assert main(['ecdf', '--data', ref_csv, '--column', 'missing']) == EXIT_DATA
    assert main(['drift', 'numeric', '--ref', ref_csv, '--cur', ref_csv, '--column', 'color']) == EXIT_DATA


def test_nested_command_defaults():
    """Test the defaults of a two-level command."""
    parser = build_parser()
    assert parser.prog == 'mlspc'
    args = parser.parse_args(['tree', 'simulate', '--tree', 't.json'])
    assert (args.command, args.action, args.policy, args.trials) == ('tree', 'simulate', 'worst', 1000)
# endregion
