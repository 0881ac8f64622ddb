"""Command-line surface: every command writes one JSON report.

Exit codes: 0 no drift, 1 usage error, 2 data error, 3 drift detected.
"""
import argparse
import logging
import sys
from typing import Callable, Optional, Sequence

from config import (
    DEFAULT_ALPHA, DEFAULT_PERMUTATIONS, DEFAULT_RELATION_THRESHOLD, DEFAULT_REPLICATES, DEFAULT_SEED,
    DEFAULT_TRIM, RuntimeConfig, default_workers
)
from control import (
    bootstrap_interval, check_in_control, clt_interval, compare_models, requirement_check, trimmed_interval
)
from datasets import load_dataset, load_json_model, read_json
from drift import (
    CATEGORICAL_METRICS, NUMERIC_TESTS, PERMUTATION_STATISTICS, class_conditional_drift, counts_from_values,
    run_categorical_metric, run_numeric_test, with_permutation_pvalue
)
from empirical import ecdf_build, ecdf_evaluate, ecdf_quantile, prob_below, spawn_generators
from errors import UsageError
from models import (
    ComponentFile, DensitySliceSet, EliminationPolicy, HybridTree, LabeledSample, LossMatrix,
    RelationSet, Report, Sample, SliceFile, StatisticSpec, TreeNode
)
from policy import (
    accuracy_interval, bayes_action, expected_accuracy, expected_cost, find_control_k, is_out_of_control,
    minmax_action, optimize_budget, single_elimination_table
)
from relations import mine_relations, relation_band, relation_drift_score
from reporting import EXIT_DATA, EXIT_USAGE, ReportBuilder, exit_code, write_report
from sequence import drift_sequence
from slicing import density_drift_test, mine_error_slices, slice_drift_test
from system import enumerate_paths, simulate_tree, worst_path

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, so the caller picks the exit code."""

    def error(self, message):
        raise UsageError(f'{self.prog}: {message}')


# region Parser

def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma-separated numbers, got {text!r}') from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma-separated integers, got {text!r}') from None


def _common_parser() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help='master random seed')
    common.add_argument('--alpha', type=float, default=DEFAULT_ALPHA, help='significance level')
    common.add_argument('--out', default=None, help='report path (stdout when omitted)')
    common.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    common.add_argument('--workers', type=int, default=None, help='threads for replicate fan-out')
    common.add_argument('--schema', default=None, help='JSON column-type overrides for CSV inputs')
    return common


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument('--column', help='numeric score column')
    p.add_argument('--pred', help='prediction column (with --label)')
    p.add_argument('--label', help='true label column (with --pred)')
    p.add_argument('--stat', default='mean', choices=['mean', 'accuracy', 'proportion'])
    p.add_argument('--success', type=float, default=1.0, help='value counted by --stat proportion')


def build_parser() -> ArgumentParser:
    common = _common_parser()
    parser = ArgumentParser(prog='mlspc', description='Statistical control for ML-embedded systems.')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('ecdf', parents=[common], help='empirical distribution of a column')
    p.add_argument('--data', required=True)
    p.add_argument('--column', required=True)
    p.add_argument('--at', type=_float_list, default=[], help='points to evaluate F_e at')
    p.add_argument('--quantiles', type=_float_list, default=[], help='levels q in (0, 1]')
    p.add_argument('--below', type=float, default=None, help='report P(X < value)')

    interval = commands.add_parser('interval', help='control intervals').add_subparsers(dest='action', required=True)
    p = interval.add_parser('trimmed', parents=[common], help='trim a list of scores')
    p.add_argument('--data', required=True)
    p.add_argument('--column', required=True)
    p.add_argument('--trim', type=float, default=DEFAULT_TRIM)
    p.add_argument('--observed', type=float, default=None, help='judge a field value against the interval')
    p = interval.add_parser('bootstrap', parents=[common], help='bootstrap a statistic')
    p.add_argument('--data', required=True)
    _add_source_args(p)
    p.add_argument('--replicates', type=int, default=DEFAULT_REPLICATES)
    p.add_argument('--trim', type=float, default=DEFAULT_TRIM)
    p.add_argument('--observed', type=float, default=None, help='judge a field value against the interval')
    p.add_argument('--floor', type=float, default=None, help='report the risk of falling below this value')
    p.add_argument('--max-risk', type=float, default=0.05)
    p = interval.add_parser('clt', parents=[common], help='normal approximation of the mean')
    p.add_argument('--data', required=True)
    p.add_argument('--column', required=True)
    p.add_argument('--confidence', type=float, default=0.95)
    p = interval.add_parser('compare', parents=[common], help='bootstrap two models and compare')
    _add_source_args(p)
    p.add_argument('--data-a', required=True)
    p.add_argument('--data-b', required=True)
    p.add_argument('--replicates', type=int, default=DEFAULT_REPLICATES)
    p.add_argument('--trim', type=float, default=DEFAULT_TRIM)

    drift = commands.add_parser('drift', help='reference vs current drift').add_subparsers(dest='action', required=True)
    p = drift.add_parser('numeric', parents=[common], help='two-sample test on a numeric column')
    p.add_argument('--ref', required=True)
    p.add_argument('--cur', required=True)
    p.add_argument('--column', required=True)
    p.add_argument('--test', default='ks', choices=sorted(NUMERIC_TESTS))
    p.add_argument('--threshold', type=float, default=None, help='decision threshold of effect tests')
    p.add_argument('--by-label', default=None, help='test p(column | label) per label of this column')
    p.add_argument('--permutations', type=int, default=None,
                   help=f'use a permutation p-value (e.g. {DEFAULT_PERMUTATIONS} permutations)')
    p = drift.add_parser('categorical', parents=[common], help='distribution of a categorical column')
    p.add_argument('--ref', required=True)
    p.add_argument('--cur', required=True)
    p.add_argument('--column', required=True)
    p.add_argument('--metric', default='chi2', choices=sorted(CATEGORICAL_METRICS))
    p.add_argument('--threshold', type=float, default=None)
    p.add_argument('--success', default=None, help='label counted as success by h and yates')
    p = drift.add_parser('slices', parents=[common], help='support drift of data slices')
    p.add_argument('--ref', required=True)
    p.add_argument('--cur', required=True)
    p.add_argument('--slices', default=None, help='slice file')
    p.add_argument('--mine', default=None, metavar='CORRECT_COLUMN',
                   help='mine error slices on the reference from this correctness column')
    p.add_argument('--top', type=int, default=10)
    p.add_argument('--max-predicates', type=int, default=1)
    p.add_argument('--min-support', type=float, default=0.01)
    p = drift.add_parser('density', parents=[common], help='drift of density-slice types')
    p.add_argument('--ref', required=True)
    p.add_argument('--cur', required=True)
    p.add_argument('--slices', required=True, help='density-slice set file')
    p = drift.add_parser('relations', parents=[common], help='degradation of feature relations')
    p.add_argument('--ref', required=True)
    p.add_argument('--cur', required=True)
    p.add_argument('--relations', default=None, help='relation file; mined from --ref when omitted')
    p.add_argument('--min-r2', type=float, default=0.9)
    p.add_argument('--threshold', type=float, default=DEFAULT_RELATION_THRESHOLD)
    p.add_argument('--band', action='store_true', help='add a bootstrap band of the current R^2')
    p.add_argument('--replicates', type=int, default=DEFAULT_REPLICATES)
    p = drift.add_parser('sequence', parents=[common], help='sliding windows against the reference')
    p.add_argument('--ref', required=True)
    p.add_argument('--cur', required=True)
    p.add_argument('--column', required=True)
    p.add_argument('--window', type=int, required=True)
    p.add_argument('--step', type=int, required=True)
    p.add_argument('--test', default='ks', choices=['ks', 'mw', 't'])

    p = commands.add_parser('spc-k', parents=[common], help='binomial control limit for defects')
    p.add_argument('--n', type=int, required=True, help='batch size')
    p.add_argument('--p', type=float, required=True, help='defect probability in control')
    p.add_argument('--observed', type=int, default=None, help='defects observed in the batch')

    policy = commands.add_parser('policy', help='human review policies').add_subparsers(dest='action', required=True)
    p = policy.add_parser('optimize', parents=[common], help='best review policy within a budget')
    p.add_argument('--components', required=True)
    p.add_argument('--budget', type=float, required=True)
    p.add_argument('--volume', type=int, default=1000)
    p.add_argument('--unit-cost', type=float, default=1.0)
    p = policy.add_parser('evaluate', parents=[common], help='accuracy and cost of a review policy')
    p.add_argument('--components', required=True)
    p.add_argument('--reviews', type=_float_list, default=[], help='review probability per component')
    p.add_argument('--volume', type=int, default=1000)
    p.add_argument('--unit-cost', type=float, default=1.0)
    p.add_argument('--confidence', type=float, default=0.95)
    p = policy.add_parser('decide', parents=[common], help='minmax and Bayes actions of a loss matrix')
    p.add_argument('--loss', required=True)
    p.add_argument('--dist', type=_float_list, default=None, help='state distribution (overrides the file)')

    tree = commands.add_parser('tree', help='hybrid decision trees').add_subparsers(dest='action', required=True)
    p = tree.add_parser('analyze', parents=[common], help='worst path and per-path correctness')
    p.add_argument('--tree', required=True)
    p.add_argument('--paths', action='store_true', help='list every root-to-leaf path')
    p = tree.add_parser('simulate', parents=[common], help='Monte Carlo correctness rate')
    p.add_argument('--tree', required=True)
    p.add_argument('--policy', default='worst', help="'worst', 'random' or child indices like 0,1,1")
    p.add_argument('--trials', type=int, default=1000)
    p.add_argument('--replicates', type=int, default=DEFAULT_REPLICATES)
    return parser

# endregion

# region Commands

def _load(builder: ReportBuilder, args, label: str, path: str):
    builder.add_input(label, path)
    return load_dataset(path, args.schema)


def _load_model(builder: ReportBuilder, label: str, path: str, model, list_key: Optional[str] = None):
    builder.add_input(label, path)
    return load_json_model(path, model, list_key)


def _source(dataset, args):
    if args.pred or args.label:
        if not (args.pred and args.label):
            raise UsageError('--pred and --label go together')
        return LabeledSample.from_columns(dataset.values(args.pred), dataset.values(args.label))
    if not args.column:
        raise UsageError('give --column, or --pred with --label')
    return Sample(values=dataset.numeric(args.column))


def _stat(args) -> StatisticSpec:
    return StatisticSpec(name=args.stat, success=args.success)


def cmd_ecdf(args, config, builder):
    data = _load(builder, args, 'data', args.data)
    cdf = ecdf_build(data.numeric(args.column))
    builder.parameters.update(column=args.column, at=args.at, quantiles=args.quantiles, below=args.below)
    result = {'column': args.column, 'n': cdf.n, 'minimum': cdf.minimum, 'maximum': cdf.maximum,
              'evaluations': [{'x': x, 'F': float(ecdf_evaluate(cdf, x))} for x in args.at],
              'quantiles': [{'q': q, 'value': ecdf_quantile(cdf, q)} for q in args.quantiles]}
    if args.below is not None:
        result['prob_below'] = {'threshold': args.below, 'probability': prob_below(cdf, args.below)}
    builder.add_result(result, kind='ecdf')


def _judge(builder, interval, observed):
    if observed is not None:
        check = check_in_control(interval, observed)
        builder.add_result({**check.model_dump(), 'inside': check.inside}, kind='control_check')
        builder.summary['in_control'] = check.inside


def cmd_interval_trimmed(args, config, builder):
    data = _load(builder, args, 'data', args.data)
    builder.parameters.update(column=args.column, trim=args.trim)
    interval = trimmed_interval(data.numeric(args.column), args.trim)
    builder.add_result(interval, kind='interval')
    _judge(builder, interval, args.observed)


def cmd_interval_bootstrap(args, config, builder):
    data = _load(builder, args, 'data', args.data)
    source = _source(data, args)
    builder.parameters.update(column=args.column, pred=args.pred, label=args.label, stat=args.stat,
                              success=args.success, replicates=args.replicates, trim=args.trim)
    interval_seed, risk_seed = spawn_generators(config.seed, 2)
    interval = bootstrap_interval(source, _stat(args), args.replicates, args.trim, interval_seed, config.workers)
    builder.add_result(interval, kind='interval')
    _judge(builder, interval, args.observed)
    if args.floor is not None:
        check = requirement_check(source, _stat(args), args.floor, args.max_risk, args.replicates,
                                  risk_seed, config.workers)
        builder.add_result(check, kind='requirement')
        builder.summary['requirement_met'] = check.met


def cmd_interval_clt(args, config, builder):
    data = _load(builder, args, 'data', args.data)
    builder.parameters.update(column=args.column, confidence=args.confidence)
    builder.add_result(clt_interval(data.numeric(args.column), args.confidence), kind='interval')


def cmd_interval_compare(args, config, builder):
    a = _source(_load(builder, args, 'data_a', args.data_a), args)
    b = _source(_load(builder, args, 'data_b', args.data_b), args)
    builder.parameters.update(column=args.column, pred=args.pred, label=args.label, stat=args.stat,
                              replicates=args.replicates, trim=args.trim)
    comparison = compare_models(a, b, _stat(args), args.replicates, args.trim, config.seed, config.workers)
    builder.add_result(comparison, kind='comparison')
    builder.summary['verdict'] = comparison.verdict


def cmd_drift_numeric(args, config, builder):
    ref = _load(builder, args, 'ref', args.ref)
    cur = _load(builder, args, 'cur', args.cur)
    builder.parameters.update(column=args.column, test=args.test, threshold=args.threshold,
                              by_label=args.by_label, permutations=args.permutations)
    if args.permutations is not None and args.test not in PERMUTATION_STATISTICS:
        raise UsageError(f"--permutations applies to {', '.join(sorted(PERMUTATION_STATISTICS))}, not '{args.test}'")
    if args.by_label:
        if args.permutations is not None:
            raise UsageError('--permutations cannot be combined with --by-label')
        results = class_conditional_drift(ref, cur, args.column, args.by_label, args.test,
                                          config.alpha, args.threshold)
        builder.add_results(results, kind='test')
        return
    a, b = ref.numeric(args.column), cur.numeric(args.column)
    result = run_numeric_test(args.test, a, b, config.alpha, args.threshold)
    if args.permutations is not None:
        result = with_permutation_pvalue(result, args.test, a, b, args.permutations, config.seed, config.workers)
    builder.add_result(result, kind='test')


def cmd_drift_categorical(args, config, builder):
    ref = _load(builder, args, 'ref', args.ref)
    cur = _load(builder, args, 'cur', args.cur)
    builder.parameters.update(column=args.column, metric=args.metric, threshold=args.threshold,
                              success=args.success)
    a = counts_from_values(ref.values(args.column))
    b = counts_from_values(cur.values(args.column))
    builder.add_result(run_categorical_metric(args.metric, a, b, config.alpha, args.threshold, args.success),
                       kind='test')
    builder.summary['reference_counts'] = a.as_dict()
    builder.summary['current_counts'] = b.as_dict()


def cmd_drift_slices(args, config, builder):
    ref = _load(builder, args, 'ref', args.ref)
    cur = _load(builder, args, 'cur', args.cur)
    if (args.slices is None) == (args.mine is None):
        raise UsageError('give exactly one of --slices and --mine')
    builder.parameters.update(mine=args.mine, top=args.top, max_predicates=args.max_predicates,
                              min_support=args.min_support)
    if args.slices is not None:
        slices = _load_model(builder, 'slices', args.slices, SliceFile, 'slices').slices
    else:
        ranked = mine_error_slices(ref, args.mine, args.max_predicates, args.min_support)[:args.top]
        for r in ranked:
            builder.add_result({'slice': r.slice.describe(), **r.stats.model_dump()}, kind='error_slice')
        slices = [r.slice for r in ranked]
        if not slices:
            logger.warning('no error slice passed the mining filters')
            builder.summary['slices'] = 0
            return
    outcome = slice_drift_test(slices, ref, cur, config.alpha)
    builder.add_results(outcome.per_slice, kind='test')
    builder.add_result(outcome.family, kind='family')
    builder.summary['adjusted_p_values'] = outcome.adjusted


def cmd_drift_density(args, config, builder):
    ref = _load(builder, args, 'ref', args.ref)
    cur = _load(builder, args, 'cur', args.cur)
    slice_set = _load_model(builder, 'slices', args.slices, DensitySliceSet)
    outcome = density_drift_test(slice_set, ref, cur, config.alpha)
    builder.add_results(outcome.per_type, kind='test')
    builder.add_result(outcome.family, kind='family')
    builder.add_result(outcome.dissimilarity, kind='dissimilarity')
    builder.summary.update(reference_counts=outcome.reference_counts.as_dict(),
                           current_counts=outcome.current_counts.as_dict(),
                           adjusted_p_values=outcome.adjusted,
                           most_changed_type=outcome.most_changed_type, gap_rows=outcome.gap_rows)


def cmd_drift_relations(args, config, builder):
    ref = _load(builder, args, 'ref', args.ref)
    cur = _load(builder, args, 'cur', args.cur)
    builder.parameters.update(threshold=args.threshold, min_r2=args.min_r2, band=args.band,
                              replicates=args.replicates)
    if args.relations is not None:
        relations = _load_model(builder, 'relations', args.relations, RelationSet, 'relations').relations
    else:
        relations = mine_relations(ref, args.min_r2)
    builder.summary['relations'] = len(relations)
    seeds = spawn_generators(config.seed, len(relations))
    for rel, rng in zip(relations, seeds):
        drifted = relation_drift_score(rel, cur, args.threshold)
        builder.add_result(drifted.result, kind='test')
        if args.band:
            band = relation_band(rel, cur, args.replicates, DEFAULT_TRIM, rng, config.workers)
            builder.add_result({'relation': rel.describe(), **band.model_dump()}, kind='interval')


def cmd_drift_sequence(args, config, builder):
    ref = _load(builder, args, 'ref', args.ref)
    cur = _load(builder, args, 'cur', args.cur)
    builder.parameters.update(column=args.column, window=args.window, step=args.step, test=args.test)
    outcome = drift_sequence(ref.numeric(args.column), cur.numeric(args.column), args.window, args.step,
                             args.test, config.alpha)
    for w in outcome.windows:
        builder.add_result({'index': w.index, 'start': w.start, 'stop': w.stop, 'raw_p_value': w.raw_p_value,
                            'adjusted_p_value': w.adjusted_p_value, 'decision': w.result.decision},
                           kind='window')
    builder.add_result(outcome.family, kind='family')
    builder.summary['first_drift_index'] = outcome.first_drift_index


def cmd_spc_k(args, config, builder):
    builder.parameters.update(n=args.n, p=args.p, observed=args.observed)
    k = find_control_k(args.n, args.p, config.alpha)
    builder.add_result({'k': k, 'n': args.n, 'p': args.p, 'alpha': config.alpha}, kind='control_limit')
    if args.observed is not None:
        if not 0 <= args.observed <= args.n:
            raise UsageError(f'--observed ({args.observed}) must be in [0, {args.n}]')
        out = is_out_of_control(args.observed, args.n, args.p, config.alpha)
        builder.add_result({'defects': args.observed, 'k': k, 'out_of_control': out,
                            'decision': 'drift' if out else 'no-drift'}, kind='control_check')
        builder.summary['out_of_control'] = out


def cmd_policy_optimize(args, config, builder):
    components = _load_model(builder, 'components', args.components, ComponentFile, 'components').components
    builder.parameters.update(budget=args.budget, volume=args.volume, unit_cost=args.unit_cost)
    plan = optimize_budget(components, args.budget, args.volume, args.unit_cost)
    builder.add_result({'review_probs': plan.policy.review_probs, 'accuracy': plan.accuracy,
                        'cost': plan.cost, 'leftover': plan.leftover}, kind='policy')
    builder.summary['baseline_accuracy'] = expected_accuracy(plan.policy.with_reviews([0.0] * len(components)))


def cmd_policy_evaluate(args, config, builder):
    components = _load_model(builder, 'components', args.components, ComponentFile, 'components').components
    builder.parameters.update(reviews=args.reviews, volume=args.volume, unit_cost=args.unit_cost)
    policy = EliminationPolicy(components=components, review_probs=tuple(args.reviews),
                               unit_cost=args.unit_cost, volume=args.volume)
    result = {'review_probs': policy.review_probs, 'accuracy': expected_accuracy(policy),
              'cost': expected_cost(policy)}
    if all(c.se is not None for c in components):
        result['interval'] = accuracy_interval(policy, args.confidence)
    builder.add_result(result, kind='policy')
    builder.add_results(single_elimination_table(components, args.volume, args.unit_cost), kind='single_elimination')


def cmd_policy_decide(args, config, builder):
    loss = _load_model(builder, 'loss', args.loss, LossMatrix)
    builder.parameters.update(dist=args.dist)
    minmax = minmax_action(loss)
    builder.add_result({'rule': 'minmax', 'action': minmax.action, 'values': minmax.values,
                        'tied': minmax.tied}, kind='decision')
    if args.dist is not None or loss.dist is not None:
        bayes = bayes_action(loss, args.dist)
        builder.add_result({'rule': 'bayes', 'action': bayes.action, 'values': bayes.values,
                            'tied': bayes.tied, 'is_tie': bayes.is_tie}, kind='decision')


def _load_tree(builder, path) -> HybridTree:
    builder.add_input('tree', path)
    data = read_json(path)
    if isinstance(data, dict) and 'root' not in data:
        return HybridTree(root=TreeNode.model_validate(data))
    return HybridTree.model_validate(data)


def cmd_tree_analyze(args, config, builder):
    tree = _load_tree(builder, args.tree)
    worst = worst_path(tree)
    builder.add_result({'indices': worst.indices, 'nodes': [n.name for n in worst.nodes],
                        'probability': worst.probability}, kind='worst_path')
    builder.summary.update(nodes=tree.root.count_nodes(), leaves=tree.root.count_leaves())
    if args.paths:
        for indices, prob in enumerate_paths(tree):
            builder.add_result({'indices': indices, 'probability': prob}, kind='path')


def cmd_tree_simulate(args, config, builder):
    tree = _load_tree(builder, args.tree)
    policy = args.policy if args.policy in ('worst', 'random') else _int_list(args.policy)
    builder.parameters.update(policy=args.policy, trials=args.trials, replicates=args.replicates)
    builder.add_result(simulate_tree(tree, policy, args.trials, config.seed, config.workers, args.replicates),
                       kind='simulation')


COMMANDS: dict[tuple[str, Optional[str]], Callable] = {
    ('ecdf', None): cmd_ecdf,
    ('interval', 'trimmed'): cmd_interval_trimmed,
    ('interval', 'bootstrap'): cmd_interval_bootstrap,
    ('interval', 'clt'): cmd_interval_clt,
    ('interval', 'compare'): cmd_interval_compare,
    ('drift', 'numeric'): cmd_drift_numeric,
    ('drift', 'categorical'): cmd_drift_categorical,
    ('drift', 'slices'): cmd_drift_slices,
    ('drift', 'density'): cmd_drift_density,
    ('drift', 'relations'): cmd_drift_relations,
    ('drift', 'sequence'): cmd_drift_sequence,
    ('spc-k', None): cmd_spc_k,
    ('policy', 'optimize'): cmd_policy_optimize,
    ('policy', 'evaluate'): cmd_policy_evaluate,
    ('policy', 'decide'): cmd_policy_decide,
    ('tree', 'analyze'): cmd_tree_analyze,
    ('tree', 'simulate'): cmd_tree_simulate,
}

# endregion


def run_command(argv: Optional[Sequence[str]] = None) -> tuple[Optional[Report], int]:
    """Parse, run and write the report. Returns the report (None on error) and the exit code."""
    try:
        args = build_parser().parse_args(argv)
        workers = args.workers if args.workers is not None else default_workers()
        config = RuntimeConfig(seed=args.seed, alpha=args.alpha, workers=workers, log_level=args.log_level)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return None, EXIT_USAGE
    except ValueError as exc:
        print(f'mlspc: {exc}', file=sys.stderr)
        return None, EXIT_USAGE

    logging.basicConfig(level=getattr(logging, config.log_level), format=LOG_FORMAT, stream=sys.stderr)
    action = getattr(args, 'action', None)
    name = ' '.join(part for part in (args.command, action) if part)
    builder = ReportBuilder(name, config)
    try:
        COMMANDS[(args.command, action)](args, config, builder)
        report = builder.build()
        write_report(report, args.out)
    except UsageError as exc:
        logger.error('%s', exc)
        return None, EXIT_USAGE
    except (ValueError, OSError) as exc:
        # DataError, pydantic ValidationError and JSONDecodeError are ValueErrors
        logger.error('%s', exc)
        return None, EXIT_DATA
    code = exit_code(report)
    logger.info('%s finished with exit code %d', name, code)
    return report, code


def main(argv: Optional[Sequence[str]] = None) -> int:
    _, code = run_command(argv)
    return code


if __name__ == '__main__':
    sys.exit(main())
