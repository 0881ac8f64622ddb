"""Reliability of hybrid decision trees.

A decision is correct only when every node on its root-to-leaf path
decides correctly; node errors are independent.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from config import DEFAULT_REPLICATES
from control import bootstrap_interval
from empirical import SeedLike, map_seeded, spawn_generators
from models import ControlInterval, HybridTree, Sample, TreeNode

logger = logging.getLogger(__name__)

MAX_ENUMERATED_LEAVES = 4096
MIN_TRIALS = 100

PathIndices = tuple[int, ...]


class WorstPath(NamedTuple):
    indices: PathIndices
    nodes: list[TreeNode]
    probability: float


@dataclass
class SimulationResult:
    """Monte Carlo correctness rate of a path-selection policy."""

    rate: float
    trials: int
    policy: str
    interval: ControlInterval
    # Analytic correctness probability when the path is fixed
    expected: Optional[float] = None


def resolve_path(tree: HybridTree, indices: Sequence[int]) -> list[TreeNode]:
    """Nodes reached by following child indices from the root to a leaf."""
    nodes = [tree.root]
    for step, i in enumerate(indices):
        children = nodes[-1].children
        if not 0 <= i < len(children):
            raise ValueError(f'invalid path: step {step} asks for child {i} of a node with {len(children)}')
        nodes.append(children[i])
    if not nodes[-1].is_leaf:
        raise ValueError('invalid path: it stops before reaching a leaf')
    return nodes


def _validate_nodes(tree: HybridTree, path: Sequence[TreeNode]) -> None:
    if not path or path[0] is not tree.root:
        raise ValueError('invalid path: it must start at the root')
    for parent, child in zip(path, path[1:]):
        if not any(c is child for c in parent.children):
            raise ValueError(f"invalid path: '{child.name}' is not a child of '{parent.name}'")
    if not path[-1].is_leaf:
        raise ValueError('invalid path: it stops before reaching a leaf')


def path_correct_prob(tree: HybridTree, path: Union[Sequence[TreeNode], Sequence[int]]) -> float:
    """Product of (1 - p) over the nodes of a root-to-leaf path.

    The path is given either as its nodes or as child indices.
    """
    if path and all(isinstance(step, TreeNode) for step in path):
        nodes = list(path)
        _validate_nodes(tree, nodes)
    else:
        nodes = resolve_path(tree, path)
    return float(np.prod([node.correct_prob for node in nodes]))


def worst_path(tree: HybridTree) -> WorstPath:
    """Root-to-leaf path with the lowest correctness probability; leftmost on ties."""

    def descend(node: TreeNode) -> tuple[float, PathIndices]:
        if node.is_leaf:
            return node.correct_prob, ()
        best_prob, best_path = None, ()
        for i, child in enumerate(node.children):
            prob, rest = descend(child)
            if best_prob is None or prob < best_prob:
                best_prob, best_path = prob, (i, *rest)
        return node.correct_prob * best_prob, best_path

    probability, indices = descend(tree.root)
    return WorstPath(indices=indices, nodes=resolve_path(tree, indices), probability=probability)


def enumerate_paths(tree: HybridTree, limit: int = MAX_ENUMERATED_LEAVES) -> list[tuple[PathIndices, float]]:
    """Every root-to-leaf path with its correctness probability, left to right."""
    leaves = tree.root.count_leaves()
    if leaves > limit:
        raise ValueError(f'tree has {leaves} leaves; enumeration is limited to {limit}')
    out: list[tuple[PathIndices, float]] = []

    def walk(node: TreeNode, indices: PathIndices, prob: float) -> None:
        prob *= node.correct_prob
        if node.is_leaf:
            out.append((indices, prob))
            return
        for i, child in enumerate(node.children):
            walk(child, (*indices, i), prob)

    walk(tree.root, (), 1.0)
    return out


def simulate_tree(tree: HybridTree, policy: Union[str, Sequence[int]] = 'worst', trials: int = 1000,
                  seed: SeedLike = 0, workers: int = 1,
                  replicates: int = DEFAULT_REPLICATES) -> SimulationResult:
    """Walk the tree `trials` times, flipping an error coin at every node.

    policy: 'worst' (adversarial path), 'random' (uniform child at every
    node, drawn per trial) or an explicit list of child indices.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f'trials ({trials}) must be >= {MIN_TRIALS}')
    if isinstance(policy, str):
        if policy not in ('worst', 'random'):
            raise ValueError(f"unknown path policy '{policy}'; use 'worst', 'random' or child indices")
        policy_name = policy
        fixed = worst_path(tree).indices if policy == 'worst' else None
    else:
        fixed = tuple(int(i) for i in policy)
        policy_name = 'path ' + ','.join(str(i) for i in fixed)

    fixed_probs = None
    expected = None
    if fixed is not None:
        nodes = resolve_path(tree, fixed)
        fixed_probs = np.asarray([node.p for node in nodes])
        expected = path_correct_prob(tree, fixed)

    def trial(rng: np.random.Generator) -> float:
        if fixed_probs is not None:
            return float(np.all(rng.random(len(fixed_probs)) >= fixed_probs))
        node = tree.root
        while True:
            if rng.random() < node.p:
                return 0.0
            if node.is_leaf:
                return 1.0
            node = node.children[int(rng.integers(0, len(node.children)))]

    trial_seed, band_seed = spawn_generators(seed, 2)
    outcomes = np.asarray(map_seeded(trial, trial_seed, trials, workers))
    rate = float(outcomes.mean())
    logger.debug('simulated %d trials under %s: rate %.4f', trials, policy_name, rate)
    interval = bootstrap_interval(Sample(values=outcomes), replicates=replicates, seed=band_seed, workers=workers)
    return SimulationResult(rate=rate, trials=trials, policy=policy_name, interval=interval, expected=expected)
