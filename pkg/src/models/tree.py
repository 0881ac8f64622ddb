"""Hybrid decision tree: rule nodes and ML nodes with error probabilities."""
from typing import Literal

from pydantic import BaseModel, Field, model_validator


class TreeNode(BaseModel):
    """Decision node. Deterministic nodes never err; leaves have no children."""

    model_config = {'frozen': True}

    name: str = ''
    kind: Literal['deterministic', 'nondeterministic'] = 'nondeterministic'
    p: float = 0.0
    children: list['TreeNode'] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_error_prob(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f'error probability p ({self.p}) must be in [0, 1]')
        if self.kind == 'deterministic' and self.p != 0.0:
            raise ValueError(f'deterministic node must have p = 0, got {self.p}')
        return self

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def correct_prob(self) -> float:
        return 1.0 - self.p

    def count_nodes(self) -> int:
        return 1 + sum(child.count_nodes() for child in self.children)

    def count_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return sum(child.count_leaves() for child in self.children)


class HybridTree(BaseModel):
    """Rooted tree mixing rule nodes and ML nodes."""

    model_config = {'frozen': True}

    root: TreeNode

    @classmethod
    def complete_binary(cls, depth: int, probs) -> 'HybridTree':
        """Complete binary tree of `depth` levels, probabilities in breadth-first order."""
        probs = list(probs)
        expected = 2 ** depth - 1
        if depth < 1:
            raise ValueError(f'depth ({depth}) must be >= 1')
        if len(probs) != expected:
            raise ValueError(f'complete binary tree of depth {depth} needs {expected} probabilities, got {len(probs)}')

        def build(i: int) -> TreeNode:
            left, right = 2 * i + 1, 2 * i + 2
            children = [build(left), build(right)] if left < expected else []
            return TreeNode(name=f'n{i}', p=probs[i], children=children)

        return cls(root=build(0))

    @classmethod
    def chain(cls, probs) -> 'HybridTree':
        """Single path with the given error probabilities, root first."""
        probs = list(probs)
        if not probs:
            raise ValueError('chain needs at least one node')
        node = TreeNode(name=f'n{len(probs) - 1}', p=probs[-1])
        for i in range(len(probs) - 2, -1, -1):
            node = TreeNode(name=f'n{i}', p=probs[i], children=[node])
        return cls(root=node)
