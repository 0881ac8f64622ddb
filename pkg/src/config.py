"""Run configuration and defaults."""
import os
from dataclasses import dataclass, field
from typing import Literal

from errors import MLSPCError

TOOL_VERSION = '0.1.0'

DEFAULT_SEED = 0
DEFAULT_ALPHA = 0.05
DEFAULT_TRIM = 0.025
DEFAULT_REPLICATES = 1000
DEFAULT_PERMUTATIONS = 999
DEFAULT_RELATION_THRESHOLD = 0.2
DEFAULT_EFFECT_THRESHOLD = 0.2
DELTA_CLOSE_THRESHOLD = 0.03

THREADS_ENV = 'MLSPC_THREADS'


def default_workers() -> int:
    """Worker count from MLSPC_THREADS, 1 when unset."""
    raw = os.environ.get(THREADS_ENV, '').strip()
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise MLSPCError(f'{THREADS_ENV} must be a positive integer, got {raw!r}') from None
    if workers < 1:
        raise MLSPCError(f'{THREADS_ENV} must be a positive integer, got {workers}')
    return workers


@dataclass
class RuntimeConfig:
    """Options shared by every command."""

    # Master seed; every replicate/permutation seed is derived from it
    seed: int = DEFAULT_SEED

    # Significance level for p-value decisions
    alpha: float = DEFAULT_ALPHA

    # Threads used for replicate fan-out; results do not depend on it
    workers: int = field(default_factory=default_workers)

    log_level: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR'] = 'WARNING'

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise MLSPCError(f'alpha must be in (0, 1], got {self.alpha}')
        if self.seed < 0:
            raise MLSPCError(f'seed must be >= 0, got {self.seed}')
        if self.workers < 1:
            raise MLSPCError(f'workers must be >= 1, got {self.workers}')
