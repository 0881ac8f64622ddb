"""Command report written as JSON."""
from typing import Any

from pydantic import BaseModel, Field


class Timestamp(BaseModel):
    started_at: str
    elapsed_seconds: float


class Report(BaseModel):
    """Outcome of one CLI invocation.

    `results` holds serialized TestResult / interval / policy outputs;
    `decision` is 'drift' when any nested result drifted.
    """

    command: str
    tool_version: str
    seed: int
    alpha: float
    input_digests: dict[str, str] = Field(default_factory=dict)
    parameters: dict[str, Any] = Field(default_factory=dict)
    results: list[dict[str, Any]] = Field(default_factory=list)
    summary: dict[str, Any] = Field(default_factory=dict)
    timestamp: Timestamp
