"""Report assembly and serialization."""
import dataclasses
import hashlib
import json
import logging
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from config import TOOL_VERSION, RuntimeConfig
from models import Report, Timestamp

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DRIFT = 3


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 of the file's bytes."""
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            h.update(chunk)
    return h.hexdigest()


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types for models, records, numpy values and containers."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump(mode='json'))
    if hasattr(obj, '_asdict'):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def round_floats(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f'{obj:.{digits}g}')
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, list):
        return [round_floats(v, digits) for v in obj]
    return obj


class ReportBuilder:
    """Collects the outputs of one command and stamps them into a Report."""

    def __init__(self, command: str, config: RuntimeConfig):
        self.command = command
        self.config = config
        self.input_digests: dict[str, str] = {}
        self.parameters: dict[str, Any] = {}
        self.results: list[dict[str, Any]] = []
        self.summary: dict[str, Any] = {}
        self._started_at = datetime.now(timezone.utc)
        self._clock = time.perf_counter()

    def add_input(self, label: str, path: Union[str, Path]) -> None:
        self.input_digests[label] = file_digest(path)

    def add_result(self, result: Any, kind: Optional[str] = None) -> None:
        entry = to_jsonable(result)
        if not isinstance(entry, dict):
            entry = {'value': entry}
        if kind is not None:
            entry = {'kind': kind, **entry}
        self.results.append(entry)

    def add_results(self, results: Sequence[Any], kind: Optional[str] = None) -> None:
        for r in results:
            self.add_result(r, kind)

    def build(self) -> Report:
        self.summary.setdefault('decision', 'drift' if any_drift(self.results) else 'no-drift')
        return Report(
            command=self.command,
            tool_version=TOOL_VERSION,
            seed=self.config.seed,
            alpha=self.config.alpha,
            input_digests=self.input_digests,
            parameters=to_jsonable(self.parameters),
            results=self.results,
            summary=to_jsonable(self.summary),
            timestamp=Timestamp(started_at=self._started_at.isoformat(),
                                elapsed_seconds=time.perf_counter() - self._clock),
        )


def any_drift(obj: Any) -> bool:
    """True when any nested mapping carries decision == 'drift'."""
    if isinstance(obj, dict):
        if obj.get('decision') == 'drift':
            return True
        return any(any_drift(v) for v in obj.values())
    if isinstance(obj, list):
        return any(any_drift(v) for v in obj)
    return False


def exit_code(report: Report) -> int:
    return EXIT_DRIFT if any_drift(report.results) else EXIT_OK


def render_report(report: Report) -> str:
    """Indented JSON, keys sorted, floats at 12 significant digits."""
    data = round_floats(to_jsonable(report))
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + '\n'


def write_report(report: Report, path: Optional[Union[str, Path]] = None) -> None:
    """Write the report to `path`, or to stdout when no path is given."""
    text = render_report(report)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding='utf-8')
    logger.info('report written to %s', path)


def read_report(path: Union[str, Path]) -> Report:
    return Report.model_validate_json(Path(path).read_text(encoding='utf-8'))
