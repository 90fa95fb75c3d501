"""mulab.results

Experiment result container and its CSV / JSON emission.

- ExperimentResult: dict subclass holding rows, summary, verdicts, failures and provenance
- CSV: one row per replica (or per grid point and replica), spec hash and seed on every row
- JSON: the whole result with sorted keys

Floats are written with a fixed number of significant digits
(``MULAB_FLOAT_DIGITS``) through ``%``-formatting, so output is independent of
locale, platform and worker count.
"""

from __future__ import annotations

import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from .defaults import DEFAULT_FLOAT_DIGITS, DEFAULT_JSON_INDENT
from .errors import FailureRecord, UsageError
from .origin import Provenance

logger = logging.getLogger(__name__)

Verdict = Optional[bool]


def _round(x: float, digits: int) -> Optional[float]:
    if not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


def clean_value(obj: Any, digits: int = DEFAULT_FLOAT_DIGITS) -> Any:
    """JSON-ready copy: numpy scalars unwrapped, floats rounded, nan/inf -> None, tuples -> lists."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj), digits)
    if isinstance(obj, dict):
        return {str(k): clean_value(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_value(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean_value(v, digits) for v in obj.tolist()]
    return obj


class ExperimentResult(dict):
    """
    Dict-like result returned by every experiment runner.

    Keys: ``experiment``, ``rows``, ``summary``, ``verdicts``, ``failures``,
    ``provenance``. A verdict of None marks a descriptive check without a
    pass/fail claim; ``passed`` ignores those.
    """

    def __init__(
        self,
        experiment: str,
        rows: Iterable[Dict[str, Any]],
        summary: Dict[str, Any],
        verdicts: Dict[str, Verdict],
        failures: Iterable[FailureRecord],
        provenance: Provenance,
    ):
        super().__init__(
            experiment=experiment,
            rows=list(rows),
            summary=dict(summary),
            verdicts=dict(verdicts),
            failures=list(failures),
            provenance=provenance,
        )

    @property
    def rows(self) -> List[Dict[str, Any]]:
        return self["rows"]

    @property
    def summary(self) -> Dict[str, Any]:
        return self["summary"]

    @property
    def verdicts(self) -> Dict[str, Verdict]:
        return self["verdicts"]

    @property
    def failures(self) -> List[FailureRecord]:
        return self["failures"]

    @property
    def provenance(self) -> Provenance:
        return self["provenance"]

    @property
    def passed(self) -> bool:
        return all(v for v in self.verdicts.values() if v is not None)

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    # -- tables ------------------------------------------------------------

    def to_frame(self) -> pd.DataFrame:
        """Per-replica rows with ``spec_hash`` appended; column order follows the first row."""
        columns: List[str] = []
        for row in self.rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        frame = pd.DataFrame([clean_value(r) for r in self.rows], columns=columns)
        frame["spec_hash"] = self.provenance.spec_hash
        return frame

    def to_csv(self, digits: int = DEFAULT_FLOAT_DIGITS) -> str:
        buf = io.StringIO()
        self.to_frame().to_csv(buf, index=False, float_format=f"%.{digits}g", lineterminator="\n")
        return buf.getvalue()

    def to_dict(self, digits: int = DEFAULT_FLOAT_DIGITS) -> Dict[str, Any]:
        return clean_value(
            {
                "experiment": self["experiment"],
                "passed": self.passed,
                "summary": dict(sorted(self.summary.items())),
                "verdicts": dict(sorted(self.verdicts.items())),
                "failures": [f.to_dict() for f in self.failures],
                "failure_count": self.failure_count,
                "provenance": self.provenance.to_dict(),
                "rows": self.rows,
            },
            digits,
        )

    def to_json(self, digits: int = DEFAULT_FLOAT_DIGITS, indent: int = DEFAULT_JSON_INDENT) -> str:
        return json.dumps(self.to_dict(digits), sort_keys=True, indent=indent, allow_nan=False) + "\n"

    def render(self, fmt: str = "json") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise UsageError(f"unknown result format {fmt!r}")

    def save(self, output_path: Union[str, Path], fmt: str = "json") -> Path:
        path = Path(output_path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(fmt), encoding="utf-8")
        logger.info("wrote %s result to %s", fmt, path)
        return path

    def verdict_lines(self) -> List[str]:
        out = []
        for key, value in sorted(self.verdicts.items()):
            state = "n/a" if value is None else ("pass" if value else "FAIL")
            out.append(f"{key}: {state}")
        return out

    def __repr__(self) -> str:
        return (
            f"ExperimentResult({self['experiment']!r}, rows={len(self.rows)}, "
            f"failures={self.failure_count}, passed={self.passed})"
        )


def fraction(flags: Iterable[bool]) -> float:
    flags = list(flags)
    return sum(1 for f in flags if f) / len(flags) if flags else float("nan")


def median(values: Iterable[float]) -> float:
    arr = np.asarray(list(values), dtype=np.float64)
    arr = arr[np.isfinite(arr)]
    return float(np.median(arr)) if arr.size else float("nan")


__all__ = ["ExperimentResult", "Verdict", "clean_value", "fraction", "median"]
