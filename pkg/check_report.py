#!/usr/bin/env python3
"""
================================================================
📊 CHECK REPORT - Verification records and report.json writer
Per-check records (name, anchor, measured, bound, passed), run
summaries and deterministic JSON output
================================================================
"""

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from workbench_errors import WorkbenchError

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """JSON-safe view: Fractions as strings, non-finite floats as strings"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "to_dict"):
        return _plain(value.to_dict())
    if hasattr(value, "item"):
        return value.item()
    return value


def dumps(data: Any) -> str:
    return json.dumps(_plain(data), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: Union[str, Path], data: Any) -> Path:
    """Same data gives the same bytes"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    logger.info(f"💾 wrote {path}")
    return path


@dataclass
class CheckRecord:
    """One acceptance check"""
    name: str
    anchor: str
    measured: Any
    bound: Any
    passed: Optional[bool]
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return _plain(asdict(self))


class CheckReport:
    """
    Collects check records for a run.

    Timings are logged but kept out of the JSON so reruns compare
    byte for byte.
    """

    def __init__(self, title: str, settings: Optional[Dict[str, Any]] = None):
        self.title = title
        self.settings = settings or {}
        self.records: List[CheckRecord] = []
        self.timings: Dict[str, float] = {}

    def add(self, name: str, anchor: str, measured: Any, bound: Any, passed: Optional[bool],
            **detail: Any) -> CheckRecord:
        record = CheckRecord(name, anchor, measured, bound, passed, detail)
        self.records.append(record)
        status = {True: "✅", False: "❌", None: "⚠️"}[passed]
        logger.info(f"{status} {name}: measured {_plain(measured)} vs bound {_plain(bound)}")
        return record

    def run(self, name: str, anchor: str, check: Callable[[], CheckRecord]) -> CheckRecord:
        """Time a check; a WorkbenchError becomes a failed record"""
        logger.info(f"🧪 {name} ({anchor})")
        start = time.perf_counter()
        try:
            record = check()
        except WorkbenchError as e:
            logger.error(f"❌ {name} raised {type(e).__name__}: {e.message}")
            record = self.add(name, anchor, None, None, False, error=e.to_dict())
        self.timings[name] = time.perf_counter() - start
        logger.info(f"   ⏱️ {self.timings[name]:.2f}s")
        return record

    @property
    def failed(self) -> List[CheckRecord]:
        return [r for r in self.records if r.passed is False]

    @property
    def passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "settings": _plain(self.settings),
            "checks": [r.to_dict() for r in self.records],
            "passed": self.passed,
            "summary": {
                "total": len(self.records),
                "failed": len(self.failed),
                "not_applicable": sum(1 for r in self.records if r.passed is None),
            },
        }

    def save(self, path: Union[str, Path]) -> Path:
        return write_json(path, self.to_dict())

    def log_summary(self):
        logger.info("\n" + "=" * 60)
        logger.info(f"📊 {self.title.upper()}")
        logger.info("=" * 60)
        for record in self.records:
            mark = {True: "✅", False: "❌", None: "⚠️"}[record.passed]
            seconds = self.timings.get(record.name)
            timing = f" ({seconds:.1f}s)" if seconds is not None else ""
            logger.info(f"{mark} {record.name}{timing}")
        logger.info("=" * 60)
        verdict = "all checks passed" if self.passed else f"{len(self.failed)} check(s) failed"
        logger.info(f"{'✅' if self.passed else '❌'} {verdict}")
        logger.info("=" * 60 + "\n")
