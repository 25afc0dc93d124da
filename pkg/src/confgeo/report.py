"""Verification report model and emission (JSON and fixed-width text).

The JSON serialization is byte-stable for a fixed scenario and seed: record
order is fixed, floats use repr, and wall times are kept out of the
serialized schema (they live on the in-memory records only).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GeometryError

REPORT_VERSION = 1


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool
    wall_time: float = 0.0
    detail: str = ""


@dataclass
class VerificationReport:
    scenario: str
    seed: int
    backend: str
    records: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.records if r.passed)

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    def summary(self) -> dict:
        return {"total": self.total, "passed": self.passed,
                "failed": self.total - self.passed}


def emit_report(report: VerificationReport, fmt: str = "json") -> str:
    if fmt == "json":
        return _emit_json(report)
    if fmt == "text":
        return _emit_text(report)
    raise GeometryError(f"unknown report format {fmt!r}")


def _emit_json(report: VerificationReport) -> str:
    payload = {
        "version": REPORT_VERSION,
        "scenario": report.scenario,
        "seed": report.seed,
        "backend": report.backend,
        "records": [
            {
                "id": r.check_id,
                "anchor": r.anchor,
                "residual": r.residual,
                "tol": r.tolerance,
                "pass": r.passed,
            }
            for r in report.records
        ],
        "summary": report.summary(),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _emit_text(report: VerificationReport) -> str:
    lines = []
    lines.append(f"scenario: {report.scenario}   seed: {report.seed}   "
                 f"backend: {report.backend}")
    header = f"{'check':38s} {'status':6s} {'residual':>12s} {'tol':>10s}  anchor"
    lines.append(header)
    lines.append("-" * len(header))
    for r in report.records:
        status = "pass" if r.passed else "FAIL"
        anchor = r.anchor if len(r.anchor) <= 58 else r.anchor[:55] + "..."
        lines.append(f"{r.check_id:38s} {status:6s} {r.residual:12.3e} "
                     f"{r.tolerance:10.1e}  {anchor}")
    s = report.summary()
    lines.append("-" * len(header))
    lines.append(f"total {s['total']}  passed {s['passed']}  failed {s['failed']}")
    return "\n".join(lines) + "\n"
