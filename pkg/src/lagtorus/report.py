"""Check results and verification reports, with a stable JSON encoding."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

from .errors import DuplicateClaim

Value = Union[int, float, str]
STATUSES = ("pass", "fail", "skipped")


def interval(lo: float, hi: float = math.inf, closed_lo: bool = True) -> str:
    """Encode an expected interval, e.g. ``interval(0.1)`` -> ``"[0.1, inf)"``."""
    return f"{'[' if closed_lo else '('}{lo!r}, {'inf' if hi == math.inf else repr(hi)}{']' if hi != math.inf else ')'}"


def _in_interval(x: float, spec: str) -> bool:
    lo_s, hi_s = spec[1:-1].split(",")
    lo, hi = float(lo_s), float(hi_s)
    above = x >= lo if spec[0] == "[" else x > lo
    below = x <= hi if spec[-1] == "]" else x < hi
    return above and below


def _is_interval(v) -> bool:
    return isinstance(v, str) and len(v) > 2 and v[0] in "[(" and v[-1] in ")]" and "," in v


def _matches(measured: Value, expected: Value, tolerance: float) -> bool:
    if isinstance(measured, bool) or isinstance(expected, bool):
        return measured == expected
    if _is_interval(expected) and isinstance(measured, (int, float)) and not isinstance(measured, bool):
        return math.isfinite(measured) and _in_interval(float(measured), expected)
    if isinstance(measured, str) or isinstance(expected, str):
        return measured == expected
    if isinstance(measured, int) and isinstance(expected, int):
        # integer claims are topological; tolerances never apply
        return measured == expected
    if not (math.isfinite(measured) and math.isfinite(expected)):
        return False
    return abs(measured - expected) <= tolerance


@dataclass(frozen=True)
class CheckResult:
    claim_id: str
    paper_anchor: str
    status: str
    measured: Value
    expected: Value
    tolerance: float
    runtime_ms: int = 0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status != "skipped" and (self.status == "pass") != _matches(
            self.measured, self.expected, self.tolerance
        ):
            raise ValueError(f"status of {self.claim_id} disagrees with measured/expected")

    @classmethod
    def evaluate(
        cls,
        claim_id: str,
        anchor: str,
        measured: Value,
        expected: Value,
        tolerance: float = 0.0,
        runtime_ms: int = 0,
    ) -> "CheckResult":
        status = "pass" if _matches(measured, expected, tolerance) else "fail"
        return cls(claim_id, anchor, status, measured, expected, float(tolerance), int(runtime_ms))

    @classmethod
    def skipped(cls, claim_id: str, anchor: str, reason: str) -> "CheckResult":
        return cls(claim_id, anchor, "skipped", reason, "", 0.0, 0)

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "paper_anchor": self.paper_anchor,
            "status": self.status,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "runtime_ms": self.runtime_ms,
        }


@dataclass(frozen=True)
class VerificationReport:
    version: str
    config: dict
    checks: tuple = field(default=())

    @property
    def overall(self) -> str:
        active = [c for c in self.checks if c.status != "skipped"]
        return "pass" if all(c.status == "pass" for c in active) else "fail"

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "overall": self.overall,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        data = json.loads(text)
        checks = tuple(CheckResult(**c) for c in data["checks"])
        report = cls(data["version"], data["config"], checks)
        if report.overall != data["overall"]:
            raise ValueError("overall status is inconsistent with the checks")
        return report

    def to_text(self) -> str:
        width = max([len(c.claim_id) for c in self.checks] + [8])
        lines = [f"lagtorus {self.version}"]
        lines.append("config: " + ", ".join(f"{k}={v}" for k, v in self.config.items()))
        lines.append(f"{'claim':<{width}}  status   measured                 expected                 tol")
        for c in self.checks:
            lines.append(
                f"{c.claim_id:<{width}}  {c.status:<7}  {_fmt(c.measured):<23}  {_fmt(c.expected):<23}  {c.tolerance:g}"
            )
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines) + "\n"


def _fmt(v: Value) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def assemble_report(results, config: dict, version: str) -> VerificationReport:
    seen = set()
    for r in results:
        if r.claim_id in seen:
            raise DuplicateClaim(r.claim_id)
        seen.add(r.claim_id)
    ordered = tuple(sorted(results, key=lambda r: r.claim_id))
    return VerificationReport(version, dict(config), ordered)
