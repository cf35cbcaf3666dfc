"""Verification records and the JSON report format.

Exact rationals serialize as ``"p/q"`` strings (always with a denominator).
Reports are written with sorted keys and no timestamps, so the same inputs
produce byte-identical output.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__

TOOL = "densityclone"


@dataclass
class VerificationRecord:
    name: str
    passed: bool = True
    scope: str = ""
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def fail(self, **info) -> None:
        self.passed = False
        self.failures.append(info)

    def check(self, ok: bool, **info) -> bool:
        if not ok:
            self.fail(**info)
        return ok

    @property
    def first_failure(self):
        return self.failures[0] if self.failures else None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "scope": self.scope,
                "details": self.details, "failures": self.failures}


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str | int | Fraction) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = text.strip()
    if "/" in text:
        p, q = text.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(text)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str, float)):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset, range)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    return str(obj)


def make_report(command: str, config: dict, result: Any, status: str = "ok") -> dict:
    return {"tool": TOOL, "version": __version__, "command": command, "status": status,
            "config": to_jsonable(config), "result": to_jsonable(result)}


def dumps(report: Any) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"
