"""Verification reports: named checks with witnesses, rendered as JSON lines."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .field import INF, ModP


@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name: str, ok: bool, **detail) -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.detail))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def records(self) -> list:
        out = [{"record": "report", "title": self.title, "info": jsonable(self.info)}]
        for c in self.checks:
            out.append({"record": "check", "report": self.title, "name": c.name,
                        "ok": c.ok, "detail": jsonable(c.detail)})
        out.append({"record": "report_end", "title": self.title, "ok": self.ok,
                    "checks": len(self.checks), "failed": len(self.failures())})
        return out

    def summary(self) -> str:
        lines = ["%s: %s (%d checks, %d failed)" % (self.title, "ok" if self.ok else "FAILED",
                                                     len(self.checks), len(self.failures()))]
        for c in self.failures()[:20]:
            lines.append("  FAIL %s %s" % (c.name, dumps(c.detail)))
        return "\n".join(lines)

    def __bool__(self):
        return self.ok


def jsonable(x):
    """Convert engine values into JSON-ready data with exact rational text."""
    if x is INF:
        return "inf"
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return "%d/%d" % (x.numerator, x.denominator)
    if isinstance(x, ModP):
        return str(x.v)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


def dumps(x) -> str:
    return json.dumps(jsonable(x), sort_keys=True, separators=(",", ":"))
