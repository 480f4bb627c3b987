"""Verdict records shared by the builders and the certifier."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Certificate:
    kind: str
    verdict: str
    ok: bool
    resolution: object = None
    witnesses: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> str:
        res = "" if self.resolution is None else f" @ {self.resolution}"
        return f"{self.kind}: {self.verdict}{res}"


def checklist(kind: str, checks: dict, resolution=None, witnesses=None) -> Certificate:
    """Certificate from named boolean checks; PASS iff all hold."""
    failures = [name for name, ok in checks.items() if not ok]
    wit = {name: "PASS" if ok else "FAIL" for name, ok in checks.items()}
    wit.update(witnesses or {})
    return Certificate(kind, "FAIL" if failures else "PASS", not failures, resolution, wit, failures)
