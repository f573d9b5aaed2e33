"""Pass/fail results carrying canonical, JSON-ready witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


def jsonable(value: Any) -> Any:
    """Convert witness payloads to plain JSON data.

    Domain objects are rendered through ``str`` so that their textual
    notation doubles as the serialized form.
    """
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    check: str
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @classmethod
    def passed(cls, check: str, **details: Any) -> "Verdict":
        return cls(True, check, None, details)

    @classmethod
    def failed(cls, check: str, witness: dict, **details: Any) -> "Verdict":
        return cls(False, check, witness, details)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.ok else "counterexample",
            "check": self.check,
            "witness": jsonable(self.witness),
            "details": jsonable(self.details),
        }
