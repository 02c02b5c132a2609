"""Check reports: verdicts with exact witnesses, serializable to canonical JSON."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact import Matrix, Poly, fmt_rational

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
NOT_APPLICABLE = "not_applicable"
ERROR = "error"


@dataclass(frozen=True)
class Witness:
    identifier: str
    n: int | None
    value: Any

    def to_json(self) -> dict:
        return {"id": self.identifier, "n": self.n, "value": to_jsonable(self.value)}


@dataclass
class CheckReport:
    name: str
    status: str = PASS
    witnesses: list[Witness] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    annotations: list[str] = field(default_factory=list)
    reason: str | None = None
    horizon: int | None = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def fail(self, identifier: str, n: int | None, value: Any) -> None:
        self.status = FAIL
        self.witnesses.append(Witness(identifier, n, value))

    def to_json(self) -> dict:
        out: dict[str, Any] = {"status": self.status}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.horizon is not None:
            out["horizon"] = self.horizon
        if self.witnesses:
            out["witnesses"] = [w.to_json() for w in self.witnesses]
        if self.annotations:
            out["annotations"] = list(self.annotations)
        if self.details:
            out["details"] = to_jsonable(self.details)
        return out


def skipped(name: str, reason: str) -> CheckReport:
    return CheckReport(name, SKIPPED, reason=reason)


def not_applicable(name: str, reason: str) -> CheckReport:
    return CheckReport(name, NOT_APPLICABLE, reason=reason)


def to_jsonable(obj: Any) -> Any:
    """Fractions become "p/q" strings, polynomials their coefficient lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, Poly):
        return [fmt_rational(c) for c in obj.coeffs]
    if isinstance(obj, Matrix):
        return [[fmt_rational(e) for e in obj.row(i)] for i in range(obj.rows)]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
