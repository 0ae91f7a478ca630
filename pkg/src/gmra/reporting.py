"""Verification verdicts with machine-readable, stably ordered payloads.

Every check in the package reports through these structures: a report is a
named collection of items, each item records pass/fail, the worst residual
seen, and the first few failing cells (as rational interval strings) so a
failure always names the offending cell and equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def cell_str(a: Fraction, b: Fraction) -> list[str]:
    return [str(a), str(b)]


@dataclass
class Failure:
    equation: str
    cell: list[str]
    detail: str = ""
    residual: float | None = None

    def as_dict(self) -> dict:
        out = {"equation": self.equation, "cell": self.cell}
        if self.detail:
            out["detail"] = self.detail
        if self.residual is not None:
            out["residual"] = self.residual
        return out


@dataclass
class CheckItem:
    name: str
    passed: bool
    exact: bool = False
    worst_residual: float | None = None
    failures: list[Failure] = field(default_factory=list)
    max_reported_failures: int = 8

    def record_failure(self, failure: Failure) -> None:
        self.passed = False
        if len(self.failures) < self.max_reported_failures:
            self.failures.append(failure)

    def record_residual(self, residual: float) -> None:
        if self.worst_residual is None or residual > self.worst_residual:
            self.worst_residual = residual

    def as_dict(self) -> dict:
        out: dict = {"name": self.name, "passed": self.passed, "exact": self.exact}
        if self.worst_residual is not None:
            out["worst_residual"] = self.worst_residual
        if self.failures:
            out["failures"] = [f.as_dict() for f in self.failures]
        return out


@dataclass
class CheckReport:
    name: str
    items: list[CheckItem] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def worst_residual(self) -> float:
        residuals = [i.worst_residual for i in self.items if i.worst_residual is not None]
        return max(residuals) if residuals else 0.0

    def item(self, name: str) -> CheckItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def add(self, item: CheckItem) -> CheckItem:
        self.items.append(item)
        return item

    def as_dict(self) -> dict:
        out: dict = {
            "report": self.name,
            "passed": self.passed,
            "items": [i.as_dict() for i in self.items],
        }
        if self.extra:
            out["extra"] = self.extra
        return out
