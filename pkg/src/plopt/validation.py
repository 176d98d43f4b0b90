"""Validation reports shared by the model, assessment and catalog checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Issue:
    code: str
    subject: str
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.severity}: [{self.code}] {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    """Violations found in one or more input documents.

    Warnings are recorded but do not make the report invalid.
    """

    issues: list[Issue] = field(default_factory=list)

    def add(self, code: str, subject: str, message: str, severity: str = "error") -> None:
        self.issues.append(Issue(code, subject, message, severity))

    def warn(self, code: str, subject: str, message: str) -> None:
        self.add(code, subject, message, "warning")

    def extend(self, other: "ValidationReport | Iterable[Issue]") -> None:
        self.issues.extend(other.issues if isinstance(other, ValidationReport) else other)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __iter__(self) -> Iterator[Issue]:
        return iter(self.issues)

    def __len__(self) -> int:
        return len(self.issues)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {"severity": i.severity, "code": i.code, "subject": i.subject, "message": i.message}
                for i in self.issues
            ],
        }


class InvalidInputError(ValueError):
    """Raised when an operation receives inputs that failed validation."""

    def __init__(self, report: ValidationReport, what: str = "input") -> None:
        self.report = report
        lines = "; ".join(str(i) for i in report.errors)
        super().__init__(f"invalid {what}: {lines}")
