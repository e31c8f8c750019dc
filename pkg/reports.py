"""
Verification reports.

Every checker returns a Report: a titled list of violations plus a
dictionary of facts gathered along the way (counts, witnesses).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass(frozen=True)
class Violation:
    """One failed property.

    Args:
        subject: The cell, element or instance the property failed on
        rule: Short machine-friendly name of the property
        detail: Human readable explanation
    """
    subject: str
    rule: str
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"subject": self.subject, "rule": self.rule, "detail": self.detail}


@dataclass
class Report:
    """Outcome of a verification."""
    title: str
    violations: List[Violation] = field(default_factory=list)
    facts: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, subject: Any, rule: str, detail: str = "") -> None:
        self.violations.append(Violation(str(subject), rule, detail))

    def merge(self, other: "Report", prefix: str = "") -> "Report":
        """Append the violations of another report, optionally tagging the rules."""
        for violation in other.violations:
            rule = f"{prefix}{violation.rule}" if prefix else violation.rule
            self.violations.append(Violation(violation.subject, rule, violation.detail))
        return self

    def rules(self) -> List[str]:
        return [violation.rule for violation in self.violations]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
            "facts": self.facts,
        }

    def __str__(self) -> str:
        status = "✅ OK" if self.ok else f"❌ {len(self.violations)} violation(s)"
        lines = [f"{self.title}: {status}"]
        for key in sorted(self.facts):
            lines.append(f"  {key}: {self.facts[key]}")
        for violation in self.violations:
            lines.append(f"  - [{violation.rule}] {violation.subject}: {violation.detail}")
        return "\n".join(lines)
