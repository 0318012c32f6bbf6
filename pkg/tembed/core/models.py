"""Core models for tembed."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class Color(Enum):
    """Color of a face of the t-embedding (a vertex of the dimer graph)."""
    BLACK = "black"
    WHITE = "white"

    @property
    def other(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK


class Mode(Enum):
    """Whether boundary vertices are exempt from the angle condition."""
    FINITE = "finite"
    WHOLE_PLANE = "whole-plane"


class Flavor(Enum):
    """Which color is flattened into segments in a T-graph."""
    BLACK_FLAT = "black-flat"  # T + α²O
    WHITE_FLAT = "white-flat"  # T + conj(α²O)


class Severity(Enum):
    """Severity of a diagnostics entry."""
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass
class Violation:
    """A single diagnostics finding."""
    kind: str  # "bipartite", "degree", "angle", "convexity", ...
    location: str
    message: str
    severity: Severity = Severity.ERROR
    value: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "location": self.location,
            "message": self.message,
            "severity": self.severity.value,
            "value": self.value,
        }


@dataclass
class DiagnosticsReport:
    """Result of a validation or residual check.

    Warnings do not make a report fail; only ERROR entries do.
    """
    subject: str
    violations: List[Violation] = field(default_factory=list)
    metrics: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)  # per-location values, not serialized

    def add(self, kind: str, location: str, message: str,
            severity: Severity = Severity.ERROR, value: Optional[float] = None):
        self.violations.append(Violation(kind, location, message, severity, value))

    @property
    def errors(self) -> List[Violation]:
        return [v for v in self.violations if v.severity is Severity.ERROR]

    @property
    def warnings(self) -> List[Violation]:
        return [v for v in self.violations if v.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def of_kind(self, kind: str) -> List[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "metrics": dict(self.metrics),
            "violations": [v.to_dict() for v in self.violations],
        }
