"""
Check reports. Mathematical failures are recorded here, never raised.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from linfty.scalars import format_scalar

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """Outcome of one named check; ``witness`` is the first failing input."""

    name: str
    passed: bool
    witness: Any = None
    detail: Optional[str] = None

    def to_dict(self) -> Dict:
        result = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            result["witness"] = self.witness
        if self.detail:
            result["detail"] = self.detail
        return result


@dataclass
class Report:
    """An ordered list of checks plus free-form payload (matrices, classes, ...)."""

    title: str
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness: Any = None, detail: Optional[str] = None) -> CheckResult:
        result = CheckResult(name, passed, witness, detail)
        self.checks.append(result)
        if not passed:
            logger.debug("%s: check %s failed (witness %s)", self.title, name, witness)
        return result

    def extend(self, other: "Report", prefix: Optional[str] = None) -> "Report":
        """Append another report's checks, optionally prefixing their names."""
        for check in other.checks:
            name = f"{prefix}.{check.name}" if prefix else check.name
            self.checks.append(CheckResult(name, check.passed, check.witness, check.detail))
        for key, value in other.data.items():
            self.data[f"{prefix}.{key}" if prefix else key] = value
        return self

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    is_valid = passed

    @property
    def issues(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)

    def first_failure(self) -> Optional[CheckResult]:
        return next((check for check in self.checks if not check.passed), None)

    def to_dict(self) -> Dict:
        return {
            "title": self.title,
            "is_valid": self.passed,
            "issues": self.issues,
            "checks": [check.to_dict() for check in self.checks],
            "data": self.data,
        }


def describe_vector(vector) -> Dict[str, str]:
    """Vector as {basis name: scalar string} in basis order."""
    return {name: format_scalar(coeff) for name, coeff in vector.items()}


def describe_element(element) -> List[Dict]:
    """CElement as a list of {word, coeff} records in canonical word order."""
    return [{"word": list(word), "coeff": format_scalar(coeff)} for word, coeff in element.items()]
