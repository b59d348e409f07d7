from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, computed_field


class Violation(BaseModel):
    """One failed instance of an identity, with its basis witness."""

    identity: str = Field(..., description="Identity label, e.g. 'alpha-morphism' or 'GenRep-eq3'")
    witness: List[str] = Field(default_factory=list, description="Basis labels of the failing tuple")
    left: List[str] = Field(default_factory=list, description="Left-hand side coefficients")
    right: List[str] = Field(default_factory=list, description="Right-hand side coefficients")

    def describe(self) -> str:
        return f"{self.identity} at ({', '.join(self.witness)}): left ({', '.join(self.left)}) != right ({', '.join(self.right)})"


class Report(BaseModel):
    """Pass/fail outcome of a validator; status is pass iff there are no violations."""

    subject: str = ""
    checked: int = Field(default=0, ge=0, description="Number of identity instances evaluated")
    violations: List[Violation] = Field(default_factory=list)

    @computed_field
    @property
    def status(self) -> str:
        return "pass" if not self.violations else "fail"

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, identity: str, witness: Sequence[str], left: Sequence[Any], right: Sequence[Any]) -> None:
        self.violations.append(
            Violation(
                identity=identity,
                witness=list(witness),
                left=[str(x) for x in left],
                right=[str(x) for x in right],
            )
        )

    def merge(self, other: "Report") -> "Report":
        self.checked += other.checked
        self.violations.extend(other.violations)
        return self

    def identities(self) -> List[str]:
        """Distinct violated identity labels, in first-seen order."""
        seen: List[str] = []
        for violation in self.violations:
            if violation.identity not in seen:
                seen.append(violation.identity)
        return seen

    def first(self, identity: Optional[str] = None) -> Optional[Violation]:
        for violation in self.violations:
            if identity is None or violation.identity == identity:
                return violation
        return None


class Finding(BaseModel):
    """One audited claim about a worked example."""

    claim: str
    source: str = ""
    description: str = ""
    expected: str = Field(..., pattern="^(CONFIRMED|DISCREPANT)$")
    status: str = Field(..., pattern="^(CONFIRMED|DISCREPANT)$")
    identity: Optional[str] = None
    witness: List[str] = Field(default_factory=list)
    bindings: Dict[str, str] = Field(default_factory=dict)
    detail: str = ""
    samples: int = Field(default=0, ge=0, description="Instantiations evaluated")

    @computed_field
    @property
    def matches_expectation(self) -> bool:
        return self.status == self.expected


class CommandDocument(BaseModel):
    """Machine-readable result of one CLI command (--json)."""

    command: str
    inputs: List[str] = Field(default_factory=list)
    bindings: Dict[str, str] = Field(default_factory=dict)
    findings: List[Dict[str, Any]] = Field(default_factory=list)
    dims: Dict[str, int] = Field(default_factory=dict)
    status: str = "pass"
