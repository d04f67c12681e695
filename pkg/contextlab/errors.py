"""
ContextLab Errors

Exception hierarchy shared by the library, the CLI and the HTTP service.
Each class carries the CLI exit code it maps to.
"""
from typing import Any, Optional


class ContextlabError(Exception):
    """Base class for every error raised on purpose by contextlab."""

    exit_code = 65

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def at_stage(self, stage: str) -> "ContextlabError":
        """Tag the error with the pipeline stage it was raised in."""
        self.stage = stage
        return self

    def detail(self) -> dict:
        """JSON-ready description of the error."""
        data: dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        if self.stage:
            data["stage"] = self.stage
        return data

    def __str__(self) -> str:
        if self.stage:
            return f"{self.stage}: {self.message}"
        return self.message


# =============================================================================
# Input errors (exit 64)
# =============================================================================

class FormatError(ContextlabError):
    """Malformed input file, flag or rational literal."""

    exit_code = 64


class ScenarioError(FormatError):
    """Scenario invariants violated."""


# =============================================================================
# Domain errors (exit 65)
# =============================================================================

class UnknownVariableError(ContextlabError, KeyError):
    """Marginalization onto a name the distribution does not carry."""

    def __init__(self, name: str):
        super().__init__(f"unknown variable: {name}")
        self.name = name

    def __str__(self) -> str:
        return ContextlabError.__str__(self)


class DimensionError(ContextlabError, ValueError):
    """Constraint vector length does not match the variable count."""


class DomainError(ContextlabError):
    """Input lies outside the domain of the requested operation."""


class DisturbingBehaviorError(DomainError):
    """KS contextuality requested for a disturbing behavior."""

    def __init__(self, witness, stage: Optional[str] = None):
        first, second = witness.contexts
        super().__init__(
            f"behavior is disturbing: contexts {first} and {second} disagree on "
            f"{', '.join(witness.shared)}",
            stage=stage,
        )
        self.witness = witness

    def detail(self) -> dict:
        data = super().detail()
        data["witness"] = self.witness.to_json()
        return data


class SizeLimitError(DomainError):
    """Problem exceeds a configured size limit."""


class CriterionError(DomainError):
    """Coupling criterion failed to produce a valid coupling."""


class TransformError(DomainError):
    """Transform spec is invalid for the behavior it is applied to."""


class ConsistificationError(TransformError):
    """Missing or inconsistent provenance on a consistified behavior."""


# =============================================================================
# Falsifiers (exit 1)
# =============================================================================

class FalsifierError(ContextlabError):
    """A machine-checked claim failed. Must never happen."""

    exit_code = 1


class SolverError(FalsifierError):
    """Solver output failed its own soundness re-check."""
