"""
Error hierarchy for cechtool.

Every error raised on bad input derives from ToolkitError and carries the
process exit code the command-line front end reports for it.
"""

from typing import Any, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(ToolkitError):
    """Input violates a documented invariant or precondition."""

    exit_code = 2

    def __init__(self, message: str, invariant: str = "", witness: Any = None):
        super().__init__(message)
        self.invariant = invariant
        self.witness = witness

    def __str__(self) -> str:
        text = self.message
        if self.invariant:
            text = f"[{self.invariant}] {text}"
        if self.witness is not None:
            text = f"{text} (witness: {self.witness})"
        return text


class AmbientMismatchError(ValidationError):
    """Operands live in different ambient groups."""


class InvalidMapError(ValidationError):
    """A homomorphism or simplicial map is not well defined."""


class InvalidRefinementError(ValidationError):
    """A refinement assignment does not send members into supersets."""


class DegreeMismatchError(ValidationError):
    """Cochains or classes of different levels or degrees were combined."""


class WeightSupportError(ValidationError):
    """Partition-of-unity weights are not supported on the right members."""


class NotSphereLikeError(ValidationError):
    """A degree was requested for a source whose top cohomology is not Z."""


class AgreementError(ValidationError):
    """Two maps fail to agree on the skeleton they must agree on."""


class DimensionHypothesisError(ValidationError):
    """Classification requested where dim X exceeds the sphere dimension."""


class NonChainMapError(ValidationError):
    """A bonding map does not commute with the coboundaries."""


class MissingExhaustionError(ValidationError):
    """A relative or phantom computation needs an exhaustion that is absent."""


class NonInjectivePresentationError(ValidationError):
    """A Moore filtration was given a non-injective relation matrix."""


class LevelIndexError(ValidationError):
    """A level or exhaustion index is out of range."""


class ApproximationError(ValidationError):
    """No simplicial approximation exists for the given data."""


class CorpusError(ValidationError):
    """The bundled corpus is missing, empty or malformed."""


class FormatError(ValidationError):
    """A versioned input file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, source: str = ""):
        where = f"{source or 'input'}:{line}" if line is not None else (source or "input")
        super().__init__(f"{where}: {message}", invariant="format")
        self.line = line
        self.source = source


class BudgetExceededError(ToolkitError):
    """A computation would exceed its configured budget."""

    exit_code = 3

    def __init__(self, message: str, required: int = 0, budget: int = 0):
        super().__init__(message)
        self.required = required
        self.budget = budget

    def __str__(self) -> str:
        return f"{self.message} (required {self.required}, budget {self.budget})"


class SubdivisionBudgetError(BudgetExceededError):
    """A map is not simplicial within the allowed number of subdivisions."""


class ConsistencyError(ToolkitError):
    """An internal exact check failed; this signals a bug, not bad input."""

    exit_code = 1
