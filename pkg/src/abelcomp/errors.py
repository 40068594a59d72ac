"""Exception hierarchy.

Exit-code mapping used by the CLI: InputError and subclasses -> 2,
InconclusiveError -> 3, OracleMismatchError -> 4, ResourceLimitError -> 5.
"""


class AbelcompError(Exception):
    """Base class for all library errors."""


class InputError(AbelcompError):
    """Invalid input: parse failure, domain mismatch, or wrong morphism class."""


class ParseError(InputError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DomainMismatchError(InputError):
    """A symbol or word does not live over the expected alphabet."""


class ShapeError(InputError):
    """Operation requires an endomorphism (equal domain and codomain)."""


class ClassificationError(InputError):
    """Input morphism is not in the class an operation requires."""


class NotProlongableError(ClassificationError):
    """No infinite fixed point exists for the requested seed letter."""


class InconclusiveError(AbelcompError):
    """A certification search exhausted its budget without a verdict."""


class InsufficientDataError(InconclusiveError):
    """Not enough of the word materialized to answer the query."""


class OracleMismatchError(AbelcompError):
    """An automaton artifact disagrees with the brute-force reference."""

    def __init__(self, stage, diffs):
        self.stage = stage
        self.diffs = list(diffs)
        shown = ", ".join(str(d) for d in self.diffs[:5])
        more = "" if len(self.diffs) <= 5 else f" (+{len(self.diffs) - 5} more)"
        super().__init__(f"{stage}: automaton disagrees with oracle at {shown}{more}")


class ResourceLimitError(AbelcompError):
    """A construction exceeded its configured resource budget."""

    def __init__(self, operation, detail):
        self.operation = operation
        super().__init__(f"resource limit in {operation}: {detail}")


class PipelineError(AbelcompError):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage}: {cause}")
