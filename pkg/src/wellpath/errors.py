"""Exception hierarchy. Everything raised on purpose derives from WellpathError."""


class WellpathError(Exception):
    pass


class ParseError(WellpathError):
    """Syntax or validation failure in an expression string.

    ``position`` is a 0-based character offset into the source.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class EvalDomainError(WellpathError):
    """Evaluation left the real domain (log of a negative, 0^-1, overflow...)."""


class NegativePotentialError(WellpathError):
    """The potential evaluated below zero; the weight sqrt(2W) is undefined there."""


class WellValidationError(WellpathError):
    pass


class ProblemFormatError(WellpathError):
    """Malformed problem file (missing fields, wrong shapes, bad JSON)."""


class ConfinementError(WellpathError):
    pass


class GridError(WellpathError):
    pass


class DegenerateCurveError(WellpathError):
    pass


class RefinementError(WellpathError):
    pass


class ReparamError(WellpathError):
    pass


class StiViolationError(WellpathError):
    """The weight vanishes along the path away from its endpoints."""


class StageError(WellpathError):
    """Wraps any error raised inside the pipeline with the stage it came from."""

    def __init__(self, stage, original):
        super().__init__(f"[{stage}] {original}")
        self.stage = stage
        self.original = original
