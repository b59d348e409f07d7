"""Exception taxonomy shared by the kernel, the loader and the CLI.

Validators never raise for mathematical failures; they return a Report.
Exceptions are reserved for malformed input (exit code 2) and for failed
preconditions of constructions (exit code 1, the Report travels along).
"""
from typing import Optional


class HomLieError(Exception):
    """Base class for every error raised by this package."""


class InputError(HomLieError, ValueError):
    """Malformed input: wrong shapes, bad indices, unusable files."""


class ParseError(InputError):
    """Syntax error in an expression or a problem file.

    Args:
        message: human readable description
        offset: byte offset into the parsed text
        line: 1-based line number inside a problem file, if known
    """

    def __init__(self, message: str, offset: int = 0, line: Optional[int] = None):
        location = f"byte {offset}" if line is None else f"line {line}, byte {offset}"
        super().__init__(f"{message} (at {location})")
        self.offset = offset
        self.line = line


class EvaluationError(InputError):
    """An expression could not be evaluated (unbound name, division by zero)."""


class LoadError(InputError):
    """A problem file parsed but could not be instantiated."""


class UnboundParameterError(LoadError):
    pass


class NonzeroConditionError(LoadError):
    pass


class DimensionMismatchError(LoadError):
    pass


class PreconditionError(HomLieError):
    """A construction was asked for on data that violates its precondition.

    The failing Report (identity label plus witness) is attached so callers
    can show exactly where the data breaks.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
