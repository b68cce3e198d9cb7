"""
This module exports some simple names used throughout the henondevaney package:
  - The various error classes, with documentation for each.
  - The exit code table the command-line client maps them onto.
  - precondition, a utility method that check's a function's input preconditions.
"""

# Increment this on master when ready to cut a release.
# http://semver.org/
HENONDEVANEY_VERSION = '0.1.0'


class PreconditionViolation(ValueError):
    """
    Raised when a value generated by one module fails to satisfy a precondition
    required by another module.

    This class of error is serious and should indicate a problem in code, but it
    it is not an AssertionError because it is not local to a single module.
    """


class UsageError(ValueError):
    """
    Raised when user input causes an exception. This error is the only one for
    which the command-line client suppresses the traceback.
    """


class DiscontinuityHit(UsageError):
    """
    Raised when a map is evaluated on its discontinuity: {y=0} for f, {x+y=0}
    for the inverse, 0 for the Boole map. Carries the offending point and, when
    known, the level (number of steps taken) at which it was met.
    """

    def __init__(self, message, point=None, level=None):
        super(DiscontinuityHit, self).__init__(message)
        self.point = point
        self.level = level


class OnDiscontinuity(DiscontinuityHit):
    """
    Raised when a coordinate word is requested for a point that already lies on
    the discontinuity the word is built from.
    """


class ResourceLimitError(UsageError):
    """
    Raised when exact arithmetic outgrows the configured bit budget or a search
    exceeds its refinement budget.
    """


class NotFoundError(UsageError):
    """
    Raised when a requested object (a point, a bracket, a branch) has not been
    found. Similar to HTTP status 404. Carries diagnostics describing what was
    searched.
    """

    def __init__(self, message, diagnostics=None):
        super(NotFoundError, self).__init__(message)
        self.diagnostics = diagnostics if diagnostics is not None else {}


class BracketNotFound(NotFoundError):
    """
    Raised when a bisection sweep finds no sign change. On a monotone branch this
    indicates a bug rather than bad input.
    """


class BranchNotFound(NotFoundError):
    """
    Raised when no curve branch realizes a finite coordinate word.
    """


class EmptyCylinder(NotFoundError):
    """
    Raised when a Boole word prefix is not realized by any point.
    """


class NewtonDiverged(NotFoundError):
    """
    Raised when the periodic point search fails to converge. Carries the residual
    trace.
    """

    def __init__(self, message, trace=None, diagnostics=None):
        super(NewtonDiverged, self).__init__(message, diagnostics)
        self.trace = trace if trace is not None else []


class WindowExceedsWords(UsageError):
    """
    Raised when a symbol window asks for more symbols than the coordinate words
    determine. `fillable` holds the number of (past, future) symbols available.
    """

    def __init__(self, message, fillable=None):
        super(WindowExceedsWords, self).__init__(message)
        self.fillable = fillable


class EmptyFuture(UsageError):
    """
    Raised when shifting a symbol sequence whose future side is empty.
    """


class ExhaustedWord(UsageError):
    """
    Raised when the coordinate dynamics needs an entry past the truncated end of
    a word.
    """


class VerificationFailed(UsageError):
    """
    Raised by the verify command when some check fails. Carries the full report.
    """

    def __init__(self, message, report=None):
        super(VerificationFailed, self).__init__(message)
        self.report = report


# Listed in order of most specific to least specific.
exit_codes_and_exceptions = [
    (1, VerificationFailed),
    (3, ResourceLimitError),
    (4, NotFoundError),
    (2, UsageError),
]


def exception_to_exit_code(e):
    """
    Returns the process exit code for the given exception.
    """
    for known_code, exception_type in exit_codes_and_exceptions:
        if isinstance(e, exception_type):
            return known_code
    return 1


def precondition(condition, message):
    if not condition:
        raise PreconditionViolation(message)
