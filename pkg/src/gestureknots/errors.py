"""Exception hierarchy.

Every error carries a short ``code`` used by the command line front end
(``error[CODE]: message``) and an ``exit_status`` mapping it onto the
documented process exit codes.
"""


class GestureKnotsError(Exception):
    code = "error"
    exit_status = 2


# --- input / validation errors (exit 2) -------------------------------------

class ParseError(GestureKnotsError, ValueError):
    """Text could not be parsed. ``line`` and ``column`` are 1-based when known."""

    code = "parse"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class SchemaError(GestureKnotsError, ValueError):
    code = "schema"

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


class DanglingArrow(GestureKnotsError, ValueError):
    code = "dangling-arrow"


class DuplicateId(GestureKnotsError, ValueError):
    code = "duplicate-id"


class UnmappedElement(GestureKnotsError, ValueError):
    code = "unmapped"


class EndpointMismatch(GestureKnotsError, ValueError):
    code = "endpoint-mismatch"


class NotATour(GestureKnotsError, ValueError):
    code = "not-a-tour"


class OpenTour(GestureKnotsError, ValueError):
    code = "open-tour"


class StrandCountMismatch(GestureKnotsError, ValueError):
    code = "strand-count"


class GeneratorOutOfRange(GestureKnotsError, ValueError):
    code = "generator-range"


class TooManyCrossings(GestureKnotsError, ValueError):
    code = "too-many-crossings"


class MalformedDiagram(GestureKnotsError, ValueError):
    code = "malformed-diagram"


class ComponentNotFound(GestureKnotsError, KeyError):
    code = "component"

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class SameComponent(GestureKnotsError, ValueError):
    code = "same-component"


class OpenCurve(GestureKnotsError, ValueError):
    code = "open-curve"


class SkeletonMismatch(GestureKnotsError, ValueError):
    code = "skeleton-mismatch"


class SampleCountMismatch(GestureKnotsError, ValueError):
    code = "sample-count"


class WrongSkeleton(GestureKnotsError, ValueError):
    code = "wrong-skeleton"


class EmptyInput(GestureKnotsError, ValueError):
    code = "empty-input"


class MissingHeader(GestureKnotsError, ValueError):
    code = "missing-header"


class InvalidBase(GestureKnotsError, ValueError):
    """A character outside ACGT. ``position`` is 1-based within the record."""

    code = "invalid-base"

    def __init__(self, position, char, record=None):
        self.position = position
        self.char = char
        self.record = record
        where = f" in record {record!r}" if record else ""
        super().__init__(f"invalid base {char!r} at position {position}{where}")


class EmptyPattern(GestureKnotsError, ValueError):
    code = "empty-pattern"


class OutOfRange(GestureKnotsError, ValueError):
    code = "out-of-range"


class TooManyVoices(GestureKnotsError, ValueError):
    code = "too-many-voices"


class InvalidEvent(GestureKnotsError, ValueError):
    code = "invalid-event"


class MalformedChunk(GestureKnotsError, ValueError):
    code = "malformed-chunk"


class TruncatedFile(GestureKnotsError, ValueError):
    code = "truncated"


# --- geometry (exit 4) -------------------------------------------------------

class DegenerateProjection(GestureKnotsError, ArithmeticError):
    code = "degenerate"
    exit_status = 4
