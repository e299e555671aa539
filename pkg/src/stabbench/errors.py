"""Exception types shared across the package."""

from __future__ import annotations


class StabBenchError(Exception):
    """Base class for every error raised by stabbench."""

    code = "error"


class ParseError(StabBenchError, ValueError):
    code = "parse_error"

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class BoundsError(ParseError, IndexError):
    code = "bounds_error"


class UnsupportedGateError(StabBenchError, ValueError):
    code = "unsupported_gate"


class NondeterministicMeasurement(StabBenchError):
    code = "nondeterministic_measurement"


class IllFormedFlagGadget(NondeterministicMeasurement):
    code = "ill_formed_flag_gadget"


class StructuralError(StabBenchError):
    """A circuit is well-formed text but violates a task rule (e.g. measures data)."""

    code = "structural_error"


class MalformedProblem(StabBenchError):
    """The problem itself is broken (non-commuting generators, empty generator set...)."""

    code = "malformed_problem"


class InvalidCandidate(StabBenchError):
    code = "invalid_candidate"


class Cancelled(StabBenchError):
    code = "cancelled"


class UnsupportedParameters(StabBenchError, ValueError):
    code = "unsupported_parameters"


class ManifestError(StabBenchError, ValueError):
    """Duplicate ids or product pairs that do not resolve."""

    code = "manifest_error"
