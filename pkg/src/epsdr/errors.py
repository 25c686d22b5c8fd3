"""Exception hierarchy shared by every module."""


class EpsdrError(Exception):
    """Base class; `code` is the machine-readable tag used in CLI reports."""

    code = "error"

    def __init__(self, message="", **info):
        super().__init__(message)
        self.info = info


def _make(name, code):
    cls = type(name, (EpsdrError,), {"code": code})
    cls.__module__ = __name__
    return cls


DivisionByNonUnit = _make("DivisionByNonUnit", "division_by_non_unit")
RingMismatch = _make("RingMismatch", "ring_mismatch")
PrecisionExhausted = _make("PrecisionExhausted", "precision_exhausted")
NotAUnit = _make("NotAUnit", "not_a_unit")
DomainViolation = _make("DomainViolation", "domain_violation")
WindowTooSmall = _make("WindowTooSmall", "window_too_small")
NonRationalDivisor = _make("NonRationalDivisor", "non_rational_divisor")
NotInvertible = _make("NotInvertible", "not_invertible")
CyclicSearchFailed = _make("CyclicSearchFailed", "cyclic_search_failed")
NotAdmissible = _make("NotAdmissible", "not_admissible")
NotRegularSingularInBasis = _make("NotRegularSingularInBasis", "not_regular_singular")
StabilizationFailed = _make("StabilizationFailed", "stabilization_failed")
UnsupportedLocalType = _make("UnsupportedLocalType", "unsupported_local_type")


class ParseError(EpsdrError):
    code = "parse_error"

    def __init__(self, message, column, expected=None):
        text = f"{message} at column {column}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text, column=column, expected=expected)
        self.column = column
        self.expected = expected
