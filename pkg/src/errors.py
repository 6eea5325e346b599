"""Exception types raised by domcode.

Verification failures and resource limits are reported as values
(``Verdict``, ``SolveResult.complete``); exceptions are for bad input and
for requests the library cannot honour.
"""
from __future__ import annotations


class DomcodeError(Exception):
    """Base class for every domcode error."""


class InvalidParameterError(DomcodeError, ValueError):
    """A size, coordinate, axis, file or graph spec is not acceptable."""


class GraphTooLargeError(InvalidParameterError):
    """The graph would exceed the configured bitset cap."""


class DomainError(InvalidParameterError):
    """A closed-form query lies outside the range its formula covers."""


class ExcludedCaseError(DomainError):
    """The parameters hit a case the bound explicitly excludes."""


class UnsupportedConstructionError(DomcodeError):
    """No explicit construction is available for the requested parameters."""


class OracleRefusedError(DomcodeError):
    """The brute-force oracle refuses graphs above its size cap."""


class HintInconsistencyError(DomcodeError):
    """Solver bound hints do not bracket the optimum."""
