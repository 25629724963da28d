"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by flowarch."""


class HorizonError(EngineError):
    """An index or horizon is out of range for the stream it applies to."""


class DomainError(EngineError):
    """A channel set does not match the domain it is used against."""


class MergeConflictError(EngineError):
    """Two stream tuples disagree on a shared channel."""


class AlphabetError(EngineError):
    """A message is not a symbol of the declared alphabet."""


class InterfaceError(EngineError):
    """Two behaviors or systems have incompatible channel signatures."""


class PreconditionError(EngineError):
    """An operation was called on arguments that violate its precondition."""


class TotalityError(EngineError):
    """A transducer has no emit choice or no matching absorb clause."""


class ConsistencyError(EngineError):
    """A system violates one of the structural consistency conditions."""


class UnknownReferenceError(EngineError):
    """A name does not resolve: component, channel, invariant or combiner."""


class RegistryError(EngineError):
    """A registry name was registered twice."""


class ParseError(EngineError):
    """A document was rejected; carries a line number and message."""

    def __init__(self, line: int, message: str, column: int = 1):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.column = column
        self.message = message


class PremiseViolation(EngineError):
    """A calculus rule premise failed; carries the enumerated error code."""

    def __init__(self, code: str, message: str, report=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.report = report
