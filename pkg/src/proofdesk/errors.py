"""Exception types raised across the package."""

from __future__ import annotations


class ProofDeskError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ProofDeskError):
    """Syntax or validation error in source text, with position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ArityError(ParseError):
    """A symbol is used with an arity or role inconsistent with earlier uses."""

    def __init__(self, message: str, symbol: str, line: int = 0, col: int = 0):
        super().__init__(message, line, col)
        self.symbol = symbol


class DuplicateLabelError(ParseError):
    pass


class UnknownReferenceError(ProofDeskError):
    """A `by` reference does not resolve to a label or library item."""

    def __init__(self, message: str, reference: str):
        super().__init__(message)
        self.reference = reference


class OpenFormulaError(ProofDeskError):
    """A formula required to be closed has free variables."""

    def __init__(self, free: set[str]):
        super().__init__(f"formula has free variables: {', '.join(sorted(free))}")
        self.free = frozenset(free)


class NameSchemeError(ProofDeskError):
    """A name does not follow the library naming scheme."""


class SystemDbError(ProofDeskError):
    """Malformed prover-system database."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenerationError(ProofDeskError):
    """Problem generation failed for one obligation."""
