"""Exception types shared across the package."""


class OpLawError(Exception):
    """Base class for all library errors."""


class SizeMismatch(OpLawError):
    """Domain/codomain sizes do not line up for an operation."""


class OutOfRange(OpLawError):
    """An index fell outside 1..n."""


class ArityMismatch(OpLawError):
    """A term or substitution does not match a declared arity."""


class UnknownSymbol(OpLawError):
    """An operation symbol is not declared in the relevant signature."""


class TruncationExceeded(OpLawError):
    """A construction needed an arity beyond the configured truncation bound."""


class NotOrthogonal(OpLawError):
    """A lifting square has no diagonal filler, or more than one."""


class IncompleteProver(OpLawError):
    """A prover returned Unknown where a definitive verdict was required."""


class LawViolation(OpLawError):
    """A law that was supposed to hold failed; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(OpLawError):
    """Input text does not conform to the DSL grammar."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationError(OpLawError):
    """Parsed input is grammatical but violates a declared constraint."""
