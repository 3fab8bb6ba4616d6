"""Exception hierarchy shared across the toolkit.

Every error that can be traced to a source location carries ``line`` and
``col`` attributes so command line tools can print usable diagnostics.
"""

from __future__ import annotations


class CudaClError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, *, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"line {line}" + (f", col {col}" if col is not None else "") + f": {message}"
        super().__init__(message)
        self.line = line
        self.col = col


class LexError(CudaClError):
    """Raised when source text cannot be tokenized."""


class UnterminatedString(LexError):
    pass


class UnterminatedComment(LexError):
    pass


class UnbalancedDelimiters(LexError):
    """Bracket/brace depth underflow, or nonzero depth at end of file."""


class LexiconError(CudaClError):
    """Malformed lexicon file or inconsistent keyword sets."""


class UsagePatternError(CudaClError):
    """Base class for errors in usage pattern files."""


class LineCountMismatch(UsagePatternError):
    """The two usage files have different numbers of non-empty lines."""


class ExprIndexGap(UsagePatternError):
    """_expr indices in a source pattern are not dense from zero."""


class TargetExprUnbound(UsagePatternError):
    """A target pattern uses an _expr index absent from its source pattern."""


class DuplicatePattern(UsagePatternError):
    """Two usage pairs share an identical source pattern."""


class TranslateError(CudaClError):
    """Base class for translation-stage failures."""


class UnboundCapture(TranslateError):
    """A target pattern referenced a capture the match did not produce."""


class BackendProtocolError(TranslateError):
    """An external backend broke the line-per-sentence file protocol."""


class DanglingSymbol(CudaClError):
    """A translated sentence references a symbol index missing from its map."""
