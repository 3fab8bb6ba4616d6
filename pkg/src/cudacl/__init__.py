"""Sentence-level CUDA to OpenCL source translation toolkit."""

from .errors import (
    BackendProtocolError,
    CudaClError,
    DanglingSymbol,
    DuplicatePattern,
    ExprIndexGap,
    LexError,
    LexiconError,
    LineCountMismatch,
    TargetExprUnbound,
    TranslateError,
    UnbalancedDelimiters,
    UnboundCapture,
    UnterminatedComment,
    UnterminatedString,
    UsagePatternError,
)
from .lexer import Lexicon, PassthroughLine, Sentence, Token, TokenKind, default_lexicon, load_lexicon

__version__ = "0.1.0"

__all__ = [
    "BackendProtocolError",
    "CudaClError",
    "DanglingSymbol",
    "DuplicatePattern",
    "ExprIndexGap",
    "LexError",
    "LexiconError",
    "LineCountMismatch",
    "Lexicon",
    "PassthroughLine",
    "Sentence",
    "TargetExprUnbound",
    "Token",
    "TokenKind",
    "TranslateError",
    "UnbalancedDelimiters",
    "UnboundCapture",
    "UnterminatedComment",
    "UnterminatedString",
    "UsagePatternError",
    "default_lexicon",
    "load_lexicon",
]
