"""Tokenizer and statement assembler for CUDA/OpenCL host and kernel code.

The lexer is deliberately shallow: it has no grammar beyond what is needed to
cut a translation unit into statement-level "sentences".  Comments and
preprocessor directives never reach the token stream; they are captured as
:class:`PassthroughLine` records and reinserted verbatim by the formatter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources

from .errors import (
    LexError,
    LexiconError,
    UnbalancedDelimiters,
    UnterminatedComment,
    UnterminatedString,
)


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    NUMERIC_CONSTANT = "numeric"
    STRING_LITERAL = "string"
    OPERATOR = "operator"
    TYPE_KEYWORD = "type"
    API_KEYWORD = "api"
    CONTROL_KEYWORD = "control"
    PUNCTUATION = "punctuation"
    KERNEL_LAUNCH_OPEN = "launch_open"
    KERNEL_LAUNCH_CLOSE = "launch_close"


#: Keywords that shape statements.  They are never renamed and never treated
#: as API calls, no matter what a lexicon says.
CONTROL_KEYWORDS = frozenset(
    {
        "sizeof",
        "return",
        "for",
        "if",
        "while",
        "else",
        "do",
        "switch",
        "case",
        "default",
        "break",
        "continue",
        "goto",
    }
)

#: Control keywords that may own a trailing "{" in their sentence.
_BRACE_HEADERS = frozenset({"for", "if", "while", "switch", "else", "do"})

# Multi-character operators, longest first so maximal munch works by scanning
# the list in order.  "**" is kept as a single token: a cast like (void **)
# is one type and one operator at the sentence level.
_OPERATORS = [
    "<<=",
    ">>=",
    "...",
    "->",
    "++",
    "--",
    "<<",
    ">>",
    "<=",
    ">=",
    "==",
    "!=",
    "&&",
    "||",
    "+=",
    "-=",
    "*=",
    "/=",
    "%=",
    "&=",
    "|=",
    "^=",
    "::",
    "**",
    "+",
    "-",
    "*",
    "/",
    "%",
    "=",
    "<",
    ">",
    "!",
    "&",
    "|",
    "^",
    "~",
    ".",
    "?",
    "#",
]

_PUNCTUATION = frozenset({"(", ")", "[", "]", "{", "}", ",", ";", ":"})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(
    r"(?:0[xX][0-9a-fA-F]+"
    r"|\d+\.\d*(?:[eE][+-]?\d+)?"
    r"|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"[fFlLuU]*"
)


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    kind: TokenKind
    line: int
    col: int
    offset: int = 0

    @property
    def end_offset(self) -> int:
        return self.offset + len(self.text)


@dataclass(frozen=True, slots=True)
class PassthroughLine:
    """A comment or preprocessor directive kept out of the token stream."""

    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Lexicon:
    """Token classification tables.

    ``api_keywords`` lists explicit API names; ``api_prefixes`` classify by
    prefix (explicit type/api entries win over prefixes).  The two kernel
    tables map CUDA kernel vocabulary to OpenCL replacement text; values may
    expand to several tokens and may be empty (token removal).
    """

    type_keywords: frozenset[str]
    api_keywords: frozenset[str]
    api_prefixes: tuple[str, ...]
    kernel_builtin_table: dict[str, str]
    kernel_qualifier_table: dict[str, str]

    def __post_init__(self):
        overlap = self.type_keywords & self.api_keywords
        if overlap:
            raise LexiconError(f"keywords listed as both type and api: {sorted(overlap)}")

    @property
    def dotted_builtins(self) -> frozenset[str]:
        """Builtin names of the form base.component, lexed as one token."""
        return frozenset(k for k in self.kernel_builtin_table if "." in k)

    def classify(self, text: str) -> TokenKind:
        """Classify an identifier-shaped token.  Pure function of (text, self)."""
        if text in CONTROL_KEYWORDS:
            return TokenKind.CONTROL_KEYWORD
        if text in self.type_keywords:
            return TokenKind.TYPE_KEYWORD
        if text in self.api_keywords:
            return TokenKind.API_KEYWORD
        if text in self.kernel_builtin_table or text in self.kernel_qualifier_table:
            return TokenKind.API_KEYWORD
        if any(text.startswith(p) for p in self.api_prefixes):
            return TokenKind.API_KEYWORD
        return TokenKind.IDENTIFIER


def parse_lexicon(text: str) -> Lexicon:
    """Parse the lexicon file format.

    Sections are introduced by ``[name]`` headers; ``[types]`` and ``[api]``
    hold one keyword per line, ``[api_prefixes]`` one prefix per line, and the
    two kernel tables hold ``key => value`` mappings (value may be empty).
    ``#`` starts a comment unless it appears inside a mapping value.
    """
    sections: dict[str, list[str]] = {
        "types": [],
        "api": [],
        "api_prefixes": [],
        "kernel_builtins": [],
        "kernel_qualifiers": [],
    }
    current: list[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in sections:
                raise LexiconError(f"unknown lexicon section [{name}]", line=lineno)
            current = sections[name]
            continue
        if current is None:
            raise LexiconError("entry before any section header", line=lineno)
        current.append(line)

    def parse_table(entries: list[str], section: str) -> dict[str, str]:
        table: dict[str, str] = {}
        for entry in entries:
            if "=>" not in entry:
                raise LexiconError(f"missing '=>' in [{section}] entry: {entry!r}")
            key, _, value = entry.partition("=>")
            table[key.strip()] = value.strip()
        return table

    return Lexicon(
        type_keywords=frozenset(sections["types"]),
        api_keywords=frozenset(sections["api"]),
        api_prefixes=tuple(sections["api_prefixes"]),
        kernel_builtin_table=parse_table(sections["kernel_builtins"], "kernel_builtins"),
        kernel_qualifier_table=parse_table(sections["kernel_qualifiers"], "kernel_qualifiers"),
    )


def load_lexicon(path) -> Lexicon:
    from pathlib import Path

    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


def default_lexicon() -> Lexicon:
    """The lexicon bundled with the package."""
    text = resources.files("cudacl").joinpath("data/default.lexicon").read_text("utf-8")
    return parse_lexicon(text)


def tokenize(source_text: str, lexicon: Lexicon) -> tuple[list[Token], list[PassthroughLine]]:
    """Tokenize a translation unit.

    Returns the token stream plus the passthrough records (comments and
    preprocessor directives) removed from it.  Raises ``UnterminatedString``
    or ``UnterminatedComment`` with the offending location.
    """
    tokens: list[Token] = []
    passthrough: list[PassthroughLine] = []
    text = source_text
    n = len(text)
    pos = 0
    line = 1
    line_start = 0
    at_line_start = True
    dotted = lexicon.dotted_builtins

    def col(p: int) -> int:
        return p - line_start + 1

    while pos < n:
        ch = text[pos]

        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            at_line_start = True
            continue
        if ch in " \t\r\v\f":
            pos += 1
            continue

        # Preprocessor directive: '#' first on its line, backslash
        # continuations included.
        if ch == "#" and at_line_start:
            start, start_line, start_col = pos, line, col(pos)
            while True:
                eol = text.find("\n", pos)
                if eol == -1:
                    pos = n
                    break
                if text[start:eol].rstrip().endswith("\\"):
                    pos = eol + 1
                    line += 1
                    line_start = pos
                    continue
                pos = eol
                break
            passthrough.append(PassthroughLine(text[start:pos], start_line, start_col))
            continue

        at_line_start = False

        if ch == "/" and pos + 1 < n and text[pos + 1] == "/":
            start, start_line, start_col = pos, line, col(pos)
            eol = text.find("\n", pos)
            pos = n if eol == -1 else eol
            passthrough.append(PassthroughLine(text[start:pos], start_line, start_col))
            continue

        if ch == "/" and pos + 1 < n and text[pos + 1] == "*":
            start, start_line, start_col = pos, line, col(pos)
            end = text.find("*/", pos + 2)
            if end == -1:
                raise UnterminatedComment("unterminated block comment", line=start_line, col=start_col)
            body = text[start : end + 2]
            passthrough.append(PassthroughLine(body, start_line, start_col))
            newlines = body.count("\n")
            if newlines:
                line += newlines
                line_start = start + body.rfind("\n") + 1
            pos = end + 2
            continue

        if ch in "\"'":
            start, start_line, start_col = pos, line, col(pos)
            quote = ch
            pos += 1
            while pos < n:
                c = text[pos]
                if c == "\\" and pos + 1 < n:
                    pos += 2
                    continue
                if c == quote:
                    pos += 1
                    break
                if c == "\n":
                    raise UnterminatedString("string literal hits end of line", line=start_line, col=start_col)
                pos += 1
            else:
                raise UnterminatedString("string literal hits end of file", line=start_line, col=start_col)
            tokens.append(Token(text[start:pos], TokenKind.STRING_LITERAL, start_line, start_col, start))
            continue

        if text.startswith("<<<", pos):
            tokens.append(Token("<<<", TokenKind.KERNEL_LAUNCH_OPEN, line, col(pos), pos))
            pos += 3
            continue
        if text.startswith(">>>", pos):
            tokens.append(Token(">>>", TokenKind.KERNEL_LAUNCH_CLOSE, line, col(pos), pos))
            pos += 3
            continue

        m = _NUMBER_RE.match(text, pos)
        if m and (ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit())):
            tokens.append(Token(m.group(), TokenKind.NUMERIC_CONSTANT, line, col(pos), pos))
            pos = m.end()
            continue

        m = _IDENT_RE.match(text, pos)
        if m:
            word = m.group()
            end = m.end()
            # Dotted built-ins such as threadIdx.x are one preserved token.
            if end < n and text[end] == ".":
                m2 = _IDENT_RE.match(text, end + 1)
                if m2 and f"{word}.{m2.group()}" in dotted:
                    word = f"{word}.{m2.group()}"
                    end = m2.end()
            tokens.append(Token(word, lexicon.classify(word), line, col(pos), pos))
            pos = end
            continue

        if ch in _PUNCTUATION:
            tokens.append(Token(ch, TokenKind.PUNCTUATION, line, col(pos), pos))
            pos += 1
            continue

        for op in _OPERATORS:
            if text.startswith(op, pos):
                tokens.append(Token(op, TokenKind.OPERATOR, line, col(pos), pos))
                pos += len(op)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", line=line, col=col(pos))

    return tokens, passthrough


@dataclass(frozen=True)
class Sentence:
    """A statement-level token run.

    ``translatable`` marks sentences the translator should look at: anything
    carrying an API keyword or a kernel launch, plus bare pointer declarations
    (device-buffer declarations have to change type on the target side, so
    they are translation candidates even though they name no API).
    """

    tokens: tuple[Token, ...]
    first_line: int
    last_line: int
    translatable: bool
    is_kernel_context: bool = False

    @property
    def first_col(self) -> int:
        return self.tokens[0].col

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    @property
    def start_offset(self) -> int:
        return self.tokens[0].offset

    @property
    def end_offset(self) -> int:
        return self.tokens[-1].end_offset


def _is_pointer_declaration(tokens: tuple[Token, ...]) -> bool:
    """True for declarations like ``float *A;`` or ``unsigned int **p, *q;``."""
    i = 0
    n = len(tokens)
    while i < n and tokens[i].kind is TokenKind.TYPE_KEYWORD:
        i += 1
    if i == 0:
        return False
    while True:
        if i < n and tokens[i].kind is TokenKind.OPERATOR and tokens[i].text in ("*", "**"):
            i += 1
        else:
            return False
        if i < n and tokens[i].kind is TokenKind.IDENTIFIER:
            i += 1
        else:
            return False
        if i < n and tokens[i].text == ",":
            i += 1
            continue
        break
    return i == n - 1 and tokens[-1].text == ";"


def _is_translatable(tokens: tuple[Token, ...]) -> bool:
    for t in tokens:
        if t.kind in (TokenKind.API_KEYWORD, TokenKind.KERNEL_LAUNCH_OPEN):
            return True
    return _is_pointer_declaration(tokens)


def assemble_sentences(
    tokens: list[Token],
    passthrough: list[PassthroughLine],
    lexicon: Lexicon,
) -> list[Sentence]:
    """Partition the token stream into sentences.

    A sentence ends at ``;`` outside parentheses, at a structural ``{`` or
    ``}``, or at the ``{`` closing a control-statement header (which stays
    inside the header's sentence).  A function signature ends before its
    ``{``; the brace becomes its own structural sentence.  Initializer braces
    (after ``=``) stay inside their sentence.  ``passthrough`` does not
    affect segmentation; it is accepted here so callers can hand over the
    full tokenize() result.
    """
    del passthrough  # comments/directives never split statements
    sentences: list[Sentence] = []
    pending: list[Token] = []
    paren_depth = 0
    brace_depth = 0
    init_depth = 0

    def flush(extra: Token | None = None):
        if extra is not None:
            pending.append(extra)
        if pending:
            toks = tuple(pending)
            sentences.append(
                Sentence(
                    tokens=toks,
                    first_line=toks[0].line,
                    last_line=toks[-1].line,
                    translatable=_is_translatable(toks),
                )
            )
            pending.clear()

    for tok in tokens:
        text = tok.text
        if text in ("(", "["):
            paren_depth += 1
            pending.append(tok)
        elif text in (")", "]"):
            if paren_depth == 0:
                raise UnbalancedDelimiters(f"unmatched {text!r}", line=tok.line, col=tok.col)
            paren_depth -= 1
            pending.append(tok)
        elif text == "{":
            if init_depth > 0 or (pending and pending[-1].text in ("=", ",", "{")):
                init_depth += 1
                brace_depth += 1
                pending.append(tok)
            elif paren_depth == 0:
                brace_depth += 1
                if pending and pending[0].text in _BRACE_HEADERS:
                    flush(tok)
                else:
                    flush()
                    flush(tok)
            else:
                raise UnbalancedDelimiters("brace inside parentheses", line=tok.line, col=tok.col)
        elif text == "}":
            if brace_depth == 0:
                raise UnbalancedDelimiters("unmatched '}'", line=tok.line, col=tok.col)
            brace_depth -= 1
            if init_depth > 0:
                init_depth -= 1
                pending.append(tok)
            else:
                flush()
                flush(tok)
        elif text == ";" and paren_depth == 0 and init_depth == 0:
            flush(tok)
        else:
            pending.append(tok)

    if pending:
        if paren_depth != 0:
            tok = pending[-1]
            raise UnbalancedDelimiters("unclosed parenthesis at end of file", line=tok.line, col=tok.col)
        flush()
    if brace_depth != 0:
        raise UnbalancedDelimiters("unclosed brace at end of file", line=tokens[-1].line if tokens else 1)
    if paren_depth != 0:
        raise UnbalancedDelimiters("unclosed parenthesis at end of file", line=tokens[-1].line if tokens else 1)
    return sentences


def mark_kernel_regions(sentences: list[Sentence], lexicon: Lexicon) -> tuple[list[Sentence], list[tuple[int, int]]]:
    """Flag sentences inside functions declared with a kernel qualifier.

    A region starts at a sentence carrying a qualifier token (the signature,
    which never contains the opening brace) and runs to the matching ``}``.
    Returns the reflagged sentences and the (first_line, last_line) ranges of
    the regions, signature included.  A qualified prototype with no body is a
    single-sentence region.
    """
    qualifiers = set(lexicon.kernel_qualifier_table)
    out: list[Sentence] = []
    regions: list[tuple[int, int]] = []
    armed = False  # saw the signature, waiting for its "{"
    depth = 0
    region_start: int | None = None

    for sent in sentences:
        texts = sent.texts
        if depth > 0:
            out.append(replace(sent, is_kernel_context=True))
            depth += texts.count("{") - texts.count("}")
            if depth == 0:
                regions.append((region_start, sent.last_line))
                region_start = None
        elif armed:
            armed = False
            if texts == ("{",):
                depth = 1
                out.append(replace(sent, is_kernel_context=True))
            else:
                # qualified prototype: region is just the signature
                regions.append((region_start, out[-1].last_line))
                region_start = None
                out.append(sent)
        elif any(t in qualifiers for t in texts):
            armed = True
            region_start = sent.first_line
            out.append(replace(sent, is_kernel_context=True))
        else:
            out.append(sent)

    if region_start is not None:
        regions.append((region_start, out[-1].last_line if out else region_start))
    return out, regions
