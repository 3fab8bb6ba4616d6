"""Symbol renaming: project sentences onto a small translation vocabulary.

Identifiers, literals, operators and type keywords are replaced by class
symbols (``_id0``, ``_op0``, ``_tp0``...) numbered per sentence in order of
first appearance; API keywords, control keywords and punctuation survive
verbatim.  The per-sentence :class:`SymbolMap` records the original spelling
behind every symbol so translation output can be mapped back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DanglingSymbol
from .lexer import (
    Lexicon,
    PassthroughLine,
    Sentence,
    Token,
    TokenKind,
    assemble_sentences,
    mark_kernel_regions,
    tokenize,
)

#: Placeholder emitted for sentences the translator must not touch.
SYM_NOT_TRANSLATABLE = "_line_not_to_translate"

#: Separator between sentences that translate as one group.
GROUP_SEPARATOR = "_br"

SYMBOL_RE = re.compile(r"_(id|op|tp)(\d+)$")
EXPR_RE = re.compile(r"_expr(\d+)$")

#: Token kinds that collapse into the ``_id`` symbol class.
_ID_KINDS = (TokenKind.IDENTIFIER, TokenKind.NUMERIC_CONSTANT, TokenKind.STRING_LITERAL)


@dataclass
class SymbolMap:
    """Original spellings behind the class symbols of one sentence."""

    id_names: list[str] = field(default_factory=list)
    op_names: list[str] = field(default_factory=list)
    tp_names: list[str] = field(default_factory=list)

    def _names(self, cls: str) -> list[str]:
        return {"id": self.id_names, "op": self.op_names, "tp": self.tp_names}[cls]

    def assign(self, cls: str, text: str) -> str:
        """Return the symbol for ``text``, allocating the next index if new."""
        names = self._names(cls)
        try:
            idx = names.index(text)
        except ValueError:
            idx = len(names)
            names.append(text)
        return f"_{cls}{idx}"

    def lookup(self, symbol: str) -> str | None:
        """Original text behind ``symbol``, or None if it is not a class symbol."""
        m = SYMBOL_RE.match(symbol)
        if not m:
            return None
        names = self._names(m.group(1))
        idx = int(m.group(2))
        if idx >= len(names):
            raise DanglingSymbol(f"symbol {symbol} has no entry in the map")
        return names[idx]

    def symbol_for_text(self, text: str) -> str | None:
        """Reverse lookup: the symbol already assigned to ``text``, if any."""
        for cls in ("id", "op", "tp"):
            names = self._names(cls)
            if text in names:
                return f"_{cls}{names.index(text)}"
        return None

    def is_empty(self) -> bool:
        return not (self.id_names or self.op_names or self.tp_names)


def rename_tokens(tokens, lexicon: Lexicon) -> tuple[tuple[str, ...], SymbolMap]:
    """Rename one sentence worth of tokens.

    The identifier naming a kernel launch (the one directly before ``<<<``)
    stays verbatim: the launch expansion needs the real kernel name, and the
    name also keys the generated argument-setting calls.
    """
    del lexicon  # classification already happened at tokenize time
    symbols: list[str] = []
    smap = SymbolMap()
    for i, tok in enumerate(tokens):
        if tok.kind in _ID_KINDS:
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is not None and nxt.kind is TokenKind.KERNEL_LAUNCH_OPEN:
                symbols.append(tok.text)
            else:
                symbols.append(smap.assign("id", tok.text))
        elif tok.kind is TokenKind.OPERATOR:
            symbols.append(smap.assign("op", tok.text))
        elif tok.kind is TokenKind.TYPE_KEYWORD:
            symbols.append(smap.assign("tp", tok.text))
        else:
            symbols.append(tok.text)
    return tuple(symbols), smap


@dataclass
class RenamedSentence:
    """One sentence after renaming, with everything needed to undo it."""

    origin: Sentence
    symbols: tuple[str, ...]
    map: SymbolMap

    @property
    def translatable(self) -> bool:
        return self.origin.translatable

    @property
    def kernel(self) -> bool:
        return self.origin.is_kernel_context

    @property
    def is_launch(self) -> bool:
        return any(t.kind is TokenKind.KERNEL_LAUNCH_OPEN for t in self.origin.tokens)

    @property
    def line(self) -> str:
        """The sentence as it appears in a .sentences file."""
        if not self.translatable:
            return SYM_NOT_TRANSLATABLE
        return " ".join(self.symbols)


@dataclass
class PreprocessedUnit:
    """A whole translation unit cut into renamed sentences."""

    sentences: list[RenamedSentence]
    passthrough: list[PassthroughLine]
    kernel_regions: list[tuple[int, int]]
    source_name: str = "<memory>"

    @property
    def lines(self) -> list[str]:
        return [s.line for s in self.sentences]

    def render_sentences(self) -> str:
        if not self.sentences:
            return ""
        return "\n".join(self.lines) + "\n"


def preprocess_unit(source_text: str, lexicon: Lexicon, source_name: str = "<memory>") -> PreprocessedUnit:
    """Tokenize, segment and rename a translation unit."""
    tokens, passthrough = tokenize(source_text, lexicon)
    sentences = assemble_sentences(tokens, passthrough, lexicon)
    sentences, regions = mark_kernel_regions(sentences, lexicon)
    renamed: list[RenamedSentence] = []
    for sent in sentences:
        if sent.translatable:
            symbols, smap = rename_tokens(sent.tokens, lexicon)
        else:
            symbols, smap = (), SymbolMap()
        renamed.append(RenamedSentence(origin=sent, symbols=symbols, map=smap))
    return PreprocessedUnit(renamed, passthrough, regions, source_name)


# -- symbol map serialization -------------------------------------------------
#
# One line per sentence, aligned with the .sentences file.  Three fields
# (id/op/tp name lists) separated by "|", names separated by ",".  Characters
# that collide with the format are backslash-escaped; newlines become \n so a
# map line always stays one physical line.

_ESCAPES = {"\\": "\\\\", "|": "\\|", ",": "\\,", "\n": "\\n"}


def _escape(name: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in name)


def _split_escaped(text: str, sep: str) -> list[str]:
    parts: list[str] = []
    buf: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            buf.append(ch)
            buf.append(text[i + 1])
            i += 2
            continue
        if ch == sep:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return parts


def _unescape(name: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(name):
        ch = name[i]
        if ch == "\\" and i + 1 < len(name):
            nxt = name[i + 1]
            out.append("\n" if nxt == "n" else nxt)
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def _render_names(names: list[str]) -> str:
    return ",".join(_escape(n) for n in names)


def _parse_names(field_text: str) -> list[str]:
    if not field_text:
        return []
    return [_unescape(p) for p in _split_escaped(field_text, ",")]


def serialize_maps(maps: list[SymbolMap]) -> str:
    lines = []
    for m in maps:
        lines.append("|".join((_render_names(m.id_names), _render_names(m.op_names), _render_names(m.tp_names))))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_maps(text: str) -> list[SymbolMap]:
    maps: list[SymbolMap] = []
    for line in text.splitlines():
        fields = _split_escaped(line, "|")
        if len(fields) != 3:
            raise DanglingSymbol(f"malformed map line: {line!r}")
        maps.append(SymbolMap(*(_parse_names(f) for f in fields)))
    return maps
