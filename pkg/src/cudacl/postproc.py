"""Name restoration and output formatting.

Translated lines come back as symbol streams; restoration swaps every class
symbol for its original spelling using the segment's map and leaves every
other token alone (API names the translation introduced, literals it copied
from the pattern, punctuation).  The formatter then lays the token lines out
with brace-depth indentation; comments and preprocessor directives re-enter
verbatim at their original positions.
"""

from __future__ import annotations

from .errors import DanglingSymbol
from .lexer import Lexicon, assemble_sentences, tokenize
from .renaming import EXPR_RE, SymbolMap
from .translate import PieceKind, TranslatedUnit

_NO_SPACE_BEFORE = frozenset({";", ")", "++", "--"})
_NO_SPACE_AFTER = frozenset({"("})

_INDENT = "    "


def restore_symbols(symbols, smap: SymbolMap) -> list[str]:
    """Map class symbols back to original spellings; other tokens pass through.

    A capture slot (``_expr0``...) surviving to this point means a backend
    emitted a pattern instead of an instantiated sentence; that is an error,
    not a token.
    """
    out: list[str] = []
    for sym in symbols:
        if EXPR_RE.match(sym):
            raise DanglingSymbol(f"unresolved capture slot {sym} in translated line")
        text = smap.lookup(sym)
        out.append(sym if text is None else text)
    return out


def format_tokens(texts) -> str:
    """One code line from token texts, standard spacing."""
    parts: list[str] = []
    prev = None
    for text in texts:
        if prev is None:
            parts.append(text)
        elif text in _NO_SPACE_BEFORE or prev in _NO_SPACE_AFTER:
            parts.append(text)
        else:
            parts.append(" " + text)
        prev = text
    return "".join(parts)


def render_document(items) -> str:
    """Lay out code blocks and raw lines into a source file.

    ``items`` is a list of ``("code", (line, col), [token_lines...])`` and
    ``("raw", (line, col), text)`` entries; they are emitted in source
    position order.  A lone ``{`` attaches to the previous code line; a line
    starting with ``}`` dedents itself.
    """
    rows: list[str] = []
    last_code_row = -1
    depth = 0
    for kind, _pos, payload in sorted(items, key=lambda it: it[1]):
        if kind == "raw":
            rows.extend(payload.split("\n"))
            continue
        for texts in payload:
            texts = list(texts)
            if not texts:
                continue
            if texts == ["{"]:
                if last_code_row >= 0:
                    rows[last_code_row] += " {"
                else:
                    rows.append("{")
                    last_code_row = len(rows) - 1
                depth += 1
                continue
            leads_close = texts[0] == "}"
            if leads_close:
                depth = max(0, depth - 1)
            rows.append(_INDENT * depth + format_tokens(texts))
            last_code_row = len(rows) - 1
            delta = texts.count("{") - texts.count("}") + (1 if leads_close else 0)
            depth = max(0, depth + delta)
    if not rows:
        return ""
    return "\n".join(rows) + "\n"


def _in_regions(line: int, regions) -> bool:
    return any(lo <= line <= hi for lo, hi in regions)


def render_translated_unit(tu: TranslatedUnit) -> tuple[str, str]:
    """Render a translated unit into (host_text, kernel_text)."""
    host_items: list = []
    kernel_items: list = []
    for piece in tu.pieces:
        if piece.kind is PieceKind.TRANSLATED:
            block = [restore_symbols(seg, smap) for seg, smap in piece.segments]
        else:
            block = [list(o.origin.texts) for o in piece.origins]
        bucket = kernel_items if piece.kernel else host_items
        bucket.append(("code", piece.start, block))
    regions = tu.unit.kernel_regions
    for pt in tu.unit.passthrough:
        bucket = kernel_items if _in_regions(pt.line, regions) else host_items
        bucket.append(("raw", (pt.line, pt.col), pt.text))
    return render_document(host_items), render_document(kernel_items)


def format_source(text: str, lexicon: Lexicon) -> str:
    """Reformat plain source through the same layout rules (no translation)."""
    tokens, passthrough = tokenize(text, lexicon)
    sentences = assemble_sentences(tokens, passthrough, lexicon)
    items = [("code", (s.first_line, s.first_col), [list(s.texts)]) for s in sentences]
    items += [("raw", (pt.line, pt.col), pt.text) for pt in passthrough]
    return render_document(items)
