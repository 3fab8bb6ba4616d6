"""Sentence translation: planning, backends, kernel rewriting, launch expansion.

``translate_unit`` walks a preprocessed unit, decides per sentence how it
travels (verbatim, usage-tree match, kernel launch, kernel-region rewrite, or
uncovered), hands the translatable lines to a backend, and reassembles the
answers into per-sentence pieces ready for name restoration.

Backends only ever see the translatable lines.  Sentences marked
``_line_not_to_translate`` and sentences no usage covers are kept away from
them and pass through unchanged; a translator can therefore never corrupt
code it was not taught.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import BackendProtocolError, UnboundCapture
from .lexer import Lexicon
from .renaming import GROUP_SEPARATOR, PreprocessedUnit, RenamedSentence, SymbolMap
from .usage import UsageTree, expr_index


class RequestKind(Enum):
    MATCHED = "matched"
    LAUNCH = "launch"
    KERNEL = "kernel"


@dataclass(frozen=True)
class TranslationRequest:
    """One translatable line on its way to a backend."""

    line: str
    kind: RequestKind
    map: SymbolMap | None = None  # segment map, when a backend wants context


class Backend:
    """Translates renamed lines.  Stateless between calls."""

    name = "backend"

    def translate_requests(self, requests: list[TranslationRequest]) -> list[str]:
        raise NotImplementedError


class IdentityBackend(Backend):
    """Returns every line unchanged; used for round-trip checks."""

    name = "identity"

    def translate_requests(self, requests):
        return [r.line for r in requests]


class RuleBasedBackend(Backend):
    """Deterministic translation from the usage tree and kernel tables."""

    name = "rules"

    def __init__(self, tree: UsageTree, lexicon: Lexicon):
        self.tree = tree
        self.lexicon = lexicon

    def translate_requests(self, requests):
        out = []
        for req in requests:
            symbols = tuple(req.line.split())
            if req.kind is RequestKind.LAUNCH:
                out.append(" ".join(expand_kernel_launch(symbols)))
            elif req.kind is RequestKind.KERNEL:
                out.append(" ".join(translate_kernel_tokens(symbols, self.lexicon, req.map)))
            else:
                m = self.tree.match_stream(symbols)
                if m is None:
                    raise BackendProtocolError(f"no usage covers line handed to rule backend: {req.line!r}")
                out.append(" ".join(instantiate_target(m.pair.target, m.captures)))
        return out


class ExternalBackend(Backend):
    """Runs ``<cmd> <in_file> <out_file>`` over a file of renamed lines.

    The command must write exactly one output line per input line.
    """

    name = "extern"

    def __init__(self, command: str):
        self.command = shlex.split(command)
        if not self.command:
            raise BackendProtocolError("empty external backend command")

    def translate_requests(self, requests):
        lines = [r.line for r in requests]
        if not lines:
            return []
        with tempfile.TemporaryDirectory(prefix="cudacl-") as tmp:
            in_path = Path(tmp) / "in.txt"
            out_path = Path(tmp) / "out.txt"
            in_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            proc = subprocess.run(
                [*self.command, str(in_path), str(out_path)],
                capture_output=True,
                text=True,
            )
            if proc.returncode != 0:
                raise BackendProtocolError(
                    f"backend command failed with status {proc.returncode}: {proc.stderr.strip()}"
                )
            if not out_path.exists():
                raise BackendProtocolError("backend command wrote no output file")
            out_lines = out_path.read_text(encoding="utf-8").splitlines()
        if len(out_lines) != len(lines):
            raise BackendProtocolError(
                f"backend returned {len(out_lines)} lines for {len(lines)} inputs"
            )
        return out_lines


def instantiate_target(target: tuple[str, ...], captures: dict[int, tuple[str, ...]]) -> tuple[str, ...]:
    """Splice captured runs into a target pattern."""
    out: list[str] = []
    for tok in target:
        idx = expr_index(tok)
        if idx is None:
            out.append(tok)
        elif idx in captures:
            out.extend(captures[idx])
        else:
            raise UnboundCapture(f"target needs _expr{idx} but the match never bound it")
    return tuple(out)


def split_top_level(symbols: tuple[str, ...], sep: str = ",") -> list[tuple[str, ...]]:
    """Split a symbol run on ``sep`` at bracket depth zero."""
    parts: list[tuple[str, ...]] = []
    buf: list[str] = []
    depth = 0
    for tok in symbols:
        if tok in ("(", "["):
            depth += 1
        elif tok in (")", "]"):
            depth -= 1
        if tok == sep and depth == 0:
            parts.append(tuple(buf))
            buf = []
        else:
            buf.append(tok)
    parts.append(tuple(buf))
    return parts


def launch_shape(symbols: tuple[str, ...]) -> tuple[str, list[tuple[str, ...]], list[tuple[str, ...]]] | None:
    """Decompose ``name <<< grid , block >>> ( args ) ;`` or None if it does
    not have exactly a name, two launch-config parts and a plain call tail."""
    try:
        i_open = symbols.index("<<<")
        i_close = symbols.index(">>>")
    except ValueError:
        return None
    if i_open < 1 or i_close < i_open:
        return None
    if i_open != 1:
        return None
    name = symbols[0]
    cfg_parts = split_top_level(symbols[i_open + 1 : i_close])
    if len(cfg_parts) != 2 or not all(cfg_parts):
        return None
    tail = symbols[i_close + 1 :]
    if len(tail) < 3 or tail[0] != "(" or tail[-2:] != (")", ";"):
        return None
    inner = tail[1:-2]
    arg_parts = [] if not inner else split_top_level(inner)
    if any(not p for p in arg_parts):
        return None
    return name, cfg_parts, arg_parts


def expand_kernel_launch(symbols: tuple[str, ...]) -> tuple[str, ...]:
    """Rewrite a launch into explicit argument-setting and enqueue calls.

    The launch configuration and every kernel argument survive as symbol
    runs, so the surrounding maps restore them untouched.  The kernel name is
    embedded as a string literal: the runtime wrappers look kernels up by
    name, and a quoted name needs no entry in any symbol map.
    """
    shape = launch_shape(symbols)
    if shape is None:
        raise UnboundCapture(f"not a two-part kernel launch: {' '.join(symbols)}")
    name, (grid, block), args = shape
    quoted = f'"{name}"'
    segments: list[list[str]] = []
    for i, arg in enumerate(args):
        segments.append(["_clSetKernelArg", "(", quoted, ",", str(i), ",", *arg, ")", ";"])
    segments.append(["_clEnqueueNDRangeKernel", "(", *grid, ",", *block, ",", quoted, ")", ";"])
    out: list[str] = []
    for k, seg in enumerate(segments):
        if k:
            out.append(GROUP_SEPARATOR)
        out.extend(seg)
    return tuple(out)


def _tokenize_table_key(key: str) -> tuple[str, ...]:
    # keys are CUDA kernel vocabulary: dotted builtins stay one token, a
    # trailing "()" adds the two punctuation tokens
    if key.endswith("()"):
        return (key[:-2], "(", ")")
    return (key,)


def _tokenize_table_value(value: str) -> tuple[str, ...]:
    out: list[str] = []
    buf = ""
    for ch in value:
        if ch in "(),":
            if buf:
                out.append(buf)
                buf = ""
            out.append(ch)
        elif ch == " ":
            if buf:
                out.append(buf)
                buf = ""
        else:
            buf += ch
    if buf:
        out.append(buf)
    return tuple(out)


def _is_pointer_param(param: tuple[str, ...], smap: SymbolMap | None) -> bool:
    ops = [t for t in param if t.startswith("_op")]
    if smap is None:
        return bool(ops)
    for sym in ops:
        if smap.lookup(sym) in ("*", "**"):
            return True
    return False


def translate_kernel_tokens(
    symbols: tuple[str, ...], lexicon: Lexicon, smap: SymbolMap | None = None
) -> tuple[str, ...]:
    """Rewrite one kernel-region sentence through the kernel tables.

    Qualifiers are substituted (or deleted, for an empty table value),
    builtin sequences are replaced, and if the sentence turns out to be a
    ``__kernel`` signature every pointer parameter gains a ``__global``
    address-space qualifier.
    """
    builtin_seqs = sorted(
        ((_tokenize_table_key(k), _tokenize_table_value(v)) for k, v in lexicon.kernel_builtin_table.items()),
        key=lambda kv: -len(kv[0]),
    )
    out: list[str] = []
    i = 0
    n = len(symbols)
    while i < n:
        tok = symbols[i]
        if tok in lexicon.kernel_qualifier_table:
            repl = _tokenize_table_value(lexicon.kernel_qualifier_table[tok])
            out.extend(repl)
            i += 1
            continue
        for key_toks, val_toks in builtin_seqs:
            if tuple(symbols[i : i + len(key_toks)]) == key_toks:
                out.extend(val_toks)
                i += len(key_toks)
                break
        else:
            out.append(tok)
            i += 1

    if out and out[0] == "__kernel":
        out = _qualify_pointer_params(out, smap)
    return tuple(out)


def _qualify_pointer_params(symbols: list[str], smap: SymbolMap | None) -> list[str]:
    try:
        i_open = symbols.index("(")
    except ValueError:
        return symbols
    depth = 0
    i_close = i_open
    for j in range(i_open, len(symbols)):
        if symbols[j] == "(":
            depth += 1
        elif symbols[j] == ")":
            depth -= 1
            if depth == 0:
                i_close = j
                break
    inner = tuple(symbols[i_open + 1 : i_close])
    if not inner:
        return symbols
    params = split_top_level(inner)
    rebuilt: list[str] = []
    for k, param in enumerate(params):
        if k:
            rebuilt.append(",")
        if _is_pointer_param(param, smap):
            rebuilt.append("__global")
        rebuilt.extend(param)
    return symbols[: i_open + 1] + rebuilt + symbols[i_close:]


# -- unit translation ---------------------------------------------------------


class PieceKind(Enum):
    VERBATIM = "verbatim"
    TRANSLATED = "translated"
    UNCOVERED = "uncovered"


@dataclass
class TranslatedPiece:
    """The fate of one or more consecutive sentences."""

    kind: PieceKind
    origins: list[RenamedSentence]
    #: for TRANSLATED: target segments paired with the map restoring each
    segments: list[tuple[tuple[str, ...], SymbolMap]] = field(default_factory=list)

    @property
    def kernel(self) -> bool:
        return self.origins[0].kernel

    @property
    def start(self) -> tuple[int, int]:
        tok = self.origins[0].origin.tokens[0]
        return (tok.line, tok.col)


@dataclass(frozen=True)
class UncoveredSentence:
    source_name: str
    line: int
    text: str
    renamed: str


@dataclass
class TranslatedUnit:
    pieces: list[TranslatedPiece]
    uncovered: list[UncoveredSentence]
    unit: PreprocessedUnit

    @property
    def n_translated(self) -> int:
        return sum(1 for p in self.pieces if p.kind is PieceKind.TRANSLATED)


def _eligible(sent: RenamedSentence) -> bool:
    return sent.translatable and not sent.kernel and not sent.is_launch


def collect_requests(
    unit: PreprocessedUnit, tree: UsageTree
) -> tuple[list[tuple[PieceKind, list[int], TranslationRequest | None]], list[TranslationRequest]]:
    """Plan the unit: per piece, which sentences it covers and what (if
    anything) goes to the backend."""
    plans: list[tuple[PieceKind, list[int], TranslationRequest | None]] = []
    requests: list[TranslationRequest] = []
    sents = unit.sentences
    i = 0
    while i < len(sents):
        s = sents[i]
        if not s.translatable:
            plans.append((PieceKind.VERBATIM, [i], None))
            i += 1
        elif s.kernel:
            req = TranslationRequest(s.line, RequestKind.KERNEL, s.map)
            plans.append((PieceKind.TRANSLATED, [i], req))
            requests.append(req)
            i += 1
        elif s.is_launch:
            if launch_shape(s.symbols) is not None:
                req = TranslationRequest(s.line, RequestKind.LAUNCH, s.map)
                plans.append((PieceKind.TRANSLATED, [i], req))
                requests.append(req)
            else:
                plans.append((PieceKind.UNCOVERED, [i], None))
            i += 1
        else:
            window = [s.symbols]
            j = i + 1
            while j < len(sents) and len(window) < tree.max_segments and _eligible(sents[j]):
                window.append(sents[j].symbols)
                j += 1
            m = tree.match_segments(window)
            if m is not None:
                covered = list(range(i, i + m.n_segments))
                line = f" {GROUP_SEPARATOR} ".join(sents[k].line for k in covered)
                req = TranslationRequest(line, RequestKind.MATCHED, s.map)
                plans.append((PieceKind.TRANSLATED, covered, req))
                requests.append(req)
                i += m.n_segments
            else:
                plans.append((PieceKind.UNCOVERED, [i], None))
                i += 1
    return plans, requests


def translate_unit(unit: PreprocessedUnit, tree: UsageTree, backend: Backend) -> TranslatedUnit:
    plans, requests = collect_requests(unit, tree)
    responses = backend.translate_requests(requests)
    if len(responses) != len(requests):
        raise BackendProtocolError(
            f"backend returned {len(responses)} lines for {len(requests)} requests"
        )
    by_request = dict(zip((id(r) for r in requests), responses))

    pieces: list[TranslatedPiece] = []
    uncovered: list[UncoveredSentence] = []
    for kind, covered, req in plans:
        origins = [unit.sentences[k] for k in covered]
        if kind is PieceKind.TRANSLATED:
            response = by_request[id(req)]
            target_segments = _split_response_segments(response)
            src_maps = [o.map for o in origins]
            segments = [
                (seg, src_maps[min(j, len(src_maps) - 1)])
                for j, seg in enumerate(target_segments)
            ]
            pieces.append(TranslatedPiece(kind, origins, segments))
        else:
            pieces.append(TranslatedPiece(kind, origins))
            if kind is PieceKind.UNCOVERED:
                s = origins[0]
                uncovered.append(
                    UncoveredSentence(
                        unit.source_name,
                        s.origin.first_line,
                        " ".join(s.origin.texts),
                        s.line,
                    )
                )
    return TranslatedUnit(pieces, uncovered, unit)


def _split_response_segments(response: str) -> list[tuple[str, ...]]:
    segments: list[tuple[str, ...]] = []
    current: list[str] = []
    for tok in response.split():
        if tok == GROUP_SEPARATOR:
            segments.append(tuple(current))
            current = []
        else:
            current.append(tok)
    segments.append(tuple(current))
    return segments


def make_backend(spec: str, tree: UsageTree, lexicon: Lexicon) -> Backend:
    """Build a backend from a CLI-style spec: ``rule`` (also ``rules``),
    ``identity`` or ``extern:<command>``."""
    if spec in ("rule", "rules"):
        return RuleBasedBackend(tree, lexicon)
    if spec == "identity":
        return IdentityBackend()
    if spec.startswith("extern:"):
        return ExternalBackend(spec[len("extern:") :])
    raise BackendProtocolError(f"unknown backend spec {spec!r}")
