"""Usage patterns and the prefix tree that matches renamed sentences.

A usage pair maps a renamed source pattern to a renamed target pattern.
Patterns may span several sentences (segments separated by ``_br``) and may
contain capture slots ``_expr0``, ``_expr1``... which swallow a balanced
argument-expression run from the input.  All pairs live in one prefix tree so
shared prefixes are matched once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicatePattern,
    ExprIndexGap,
    LineCountMismatch,
    TargetExprUnbound,
)
from .renaming import EXPR_RE, GROUP_SEPARATOR

#: Tokens that end a capture when seen at capture-entry nesting depth.
_CAPTURE_STOPS = frozenset({",", ")", "]", GROUP_SEPARATOR})
_OPENERS = frozenset({"(", "["})
_CLOSERS = frozenset({")", "]"})


def expr_index(token: str) -> int | None:
    m = EXPR_RE.match(token)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class UsagePair:
    """One source->target rewrite over renamed sentences."""

    usage_id: int
    source: tuple[str, ...]
    target: tuple[str, ...]
    line: int = 0

    @property
    def n_segments(self) -> int:
        return self.source.count(GROUP_SEPARATOR) + 1

    @property
    def expr_indices(self) -> tuple[int, ...]:
        seen: list[int] = []
        for tok in self.source:
            idx = expr_index(tok)
            if idx is not None and idx not in seen:
                seen.append(idx)
        return tuple(seen)

    def target_segments(self) -> list[tuple[str, ...]]:
        return _split_segments(self.target)

    def source_segments(self) -> list[tuple[str, ...]]:
        return _split_segments(self.source)


def _split_segments(tokens: tuple[str, ...]) -> list[tuple[str, ...]]:
    segments: list[tuple[str, ...]] = []
    current: list[str] = []
    for tok in tokens:
        if tok == GROUP_SEPARATOR:
            segments.append(tuple(current))
            current = []
        else:
            current.append(tok)
    segments.append(tuple(current))
    return segments


def parse_usage_pairs(text: str, origin: str = "<memory>") -> list[UsagePair]:
    """Parse a usage file: alternating source/target lines.

    Blank lines and ``#`` comments may appear anywhere, including between a
    source line and its target.  Raises ``LineCountMismatch`` when a source
    line has no target, ``ExprIndexGap`` when a source pattern skips a
    capture index, ``TargetExprUnbound`` when the target uses a capture the
    source never binds, and ``DuplicatePattern`` for repeated source
    patterns.
    """
    entries: list[tuple[int, tuple[str, ...]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        entries.append((lineno, tuple(line.split())))

    if len(entries) % 2 != 0:
        lineno = entries[-1][0]
        raise LineCountMismatch(f"source pattern without a target in {origin}", line=lineno)

    pairs: list[UsagePair] = []
    seen: dict[tuple[str, ...], int] = {}
    for uid in range(len(entries) // 2):
        src_line, source = entries[2 * uid]
        _, target = entries[2 * uid + 1]

        src_exprs = {expr_index(t) for t in source} - {None}
        if src_exprs and sorted(src_exprs) != list(range(max(src_exprs) + 1)):
            raise ExprIndexGap(
                f"source capture indices {sorted(src_exprs)} are not dense in {origin}", line=src_line
            )
        tgt_exprs = {expr_index(t) for t in target} - {None}
        unbound = tgt_exprs - src_exprs
        if unbound:
            raise TargetExprUnbound(
                f"target uses _expr{sorted(unbound)[0]} never bound by the source in {origin}", line=src_line
            )
        if source in seen:
            raise DuplicatePattern(
                f"source pattern already defined at line {seen[source]} of {origin}", line=src_line
            )
        seen[source] = src_line
        pairs.append(UsagePair(uid, source, target, src_line))
    return pairs


def parse_usage_pair_files(
    source_text: str, target_text: str, origin: str = "<usages>"
) -> list[UsagePair]:
    """Build pairs from two parallel files: line i of each side is one usage.

    Blank lines and ``#`` comments are skipped on both sides independently;
    after filtering, the files must have the same number of usages.
    """

    def usable(text):
        return [line.strip() for line in text.splitlines() if line.strip() and not line.strip().startswith("#")]

    src, tgt = usable(source_text), usable(target_text)
    if len(src) != len(tgt):
        raise LineCountMismatch(
            f"{origin}: {len(src)} source usages but {len(tgt)} target usages"
        )
    interleaved = "\n".join(line for pair in zip(src, tgt) for line in pair)
    return parse_usage_pairs(interleaved, origin)


def capture_extent(stream: tuple[str, ...], start: int) -> tuple[str, ...]:
    """The token run a capture swallows, starting at ``start``.

    Grows until a stop token (``,`` ``)`` ``]`` or the segment separator)
    appears at the same nesting depth the capture entered at, or the stream
    ends.  May be empty; callers reject empty captures.
    """
    depth = 0
    j = start
    n = len(stream)
    while j < n:
        tok = stream[j]
        if depth == 0 and tok in _CAPTURE_STOPS:
            break
        if tok in _OPENERS:
            depth += 1
        elif tok in _CLOSERS:
            depth -= 1
        j += 1
    return stream[start:j]


@dataclass(frozen=True)
class UsageMatch:
    pair: UsagePair
    captures: dict[int, tuple[str, ...]]
    n_tokens: int

    @property
    def n_segments(self) -> int:
        return self.pair.n_segments


class _Node:
    __slots__ = ("edges", "exprs", "pair")

    def __init__(self):
        self.edges: dict[str, _Node] = {}
        self.exprs: dict[int, _Node] = {}
        self.pair: UsagePair | None = None


class UsageTree:
    """Prefix tree over source patterns.

    Matching is an ordered-choice depth-first search: at every node the
    literal edge is tried before capture children, capture children in
    ascending index order, and accepting at a terminal node only after both
    have failed.  Longer (grouped) patterns therefore beat their one-sentence
    prefixes, and capture extents are deterministic, so the first accepted
    trace is the unique answer.
    """

    def __init__(self, pairs: list[UsagePair] | None = None):
        self.root = _Node()
        self.pairs: list[UsagePair] = []
        for pair in pairs or []:
            self.add(pair)

    @property
    def max_segments(self) -> int:
        return max((p.n_segments for p in self.pairs), default=1)

    def add(self, pair: UsagePair) -> None:
        node = self.root
        for tok in pair.source:
            idx = expr_index(tok)
            if idx is not None:
                node = node.exprs.setdefault(idx, _Node())
            else:
                node = node.edges.setdefault(tok, _Node())
        if node.pair is not None:
            raise DuplicatePattern(f"source pattern already in tree (usage {node.pair.usage_id})")
        node.pair = pair
        self.pairs.append(pair)

    def match_stream(self, stream: tuple[str, ...]) -> UsageMatch | None:
        """Match a flat symbol stream (segments joined with ``_br``).

        The match must end exactly at the end of a segment; trailing
        segments the pattern does not reach are simply not consumed.
        """
        bound: dict[int, tuple[str, ...]] = {}
        n = len(stream)

        def dfs(node: _Node, i: int) -> UsageMatch | None:
            if i < n:
                tok = stream[i]
                child = node.edges.get(tok)
                if child is not None:
                    m = dfs(child, i + 1)
                    if m is not None:
                        return m
                for idx in sorted(node.exprs):
                    child = node.exprs[idx]
                    if idx in bound:
                        ext = bound[idx]
                        if stream[i : i + len(ext)] == ext:
                            m = dfs(child, i + len(ext))
                            if m is not None:
                                return m
                    else:
                        ext = capture_extent(stream, i)
                        if ext:
                            bound[idx] = ext
                            m = dfs(child, i + len(ext))
                            if m is not None:
                                return m
                            del bound[idx]
            if node.pair is not None and (i == n or stream[i] == GROUP_SEPARATOR):
                return UsageMatch(node.pair, dict(bound), i)
            return None

        return dfs(self.root, 0)

    def match_segments(self, segments: list[tuple[str, ...]]) -> UsageMatch | None:
        """Match a window of renamed sentences starting at the first one."""
        if not segments:
            return None
        stream: list[str] = []
        for k, seg in enumerate(segments):
            if k:
                stream.append(GROUP_SEPARATOR)
            stream.extend(seg)
        return self.match_stream(tuple(stream))


def normalize_capture(capture: tuple[str, ...]) -> tuple[str, ...]:
    """Renumber class symbols inside a capture from zero, per class.

    Captured runs keep the numbering of the sentence they came from; stored
    on their own they must be position-independent, so ``sizeof ( _tp1 )
    _op2 _id1 _op2 _id2`` becomes ``sizeof ( _tp0 ) _op0 _id0 _op0 _id1``.
    """
    from .renaming import SYMBOL_RE

    mapping: dict[str, str] = {}
    counters = {"id": 0, "op": 0, "tp": 0}
    out: list[str] = []
    for tok in capture:
        m = SYMBOL_RE.match(tok)
        if not m:
            out.append(tok)
            continue
        if tok not in mapping:
            cls = m.group(1)
            mapping[tok] = f"_{cls}{counters[cls]}"
            counters[cls] += 1
        out.append(mapping[tok])
    return tuple(out)
