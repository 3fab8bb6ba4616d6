"""Parallel dataset generation from a corpus of CUDA sources.

Harvesting walks every file with the same planner the translator uses, so a
sentence counts as found exactly when translation would cover it.  Matched
units contribute their capture contents to per-slot stores; generation then
instantiates every usage with the Cartesian product of its stores (capped by
random sampling), which multiplies a handful of observed sentences into a
training set while staying inside the vocabulary the renaming step created.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DanglingSymbol
from .lexer import Lexicon
from .renaming import GROUP_SEPARATOR, SYM_NOT_TRANSLATABLE, SYMBOL_RE, preprocess_unit
from .translate import (
    PieceKind,
    RequestKind,
    UncoveredSentence,
    collect_requests,
    expand_kernel_launch,
    instantiate_target,
    translate_kernel_tokens,
)
from .usage import UsagePair, UsageTree, expr_index, normalize_capture

SOURCE_SUFFIXES = (".cu", ".c", ".cc", ".cpp")

DEFAULT_PERMUTATION_CAP = 10000


@dataclass
class FileHarvest:
    """Everything one file contributes, in source order."""

    path: str
    found: list[str] = field(default_factory=list)  # matched unit lines
    captures: list[tuple[int, int, tuple[str, ...]]] = field(default_factory=list)
    matched_usages: list[int] = field(default_factory=list)
    launch_pairs: list[tuple[str, str]] = field(default_factory=list)
    kernel_pairs: list[tuple[str, str]] = field(default_factory=list)
    uncovered: list[UncoveredSentence] = field(default_factory=list)


def harvest_file(
    path: Path, lexicon: Lexicon, tree: UsageTree, kernel_pairs: bool = False
) -> FileHarvest:
    unit = preprocess_unit(path.read_text(encoding="utf-8"), lexicon, str(path))
    return harvest_unit(unit, tree, lexicon, kernel_pairs, name=str(path))


def harvest_unit(
    unit, tree: UsageTree, lexicon: Lexicon, kernel_pairs: bool = False, name: str = "<memory>"
) -> FileHarvest:
    fh = FileHarvest(name)
    plans, _requests = collect_requests(unit, tree)
    for kind, covered, req in plans:
        if kind is PieceKind.UNCOVERED:
            s = unit.sentences[covered[0]]
            fh.uncovered.append(
                UncoveredSentence(name, s.origin.first_line, " ".join(s.origin.texts), s.line)
            )
            continue
        if req is None:
            continue
        if req.kind is RequestKind.MATCHED:
            fh.found.append(req.line)
            m = tree.match_stream(tuple(req.line.split()))
            fh.matched_usages.append(m.pair.usage_id)
            for idx, cap in m.captures.items():
                fh.captures.append((m.pair.usage_id, idx, normalize_capture(cap)))
        elif req.kind is RequestKind.LAUNCH:
            fh.found.append(req.line)
            target = " ".join(expand_kernel_launch(tuple(req.line.split())))
            fh.launch_pairs.append((req.line, target))
        elif req.kind is RequestKind.KERNEL and kernel_pairs:
            fh.found.append(req.line)
            target = " ".join(translate_kernel_tokens(tuple(req.line.split()), lexicon, req.map))
            fh.kernel_pairs.append((req.line, target))
    return fh


@dataclass
class BenchmarkHarvest:
    """Accumulated evidence for one benchmark directory."""

    name: str
    n_files: int = 0
    found: dict[str, None] = field(default_factory=dict)  # ordered set
    stores: dict[tuple[int, int], dict[tuple[str, ...], None]] = field(default_factory=dict)
    matched_usages: dict[int, int] = field(default_factory=dict)  # uid -> hits
    launch_pairs: dict[tuple[str, str], None] = field(default_factory=dict)
    kernel_pairs: dict[tuple[str, str], None] = field(default_factory=dict)
    uncovered: list[UncoveredSentence] = field(default_factory=list)

    def fold(self, fh: FileHarvest) -> None:
        self.n_files += 1
        for line in fh.found:
            self.found.setdefault(line)
        for uid, idx, cap in fh.captures:
            self.stores.setdefault((uid, idx), {}).setdefault(cap)
        for uid in fh.matched_usages:
            self.matched_usages[uid] = self.matched_usages.get(uid, 0) + 1
        for pair in fh.launch_pairs:
            self.launch_pairs.setdefault(pair)
        for pair in fh.kernel_pairs:
            self.kernel_pairs.setdefault(pair)
        self.uncovered.extend(fh.uncovered)


def find_source_files(paths: list[Path]) -> list[Path]:
    files: list[Path] = []
    for p in paths:
        if p.is_file():
            files.append(p)
        else:
            files.extend(f for f in p.rglob("*") if f.is_file() and f.suffix in SOURCE_SUFFIXES)
    return sorted(set(files))


def benchmark_name(path: Path) -> str:
    return path.parent.name or "."


# -- permutation --------------------------------------------------------------


def iter_combo_indices(sizes: list[int], cap: int, seed: int) -> list[tuple[int, ...]]:
    """Index tuples into per-slot stores, capped by deterministic sampling.

    The full product is enumerated with the last slot fastest; when it
    exceeds ``cap``, a uniform sample of positions is taken and kept in
    enumeration order.
    """
    total = 1
    for s in sizes:
        total *= s
    if total == 0:
        return []

    def decode(flat: int) -> tuple[int, ...]:
        out = []
        for s in reversed(sizes):
            out.append(flat % s)
            flat //= s
        return tuple(reversed(out))

    if total <= cap:
        return [decode(k) for k in range(total)]
    picks = sorted(random.Random(seed).sample(range(total), cap))
    return [decode(k) for k in picks]


def instantiate_example(
    pair: UsagePair, combo: dict[int, tuple[str, ...]]
) -> tuple[str, str]:
    """Build one (source, target) training pair from stored captures.

    Symbols are renumbered per segment exactly the way renaming numbers a
    real sentence: pattern symbols and each capture's symbols live in
    separate zones, and indices are handed out densely in order of first
    appearance in the instantiated source.  Applying the zone mapping of the
    aligned source segment to the target reproduces what the translator is
    expected to output.
    """

    def tag_tokens(tokens: tuple[str, ...]):
        tagged: list[tuple[object, str]] = []
        for tok in tokens:
            idx = expr_index(tok)
            if idx is not None:
                for ctok in combo[idx]:
                    m = SYMBOL_RE.match(ctok)
                    tagged.append((("c", idx) if m else None, ctok))
            else:
                m = SYMBOL_RE.match(tok)
                tagged.append((("p",) if m else None, tok))
        return tagged

    src_out_segs: list[list[str]] = []
    seg_mappings: list[dict] = []
    for seg in pair.source_segments():
        mapping: dict[tuple, str] = {}
        counters = {"id": 0, "op": 0, "tp": 0}
        out: list[str] = []
        for zone, tok in tag_tokens(seg):
            if zone is None:
                out.append(tok)
                continue
            m = SYMBOL_RE.match(tok)
            cls, old = m.group(1), int(m.group(2))
            key = (zone, cls, old)
            if key not in mapping:
                mapping[key] = f"_{cls}{counters[cls]}"
                counters[cls] += 1
            out.append(mapping[key])
        src_out_segs.append(out)
        seg_mappings.append(mapping)

    tgt_out_segs: list[list[str]] = []
    for j, seg in enumerate(pair.target_segments()):
        mapping = seg_mappings[min(j, len(seg_mappings) - 1)]
        out = []
        for zone, tok in tag_tokens(seg):
            if zone is None:
                out.append(tok)
                continue
            m = SYMBOL_RE.match(tok)
            key = (zone, m.group(1), int(m.group(2)))
            if key not in mapping:
                raise DanglingSymbol(
                    f"target of usage {pair.usage_id} uses {tok} outside its source segment"
                )
            out.append(mapping[key])
        tgt_out_segs.append(out)

    sep = f" {GROUP_SEPARATOR} "
    return (
        sep.join(" ".join(seg) for seg in src_out_segs),
        sep.join(" ".join(seg) for seg in tgt_out_segs),
    )


def permute_usage(
    pair: UsagePair,
    stores: dict[tuple[int, int], dict[tuple[str, ...], None]],
    matched: bool,
    cap: int,
    seed: int,
) -> list[tuple[str, str]]:
    """All instantiations of one usage from its capture stores."""
    indices = pair.expr_indices
    if not indices:
        return [instantiate_example(pair, {})] if matched else []
    slot_caps: list[list[tuple[str, ...]]] = []
    for idx in indices:
        store = stores.get((pair.usage_id, idx))
        if not store:
            return []
        slot_caps.append(list(store))
    out: list[tuple[str, str]] = []
    for combo_idx in iter_combo_indices([len(s) for s in slot_caps], cap, seed + pair.usage_id):
        combo = {idx: slot_caps[k][combo_idx[k]] for k, idx in enumerate(indices)}
        out.append(instantiate_example(pair, combo))
    return out


# -- dataset assembly ---------------------------------------------------------


@dataclass(frozen=True)
class StatsRow:
    benchmark: str
    n_files: int
    n_found: int
    n_generated: int


@dataclass
class DatasetResult:
    pairs: list[tuple[str, str]]
    rows: list[StatsRow]
    total: StatsRow
    uncovered: list[UncoveredSentence]


def emit_benchmark(
    bh: BenchmarkHarvest,
    tree: UsageTree,
    permute: bool,
    cap: int,
    seed: int,
) -> list[tuple[str, str]]:
    """Pairs contributed by one benchmark, deduplicated, in emission order:
    observed units first, then permutations per usage, then launches and
    kernel sentences."""
    pairs: dict[tuple[str, str], None] = {}
    launch_sources = {src for src, _ in bh.launch_pairs}
    kernel_sources = {src for src, _ in bh.kernel_pairs}
    for line in bh.found:
        if line in launch_sources or line in kernel_sources:
            continue
        m = tree.match_stream(tuple(line.split()))
        if m is None:
            continue
        target = " ".join(instantiate_target(m.pair.target, m.captures))
        pairs.setdefault((line, target))
    if permute:
        for pair in tree.pairs:
            matched = bh.matched_usages.get(pair.usage_id, 0) > 0
            for example in permute_usage(pair, bh.stores, matched, cap, seed):
                pairs.setdefault(example)
    for lp in bh.launch_pairs:
        pairs.setdefault(lp)
    for kp in bh.kernel_pairs:
        pairs.setdefault(kp)
    return list(pairs)


def build_dataset(
    benchmarks: list[BenchmarkHarvest],
    tree: UsageTree,
    permute: bool = True,
    cap: int = DEFAULT_PERMUTATION_CAP,
    seed: int = 0,
    dedup: bool = True,
) -> DatasetResult:
    rows: list[StatsRow] = []
    all_pairs: dict[tuple[str, str], None] = {}
    raw_pairs: list[tuple[str, str]] = []
    union_found: dict[str, None] = {}
    uncovered: list[UncoveredSentence] = []
    total_files = 0
    for bh in sorted(benchmarks, key=lambda b: b.name):
        emitted = emit_benchmark(bh, tree, permute, cap, seed)
        rows.append(StatsRow(bh.name, bh.n_files, len(bh.found), len(emitted)))
        total_files += bh.n_files
        for line in bh.found:
            union_found.setdefault(line)
        for p in emitted:
            all_pairs.setdefault(p)
            raw_pairs.append(p)
        uncovered.extend(bh.uncovered)
    pairs = list(all_pairs) if dedup else raw_pairs
    total = StatsRow("Total", total_files, len(union_found), len(all_pairs))
    return DatasetResult(pairs, rows, total, uncovered)


STATS_HEADERS = ("Benchmark", "# application", "# sentences found", "# sentences generated")


def render_table(rows: list[tuple[str, int, int, int]]) -> str:
    cells = [(name, str(a), str(b), str(c)) for name, a, b, c in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(STATS_HEADERS)]
    lines = []
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(STATS_HEADERS)).rstrip())
    lines.append("  ".join("-" * widths[i] for i in range(len(STATS_HEADERS))))
    for r in cells:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(STATS_HEADERS))).rstrip())
    return "\n".join(lines) + "\n"


def stats_rows(result: DatasetResult) -> list[tuple[str, int, int, int]]:
    return [
        (r.benchmark, r.n_files, r.n_found, r.n_generated)
        for r in (*result.rows, result.total)
    ]


def render_stats_table(result: DatasetResult) -> str:
    return render_table(stats_rows(result))


def write_stats_tsv(result: DatasetResult, path: Path) -> None:
    lines = ["\t".join(STATS_HEADERS)]
    for name, a, b, c in stats_rows(result):
        lines.append(f"{name}\t{a}\t{b}\t{c}")
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_stats_tsv(path: Path) -> list[tuple[str, int, int, int]]:
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        if lineno == 0:
            continue
        name, a, b, c = line.split("\t")
        rows.append((name, int(a), int(b), int(c)))
    return rows


def write_parallel_files(pairs: list[tuple[str, str]], src_path: Path, tgt_path: Path) -> None:
    src_path.write_text("".join(s + "\n" for s, _ in pairs), encoding="utf-8")
    tgt_path.write_text("".join(t + "\n" for _, t in pairs), encoding="utf-8")


def vocabulary(lines) -> list[str]:
    """Distinct symbols, sorted; always includes the untranslated-line marker."""
    symbols = {SYM_NOT_TRANSLATABLE}
    for line in lines:
        symbols.update(line.split())
    return sorted(symbols)


def split_pairs(
    pairs: list[tuple[str, str]], split: str
) -> tuple[list[tuple[str, str]], list[tuple[str, str]], list[tuple[str, str]]]:
    """shared: dev and test are full copies of train.  disjoint: contiguous
    80/10/10 cut in emission order (the two tail slices get len//10 each)."""
    if split == "shared":
        return list(pairs), list(pairs), list(pairs)
    if split != "disjoint":
        raise ValueError(f"unknown split {split!r}")
    n_hold = len(pairs) // 10
    n_train = len(pairs) - 2 * n_hold
    return (
        pairs[:n_train],
        pairs[n_train : n_train + n_hold],
        pairs[n_train + n_hold :],
    )


def emit_dataset(result: DatasetResult, out_dir: Path, split: str = "shared") -> None:
    """Write the training-set directory layout.

    train/dev/test pairs as .cuda/.opencl line files, per-side vocabularies,
    the stats table as TSV, and the uncovered report with provenance.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    train, dev, test = split_pairs(result.pairs, split)
    for name, pairs in (("train", train), ("dev", dev), ("test", test)):
        write_parallel_files(pairs, out_dir / f"{name}.cuda", out_dir / f"{name}.opencl")
    for side, column in (("cuda", 0), ("opencl", 1)):
        vocab = vocabulary(p[column] for p in train)
        (out_dir / f"vocab.{side}").write_text(
            "".join(sym + "\n" for sym in vocab), encoding="utf-8"
        )
    write_stats_tsv(result, out_dir / "stats.tsv")
    (out_dir / "uncovered.txt").write_text(
        "".join(f"{u.source_name}:{u.line}\t{u.renamed}\n" for u in result.uncovered),
        encoding="utf-8",
    )
