"""Command line interface.

Subcommands:

``preprocess``   cut sources into renamed sentences (.sentences/.map/.passthrough)
``translate``    full source-to-source translation (_host.c and _kernel.cl)
``gen-dataset``  harvest a corpus and emit a training-set directory
``stats``        print the coverage table for sources or a generated dataset

Exit codes: 0 success, 1 command line usage error, 2 lexical/parse/data
error, 3 backend protocol error, 4 IO error, 5 unexpected internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

from .dataset import (
    DEFAULT_PERMUTATION_CAP,
    BenchmarkHarvest,
    benchmark_name,
    build_dataset,
    emit_dataset,
    find_source_files,
    harvest_file,
    read_stats_tsv,
    render_stats_table,
    render_table,
)
from .errors import BackendProtocolError, CudaClError
from .lexer import Lexicon, default_lexicon, load_lexicon
from .renaming import preprocess_unit, serialize_maps
from .postproc import render_translated_unit
from .translate import make_backend, translate_unit
from .usage import UsageTree, parse_usage_pair_files, parse_usage_pairs

_ESCAPES = {"\\": "\\\\", "\n": "\\n"}


def _escape_line(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def load_usage_tree(paths: list[str] | None) -> UsageTree:
    """Build the usage tree from ``--usages`` arguments.

    No paths: the bundled pair of pattern files.  Two paths: parallel
    source/target files, one usage per line.  One path: a single file with
    alternating source/target lines.
    """
    if not paths:
        data = resources.files("cudacl")
        src = data.joinpath("data/cuda.usages").read_text("utf-8")
        tgt = data.joinpath("data/opencl.usages").read_text("utf-8")
        return UsageTree(parse_usage_pair_files(src, tgt, "<bundled>"))
    if len(paths) == 1:
        text = Path(paths[0]).read_text(encoding="utf-8")
        return UsageTree(parse_usage_pairs(text, paths[0]))
    if len(paths) == 2:
        src = Path(paths[0]).read_text(encoding="utf-8")
        tgt = Path(paths[1]).read_text(encoding="utf-8")
        return UsageTree(parse_usage_pair_files(src, tgt, f"{paths[0]}+{paths[1]}"))
    raise CudaClError("--usages takes one interleaved file or a source/target file pair")


def _load_lexicon(path: str | None) -> Lexicon:
    return default_lexicon() if path is None else load_lexicon(path)


def _map_files(files, fn, jobs: int):
    """Apply fn over files, preserving sorted input order in the results."""
    if jobs <= 1:
        return [fn(f) for f in files]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, files))


def cmd_preprocess(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    files = find_source_files([Path(p) for p in args.sources])
    if not files:
        print("no source files found", file=sys.stderr)
        return 4

    def work(path: Path):
        unit = preprocess_unit(path.read_text(encoding="utf-8"), lexicon, str(path))
        return path, unit

    for path, unit in _map_files(files, work, args.jobs):
        stem = path.stem
        (outdir / f"{stem}.sentences").write_text(unit.render_sentences(), encoding="utf-8")
        (outdir / f"{stem}.map").write_text(
            serialize_maps([s.map for s in unit.sentences]), encoding="utf-8"
        )
        passthrough = "".join(
            f"{pt.line}\t{pt.col}\t{_escape_line(pt.text)}\n" for pt in unit.passthrough
        )
        (outdir / f"{stem}.passthrough").write_text(passthrough, encoding="utf-8")
        if not args.quiet:
            print(f"{path}: {len(unit.sentences)} sentences, {len(unit.passthrough)} passthrough")
    return 0


def cmd_translate(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    tree = load_usage_tree(args.usages)
    backend = make_backend(args.backend, tree, lexicon)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    files = find_source_files([Path(p) for p in args.sources])
    if not files:
        print("no source files found", file=sys.stderr)
        return 4

    def work(path: Path):
        unit = preprocess_unit(path.read_text(encoding="utf-8"), lexicon, str(path))
        tu = translate_unit(unit, tree, backend)
        return path, tu

    for path, tu in _map_files(files, work, args.jobs):
        host, kernel = render_translated_unit(tu)
        (outdir / f"{path.stem}_host.c").write_text(host, encoding="utf-8")
        (outdir / f"{path.stem}_kernel.cl").write_text(kernel, encoding="utf-8")
        for unc in tu.uncovered:
            print(f"uncovered: {unc.source_name}:{unc.line}: {unc.text}", file=sys.stderr)
        if not args.quiet:
            print(f"{path}: {tu.n_translated} sentences translated, {len(tu.uncovered)} uncovered")
    return 0


def _harvest_benchmarks(args, lexicon, tree) -> list[BenchmarkHarvest]:
    sources = list(args.sources) + list(getattr(args, "corpus", None) or [])
    files = find_source_files([Path(p) for p in sources])
    kernel_pairs = getattr(args, "kernel_pairs", False)

    def work(path: Path):
        return harvest_file(path, lexicon, tree, kernel_pairs)

    harvests = _map_files(files, work, args.jobs)
    benchmarks: dict[str, BenchmarkHarvest] = {}
    for path, fh in zip(files, harvests):
        name = benchmark_name(path)
        benchmarks.setdefault(name, BenchmarkHarvest(name)).fold(fh)
    return list(benchmarks.values())


def cmd_gen_dataset(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    tree = load_usage_tree(args.usages)
    benchmarks = _harvest_benchmarks(args, lexicon, tree)
    result = build_dataset(
        benchmarks,
        tree,
        permute=not args.no_permute,
        cap=args.cap,
        seed=args.seed,
        dedup=not args.no_dedup,
    )
    outdir = Path(args.output)
    emit_dataset(result, outdir, split=args.split)
    print(render_stats_table(result), end="")
    print(f"\nwrote {len(result.pairs)} pairs to {outdir}")
    return 0


def cmd_stats(args) -> int:
    if len(args.sources) == 1:
        tsv = Path(args.sources[0]) / "stats.tsv"
        if tsv.is_file():
            print(render_table(read_stats_tsv(tsv)), end="")
            if args.show_uncovered:
                print()
                report = (tsv.parent / "uncovered.txt").read_text(encoding="utf-8")
                print(report if report else "no uncovered sentences")
            return 0
    lexicon = _load_lexicon(args.lexicon)
    tree = load_usage_tree(args.usages)
    benchmarks = _harvest_benchmarks(args, lexicon, tree)
    result = build_dataset(benchmarks, tree, permute=not args.no_permute)
    print(render_stats_table(result), end="")
    if args.show_uncovered:
        print()
        if result.uncovered:
            for unc in result.uncovered:
                print(f"uncovered: {unc.source_name}:{unc.line}: {unc.text}")
        else:
            print("no uncovered sentences")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cudacl",
        description="Sentence-level CUDA to OpenCL source translation toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, usages=False, sources="+"):
        p.add_argument("sources", nargs=sources, help="source files or directories")
        p.add_argument("--lexicon", help="lexicon file (default: bundled)")
        p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
        p.add_argument("--quiet", action="store_true", help="suppress per-file progress")
        if usages:
            p.add_argument(
                "--usages",
                nargs="+",
                metavar="FILE",
                help="usage patterns: a CUDA/OpenCL file pair, or one interleaved file (default: bundled)",
            )

    p = sub.add_parser("preprocess", help="rename sources into sentence files")
    common(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("translate", help="translate sources to OpenCL host/kernel files")
    common(p, usages=True)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument(
        "--backend",
        default="rule",
        help="rule (default), identity, or extern:<command taking in/out files>",
    )
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("gen-dataset", help="generate a parallel training dataset")
    common(p, usages=True, sources="*")
    p.add_argument(
        "--corpus",
        nargs="+",
        metavar="DIR",
        help="additional source files or directories",
    )
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--no-permute", action="store_true", help="emit only observed pairs")
    p.add_argument("--no-dedup", action="store_true", help="keep duplicate pairs across benchmarks")
    p.add_argument("--kernel-pairs", action="store_true", help="include kernel-region sentence pairs")
    p.add_argument(
        "--cap",
        "--permutation-cap",
        dest="cap",
        type=int,
        default=DEFAULT_PERMUTATION_CAP,
        help=f"max instantiations per usage (default {DEFAULT_PERMUTATION_CAP})",
    )
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.add_argument(
        "--split",
        choices=("shared", "disjoint"),
        default="shared",
        help="shared: dev/test copy train (default); disjoint: 80/10/10 cut",
    )
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("stats", help="print corpus coverage statistics")
    common(p, usages=True)
    p.add_argument("--no-permute", action="store_true", help="count only observed pairs")
    p.add_argument("--kernel-pairs", action="store_true", help="include kernel-region sentences")
    p.add_argument("--show-uncovered", action="store_true", help="list uncovered sentences")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage and 0 on --help; fold usage errors to 1
        return 0 if e.code in (0, None) else 1
    try:
        return args.func(args)
    except BackendProtocolError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except CudaClError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except Exception:
        traceback.print_exc()
        return 5


if __name__ == "__main__":
    sys.exit(main())
