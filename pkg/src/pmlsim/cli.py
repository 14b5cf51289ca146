"""Command-line interface: compare, reduce, graph, generate, evaluate.

Exit codes: 0 success, 1 domain error (bad file content, enumeration cap),
2 usage error. Machine-readable output goes to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bayesnet import export_dot, merge_trees
from .document import parse_pml_file, serialize_pml
from .errors import PmlError
from .evaluate import (
    classify,
    load_corpus_dir,
    load_truth,
    pairwise_matrix,
    report_json,
    write_hist_csv,
)
from .generator import (
    DEFAULT_ID_SCHEME,
    CorpusSpec,
    generate_corpus,
    write_corpus,
)
from .inference import (
    DEFAULT_THRESHOLD,
    SimConfig,
    annotate,
    document_similarity,
    enumerate_exact,
)
from .reduce import embed, reduce_pml


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmlsim",
        description="Duplicate-probability tools for PML sensor documents.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sim", choices=("exact", "edit"), default="exact",
                        help="string similarity mode (default: exact)")
    common.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                        help=f"duplicate threshold (default: {DEFAULT_THRESHOLD})")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for pair sweeps")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress diagnostics")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", parents=[common],
                       help="duplicate probability of two documents")
    p.add_argument("--a", required=True, help="first PML file")
    p.add_argument("--b", required=True, help="second PML file")
    p.add_argument("--symmetrize", action="store_true",
                   help="average both comparison directions")
    p.add_argument("--oracle", action="store_true",
                   help="also report the exact-enumeration value")

    p = sub.add_parser("reduce", parents=[common],
                       help="print the EPC skeleton of a document")
    p.add_argument("--in", dest="infile", required=True, help="PML file")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("graph", parents=[common],
                       help="merge two documents and emit DOT")
    p.add_argument("--a", required=True, help="first PML file")
    p.add_argument("--b", required=True, help="second PML file")
    p.add_argument("--dot", help="output .dot file (default: stdout)")

    p = sub.add_parser("generate", parents=[common],
                       help="write a synthetic corpus with ground truth")
    p.add_argument("--count", type=int, required=True, help="document count")
    p.add_argument("--fraction", type=float, default=0.0,
                   help="duplicate fraction (default: 0)")
    p.add_argument("--tags", default="1..3", help="tag range LO..HI (default: 1..3)")
    p.add_argument("--edits", type=int, default=0,
                   help="character edits per duplicate (default: 0)")
    p.add_argument("--scheme", default=DEFAULT_ID_SCHEME,
                   help=f"EPC scheme, 'd' = random digit (default: {DEFAULT_ID_SCHEME})")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("evaluate", parents=[common],
                       help="pairwise sweep with precision/recall")
    p.add_argument("--corpus", required=True, help="directory of PML files")
    p.add_argument("--truth", required=True, help="truth.csv with header a,b")
    p.add_argument("--out", help="report JSON file")
    p.add_argument("--hist", help="histogram CSV file")
    p.add_argument("--bins", type=int, default=20, help="histogram bins (default: 20)")

    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if not 0.0 <= args.threshold <= 1.0:
        parser.error(f"--threshold {args.threshold} outside [0, 1]")
    if args.jobs < 1:
        parser.error(f"--jobs must be >= 1, got {args.jobs}")
    if args.command == "generate":
        if args.count < 1:
            parser.error(f"--count must be >= 1, got {args.count}")
        if not 0.0 <= args.fraction <= 1.0:
            parser.error(f"--fraction {args.fraction} outside [0, 1]")
        if args.edits < 0:
            parser.error(f"--edits must be >= 0, got {args.edits}")
        try:
            lo, hi = args.tags.split("..")
            args.tag_range = (int(lo), int(hi))
        except ValueError:
            parser.error(f"--tags must look like LO..HI, got {args.tags!r}")
        if args.tag_range[0] < 0 or args.tag_range[1] < args.tag_range[0]:
            parser.error(f"--tags range {args.tags!r} is empty")
    if args.command == "evaluate" and args.bins < 1:
        parser.error(f"--bins must be >= 1, got {args.bins}")


def _config(args: argparse.Namespace) -> SimConfig:
    return SimConfig(
        similarity=args.sim,
        threshold=args.threshold,
        symmetrize=getattr(args, "symmetrize", False),
    )


def _cmd_compare(args) -> int:
    cfg = _config(args)
    tree_a = parse_pml_file(args.a)
    tree_b = parse_pml_file(args.b)
    p = document_similarity(tree_a, tree_b, cfg)
    oracle = None
    if args.oracle:
        ra, rb = reduce_pml(tree_a), reduce_pml(tree_b)
        oracle = _oracle_value(ra, rb, cfg)
    print(json.dumps({
        "p": p,
        "oracle": oracle,
        "duplicate": p >= cfg.threshold,
        "threshold": cfg.threshold,
    }))
    return 0


def _oracle_value(ra, rb, cfg: SimConfig) -> float:
    def one(x, y):
        g = merge_trees(x, y)
        return 0.0 if g.is_empty else enumerate_exact(annotate(g, cfg))

    value = one(ra, rb)
    if cfg.symmetrize:
        value = 0.5 * (value + one(rb, ra))
    return value


def _cmd_reduce(args) -> int:
    tree = parse_pml_file(args.infile)
    xml = serialize_pml(embed(reduce_pml(tree)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(xml)
    else:
        sys.stdout.write(xml)
    return 0


def _cmd_graph(args) -> int:
    g = merge_trees(
        reduce_pml(parse_pml_file(args.a)),
        reduce_pml(parse_pml_file(args.b)),
    )
    dot = export_dot(g)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)
    return 0


def _cmd_generate(args) -> int:
    spec = CorpusSpec(
        count=args.count,
        tags_per_doc=args.tag_range,
        id_alphabet=args.scheme,
        duplicate_fraction=args.fraction,
        edits=args.edits,
        seed=args.seed,
    )
    corpus = generate_corpus(spec)
    out = write_corpus(corpus, args.out)
    print(json.dumps({
        "documents": len(corpus.documents),
        "truth_pairs": len(corpus.truth),
        "out": str(out),
    }))
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _config(args)
    truth = load_truth(args.truth)
    corpus = load_corpus_dir(args.corpus, truth=truth)
    n = len(corpus.documents)
    if not args.quiet:
        print(f"evaluating {n * (n - 1) // 2} pairs over {n} documents",
              file=sys.stderr)
    report = pairwise_matrix(corpus, cfg, bins=args.bins, jobs=args.jobs)
    classify(report, corpus.truth, args.threshold)
    payload = report_json(report, cfg, jobs=args.jobs, bins=args.bins)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if args.hist:
        write_hist_csv(report, args.hist)
    print(json.dumps(payload))
    return 0


_COMMANDS = {
    "compare": _cmd_compare,
    "reduce": _cmd_reduce,
    "graph": _cmd_graph,
    "generate": _cmd_generate,
    "evaluate": _cmd_evaluate,
}


def run(argv) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except PmlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
