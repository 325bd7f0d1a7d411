"""Command-line pipeline: train, segment, eval, stats, dl, coverage, window.

Every run is deterministic given its inputs, flags, and seed; reruns produce
byte-identical outputs. JSON reports embed a ``meta`` object with the tool
version, subcommand, resolved flags, and seed. On failure, partially written
outputs are removed and the exit code distinguishes usage errors (1), data
errors (2), and internal errors (3).
"""

import argparse
import json
import logging
import math
import os
import sys

from . import __version__
from .corpus import (
    Alphabet,
    read_fasta,
    read_paired,
    read_plain,
    sniff_alphabet,
    sniff_format,
    window_corpus,
    write_fasta,
)
from .dna import STANDARD_GENETIC_CODE, CoverageConfig, coverage_report, coverage_segment, format_coverage
from .errors import DataError, SoftsegError
from .lexicon import (
    FilterConfig,
    Lexicon,
    extract_candidates,
    filter_candidates,
    random_init,
    read_lexicon,
    uniform_init,
    write_lexicon,
)
from .metrics import corpus_boundary_prf, description_length, occurrence_stats
from .segmenter import Segmentation, TrainConfig, em_train, read_segmentation, segment_corpus, write_segmentation
from .structure import structure_segment

_logger = logging.getLogger(__name__)


class UsageError(SoftsegError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> tuple[_Parser, dict]:
    parser = _Parser(prog="softseg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"softseg {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)
    subparsers: dict[str, argparse.ArgumentParser] = {}

    def common(p):
        p.add_argument("--config", default=None, help="flat key=value config file; flags win over it")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("train", help="learn a word lexicon from an unsegmented corpus")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--format", choices=("auto", "plain", "fasta"), default="auto")
    p.add_argument("--alphabet", choices=("generic", "amino20", "dna4"), default="generic")
    p.add_argument("--on-invalid", choices=("drop", "abort"), default="drop")
    p.add_argument("--max-len", type=int, default=9)
    p.add_argument("--mode", choices=("soft", "hard"), default="soft")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--prune-below", type=float, default=1e-12)
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--min-border-entropy", type=float, default=0.0)
    p.add_argument("--refilter-after", action="store_true",
                   help="re-apply the count filter to expected counts after training")
    p.add_argument("--init", choices=("uniform", "random"), default="uniform")
    p.add_argument("--out-lexicon", required=True)
    p.add_argument("--out-log", default=None, help="iteration log TSV")
    common(p)
    subparsers["train"] = p

    p = sub.add_parser("segment", help="decode best segmentations, or emit structure gold")
    p.add_argument("--in", dest="in_path", default=None, help="plain/FASTA corpus to segment")
    p.add_argument("--paired", default=None, help="paired id/sequence/structure file")
    p.add_argument("--structure", action="store_true",
                   help="with --paired: segment at structure state changes instead of decoding")
    p.add_argument("--format", choices=("auto", "plain", "fasta"), default="auto")
    p.add_argument("--alphabet", choices=("generic", "amino20", "dna4"), default="generic")
    p.add_argument("--on-invalid", choices=("drop", "abort"), default="drop")
    p.add_argument("--lexicon", default=None)
    p.add_argument("--out", required=True)
    common(p)
    subparsers["segment"] = p

    p = sub.add_parser("eval", help="boundary precision/recall/F of predicted vs gold tokens")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--macro", action="store_true")
    p.add_argument("--out", required=True)
    common(p)
    subparsers["eval"] = p

    p = sub.add_parser("stats", help="word occurrence distribution of a segmented corpus")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--segmented", required=True)
    p.add_argument("--out", required=True)
    common(p)
    subparsers["stats"] = p

    p = sub.add_parser("dl", help="description length of a segmented corpus")
    p.add_argument("--segmented", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--alphabet", choices=("generic", "amino20", "dna4"), default="generic")
    p.add_argument("--out", required=True)
    common(p)
    subparsers["dl"] = p

    p = sub.add_parser("coverage", help="green/red protein-word coverage of DNA windows")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--format", choices=("auto", "plain", "fasta"), default="auto")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--width", type=int, default=500, help="window width; 0 keeps sequences whole")
    p.add_argument("--drop-remainder", action="store_true")
    p.add_argument("--red-penalty", type=float, default=math.log(1e-6))
    p.add_argument("--green-bonus", type=float, default=0.0)
    p.add_argument("--out-report", required=True)
    p.add_argument("--out-hist", default=None)
    p.add_argument("--out-annotated", default=None)
    common(p)
    subparsers["coverage"] = p

    p = sub.add_parser("window", help="cut sequences into fixed-width windows")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--format", choices=("auto", "plain", "fasta"), default="auto")
    p.add_argument("--alphabet", choices=("generic", "amino20", "dna4"), default="generic")
    p.add_argument("--on-invalid", choices=("drop", "abort"), default="drop")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--drop-remainder", action="store_true")
    p.add_argument("--out", required=True)
    common(p)
    subparsers["window"] = p

    return parser, subparsers


def _load_config(path) -> dict[str, str]:
    """Flat ``key = value`` pairs; keys use flag spelling without the dashes."""
    out: dict[str, str] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _apply_config(subparser, overrides: dict[str, str]) -> None:
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in overrides.items():
        action = actions.get(key)
        if action is None:
            raise UsageError(f"config key {key!r} is not a flag of this subcommand")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            low = value.lower()
            if low in _TRUE:
                defaults[key] = True
            elif low in _FALSE:
                defaults[key] = False
            else:
                raise UsageError(f"config key {key!r} needs a boolean, got {value!r}")
        else:
            defaults[key] = value  # argparse type-converts string defaults
    subparser.set_defaults(**defaults)


def _meta(args: argparse.Namespace) -> dict:
    flags = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("cmd", "verbose")
    }
    return {
        "version": __version__,
        "subcommand": args.cmd,
        "seed": args.seed,
        "flags": flags,
    }


def _write_json(path, payload: dict, meta: dict) -> None:
    doc = dict(payload)
    doc["meta"] = meta
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_inputs(*paths) -> None:
    for p in paths:
        if p is not None and not os.path.exists(p):
            raise DataError(f"input path does not exist: {p}")


def _read_corpus(args):
    fmt = args.format
    if fmt == "auto":
        fmt = sniff_format(args.in_path)
    if args.alphabet == "generic":
        alphabet = sniff_alphabet(args.in_path, fmt)
    else:
        alphabet = Alphabet.from_kind(args.alphabet)
    reader = read_fasta if fmt == "fasta" else read_plain
    corpus = reader(args.in_path, alphabet, on_invalid=args.on_invalid)
    if corpus.n_skipped_empty or corpus.n_dropped:
        _logger.info(
            "%s: skipped %d empty, dropped %d invalid records",
            args.in_path, corpus.n_skipped_empty, corpus.n_dropped,
        )
    return corpus


def _header(args) -> list[str]:
    return [f"softseg {__version__} {args.cmd} seed={args.seed}"]


def cmd_train(args) -> int:
    _require_inputs(args.in_path)
    corpus = _read_corpus(args)
    table = extract_candidates(corpus, args.max_len)
    fcfg = FilterConfig(min_count=args.min_count, min_border_entropy=args.min_border_entropy)
    table = filter_candidates(table, corpus, fcfg)
    init = uniform_init(table) if args.init == "uniform" else random_init(table, args.seed)
    tcfg = TrainConfig(
        max_len=args.max_len,
        mode=args.mode,
        max_iters=args.max_iters,
        tol=args.tol,
        prune_below=args.prune_below,
        seed=args.seed,
    )
    lexicon, history = em_train(corpus, init, tcfg, threads=args.threads)
    if args.refilter_after:
        kept = {w: p for w, p in lexicon.probs.items()
                if len(w) == 1 or (lexicon.counts or {}).get(w, 0.0) >= args.min_count}
        z = math.fsum(kept.values())
        lexicon = Lexicon(
            {w: p / z for w, p in kept.items()},
            counts={w: lexicon.counts[w] for w in kept},
            max_len=lexicon.max_len,
            fallback_log_prob=lexicon.fallback_log_prob,
        )
    write_lexicon(lexicon, args.out_lexicon, header_lines=_header(args))
    if args.out_log:
        with open(args.out_log, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# {_header(args)[0]}\n")
            fh.write("# iteration\tlog_likelihood\tvocab_size\n")
            for it in history:
                fh.write(f"{it.iteration}\t{it.log_likelihood!r}\t{it.vocab_size}\n")
    return 0


def cmd_segment(args) -> int:
    if args.structure:
        if not args.paired:
            raise UsageError("--structure needs --paired")
        _require_inputs(args.paired)
        paired = read_paired(args.paired, on_invalid=args.on_invalid)
        lines = [
            structure_segment(rec).tokens(rec.sequence.symbols) for rec in paired
        ]
        write_segmentation(args.out, lines)
        return 0
    if not args.lexicon:
        raise UsageError("segmenting needs --lexicon (or --structure)")
    if bool(args.in_path) == bool(args.paired):
        raise UsageError("give exactly one of --in or --paired")
    _require_inputs(args.in_path, args.paired, args.lexicon)
    if args.paired:
        corpus = read_paired(args.paired, on_invalid=args.on_invalid)
    else:
        corpus = _read_corpus(args)
    lexicon = read_lexicon(args.lexicon)
    segs = segment_corpus(corpus, lexicon, threads=args.threads)
    lines = [seg.tokens(seq.symbols) for seq, seg in zip(corpus.sequences(), segs)]
    write_segmentation(args.out, lines)
    return 0


def _to_segmentations(token_lines) -> list[Segmentation]:
    return [Segmentation.from_tokens(tokens) for tokens in token_lines]


def cmd_eval(args) -> int:
    _require_inputs(args.gold, args.pred)
    golds = _to_segmentations(read_segmentation(args.gold))
    preds = _to_segmentations(read_segmentation(args.pred))
    report = corpus_boundary_prf(golds, preds, macro=args.macro)
    _write_json(args.out, report.to_dict(), _meta(args))
    return 0


def cmd_stats(args) -> int:
    _require_inputs(args.lexicon, args.segmented)
    lexicon = read_lexicon(args.lexicon)
    segmented = read_segmentation(args.segmented)
    stats = occurrence_stats(lexicon, segmented)
    _write_json(args.out, stats.to_dict(), _meta(args))
    return 0


def cmd_dl(args) -> int:
    _require_inputs(args.segmented, args.lexicon)
    lexicon = read_lexicon(args.lexicon)
    segmented = read_segmentation(args.segmented)
    if args.alphabet == "generic":
        letters = sorted({c for line in segmented for tok in line for c in tok})
        alphabet = Alphabet.generic(tuple(letters))
    else:
        alphabet = Alphabet.from_kind(args.alphabet)
    report = description_length(segmented, lexicon, alphabet)
    _write_json(args.out, report.to_dict(), _meta(args))
    return 0


def cmd_coverage(args) -> int:
    _require_inputs(args.in_path, args.lexicon)
    fmt = sniff_format(args.in_path) if args.format == "auto" else args.format
    reader = read_fasta if fmt == "fasta" else read_plain
    corpus = reader(args.in_path, Alphabet.dna4(), on_invalid="abort")
    cfg = CoverageConfig(
        red_penalty=args.red_penalty,
        green_bonus=args.green_bonus,
        drop_remainder=args.drop_remainder,
    )
    if args.width > 0:
        corpus = window_corpus(corpus, args.width, drop_remainder=args.drop_remainder)
    lexicon = read_lexicon(args.lexicon)
    windows = list(corpus.sequences())
    report = coverage_report(windows, lexicon, STANDARD_GENETIC_CODE, cfg)
    _write_json(args.out_report, report.to_dict(), _meta(args))
    if args.out_hist:
        n = len(report.per_window)
        with open(args.out_hist, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# {_header(args)[0]}\n")
            fh.write("# bin_low\tbin_high\tcount\tfraction\n")
            for b, count in enumerate(report.histogram):
                fh.write(f"{b / 10:.1f}\t{(b + 1) / 10:.1f}\t{count}\t{count / n!r}\n")
    if args.out_annotated:
        with open(args.out_annotated, "w", encoding="utf-8", newline="\n") as fh:
            for win in windows:
                cov = coverage_segment(win.symbols, lexicon, STANDARD_GENETIC_CODE, cfg)
                fh.write(f">{win.id}\n{format_coverage(win.symbols, cov)}\n")
    return 0


def cmd_window(args) -> int:
    _require_inputs(args.in_path)
    corpus = _read_corpus(args)
    windowed = window_corpus(corpus, args.width, drop_remainder=args.drop_remainder)
    write_fasta(windowed, args.out)
    return 0


_COMMANDS = {
    "train": (cmd_train, ("out_lexicon", "out_log")),
    "segment": (cmd_segment, ("out",)),
    "eval": (cmd_eval, ("out",)),
    "stats": (cmd_stats, ("out",)),
    "dl": (cmd_dl, ("out",)),
    "coverage": (cmd_coverage, ("out_report", "out_hist", "out_annotated")),
    "window": (cmd_window, ("out",)),
}


def _cleanup_outputs(args, out_attrs) -> None:
    for attr in out_attrs:
        path = getattr(args, attr, None)
        if path and os.path.exists(path):
            try:
                os.unlink(path)
            except OSError:
                pass


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser, subparsers = _build_parser()
        args = parser.parse_args(argv)
        if args.config:
            overrides = _load_config(args.config)
            fresh_parser, fresh_subs = _build_parser()
            _apply_config(fresh_subs[args.cmd], overrides)
            args = fresh_parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        func, out_attrs = _COMMANDS[args.cmd]
        try:
            return func(args)
        except Exception:
            _cleanup_outputs(args, out_attrs)
            raise
    except UsageError as exc:
        print(f"softseg: usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"softseg: data error: {exc}", file=sys.stderr)
        return 2
    except SoftsegError as exc:
        print(f"softseg: internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001
        print(f"softseg: internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
