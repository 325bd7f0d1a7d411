"""Candidate word tables, border-entropy filtering, and probability lexicons.

A candidate table counts every substring up to a maximum length at every
position of the corpus (overlapping occurrences count). Filtering keeps a
candidate when it is frequent enough and when the symbols adjacent to its
occurrences are unpredictable enough (border entropy); single-symbol words
always survive so any sequence stays segmentable.
"""

import math
import logging
import random
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .corpus import Corpus
from .errors import DataError

_logger = logging.getLogger(__name__)

DEFAULT_FALLBACK_LOG_PROB = math.log(1e-9)

# Sentinel neighbor for occurrences touching a sequence edge. The empty string
# can never be a corpus symbol, so it is safe as a Counter key.
_EDGE = ""

PROB_SUM_TOL = 1e-9
READ_SUM_TOL = 1e-6


@dataclass
class CandidateTable:
    """Substring occurrence counts over one corpus."""

    counts: dict[str, int]
    max_len: int

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class FilterConfig:
    """Candidate filter knobs.

    ``min_border_entropy`` is in bits and applies to the smaller of the left
    and right border entropies; 0 disables the border criterion. When
    ``keep_singletons`` is set (the default), single-symbol words bypass both
    criteria.
    """

    min_count: int = 2
    min_border_entropy: float = 0.0
    keep_singletons: bool = True

    def __post_init__(self) -> None:
        if self.min_count < 1:
            raise DataError("min_count must be >= 1")
        if self.min_border_entropy < 0:
            raise DataError("min_border_entropy must be >= 0")


@dataclass
class Lexicon:
    """A word probability table, the trained model of this package.

    Probabilities lie in (0, 1] and sum to 1. ``fallback_log_prob`` is the
    finite log-probability charged for an out-of-vocabulary single symbol, so
    every sequence has at least one finite-probability segmentation. Treat
    instances as immutable once constructed.
    """

    probs: dict[str, float]
    counts: "dict[str, float] | None" = None
    max_len: int = 0
    fallback_log_prob: float = DEFAULT_FALLBACK_LOG_PROB

    def __post_init__(self) -> None:
        if self.max_len <= 0:
            self.max_len = max((len(w) for w in self.probs), default=1)
        self.validate()

    def __len__(self) -> int:
        return len(self.probs)

    @cached_property
    def log_probs(self) -> dict[str, float]:
        return {w: math.log(p) for w, p in self.probs.items()}

    def validate(self) -> None:
        if not self.probs:
            raise DataError("lexicon is empty")
        if not math.isfinite(self.fallback_log_prob):
            raise DataError("fallback_log_prob must be finite")
        for w, p in self.probs.items():
            if not w:
                raise DataError("lexicon contains an empty word")
            if len(w) > self.max_len:
                raise DataError(f"word {w!r} longer than max_len={self.max_len}")
            if not (0.0 < p <= 1.0):
                raise DataError(f"word {w!r} has probability {p!r} outside (0, 1]")
        total = math.fsum(self.probs.values())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise DataError(f"lexicon probabilities sum to {total!r}, not 1")


def extract_candidates(corpus: Corpus, max_len: int) -> CandidateTable:
    """Count every substring of length 1..max_len at every corpus position."""
    if max_len < 1:
        raise DataError("max_len must be >= 1")
    counts: Counter[str] = Counter()
    for seq in corpus.sequences():
        s = seq.symbols
        n = len(s)
        for i in range(n):
            top = min(max_len, n - i)
            for length in range(1, top + 1):
                counts[s[i : i + length]] += 1
    if not counts:
        raise DataError("cannot extract candidates from an empty corpus")
    return CandidateTable(dict(counts), max_len)


def entropy_bits(counts) -> float:
    """Shannon entropy in bits of an unnormalized count distribution."""
    total = sum(counts.values())
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts.values():
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def _neighbor_counts(word: str, corpus: Corpus) -> tuple[Counter, Counter]:
    left: Counter = Counter()
    right: Counter = Counter()
    for seq in corpus.sequences():
        s = seq.symbols
        start = 0
        while True:
            idx = s.find(word, start)
            if idx < 0:
                break
            left[s[idx - 1] if idx > 0 else _EDGE] += 1
            j = idx + len(word)
            right[s[j] if j < len(s) else _EDGE] += 1
            start = idx + 1
    return left, right


def border_entropy(word: str, corpus: Corpus) -> tuple[float, float]:
    """Entropies (bits) of the symbols immediately before/after each occurrence.

    Occurrences at a sequence edge contribute a distinguished edge marker.
    """
    left, right = _neighbor_counts(word, corpus)
    if not right:
        raise DataError(f"word {word!r} does not occur in the corpus")
    return entropy_bits(left), entropy_bits(right)


def _border_maps(corpus: Corpus, words: set[str], max_len: int) -> dict[str, tuple[Counter, Counter]]:
    """One-pass left/right neighbor counts for a whole candidate set."""
    maps: dict[str, tuple[Counter, Counter]] = {w: (Counter(), Counter()) for w in words}
    for seq in corpus.sequences():
        s = seq.symbols
        n = len(s)
        for i in range(n):
            top = min(max_len, n - i)
            for length in range(1, top + 1):
                pair = maps.get(s[i : i + length])
                if pair is None:
                    continue
                pair[0][s[i - 1] if i > 0 else _EDGE] += 1
                j = i + length
                pair[1][s[j] if j < n else _EDGE] += 1
    return maps


def filter_candidates(table: CandidateTable, corpus: Corpus, cfg: FilterConfig) -> CandidateTable:
    """Keep candidates passing the count and border-entropy thresholds."""
    exempt_singles = cfg.keep_singletons
    need_entropy = cfg.min_border_entropy > 0.0
    screened = {
        w
        for w, c in table.counts.items()
        if c >= cfg.min_count and not (exempt_singles and len(w) == 1)
    }
    maps = _border_maps(corpus, screened, table.max_len) if need_entropy else {}
    kept: dict[str, int] = {}
    for w, c in table.counts.items():
        if exempt_singles and len(w) == 1:
            kept[w] = c
            continue
        if c < cfg.min_count:
            continue
        if need_entropy:
            left, right = maps[w]
            if min(entropy_bits(left), entropy_bits(right)) < cfg.min_border_entropy:
                continue
        kept[w] = c
    if not kept:
        raise DataError("filter removed every candidate")
    return CandidateTable(kept, table.max_len)


def uniform_init(table: CandidateTable, fallback_log_prob: float = DEFAULT_FALLBACK_LOG_PROB) -> Lexicon:
    """Lexicon with equal probability for every candidate; counts are copied."""
    n = len(table.counts)
    if n == 0:
        raise DataError("cannot initialize from an empty candidate table")
    p = 1.0 / n
    return Lexicon(
        {w: p for w in table.counts},
        counts=dict(table.counts),
        max_len=table.max_len,
        fallback_log_prob=fallback_log_prob,
    )


def random_init(
    table: CandidateTable, seed: int, fallback_log_prob: float = DEFAULT_FALLBACK_LOG_PROB
) -> Lexicon:
    """Lexicon with seeded random positive probabilities normalized to 1."""
    if len(table.counts) == 0:
        raise DataError("cannot initialize from an empty candidate table")
    rng = random.Random(seed)
    raw = {w: rng.random() + 1e-9 for w in sorted(table.counts)}
    z = math.fsum(raw.values())
    return Lexicon(
        {w: v / z for w, v in raw.items()},
        counts=dict(table.counts),
        max_len=table.max_len,
        fallback_log_prob=fallback_log_prob,
    )


def write_lexicon(lexicon: Lexicon, path, header_lines=()) -> None:
    """Write TSV rows ``word <tab> probability [<tab> count]``.

    Rows are sorted by descending probability, then lexicographically, so the
    output is byte-stable. Floats are written with ``repr`` and round-trip
    exactly. ``header_lines`` are emitted first as ``#`` comments.
    """
    has_counts = lexicon.counts is not None
    rows = sorted(lexicon.probs.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for w, p in rows:
            if has_counts:
                fh.write(f"{w}\t{p!r}\t{lexicon.counts.get(w, 0)!r}\n")
            else:
                fh.write(f"{w}\t{p!r}\n")


def read_lexicon(
    path, renormalize: bool = False, fallback_log_prob: float = DEFAULT_FALLBACK_LOG_PROB
) -> Lexicon:
    """Read a lexicon TSV written by :func:`write_lexicon`.

    Raises on duplicate words or probabilities outside (0, 1]. If the
    probabilities sum more than 1e-6 away from 1, the file is rejected unless
    ``renormalize`` is set, in which case they are rescaled with a warning.
    """
    probs: dict[str, float] = {}
    counts: dict[str, float] = {}
    saw_counts = saw_bare = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise DataError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
            word = fields[0]
            if not word:
                raise DataError(f"{path}:{lineno}: empty word")
            if word in probs:
                raise DataError(f"{path}:{lineno}: duplicate word {word!r}")
            try:
                p = float(fields[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad probability {fields[1]!r}") from None
            if not (0.0 < p <= 1.0):
                raise DataError(f"{path}:{lineno}: probability {p!r} outside (0, 1]")
            probs[word] = p
            if len(fields) == 3:
                saw_counts = True
                counts[word] = float(fields[2])
            else:
                saw_bare = True
    if not probs:
        raise DataError(f"{path}: no lexicon rows")
    if saw_counts and saw_bare:
        raise DataError(f"{path}: count column present on some rows but not all")
    total = math.fsum(probs.values())
    if abs(total - 1.0) > READ_SUM_TOL:
        if not renormalize:
            raise DataError(f"{path}: probabilities sum to {total!r}; pass renormalize to rescale")
        _logger.warning("renormalizing lexicon %s (sum was %r)", path, total)
        probs = {w: p / total for w, p in probs.items()}
    return Lexicon(probs, counts=counts if saw_counts else None, fallback_log_prob=fallback_log_prob)
