"""Unigram segmentation: scoring, Viterbi decoding, lattice expectations, EM.

A segmentation's probability is the product of its token probabilities. All
arithmetic here is in log space; corpus-scale products underflow otherwise.
Decoding and training only ever place tokens that are lexicon words or
single-symbol fallbacks, so every sequence has a finite-score analysis.

Tie-breaking is total so decoding is deterministic: among segmentations whose
log-probabilities are within ``TIE_EPS``, prefer fewer tokens, then the one
whose first differing token is longer (leftmost-longest).
"""

import math
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterable, NamedTuple

from .corpus import Corpus
from .errors import DataError
from .lexicon import Lexicon

NEG_INF = float("-inf")

# Score gap below which two analyses are treated as tied. Genuine ties (same
# token multiset in a different order) land within float rounding of each
# other; distinct products essentially never do.
TIE_EPS = 1e-10

ENUM_MAX_LEN = 20

TRAIN_MODES = ("soft", "hard")


@dataclass(frozen=True)
class Segmentation:
    """Contiguous, exhaustive spans over one sequence.

    Spans are half-open ``(start, end)`` intervals; the equivalent boundary
    view is the set of span ends except the final one.
    """

    spans: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.spans:
            raise DataError("a segmentation needs at least one span")
        if self.spans[0][0] != 0:
            raise DataError("first span must start at 0")
        prev_end = 0
        for start, end in self.spans:
            if start != prev_end:
                raise DataError(f"span ({start}, {end}) is not contiguous")
            if end <= start:
                raise DataError(f"span ({start}, {end}) is empty")
            prev_end = end

    @classmethod
    def from_lengths(cls, lengths: Iterable[int]) -> "Segmentation":
        spans = []
        pos = 0
        for n in lengths:
            spans.append((pos, pos + n))
            pos += n
        return cls(tuple(spans))

    @classmethod
    def from_boundaries(cls, length: int, boundaries: Iterable[int]) -> "Segmentation":
        cuts = sorted(set(boundaries))
        if any(b <= 0 or b >= length for b in cuts):
            raise DataError("boundaries must be internal positions")
        edges = [0] + cuts + [length]
        return cls(tuple(zip(edges, edges[1:])))

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Segmentation":
        return cls.from_lengths(len(t) for t in tokens)

    @property
    def length(self) -> int:
        return self.spans[-1][1]

    def boundaries(self) -> frozenset:
        """Internal boundary positions (sequence start and end excluded)."""
        return frozenset(end for _, end in self.spans[:-1])

    def tokens(self, symbols: str) -> list[str]:
        if len(symbols) != self.length:
            raise DataError(f"segmentation covers {self.length} symbols, text has {len(symbols)}")
        return [symbols[i:j] for i, j in self.spans]


@dataclass(frozen=True)
class SegLattice:
    """Forward/backward log-sums over all segmentations of one sequence."""

    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    seq_log_marginal: float


@dataclass(frozen=True)
class TrainConfig:
    """EM training knobs.

    ``max_len`` caps candidate word length during extraction; lattices use the
    lexicon's own ``max_len``. ``tol`` is the convergence threshold on the
    largest absolute word-probability change between iterations. Words whose
    probability falls below ``prune_below`` are dropped (with renormalization)
    to keep the vocabulary finite.
    """

    max_len: int = 9
    mode: str = "soft"
    max_iters: int = 100
    tol: float = 1e-6
    prune_below: float = 1e-12
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in TRAIN_MODES:
            raise DataError(f"unknown training mode {self.mode!r}")
        if self.max_len < 1:
            raise DataError("max_len must be >= 1")
        if self.max_iters < 1:
            raise DataError("max_iters must be >= 1")
        if not self.tol > 0:
            raise DataError("tol must be > 0")
        if self.prune_below < 0:
            raise DataError("prune_below must be >= 0")


class EMIteration(NamedTuple):
    iteration: int
    log_likelihood: float
    vocab_size: int
    prob_sum: float


def seg_log_prob(text: str, segmentation: Segmentation, lexicon: Lexicon) -> float:
    """Log-probability of one segmentation: the sum of token log-probabilities.

    Out-of-vocabulary single symbols cost the lexicon's fallback; any longer
    out-of-vocabulary token makes the whole analysis impossible (-inf).
    """
    if segmentation.length != len(text):
        raise DataError(
            f"segmentation covers {segmentation.length} symbols, text has {len(text)}"
        )
    log_probs = lexicon.log_probs
    total = 0.0
    for i, j in segmentation.spans:
        lp = log_probs.get(text[i:j])
        if lp is None:
            if j - i > 1:
                return NEG_INF
            lp = lexicon.fallback_log_prob
        total += lp
    return total


class _Best(NamedTuple):
    score: float
    ntokens: int
    first_len: int


def viterbi_segment(text: str, lexicon: Lexicon) -> tuple[Segmentation, float]:
    """Highest-probability segmentation under the lexicon.

    Dynamic program over suffixes: the best analysis of ``text[i:]`` extends
    the best analyses of shorter suffixes by one token (a lexicon word of
    length <= max_len, or a fallback single symbol). The suffix orientation
    makes the leftmost-longest tie-break a local comparison on the first
    token length.
    """
    n = len(text)
    if n == 0:
        raise DataError("cannot segment an empty sequence")
    log_probs = lexicon.log_probs
    fallback = lexicon.fallback_log_prob
    max_len = lexicon.max_len
    best: list = [None] * (n + 1)
    best[n] = _Best(0.0, 0, 0)
    for i in range(n - 1, -1, -1):
        incumbent = None
        top = min(max_len, n - i)
        for length in range(1, top + 1):
            lp = log_probs.get(text[i : i + length])
            if lp is None:
                if length > 1:
                    continue
                lp = fallback
            tail = best[i + length]
            score = lp + tail.score
            ntokens = tail.ntokens + 1
            if incumbent is None:
                incumbent = _Best(score, ntokens, length)
                continue
            gap = score - incumbent.score
            if gap > TIE_EPS:
                incumbent = _Best(score, ntokens, length)
            elif gap >= -TIE_EPS and (
                ntokens < incumbent.ntokens
                or (ntokens == incumbent.ntokens and length > incumbent.first_len)
            ):
                incumbent = _Best(score, ntokens, length)
        best[i] = incumbent
    spans = []
    i = 0
    while i < n:
        length = best[i].first_len
        spans.append((i, i + length))
        i += length
    return Segmentation(tuple(spans)), best[0].score


def enumerate_segmentations(text: str, lexicon: Lexicon) -> list[tuple[Segmentation, float]]:
    """Score all 2^(n-1) segmentations; brute-force oracle for short sequences."""
    n = len(text)
    if n == 0:
        raise DataError("cannot segment an empty sequence")
    if n > ENUM_MAX_LEN:
        raise DataError(f"sequence of length {n} exceeds enumeration limit {ENUM_MAX_LEN}")
    out = []
    for mask in range(1 << (n - 1)):
        edges = [0] + [k + 1 for k in range(n - 1) if (mask >> k) & 1] + [n]
        seg = Segmentation(tuple(zip(edges, edges[1:])))
        out.append((seg, seg_log_prob(text, seg, lexicon)))
    return out


def _logsumexp(terms: list) -> float:
    if not terms:
        return NEG_INF
    m = max(terms)
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(sum(math.exp(t - m) for t in terms))


def forward_backward(text: str, lexicon: Lexicon) -> tuple[SegLattice, dict[str, float]]:
    """Lattice log-sums and expected token counts over all segmentations.

    ``alpha[j]`` sums over segmentations of ``text[:j]``, ``beta[i]`` over
    segmentations of ``text[i:]``. The expected count of a word is the sum of
    posterior probabilities of the spans where it occurs, so the counts of
    all words weighted by their lengths add up to ``len(text)``.
    """
    n = len(text)
    if n == 0:
        raise DataError("cannot build a lattice for an empty sequence")
    log_probs = lexicon.log_probs
    fallback = lexicon.fallback_log_prob
    max_len = lexicon.max_len

    alpha = [NEG_INF] * (n + 1)
    alpha[0] = 0.0
    for j in range(1, n + 1):
        terms = []
        for length in range(1, min(max_len, j) + 1):
            i = j - length
            a = alpha[i]
            if a == NEG_INF:
                continue
            lp = log_probs.get(text[i:j])
            if lp is None:
                if length > 1:
                    continue
                lp = fallback
            terms.append(a + lp)
        alpha[j] = _logsumexp(terms)

    beta = [NEG_INF] * (n + 1)
    beta[n] = 0.0
    for i in range(n - 1, -1, -1):
        terms = []
        for length in range(1, min(max_len, n - i) + 1):
            b = beta[i + length]
            if b == NEG_INF:
                continue
            lp = log_probs.get(text[i : i + length])
            if lp is None:
                if length > 1:
                    continue
                lp = fallback
            terms.append(lp + b)
        beta[i] = _logsumexp(terms)

    marginal = alpha[n]
    if marginal == NEG_INF:
        raise DataError("sequence has no finite-probability segmentation")

    counts: dict[str, float] = {}
    for i in range(n):
        a = alpha[i]
        if a == NEG_INF:
            continue
        top = min(max_len, n - i)
        for length in range(1, top + 1):
            j = i + length
            b = beta[j]
            if b == NEG_INF:
                continue
            w = text[i:j]
            lp = log_probs.get(w)
            if lp is None:
                if length > 1:
                    continue
                lp = fallback
            c = math.exp(a + lp + b - marginal)
            counts[w] = counts.get(w, 0.0) + c
    return SegLattice(tuple(alpha), tuple(beta), marginal), counts


def _estep_chunk(payload) -> list:
    """Per-sequence (log_likelihood, counts) pairs for one chunk of texts.

    Results are per sequence, never pre-merged, so the caller can accumulate
    them in corpus order and get bit-identical totals for any chunking.
    """
    texts, probs, fallback, max_len, mode = payload
    lexicon = Lexicon(probs, max_len=max_len, fallback_log_prob=fallback)
    out = []
    for text in texts:
        if mode == "soft":
            lattice, counts = forward_backward(text, lexicon)
            out.append((lattice.seq_log_marginal, counts))
        else:
            seg, score = viterbi_segment(text, lexicon)
            counts = {}
            for tok in seg.tokens(text):
                counts[tok] = counts.get(tok, 0.0) + 1.0
            out.append((score, counts))
    return out


def _chunked(items: list, n_chunks: int) -> list:
    size = (len(items) + n_chunks - 1) // n_chunks
    return [items[k : k + size] for k in range(0, len(items), size)]


def em_train(
    corpus: Corpus, init: Lexicon, cfg: TrainConfig, threads: int = 1
) -> tuple[Lexicon, list[EMIteration]]:
    """Train word probabilities by EM.

    Soft mode accumulates lattice expected counts over every segmentation of
    every sequence; hard mode recounts tokens of the single best (Viterbi)
    segmentation instead. Each iteration logs the corpus log-likelihood under
    the lexicon that produced the counts, the new vocabulary size, and the new
    probability sum. Stops when the largest word-probability change is at most
    ``cfg.tol`` or after ``cfg.max_iters`` iterations.

    Results are independent of ``threads``; expected counts merge per sequence
    in corpus order.
    """
    texts = [seq.symbols for seq in corpus.sequences()]
    if not texts:
        raise DataError("cannot train on an empty corpus")
    lexicon = init
    history: list[EMIteration] = []
    pool = Pool(threads) if threads > 1 else None
    try:
        for it in range(1, cfg.max_iters + 1):
            payloads = [
                (chunk, lexicon.probs, lexicon.fallback_log_prob, lexicon.max_len, cfg.mode)
                for chunk in _chunked(texts, threads if threads > 1 else 1)
            ]
            if pool is not None:
                chunk_results = pool.map(_estep_chunk, payloads)
            else:
                chunk_results = [_estep_chunk(p) for p in payloads]

            lls = []
            totals: dict[str, float] = {}
            for chunk in chunk_results:
                for ll, counts in chunk:
                    lls.append(ll)
                    for w, c in counts.items():
                        totals[w] = totals.get(w, 0.0) + c
            log_likelihood = math.fsum(lls)

            grand = math.fsum(totals.values())
            probs = {w: c / grand for w, c in totals.items() if c > 0.0}
            if cfg.prune_below > 0.0:
                kept = {w: p for w, p in probs.items() if p >= cfg.prune_below}
                if kept and len(kept) < len(probs):
                    z = math.fsum(kept.values())
                    probs = {w: p / z for w, p in kept.items()}

            delta = 0.0
            for w, p in probs.items():
                d = abs(p - lexicon.probs.get(w, 0.0))
                if d > delta:
                    delta = d
            for w, p in lexicon.probs.items():
                if w not in probs and p > delta:
                    delta = p

            lexicon = Lexicon(
                probs,
                counts={w: totals[w] for w in probs},
                max_len=lexicon.max_len,
                fallback_log_prob=lexicon.fallback_log_prob,
            )
            history.append(
                EMIteration(it, log_likelihood, len(probs), math.fsum(probs.values()))
            )
            if delta <= cfg.tol:
                break
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return lexicon, history


def _decode_chunk(payload) -> list:
    texts, probs, fallback, max_len = payload
    lexicon = Lexicon(probs, max_len=max_len, fallback_log_prob=fallback)
    return [viterbi_segment(text, lexicon)[0] for text in texts]


def segment_corpus(corpus: Corpus, lexicon: Lexicon, threads: int = 1) -> list[Segmentation]:
    """Viterbi-decode every sequence; deterministic for a fixed lexicon."""
    texts = [seq.symbols for seq in corpus.sequences()]
    if threads > 1 and len(texts) > 1:
        payloads = [
            (chunk, lexicon.probs, lexicon.fallback_log_prob, lexicon.max_len)
            for chunk in _chunked(texts, threads)
        ]
        with Pool(threads) as pool:
            chunks = pool.map(_decode_chunk, payloads)
        return [seg for chunk in chunks for seg in chunk]
    return [viterbi_segment(text, lexicon)[0] for text in texts]


def write_segmentation(path, token_lines: Iterable[Iterable[str]], header_lines=()) -> None:
    """Write tokens joined by single spaces, one sequence per line, LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for tokens in token_lines:
            fh.write(" ".join(tokens) + "\n")


def read_segmentation(path) -> list[list[str]]:
    """Read a segmentation file back into token lists; '#' lines are comments."""
    out: list[list[str]] = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            out.append(line.split(" "))
    if not out:
        raise DataError(f"{path}: no segmented sequences")
    return out
