"""Evaluation: boundary precision/recall/F, occurrence stats, description length.

Boundary scores compare internal boundary positions only; the sequence start
and end are present in every segmentation and would inflate agreement.
Description length treats a segmentation as a code: the codebook spells each
used word in raw letters, the corpus stream pays the Shannon cost of the
empirical token distribution.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence as Seq

from .corpus import Alphabet
from .errors import DataError
from .lexicon import Lexicon
from .segmenter import Segmentation

TokenLines = Seq[Seq[str]]


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f_score: float
    gold_boundaries: int
    predicted_boundaries: int
    correct_boundaries: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "gold_boundaries": self.gold_boundaries,
            "predicted_boundaries": self.predicted_boundaries,
            "correct_boundaries": self.correct_boundaries,
        }


@dataclass(frozen=True)
class OccurrenceStats:
    high_freq_letter_pct: float
    low_freq_letter_pct: float
    singleton_vocab_pct: float

    def to_dict(self) -> dict:
        return {
            "high_freq_letter_pct": self.high_freq_letter_pct,
            "low_freq_letter_pct": self.low_freq_letter_pct,
            "singleton_vocab_pct": self.singleton_vocab_pct,
        }


@dataclass(frozen=True)
class DLReport:
    codebook_bits: float
    corpus_bits: float
    total_bits: float
    codebook_fraction: float
    letter_baseline_bits: float
    unused_vocab_words: int

    def to_dict(self) -> dict:
        return {
            "codebook_bits": self.codebook_bits,
            "corpus_bits": self.corpus_bits,
            "total_bits": self.total_bits,
            "codebook_fraction": self.codebook_fraction,
            "letter_baseline_bits": self.letter_baseline_bits,
            "unused_vocab_words": self.unused_vocab_words,
        }


def _prf(gold: int, predicted: int, correct: int) -> tuple[float, float, float]:
    precision = correct / predicted if predicted > 0 else 0.0
    recall = correct / gold if gold > 0 else 0.0
    f = 2.0 * recall * precision / (recall + precision) if recall + precision > 0 else 0.0
    return precision, recall, f


def boundary_prf(gold: Segmentation, predicted: Segmentation) -> EvalReport:
    """Boundary precision/recall/F of a predicted segmentation against gold."""
    if gold.length != predicted.length:
        raise DataError(
            f"segmentations cover different lengths: {gold.length} vs {predicted.length}"
        )
    gb = gold.boundaries()
    pb = predicted.boundaries()
    correct = len(gb & pb)
    precision, recall, f = _prf(len(gb), len(pb), correct)
    return EvalReport(precision, recall, f, len(gb), len(pb), correct)


def corpus_boundary_prf(
    golds: Seq[Segmentation], predictions: Seq[Segmentation], macro: bool = False
) -> EvalReport:
    """Corpus-level boundary scores.

    Micro-averaging (the default) pools boundary counts over all records
    before dividing. ``macro`` instead averages the per-record precision,
    recall, and F values; the count fields still hold pooled totals.
    """
    if len(golds) != len(predictions):
        raise DataError(f"{len(golds)} gold records vs {len(predictions)} predictions")
    if not golds:
        raise DataError("nothing to evaluate")
    reports = [boundary_prf(g, p) for g, p in zip(golds, predictions)]
    gold = sum(r.gold_boundaries for r in reports)
    pred = sum(r.predicted_boundaries for r in reports)
    correct = sum(r.correct_boundaries for r in reports)
    if macro:
        n = len(reports)
        return EvalReport(
            sum(r.precision for r in reports) / n,
            sum(r.recall for r in reports) / n,
            sum(r.f_score for r in reports) / n,
            gold,
            pred,
            correct,
        )
    precision, recall, f = _prf(gold, pred, correct)
    return EvalReport(precision, recall, f, gold, pred, correct)


def letter_share(segmented: TokenLines, words) -> float:
    """Fraction of all letters lying inside tokens drawn from ``words``."""
    wanted = set(words)
    total = hit = 0
    for line in segmented:
        for tok in line:
            total += len(tok)
            if tok in wanted:
                hit += len(tok)
    if total == 0:
        raise DataError("segmented corpus has no tokens")
    return hit / total


def occurrence_stats(lexicon: Lexicon, segmented: TokenLines) -> OccurrenceStats:
    """Frequency-distribution statistics of a segmentation against a vocabulary.

    Vocabulary words are ranked by their token frequency in the segmented
    corpus (ties broken lexicographically). The high-frequency set is the top
    10 percent of the vocabulary by rank; the low-frequency set is the words
    used exactly once. Tokens not in the lexicon (fallback symbols) count as
    vocabulary items too, so letter shares over a full frequency partition
    sum to 1.
    """
    if lexicon.counts is None:
        raise DataError("occurrence stats need a lexicon with counts")
    freq: Counter[str] = Counter()
    for line in segmented:
        for tok in line:
            freq[tok] += 1
    if not freq:
        raise DataError("segmented corpus has no tokens")
    vocab = set(lexicon.probs) | set(freq)
    ranked = sorted(vocab, key=lambda w: (-freq[w], w))
    top_k = math.ceil(0.10 * len(ranked))
    high = set(ranked[:top_k])
    singles = {w for w in vocab if freq[w] == 1}
    return OccurrenceStats(
        high_freq_letter_pct=letter_share(segmented, high),
        low_freq_letter_pct=letter_share(segmented, singles),
        singleton_vocab_pct=len(singles) / len(vocab),
    )


def description_length(segmented: TokenLines, lexicon: Lexicon, alphabet: Alphabet) -> DLReport:
    """Two-part code length of a segmentation, in bits.

    Codebook: every distinct token used is spelled once in raw letters at
    log2(alphabet size) bits per letter. Corpus: each token occurrence costs
    -log2 of its empirical frequency in this segmentation. The letter baseline
    (the corpus coded letter by letter at its empirical letter entropy, no
    codebook) is reported for comparison.
    """
    freq: Counter[str] = Counter()
    letters: Counter[str] = Counter()
    for line in segmented:
        for tok in line:
            if tok not in lexicon.probs:
                if len(tok) != 1 or tok not in alphabet:
                    raise DataError(f"token {tok!r} is neither a lexicon word nor a fallback symbol")
            freq[tok] += 1
            letters.update(tok)
    if not freq:
        raise DataError("segmented corpus has no tokens")

    bits_per_letter = math.log2(len(alphabet))
    codebook_bits = sum(len(w) for w in freq) * bits_per_letter

    n_tokens = sum(freq.values())
    corpus_bits = 0.0
    for c in freq.values():
        corpus_bits += c * -math.log2(c / n_tokens)

    n_letters = sum(letters.values())
    baseline_bits = 0.0
    for c in letters.values():
        baseline_bits += c * -math.log2(c / n_letters)

    total_bits = codebook_bits + corpus_bits
    return DLReport(
        codebook_bits=codebook_bits,
        corpus_bits=corpus_bits,
        total_bits=total_bits,
        codebook_fraction=codebook_bits / total_bits,
        letter_baseline_bits=baseline_bits,
        unused_vocab_words=sum(1 for w in lexicon.probs if w not in freq),
    )
