"""Gold segmentations from per-residue structure state strings.

A run of identical structure states defines one token, so boundaries sit
exactly where the state string changes. States are opaque characters; an
unassigned marker such as '-' is a state of its own.
"""

from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, PairedRecord
from .errors import DataError
from .lexicon import DEFAULT_FALLBACK_LOG_PROB, Lexicon
from .segmenter import Segmentation


@dataclass
class StructureWordTable:
    """Counts of structure-delimited tokens over a paired corpus."""

    counts: dict[str, int]

    @property
    def distinct(self) -> int:
        return len(self.counts)


def structure_segment(rec: PairedRecord) -> Segmentation:
    """Segment at every position where the structure state changes."""
    states = rec.structure_string
    lengths = []
    run = 1
    for prev, cur in zip(states, states[1:]):
        if cur == prev:
            run += 1
        else:
            lengths.append(run)
            run = 1
    lengths.append(run)
    return Segmentation.from_lengths(lengths)


def build_structure_lexicon(
    paired_corpus: Corpus, fallback_log_prob: float = DEFAULT_FALLBACK_LOG_PROB
) -> tuple[StructureWordTable, Lexicon]:
    """Count structure words and estimate their probabilities by count/total."""
    counts: Counter[str] = Counter()
    saw_paired = False
    for rec in paired_corpus:
        if not isinstance(rec, PairedRecord):
            raise DataError(f"record {rec.id!r} carries no structure string")
        saw_paired = True
        seg = structure_segment(rec)
        for tok in seg.tokens(rec.sequence.symbols):
            counts[tok] += 1
    if not saw_paired:
        raise DataError("paired corpus is empty")
    total = sum(counts.values())
    probs = {w: c / total for w, c in counts.items()}
    lexicon = Lexicon(
        probs,
        counts={w: float(c) for w, c in counts.items()},
        fallback_log_prob=fallback_log_prob,
    )
    return StructureWordTable(dict(counts)), lexicon
