"""Synthetic corpora with planted word inventories, for experiments and tests."""

import math
from typing import Iterable

from .corpus import Alphabet, Corpus, Sequence
from .dna import STANDARD_GENETIC_CODE, GeneticCode, back_translate
from .errors import DataError
from .lexicon import Lexicon
from .segmenter import Segmentation

DEFAULT_SYMBOLS = "abcdefghij"

# Residue letters whose codons all contain a C or a G. Pure A/T stop-codon
# filler can therefore never translate to a word built from these, which keeps
# planted DNA coverage close to its construction target.
SAFE_RESIDUES = "ACDEGHMPQRSTVW"


def zipf_words(
    rng,
    n_words: int = 50,
    min_len: int = 2,
    max_len: int = 6,
    symbols: str = DEFAULT_SYMBOLS,
    exponent: float = 1.0,
) -> dict[str, float]:
    """Distinct random words with Zipf-weighted probabilities summing to 1."""
    if n_words < 1:
        raise DataError("need at least one word")
    words: set[str] = set()
    while len(words) < n_words:
        length = rng.randint(min_len, max_len)
        words.add("".join(rng.choice(symbols) for _ in range(length)))
    ranked = sorted(words)
    rng.shuffle(ranked)
    weights = [1.0 / (r + 1) ** exponent for r in range(n_words)]
    z = math.fsum(weights)
    return {w: wt / z for w, wt in zip(ranked, weights)}


def sample_corpus(
    rng,
    word_probs: dict[str, float],
    n_seqs: int,
    min_words: int = 5,
    max_words: int = 15,
    alphabet: "Alphabet | None" = None,
    id_prefix: str = "syn",
) -> tuple[Corpus, list[Segmentation]]:
    """Concatenate sampled words into sequences; returns the gold cuts too."""
    words = sorted(word_probs)
    weights = [word_probs[w] for w in words]
    records = []
    golds = []
    for k in range(n_seqs):
        m = rng.randint(min_words, max_words)
        tokens = rng.choices(words, weights=weights, k=m)
        records.append(Sequence(f"{id_prefix}{k}", "".join(tokens)))
        golds.append(Segmentation.from_tokens(tokens))
    if alphabet is None:
        letters = sorted({c for w in words for c in w})
        alphabet = Alphabet.generic(tuple(letters))
    return Corpus(tuple(records), alphabet), golds


def planted_lexicon(
    rng, n_words: int = 30, min_len: int = 2, max_len: int = 6, exponent: float = 1.0
) -> Lexicon:
    """A protein-word lexicon over filler-safe residues, Zipf-weighted."""
    probs = zipf_words(rng, n_words, min_len, max_len, symbols=SAFE_RESIDUES, exponent=exponent)
    return Lexicon(dict(probs))


def plant_dna_windows(
    rng,
    lexicon: Lexicon,
    n_windows: int = 100,
    width: int = 500,
    word_letter_frac: float = 0.8,
    words_per_run: tuple[int, int] = (2, 6),
    code: GeneticCode = STANDARD_GENETIC_CODE,
    id_prefix: str = "win",
) -> list[Sequence]:
    """Fixed-width DNA windows built from back-translated words plus stop filler.

    Each window alternates runs of back-translated lexicon words with runs of
    stop codons sized to keep roughly ``word_letter_frac`` of the letters
    inside words. The final block is trimmed to the window width.
    """
    if not 0.0 < word_letter_frac < 1.0:
        raise DataError("word_letter_frac must be in (0, 1)")
    words = sorted(lexicon.probs)
    weights = [lexicon.probs[w] for w in words]
    stops = sorted(code.stop_codons)
    filler_ratio = (1.0 - word_letter_frac) / word_letter_frac
    out = []
    for k in range(n_windows):
        blocks: list[str] = []
        total = 0
        while total < width:
            run_nt = 0
            for _ in range(rng.randint(*words_per_run)):
                dna = back_translate(rng.choices(words, weights=weights)[0], rng, code)
                blocks.append(dna)
                run_nt += len(dna)
            filler_codons = max(1, round(run_nt * filler_ratio / 3.0))
            for _ in range(filler_codons):
                blocks.append(rng.choice(stops))
            total += run_nt + 3 * filler_codons
        out.append(Sequence(f"{id_prefix}{k}", "".join(blocks)[:width]))
    return out


def random_segmentations(
    rng, golds: Iterable[Segmentation]
) -> list[Segmentation]:
    """Baseline: per record, the same number of boundaries at random positions."""
    out = []
    for gold in golds:
        n = gold.length
        want = len(gold.boundaries())
        positions = list(range(1, n))
        rng.shuffle(positions)
        out.append(Segmentation.from_boundaries(n, positions[:want]) if n > 1 else gold)
    return out
