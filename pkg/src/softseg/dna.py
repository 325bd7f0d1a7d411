"""DNA coverage scanning against a protein-word lexicon.

A DNA span is "green" when its in-frame translation (read from the span
start) is a stop-free lexicon word; everything else is covered by "red"
single-nucleotide spans. Membership is tested by translating and looking the
word up, which is equivalent to matching against the full set of
back-translations without materializing it. Each candidate span reads in its
own local frame; no global frame is imposed.
"""

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from .corpus import Alphabet, Corpus, Sequence
from .errors import DataError
from .lexicon import Lexicon
from .segmenter import TIE_EPS, Segmentation

STOP = "*"

_CODE_TABLE = {
    "TTT": "F", "TTC": "F", "TTA": "L", "TTG": "L",
    "CTT": "L", "CTC": "L", "CTA": "L", "CTG": "L",
    "ATT": "I", "ATC": "I", "ATA": "I", "ATG": "M",
    "GTT": "V", "GTC": "V", "GTA": "V", "GTG": "V",
    "TCT": "S", "TCC": "S", "TCA": "S", "TCG": "S",
    "CCT": "P", "CCC": "P", "CCA": "P", "CCG": "P",
    "ACT": "T", "ACC": "T", "ACA": "T", "ACG": "T",
    "GCT": "A", "GCC": "A", "GCA": "A", "GCG": "A",
    "TAT": "Y", "TAC": "Y", "TAA": STOP, "TAG": STOP,
    "CAT": "H", "CAC": "H", "CAA": "Q", "CAG": "Q",
    "AAT": "N", "AAC": "N", "AAA": "K", "AAG": "K",
    "GAT": "D", "GAC": "D", "GAA": "E", "GAG": "E",
    "TGT": "C", "TGC": "C", "TGA": STOP, "TGG": "W",
    "CGT": "R", "CGC": "R", "CGA": "R", "CGG": "R",
    "AGT": "S", "AGC": "S", "AGA": "R", "AGG": "R",
    "GGT": "G", "GGC": "G", "GGA": "G", "GGG": "G",
}


@dataclass(frozen=True)
class GeneticCode:
    """Codon-to-residue table covering all 64 codons; stops map to '*'."""

    codon_to_aa: Mapping[str, str]

    def __post_init__(self) -> None:
        if len(self.codon_to_aa) != 64:
            raise DataError(f"genetic code has {len(self.codon_to_aa)} codons, expected 64")
        for codon, aa in self.codon_to_aa.items():
            if len(codon) != 3 or any(c not in "ACGT" for c in codon):
                raise DataError(f"bad codon {codon!r}")
            if aa != STOP and (len(aa) != 1 or not aa.isalpha()):
                raise DataError(f"codon {codon!r} maps to bad residue {aa!r}")

    @property
    def stop_codons(self) -> frozenset:
        return frozenset(c for c, aa in self.codon_to_aa.items() if aa == STOP)

    @cached_property
    def codons_for(self) -> dict[str, tuple[str, ...]]:
        """Residue letter to its codons, stops excluded."""
        by_aa: dict[str, list[str]] = {}
        for codon, aa in sorted(self.codon_to_aa.items()):
            if aa != STOP:
                by_aa.setdefault(aa, []).append(codon)
        return {aa: tuple(cs) for aa, cs in by_aa.items()}


STANDARD_GENETIC_CODE = GeneticCode(dict(_CODE_TABLE))


def translate(dna: str, code: GeneticCode = STANDARD_GENETIC_CODE) -> "str | None":
    """In-frame translation of a DNA span; None if any codon is a stop."""
    if len(dna) % 3 != 0:
        raise DataError(f"span length {len(dna)} is not a multiple of 3")
    out = []
    for k in range(0, len(dna), 3):
        codon = dna[k : k + 3]
        aa = code.codon_to_aa.get(codon)
        if aa is None:
            raise DataError(f"invalid codon {codon!r}")
        if aa == STOP:
            return None
        out.append(aa)
    return "".join(out)


def back_translate(protein: str, rng, code: GeneticCode = STANDARD_GENETIC_CODE) -> str:
    """One DNA realization of a protein string, codons drawn with ``rng``."""
    codons = []
    for aa in protein:
        options = code.codons_for.get(aa)
        if not options:
            raise DataError(f"no codon encodes {aa!r}")
        codons.append(rng.choice(options))
    return "".join(codons)


@dataclass(frozen=True)
class CoverageConfig:
    """Scoring knobs for the green/red dynamic program.

    A red nucleotide costs ``red_penalty`` (log scale); a green span of k
    codons scores the word's log-probability plus ``3k * green_bonus``.
    ``drop_remainder`` excludes short trailing windows from reports.
    """

    red_penalty: float = math.log(1e-6)
    green_bonus: float = 0.0
    drop_remainder: bool = False


class CoverageSpan(NamedTuple):
    start: int
    end: int
    kind: str  # "green" | "red"
    token: str  # matched protein word, or the single nucleotide


@dataclass(frozen=True)
class CoverageSegmentation:
    """Alternating green/red cover of one DNA sequence."""

    spans: tuple[CoverageSpan, ...]

    @property
    def length(self) -> int:
        return self.spans[-1].end if self.spans else 0

    @property
    def green_letters(self) -> int:
        return sum(s.end - s.start for s in self.spans if s.kind == "green")

    @property
    def coverage_pct(self) -> float:
        return self.green_letters / self.length if self.length else 0.0


class _Cell(NamedTuple):
    score: float
    green: int
    first_green: bool
    first_len: int


def _better(cand: _Cell, incumbent: _Cell) -> bool:
    gap = cand.score - incumbent.score
    if gap > TIE_EPS:
        return True
    if gap < -TIE_EPS:
        return False
    if cand.green != incumbent.green:
        return cand.green > incumbent.green
    if cand.first_green != incumbent.first_green:
        return cand.first_green
    return cand.first_len > incumbent.first_len


def coverage_segment(
    dna: str,
    lexicon: Lexicon,
    code: GeneticCode = STANDARD_GENETIC_CODE,
    cfg: CoverageConfig = CoverageConfig(),
) -> CoverageSegmentation:
    """Best-scoring green/red decomposition of a DNA sequence.

    Suffix dynamic program: at each position either spend one red nucleotide
    or emit a green span of k codons whose stop-free translation is a lexicon
    word. Ties prefer more green letters, then a green first span, then a
    longer first span.
    """
    n = len(dna)
    if n == 0:
        raise DataError("cannot cover an empty sequence")
    bad = next((c for c in dna if c not in "ACGT"), None)
    if bad is not None:
        raise DataError(f"invalid nucleotide {bad!r}")
    log_probs = lexicon.log_probs
    max_codons = lexicon.max_len

    best: list = [None] * (n + 1)
    best[n] = _Cell(0.0, 0, False, 0)
    for i in range(n - 1, -1, -1):
        tail = best[i + 1]
        incumbent = _Cell(cfg.red_penalty + tail.score, tail.green, False, 1)
        protein = []
        for k in range(1, min(max_codons, (n - i) // 3) + 1):
            codon = dna[i + 3 * (k - 1) : i + 3 * k]
            aa = code.codon_to_aa[codon]
            if aa == STOP:
                break  # longer spans from i keep this stop in frame
            protein.append(aa)
            lp = log_probs.get("".join(protein))
            if lp is None:
                continue
            tail = best[i + 3 * k]
            cand = _Cell(lp + 3 * k * cfg.green_bonus + tail.score, 3 * k + tail.green, True, 3 * k)
            if _better(cand, incumbent):
                incumbent = cand
        best[i] = incumbent

    spans: list[CoverageSpan] = []
    i = 0
    while i < n:
        cell = best[i]
        j = i + cell.first_len
        if cell.first_green:
            word = translate(dna[i:j], code)
            spans.append(CoverageSpan(i, j, "green", word))
        else:
            spans.append(CoverageSpan(i, j, "red", dna[i:j]))
        i = j
    return CoverageSegmentation(tuple(spans))


@dataclass(frozen=True)
class CoverageReport:
    """Coverage over a set of windows plus a 10-bin histogram.

    Bins are closed on the left with width 0.1; coverage 1.0 falls in the
    last bin. Histogram counts sum to the number of windows reported.
    """

    coverage_pct: float
    window_width: int
    per_window: tuple[tuple[str, float], ...]
    histogram: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "coverage_pct": self.coverage_pct,
            "window_width": self.window_width,
            "per_window": [
                {"window_id": wid, "coverage_pct": pct} for wid, pct in self.per_window
            ],
            "histogram": list(self.histogram),
        }


def coverage_report(
    windows: Iterable[Sequence],
    lexicon: Lexicon,
    code: GeneticCode = STANDARD_GENETIC_CODE,
    cfg: CoverageConfig = CoverageConfig(),
) -> CoverageReport:
    """Per-window coverage percentages and their histogram."""
    windows = list(windows)
    if not windows:
        raise DataError("no windows to report on")
    width = max(len(w) for w in windows)
    if cfg.drop_remainder:
        windows = [w for w in windows if len(w) == width]
        if not windows:
            raise DataError("dropping remainders left no windows")
    per_window = []
    hist = [0] * 10
    green = total = 0
    for win in windows:
        cov = coverage_segment(win.symbols, lexicon, code, cfg)
        pct = cov.coverage_pct
        per_window.append((win.id, pct))
        hist[min(int(pct * 10), 9)] += 1
        green += cov.green_letters
        total += len(win)
    return CoverageReport(green / total, width, tuple(per_window), tuple(hist))


def format_coverage(dna: str, covseg: CoverageSegmentation) -> str:
    """Annotated one-line rendering: green spans as [DNA=WORD], reds lowercase.

    Adjacent red nucleotides are coalesced into one lowercase run for display;
    the underlying spans stay single-nucleotide.
    """
    parts: list[str] = []
    red_run: list[str] = []
    for span in covseg.spans:
        if span.kind == "red":
            red_run.append(span.token.lower())
        else:
            if red_run:
                parts.append("".join(red_run))
                red_run = []
            parts.append(f"[{dna[span.start:span.end]}={span.token}]")
    if red_run:
        parts.append("".join(red_run))
    return " ".join(parts)


def dna_roundtrip_corpus(
    dna_corpus: Corpus,
    lexicon: Lexicon,
    code: GeneticCode = STANDARD_GENETIC_CODE,
    cfg: CoverageConfig = CoverageConfig(),
) -> tuple[Corpus, list[Segmentation]]:
    """Translate maximal green runs back into protein sequences with gold cuts.

    Each maximal run of consecutive green spans becomes one protein sequence;
    the gold segmentation puts a token boundary at every word joint inside the
    run. All-red input yields an empty corpus.
    """
    records: list[Sequence] = []
    golds: list[Segmentation] = []
    for seq in dna_corpus.sequences():
        cov = coverage_segment(seq.symbols, lexicon, code, cfg)
        runs: list[list[str]] = [[]]
        for span in cov.spans:
            if span.kind == "green":
                runs[-1].append(span.token)
            elif runs[-1]:
                runs.append([])
        for k, words in enumerate(r for r in runs if r):
            records.append(Sequence(f"{seq.id}:run{k}", "".join(words)))
            golds.append(Segmentation.from_tokens(words))
    alphabet = Alphabet.amino20() if records else dna_corpus.alphabet
    return Corpus(tuple(records), alphabet), golds
