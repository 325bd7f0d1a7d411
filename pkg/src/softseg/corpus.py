"""Sequence corpora: alphabets, plain/FASTA/paired-record readers, windowing.

All readers uppercase-fold sequence text and validate it against an alphabet.
Records whose sequence contains a symbol outside the alphabet are handled per
an ``on_invalid`` policy: ``"drop"`` skips the record and counts it,
``"abort"`` raises :class:`DataError`.
"""

from dataclasses import dataclass
from typing import Iterator, Union

from .errors import DataError

AMINO20 = "ACDEFGHIKLMNPQRSTVWY"
DNA4 = "ACGT"

ALPHABET_KINDS = ("generic", "amino20", "dna4")
INVALID_POLICIES = ("drop", "abort")


def _check_policy(on_invalid: str) -> None:
    if on_invalid not in INVALID_POLICIES:
        raise DataError(f"unknown on_invalid policy {on_invalid!r}")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of single-character symbols a corpus is written in."""

    symbols: tuple[str, ...]
    kind: str = "generic"

    def __post_init__(self) -> None:
        if self.kind not in ALPHABET_KINDS:
            raise DataError(f"unknown alphabet kind {self.kind!r}")
        if len(self.symbols) < 2:
            raise DataError("an alphabet needs at least 2 symbols")
        if any(len(s) != 1 for s in self.symbols):
            raise DataError("alphabet symbols must be single characters")
        if len(set(self.symbols)) != len(self.symbols):
            raise DataError("alphabet symbols must be unique")
        if self.kind == "amino20" and "".join(self.symbols) != AMINO20:
            raise DataError("amino20 must contain exactly the 20 standard residue letters")
        if self.kind == "dna4" and "".join(self.symbols) != DNA4:
            raise DataError("dna4 must contain exactly A, C, G, T")
        object.__setattr__(self, "_symbol_set", frozenset(self.symbols))

    def __contains__(self, ch: str) -> bool:
        return ch in self._symbol_set  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def generic(cls, symbols) -> "Alphabet":
        return cls(tuple(symbols), "generic")

    @classmethod
    def amino20(cls) -> "Alphabet":
        return cls(tuple(AMINO20), "amino20")

    @classmethod
    def dna4(cls) -> "Alphabet":
        return cls(tuple(DNA4), "dna4")

    @classmethod
    def from_kind(cls, kind: str, symbols: str = "") -> "Alphabet":
        if kind == "amino20":
            return cls.amino20()
        if kind == "dna4":
            return cls.dna4()
        return cls.generic(tuple(sorted(set(symbols))))


@dataclass(frozen=True)
class Sequence:
    """One non-empty symbol sequence with a stable id."""

    id: str
    symbols: str

    def __post_init__(self) -> None:
        if not self.symbols:
            raise DataError(f"sequence {self.id!r} is empty")

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class PairedRecord:
    """A sequence aligned position-by-position with an annotation string.

    The annotation is typically a secondary-structure state string; states are
    opaque single characters and only state-change positions matter downstream.
    """

    id: str
    sequence: Sequence
    structure_string: str

    def __post_init__(self) -> None:
        if len(self.structure_string) != len(self.sequence):
            raise DataError(
                f"record {self.id!r}: structure length {len(self.structure_string)}"
                f" != sequence length {len(self.sequence)}"
            )


Record = Union[Sequence, PairedRecord]


@dataclass(frozen=True)
class Corpus:
    """Immutable collection of records sharing one alphabet.

    ``n_skipped_empty`` and ``n_dropped`` report lines/records discarded while
    reading (empty after normalization, or containing out-of-alphabet symbols
    under the ``"drop"`` policy).
    """

    records: tuple[Record, ...]
    alphabet: Alphabet
    n_skipped_empty: int = 0
    n_dropped: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.records)

    def sequences(self) -> Iterator[Sequence]:
        for rec in self.records:
            yield rec.sequence if isinstance(rec, PairedRecord) else rec

    def total_symbols(self) -> int:
        return sum(len(seq) for seq in self.sequences())

    def validate(self) -> None:
        if not self.records:
            raise DataError("corpus has no records")
        for seq in self.sequences():
            bad = _first_invalid(seq.symbols, self.alphabet)
            if bad is not None:
                raise DataError(f"sequence {seq.id!r} contains {bad!r} outside the alphabet")


def _normalize(line: str) -> str:
    """Strip all whitespace and uppercase-fold."""
    return "".join(line.split()).upper()


def _first_invalid(symbols: str, alphabet: Alphabet) -> "str | None":
    for ch in symbols:
        if ch not in alphabet:
            return ch
    return None


def read_plain(path, alphabet: Alphabet, on_invalid: str = "drop") -> Corpus:
    """Read a corpus from plain text, one sequence per line."""
    _check_policy(on_invalid)
    records: list[Sequence] = []
    empty = dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            symbols = _normalize(raw)
            if not symbols:
                empty += 1
                continue
            bad = _first_invalid(symbols, alphabet)
            if bad is not None:
                if on_invalid == "abort":
                    raise DataError(f"{path}:{lineno}: symbol {bad!r} not in alphabet")
                dropped += 1
                continue
            records.append(Sequence(f"line{lineno}", symbols))
    if not records:
        raise DataError(f"{path}: no usable sequences")
    return Corpus(tuple(records), alphabet, empty, dropped)


def write_plain(corpus: Corpus, path) -> None:
    """Write one sequence per line, LF endings; inverse of :func:`read_plain`."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for seq in corpus.sequences():
            fh.write(seq.symbols + "\n")


def read_fasta(path, alphabet: Alphabet, on_invalid: str = "drop") -> Corpus:
    """Read a FASTA file; record id is the header text up to the first whitespace."""
    _check_policy(on_invalid)
    records: list[Sequence] = []
    empty = dropped = 0
    header: "str | None" = None
    parts: list[str] = []

    def flush() -> None:
        nonlocal empty, dropped
        if header is None:
            return
        symbols = "".join(parts)
        if not symbols:
            empty += 1
            return
        bad = _first_invalid(symbols, alphabet)
        if bad is not None:
            if on_invalid == "abort":
                raise DataError(f"{path}: record {header!r}: symbol {bad!r} not in alphabet")
            dropped += 1
            return
        records.append(Sequence(header, symbols))

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if line.startswith(">"):
                flush()
                fields = line[1:].split()
                if not fields:
                    raise DataError(f"{path}:{lineno}: FASTA header has no id")
                header = fields[0]
                parts = []
            else:
                if header is None:
                    if line.strip():
                        raise DataError(f"{path}:{lineno}: sequence data before first '>' header")
                    continue
                parts.append(_normalize(line))
    flush()
    if header is None:
        raise DataError(f"{path}: no FASTA records found")
    if not records:
        raise DataError(f"{path}: no usable sequences")
    return Corpus(tuple(records), alphabet, empty, dropped)


def write_fasta(corpus: Corpus, path, wrap: int = 0) -> None:
    """Write records as FASTA; ``wrap`` > 0 wraps sequence lines at that width."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for seq in corpus.sequences():
            fh.write(f">{seq.id}\n")
            if wrap > 0:
                for off in range(0, len(seq), wrap):
                    fh.write(seq.symbols[off : off + wrap] + "\n")
            else:
                fh.write(seq.symbols + "\n")


def read_paired(
    path,
    alphabet: "Alphabet | None" = None,
    structure_states: "str | None" = None,
    on_invalid: str = "drop",
) -> Corpus:
    """Read repeating 3-line records: id, sequence, structure string.

    Sequence and structure must have equal lengths; a mismatch aborts with the
    record id. ``structure_states``, when given, is an allowlist of permitted
    state characters; by default any non-whitespace character is a state.
    """
    _check_policy(on_invalid)
    if alphabet is None:
        alphabet = Alphabet.amino20()
    with open(path, encoding="utf-8") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if len(rows) % 3 != 0:
        raise DataError(f"{path}: paired file must hold repeating id/sequence/structure line triples")
    allowed = set(structure_states) if structure_states is not None else None
    records: list[PairedRecord] = []
    dropped = 0
    for k in range(0, len(rows), 3):
        rid, seq_row, struct_row = rows[k : k + 3]
        symbols = seq_row.upper()
        bad = _first_invalid(symbols, alphabet)
        if bad is not None:
            if on_invalid == "abort":
                raise DataError(f"{path}: record {rid!r}: symbol {bad!r} not in alphabet")
            dropped += 1
            continue
        if allowed is not None:
            for ch in struct_row:
                if ch not in allowed:
                    raise DataError(f"{path}: record {rid!r}: unknown structure state {ch!r}")
        records.append(PairedRecord(rid, Sequence(rid, symbols), struct_row))
    if not records:
        raise DataError(f"{path}: no usable paired records")
    return Corpus(tuple(records), alphabet, 0, dropped)


def window(seq: Sequence, width: int) -> list[Sequence]:
    """Cut a sequence into consecutive non-overlapping windows of ``width``.

    A final window shorter than ``width`` is emitted with a ``:rem`` id suffix
    so consumers can drop it explicitly. Window ids carry the window index and
    symbol offset, e.g. ``chr1:w3@1500``.
    """
    if width < 1:
        raise DataError("window width must be >= 1")
    out: list[Sequence] = []
    for k, off in enumerate(range(0, len(seq), width)):
        chunk = seq.symbols[off : off + width]
        wid = f"{seq.id}:w{k}@{off}"
        if len(chunk) < width:
            wid += ":rem"
        out.append(Sequence(wid, chunk))
    return out


def window_corpus(corpus: Corpus, width: int, drop_remainder: bool = False) -> Corpus:
    """Window every record of a corpus; optionally drop remainder windows."""
    wins: list[Sequence] = []
    dropped = 0
    for seq in corpus.sequences():
        for win in window(seq, width):
            if drop_remainder and len(win) < width:
                dropped += 1
                continue
            wins.append(win)
    if not wins:
        raise DataError("windowing left no sequences")
    return Corpus(tuple(wins), corpus.alphabet, 0, dropped)


def sniff_format(path) -> str:
    """Guess "fasta" vs "plain" from the first non-blank character."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s:
                return "fasta" if s.startswith(">") else "plain"
    raise DataError(f"{path}: file is empty")


def sniff_alphabet(path, fmt: str = "plain") -> Alphabet:
    """Build a generic alphabet from the distinct symbols in a corpus file."""
    chars: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if fmt == "fasta" and line.startswith(">"):
                continue
            chars.update(_normalize(line))
    if len(chars) < 2:
        raise DataError(f"{path}: fewer than 2 distinct symbols")
    return Alphabet.generic(tuple(sorted(chars)))
