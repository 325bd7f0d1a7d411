"""Unsupervised word segmentation for symbol sequences.

Learns a word probability table from unsegmented sequences by
expectation-maximization over segmentation lattices, decodes
maximum-probability segmentations, and evaluates segmentations by boundary
F-score and description length. Includes protein structure-word gold
standards and DNA coverage scanning against a protein-word lexicon.
"""

__version__ = "0.1.0"

from .corpus import (
    Alphabet,
    Corpus,
    PairedRecord,
    Sequence,
    read_fasta,
    read_paired,
    read_plain,
    window,
    window_corpus,
    write_fasta,
    write_plain,
)
from .dna import (
    STANDARD_GENETIC_CODE,
    CoverageConfig,
    CoverageReport,
    CoverageSegmentation,
    GeneticCode,
    back_translate,
    coverage_report,
    coverage_segment,
    dna_roundtrip_corpus,
    format_coverage,
    translate,
)
from .errors import DataError, InternalError, SoftsegError
from .lexicon import (
    CandidateTable,
    FilterConfig,
    Lexicon,
    border_entropy,
    extract_candidates,
    filter_candidates,
    random_init,
    read_lexicon,
    uniform_init,
    write_lexicon,
)
from .metrics import (
    DLReport,
    EvalReport,
    OccurrenceStats,
    boundary_prf,
    corpus_boundary_prf,
    description_length,
    letter_share,
    occurrence_stats,
)
from .segmenter import (
    EMIteration,
    Segmentation,
    SegLattice,
    TrainConfig,
    em_train,
    enumerate_segmentations,
    forward_backward,
    read_segmentation,
    seg_log_prob,
    segment_corpus,
    viterbi_segment,
    write_segmentation,
)
from .structure import StructureWordTable, build_structure_lexicon, structure_segment
