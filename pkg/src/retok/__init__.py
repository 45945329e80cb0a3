"""retok: canonical and non-canonical BPE tokenizations of text.

Load a BPE tokenizer from vocab.json + merges.txt, encode canonically, count
and uniformly sample alternative segmentations, apply named alternative
schemes (character-level, BPE-dropout, right-aligned digit grouping), generate
and grade orthography probe tasks, and render instruction-tuning data formats.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    GrammarProviderError,
    NoSegmentationError,
    RetokError,
    SftFormatError,
    TokenizerFileError,
    UncoverableTextError,
    UnknownTokenIdError,
)
from .metrics import (
    MetricReport,
    grammaticality_score,
    load_probe_words,
    load_wordlist,
    retention,
    spelling_score,
)
from .pretokenize import PretokConfig, PretokenSpan, pretokenize
from .schemes import (
    GranularityRecord,
    SchemeConfig,
    apply_scheme,
    bucket_by_ratio,
    char_tokenize,
    digits_right_encode,
    dropout_encode,
    length_ratio,
)
from .segmentation import (
    SegmentationCache,
    SegmentationTable,
    count_segmentations,
    enumerate_segmentations,
    random_tokenize_text,
    sample_segmentation,
)
from .sft import SFT_MODES, SftRecord, format_sft
from .tasks import (
    TASK_KINDS,
    TaskExample,
    build_probe,
    gen_acronyms,
    gen_arithmetic,
    gen_count_chars,
    gen_misspelling,
    grade,
    grade_acronym,
    grade_choice_letter,
    grade_last_number,
)
from .tokenizer import (
    MergeRules,
    TokenSequence,
    Tokenizer,
    Vocabulary,
    decode,
    decode_bytes,
    encode_canonical,
    load_tokenizer,
)

__all__ = [
    "KERNEL_BACKEND",
    "GrammarProviderError",
    "NoSegmentationError",
    "RetokError",
    "SftFormatError",
    "TokenizerFileError",
    "UncoverableTextError",
    "UnknownTokenIdError",
    "MetricReport",
    "grammaticality_score",
    "load_probe_words",
    "load_wordlist",
    "retention",
    "spelling_score",
    "PretokConfig",
    "PretokenSpan",
    "pretokenize",
    "GranularityRecord",
    "SchemeConfig",
    "apply_scheme",
    "bucket_by_ratio",
    "char_tokenize",
    "digits_right_encode",
    "dropout_encode",
    "length_ratio",
    "SegmentationCache",
    "SegmentationTable",
    "count_segmentations",
    "enumerate_segmentations",
    "random_tokenize_text",
    "sample_segmentation",
    "SFT_MODES",
    "SftRecord",
    "format_sft",
    "TASK_KINDS",
    "TaskExample",
    "build_probe",
    "gen_acronyms",
    "gen_arithmetic",
    "gen_count_chars",
    "gen_misspelling",
    "grade",
    "grade_acronym",
    "grade_choice_letter",
    "grade_last_number",
    "MergeRules",
    "TokenSequence",
    "Tokenizer",
    "Vocabulary",
    "decode",
    "decode_bytes",
    "encode_canonical",
    "load_tokenizer",
]
