"""Bug-fix pair datasets: filtering, bucketing, splitting and synthesis."""
from .bundle import DatasetBundle, dedup, dedup_and_split, read_bundle, split_sizes, write_bundle
from .extract import MethodPair, extract_method_pairs, read_method_pairs, write_method_pairs
from .pairs import (
    DEFAULT_CAP,
    MAX_ACTIONS,
    REJECT_REASONS,
    BugFixPair,
    Candidate,
    Verdict,
    bucket,
    build_pairs,
    filter_pair,
    make_candidate,
    to_pair,
)
from .synthetic import MUTATIONS, generate_synthetic_corpus, synthesize_method_pair
from .vocab import SPECIALS, OutOfVocabulary, Vocabulary

__all__ = [
    "DatasetBundle", "dedup", "dedup_and_split", "read_bundle", "split_sizes", "write_bundle",
    "DEFAULT_CAP", "MAX_ACTIONS", "REJECT_REASONS", "BugFixPair", "Candidate", "Verdict",
    "bucket", "build_pairs", "filter_pair", "make_candidate", "to_pair", "MUTATIONS",
    "generate_synthetic_corpus", "synthesize_method_pair", "SPECIALS", "OutOfVocabulary",
    "Vocabulary", "MethodPair", "extract_method_pairs", "read_method_pairs", "write_method_pairs",
]
