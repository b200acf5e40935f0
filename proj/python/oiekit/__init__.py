"""Open information extraction toolkit.

Codecs for triple and TANL strings, BIO conversion, subsumption filtering,
a tuple-matching scorer, and the tag-embedding composition kernels.
"""

from ._oiekit import (
    AlignmentMismatch,
    DegenerateTuple,
    DimensionMismatch,
    Error,
    ExtractionSet,
    FormatError,
    InvalidConfig,
    LcConfig,
    MalformedBio,
    MissingPredicate,
    TagEmbeddingTable,
    TooLarge,
    Tuple,
    UnknownTag,
    WaConfig,
    add_prefix,
    align_tags,
    bio_row_to_tuple,
    decode_tanl,
    decode_triples,
    encode_tanl,
    encode_triples,
    f1,
    filter_extractions,
    is_subsumed,
    lc_forward,
    make_tuple,
    make_verb_inputs,
    max_assignment,
    merge_verb_outputs,
    pair_match,
    run_gradcheck,
    score_corpus,
    select_semdp_tag,
    strip_prefix,
    verb_positions,
    wa_forward,
)

__all__ = [name for name in dir() if not name.startswith("_")]
