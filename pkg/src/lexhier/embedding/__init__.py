"""Word-vector training (skip-gram, CBOW, GloVe) and vector-file I/O."""

from .vectors import (
    DimensionMismatch,
    DuplicateToken,
    EmbeddingMatrix,
    MalformedHeader,
    ZeroVector,
    cosine_distance,
    cosine_similarity,
)
from .word2vec import (
    EmptyVocab,
    TrainConfig,
    build_vocab,
    train_cbow,
    train_skipgram,
)
from .glove import (
    CooccurrenceTable,
    EmptyInput,
    build_cooccurrence,
    glove_weight,
    train_glove,
)

__all__ = [
    "DimensionMismatch",
    "DuplicateToken",
    "EmbeddingMatrix",
    "MalformedHeader",
    "ZeroVector",
    "cosine_distance",
    "cosine_similarity",
    "EmptyVocab",
    "TrainConfig",
    "build_vocab",
    "train_cbow",
    "train_skipgram",
    "CooccurrenceTable",
    "EmptyInput",
    "build_cooccurrence",
    "glove_weight",
    "train_glove",
]
