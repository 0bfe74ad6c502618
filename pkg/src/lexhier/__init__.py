"""lexhier: concept discovery from raw text corpora.

Train word embeddings (skip-gram, CBOW, GloVe), cluster domain keywords
agglomeratively, pick the embedding model by cophenetic correlation and
the cluster count by average silhouette, refine clusters into a labeled
concept hierarchy, and classify unseen words into the discovered
concepts.
"""

from .preprocess import RawDocument, Lemmatizer, tokenize, clean, lemmatize, preprocess
from .vocab import (
    CandidateFilterConfig,
    LexiconTagger,
    count_frequencies,
    filter_by_candidates,
    top_k_nouns,
)
from .embedding import (
    EmbeddingMatrix,
    TrainConfig,
    build_cooccurrence,
    build_vocab,
    cosine_distance,
    cosine_similarity,
    train_cbow,
    train_glove,
    train_skipgram,
)
from .cluster import (
    Dendrogram,
    DistanceMatrix,
    agglomerate,
    compare_models,
    cophenetic_coefficient,
    cophenetic_matrix,
    cut,
    pairwise_distances,
)
from .silhouette import KSweepResult, average_silhouette, silhouette_point, sweep_k
from .hierarchy import (
    ClusterReviewFile,
    ConceptTree,
    build_concept_tree,
    classify_lookup,
    export_review,
    import_review,
)
from .classify import (
    EvaluationReport,
    LabeledDataset,
    evaluate,
    split,
    train_knn,
    train_mlp,
    train_random_forest,
)
from .pipeline import PipelineConfig, resume, run_all

__version__ = "0.1.0"

__all__ = [
    "RawDocument",
    "Lemmatizer",
    "tokenize",
    "clean",
    "lemmatize",
    "preprocess",
    "CandidateFilterConfig",
    "LexiconTagger",
    "count_frequencies",
    "filter_by_candidates",
    "top_k_nouns",
    "EmbeddingMatrix",
    "TrainConfig",
    "build_cooccurrence",
    "build_vocab",
    "cosine_distance",
    "cosine_similarity",
    "train_cbow",
    "train_glove",
    "train_skipgram",
    "Dendrogram",
    "DistanceMatrix",
    "agglomerate",
    "compare_models",
    "cophenetic_coefficient",
    "cophenetic_matrix",
    "cut",
    "pairwise_distances",
    "KSweepResult",
    "average_silhouette",
    "silhouette_point",
    "sweep_k",
    "ClusterReviewFile",
    "ConceptTree",
    "build_concept_tree",
    "classify_lookup",
    "export_review",
    "import_review",
    "EvaluationReport",
    "LabeledDataset",
    "evaluate",
    "split",
    "train_knn",
    "train_mlp",
    "train_random_forest",
    "PipelineConfig",
    "resume",
    "run_all",
]
