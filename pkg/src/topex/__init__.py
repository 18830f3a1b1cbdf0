"""Extractive opinion summarization over sparse topical representations.

Pipeline: frozen word embeddings (GSEM files) -> multi-layer dictionary
learning -> non-negative unit-L1 sentence representations -> kNN-graph
geodesic importance -> top-q sentence selection, with built-in ROUGE
evaluation and clustering/ablation analysis.
"""

from .analysis import ClusterAssignment, compare_scorers, ward_clustering
from .corpus import (
    AspectLexicon,
    Corpus,
    Entity,
    Review,
    Sentence,
    load_aspect_lexicons,
    load_corpus,
    match_aspect_sentences,
    save_corpus,
    tokenize,
)
from .dict_learning import (
    AdamState,
    DictionaryLayer,
    LayerGrads,
    LossBreakdown,
    ModelState,
    TrainConfig,
    adam_step,
    dict_loss,
    dict_loss_gradients,
    init_layer,
    init_model,
    kernel_forward,
    load_checkpoint,
    reconstruct,
    save_checkpoint,
    train,
)
from .embeddings import (
    EmbeddingStore,
    RepStore,
    read_embedding_file,
    read_rep_file,
    write_embedding_file,
    write_rep_file,
)
from .errors import (
    ConfigError,
    DegenerateSentenceError,
    DuplicateReviewError,
    FormatError,
    ParseError,
    ShapeError,
    TopexError,
    TrainingError,
    TruncatedFileError,
    ValidationError,
)
from .representations import (
    TopicalRep,
    corpus_representations,
    entity_representations,
    mean_representation,
    sentence_representation,
    sparsity_profile,
    word_representation,
)
from .rouge import RougeScore, evaluate_run, rouge_l, rouge_n
from .selection import (
    INF_SENTINEL,
    ImportanceResult,
    KnnGraph,
    aspect_scores,
    aspect_summary,
    build_knn_graph,
    cosine_distance,
    dijkstra,
    euclidean_importance,
    general_summary,
    importance_scores,
    shortest_paths_from_mean,
    top_q_by_score,
)

__version__ = "0.1.0"
