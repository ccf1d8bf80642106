"""Edit-level GEC evaluation via unbalanced optimal transport."""

from .textspan import (
    Edit,
    EditSet,
    apply_edits,
    apply_edits_excluding,
    detokenize,
    tokenize,
)
from .edit_extract import align, classify_coarse, extract_edits, merge_ops
from .embedder import (
    EmbeddingStore,
    HashEmbedder,
    RemoteEmbedder,
    StoreEmbedder,
    embed,
    load_store,
    save_store,
    token_vector,
)
from .editvec import (
    CostMode,
    MassMode,
    Vectorization,
    cost_matrix,
    edit_vectors,
    intermediate_sentences,
    masses,
)
from .uot import TransportPlan, UotConfig, brute_force_uot, objective, solve_bot, solve_uot
from .scoring import (
    DegenerateCase,
    ScoreConfig,
    SentenceScore,
    corpus_report,
    decompose,
    prf,
    sentence_score_errant,
    sentence_score_uot,
)
from .metaeval import (
    Comparison,
    Outcome,
    SystemRating,
    TrueSkillParams,
    agreement_matrix,
    expected_wins,
    norm_stats_by_type,
    pairwise_outcomes,
    pearson,
    spearman,
    trueskill_rank,
)

__version__ = "0.1.0"
