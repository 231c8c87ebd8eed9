"""guiscout: requirements self-elicitation over a GUI corpus.

Rank GUIs from a corpus against natural-language requirements, match
feature descriptions to individual GUI components, recommend further
features via a pluggable LLM provider, rerank on confirmed feedback, and
export a GUI-prototype requirements artifact.
"""

from .corpus import (
    CorpusIndex,
    FilterReport,
    FilterRules,
    GuiComponent,
    GuiDocument,
    component_text_candidates,
    filter_corpus,
    flatten_hierarchy_for_prompt,
    gui_full_text,
    load_corpus,
    write_corpus,
)
from .embedding import (
    DeterministicHashEmbedder,
    EmbeddingCache,
    EmbeddingProviderConfig,
    EmbeddingVector,
    RemoteHttpEmbedder,
    cosine,
    create_embedder,
    embed_corpus,
)
from .errors import (
    ConfigError,
    CorpusSourceError,
    GuiScoutError,
    NotFoundError,
    ProviderFormatError,
    ProviderTransportError,
    QueryError,
    SelectionError,
    StateConflictError,
)
from .feature_match import (
    AspectGui,
    FeatureOrigin,
    FeatureQuery,
    FeatureStatus,
    rank_aspect_guis,
    score_feature_component,
    score_feature_gui,
)
from .metrics import (
    AnnotationRecord,
    MetricsReport,
    average_precision,
    evaluate_run,
    hits_at_k,
    mean_average_precision,
    mrr,
    precision_at_k,
)
from .ranking import (
    RankedGui,
    RankingConfig,
    ensemble_score,
    rank_guis,
    rerank,
    score_s1,
    score_s2,
)
from .recommend import (
    FeatureRecommendation,
    LlmProviderConfig,
    RecommendationRequest,
    RemoteHttpLlmProvider,
    ScriptedLlmProvider,
    build_explanation_prompt,
    build_recommendation_prompt,
    create_llm_provider,
    parse_feature_list,
    recommend_features,
    score_predicted_feature,
)
from .session import (
    GuiSlot,
    PrototypeArtifact,
    SessionConfig,
    SessionEngine,
    SessionState,
    SessionStore,
    SlotPhase,
    replay_events,
    summary_markdown,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
